#include "jacobi/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "jacobi/distributions.hpp"

namespace jacobi {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::one_sample: return "one-sample";
    case Mode::bipartite: return "bipartite";
    case Mode::reference_proxy: return "reference-proxy";
  }
  throw std::logic_error("to_string(Mode)");
}

std::string to_string(Scaling scaling) {
  return scaling == Scaling::n ? "n" : "n_over_log_n";
}

Mode mode_from_string(const std::string& s) {
  if (s == "one-sample") return Mode::one_sample;
  if (s == "bipartite") return Mode::bipartite;
  if (s == "reference-proxy") return Mode::reference_proxy;
  throw std::invalid_argument("unknown mode: " + s);
}

Scaling scaling_from_string(const std::string& s) {
  if (s == "n") return Scaling::n;
  if (s == "n_over_log_n") return Scaling::n_over_log_n;
  throw std::invalid_argument("unknown scaling: " + s);
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("config: n_grid must be nonempty");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw std::invalid_argument("config: n_grid must be strictly ascending");
  }
  if (n_grid.front() < 1) throw std::invalid_argument("config: n must be >= 1");
  if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
  if (mode == Mode::one_sample && is_product()) {
    throw std::invalid_argument("config: one-sample mode requires a 1-D model");
  }
  if (mode == Mode::reference_proxy && ref_factor < 1) {
    throw std::invalid_argument("config: ref_factor must be >= 1");
  }
  if (is_product() && std::get<ProductJacobiParams>(model).size() != 2) {
    throw std::invalid_argument("config: experiment CSV schema supports exactly two factors");
  }
  if (quad.order < 2) throw std::invalid_argument("config: quad order must be >= 2");
}

namespace {

nlohmann::json model_to_json(const std::variant<JacobiParams, ProductJacobiParams>& model) {
  if (std::holds_alternative<JacobiParams>(model)) {
    const auto& p = std::get<JacobiParams>(model);
    return {{"alpha", p.alpha()}, {"beta", p.beta()}};
  }
  const auto& prod = std::get<ProductJacobiParams>(model);
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : prod.factors()) {
    factors.push_back({{"alpha", f.alpha()}, {"beta", f.beta()}});
  }
  return {{"factors", factors}};
}

std::variant<JacobiParams, ProductJacobiParams> model_from_json(const nlohmann::json& j) {
  if (j.contains("factors")) {
    std::vector<JacobiParams> factors;
    for (const auto& f : j.at("factors")) {
      factors.emplace_back(f.at("alpha").get<double>(), f.at("beta").get<double>());
    }
    return ProductJacobiParams(std::move(factors));
  }
  return JacobiParams(j.at("alpha").get<double>(), j.at("beta").get<double>());
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return it.key() == k; }) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"model", "mode", "n_grid", "replicas", "base_seed", "scaling", "quad",
                          "output_path", "ref_factor", "arcsine_shortcut", "record_wall_time"});
  ExperimentConfig cfg;
  cfg.model = model_from_json(j.at("model"));
  cfg.mode = mode_from_string(j.at("mode").get<std::string>());
  cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  cfg.replicas = j.at("replicas").get<std::size_t>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("scaling")) cfg.scaling = scaling_from_string(j.at("scaling").get<std::string>());
  if (j.contains("quad")) {
    reject_unknown_keys(j.at("quad"), {"order", "refine_tol"});
    cfg.quad.order = j.at("quad").value("order", std::size_t{8});
    if (j.at("quad").contains("refine_tol")) {
      cfg.quad.refine_tol = j.at("quad").at("refine_tol").get<double>();
    }
  }
  if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
  if (j.contains("ref_factor")) cfg.ref_factor = j.at("ref_factor").get<std::size_t>();
  if (j.contains("arcsine_shortcut")) cfg.arcsine_shortcut = j.at("arcsine_shortcut").get<bool>();
  if (j.contains("record_wall_time")) {
    cfg.record_wall_time = j.at("record_wall_time").get<bool>();
  }
  cfg.validate();
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"model", model_to_json(model)},
                   {"mode", to_string(mode)},
                   {"n_grid", n_grid},
                   {"replicas", replicas},
                   {"base_seed", base_seed},
                   {"scaling", to_string(scaling)},
                   {"quad", {{"order", quad.order}}},
                   {"output_path", output_path},
                   {"ref_factor", ref_factor},
                   {"arcsine_shortcut", arcsine_shortcut},
                   {"record_wall_time", record_wall_time}};
  if (quad.refine_tol) j["quad"]["refine_tol"] = *quad.refine_tol;
  return j;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t replica) {
  return derive_replica_seed(derive_replica_seed(base_seed, n), replica);
}

namespace {

double one_replica_value(const ExperimentConfig& cfg, std::size_t n, RngState& rng) {
  const SampleOptions opts{cfg.arcsine_shortcut};
  switch (cfg.mode) {
    case Mode::one_sample: {
      const auto& p = std::get<JacobiParams>(cfg.model);
      return w2sq_empirical_vs_measure_1d(sample(p, rng, n, opts), p, cfg.quad);
    }
    case Mode::bipartite: {
      if (!cfg.is_product()) {
        const auto& p = std::get<JacobiParams>(cfg.model);
        EmpiricalSample a = sample(p, rng, n, opts);
        EmpiricalSample b = sample(p, rng, n, opts);
        // Monotone rearrangement is exact on the line; the assignment
        // solver route is cross-checked against it in the test suite.
        return w2sq_sorted_1d(a, b);
      }
      const auto& p = std::get<ProductJacobiParams>(cfg.model);
      ProductEmpiricalSample a = sample(p, rng, n, opts);
      ProductEmpiricalSample b = sample(p, rng, n, opts);
      return w2sq_bipartite(a, b);
    }
    case Mode::reference_proxy: {
      if (!cfg.is_product()) {
        const auto& p = std::get<JacobiParams>(cfg.model);
        EmpiricalSample a = sample(p, rng, n, opts);
        EmpiricalSample ref = sample(p, rng, n * cfg.ref_factor, opts);
        return w2sq_vs_reference(a, ref).w2sq;
      }
      const auto& p = std::get<ProductJacobiParams>(cfg.model);
      ProductEmpiricalSample a = sample(p, rng, n, opts);
      ProductEmpiricalSample ref = sample(p, rng, n * cfg.ref_factor, opts);
      return w2sq_vs_reference(a, ref).w2sq;
    }
  }
  throw std::logic_error("one_replica_value: unreachable");
}

}  // namespace

std::vector<ExperimentRecord> run_replicas(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  struct Task {
    std::size_t n;
    std::size_t replica;
  };
  std::vector<Task> tasks;
  tasks.reserve(config.n_grid.size() * config.replicas);
  for (std::size_t n : config.n_grid) {
    for (std::size_t r = 0; r < config.replicas; ++r) tasks.push_back({n, r});
  }

  std::vector<ExperimentRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const Task& task = tasks[idx];
      ExperimentRecord& rec = records[idx];
      rec.n = task.n;
      rec.replica_index = task.replica;
      rec.seed = derive_seed(config.base_seed, task.n, task.replica);
      RngState rng(rec.seed);
      const auto start = std::chrono::steady_clock::now();
      try {
        rec.w2sq = one_replica_value(config, task.n, rng);
        rec.status = "ok";
      } catch (const std::exception& e) {
        rec.w2sq = std::numeric_limits<double>::quiet_NaN();
        rec.status = std::string("failed:") + e.what();
      }
      if (config.record_wall_time) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      }
    }
  };

  unsigned count = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  count = std::min<unsigned>(count, static_cast<unsigned>(tasks.size()));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

std::vector<ConstantEstimate> estimate_constant(std::span<const ExperimentRecord> records,
                                                Scaling scaling) {
  std::vector<std::size_t> ns;
  for (const auto& r : records) {
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  }
  std::sort(ns.begin(), ns.end());

  std::vector<ConstantEstimate> out;
  for (std::size_t n : ns) {
    ConstantEstimate est;
    est.n = n;
    double sum = 0.0;
    std::vector<double> vals;
    for (const auto& r : records) {
      if (r.n != n) continue;
      if (!r.ok()) {
        ++est.failures;
        continue;
      }
      vals.push_back(r.w2sq);
      sum += r.w2sq;
    }
    est.replicas = vals.size();
    if (vals.size() < 2) {
      throw std::invalid_argument("estimate_constant: fewer than 2 successful replicas at n=" +
                                  std::to_string(n));
    }
    est.mean = sum / static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - est.mean) * (v - est.mean);
    const double var = ss / static_cast<double>(vals.size() - 1);
    est.stderr_mean = std::sqrt(var / static_cast<double>(vals.size()));
    const double nn = static_cast<double>(n);
    const double factor = (scaling == Scaling::n) ? nn : nn / std::log(nn);
    est.scaled_mean = factor * est.mean;
    est.scaled_stderr = factor * est.stderr_mean;
    out.push_back(est);
  }
  return out;
}

RateFit fit_log_rate(std::span<const ConstantEstimate> per_n) {
  if (per_n.size() < 3) throw std::invalid_argument("fit_log_rate: need >= 3 grid points");
  std::vector<std::size_t> distinct;
  for (const auto& e : per_n) {
    if (std::find(distinct.begin(), distinct.end(), e.n) == distinct.end()) {
      distinct.push_back(e.n);
    }
  }
  if (distinct.size() < 2) throw std::invalid_argument("fit_log_rate: degenerate design matrix");

  // Normal equations for y ~ a * log n / n + b / n.
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, sy1 = 0.0, sy2 = 0.0;
  for (const auto& e : per_n) {
    const double nn = static_cast<double>(e.n);
    const double x1 = std::log(nn) / nn;
    const double x2 = 1.0 / nn;
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    sy1 += x1 * e.mean;
    sy2 += x2 * e.mean;
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(std::fabs(det) > 1e-300)) {
    throw std::invalid_argument("fit_log_rate: degenerate design matrix");
  }
  RateFit fit;
  fit.a = (s22 * sy1 - s12 * sy2) / det;
  fit.b = (s11 * sy2 - s12 * sy1) / det;
  double rss = 0.0;
  for (const auto& e : per_n) {
    const double nn = static_cast<double>(e.n);
    const double pred = fit.a * std::log(nn) / nn + fit.b / nn;
    rss += (e.mean - pred) * (e.mean - pred);
  }
  fit.residual = rss;
  const double dof = static_cast<double>(per_n.size()) - 2.0;
  const double sigma2 = dof > 0.0 ? rss / dof : 0.0;
  fit.stderr_a = std::sqrt(sigma2 * s22 / det);
  return fit;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

void write_csv(std::ostream& out, const ExperimentConfig& config,
               std::span<const ExperimentRecord> records) {
  out << "model,mode,alpha,beta,alpha2,beta2,n,replica,seed,w2sq,wall_ms,status\n";
  std::string model_name, alpha, beta, alpha2, beta2;
  if (config.is_product()) {
    const auto& p = std::get<ProductJacobiParams>(config.model);
    model_name = "product";
    alpha = format_double(p.factor(0).alpha());
    beta = format_double(p.factor(0).beta());
    alpha2 = format_double(p.factor(1).alpha());
    beta2 = format_double(p.factor(1).beta());
  } else {
    const auto& p = std::get<JacobiParams>(config.model);
    model_name = "jacobi";
    alpha = format_double(p.alpha());
    beta = format_double(p.beta());
  }
  const std::string mode = to_string(config.mode);
  for (const auto& r : records) {
    out << model_name << ',' << mode << ',' << alpha << ',' << beta << ',' << alpha2 << ','
        << beta2 << ',' << r.n << ',' << r.replica_index << ',' << r.seed << ','
        << (r.ok() ? format_double(r.w2sq) : std::string()) << ','
        << (config.record_wall_time ? format_double(r.wall_ms) : std::string("0")) << ','
        << sanitize(r.status) << '\n';
  }
}

nlohmann::json aggregate_json(const ExperimentConfig& config,
                              std::span<const ExperimentRecord> records) {
  const auto per_n = estimate_constant(records, config.scaling);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : per_n) {
    rows.push_back({{"n", e.n},
                    {"mean", e.mean},
                    {"stderr", e.stderr_mean},
                    {"scaled_mean", e.scaled_mean},
                    {"scaled_stderr", e.scaled_stderr}});
  }
  nlohmann::json j{{"per_n", rows}};
  if (config.scaling == Scaling::n_over_log_n && per_n.size() >= 3) {
    const RateFit fit = fit_log_rate(per_n);
    j["fit"] = {{"a", fit.a}, {"b", fit.b}, {"stderr_a", fit.stderr_a},
                {"residual", fit.residual}};
  }
  return j;
}

}  // namespace jacobi
