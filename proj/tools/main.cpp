// Command-line front end: pointwise evaluations, single computations and
// full experiment runs. JSON on stdout by default, CSV with --format csv;
// diagnostics go to stderr. Exit codes: 0 success, 1 numerical failure,
// 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "jacobi/distributions.hpp"
#include "jacobi/experiments.hpp"
#include "jacobi/metric.hpp"
#include "jacobi/quadrature.hpp"
#include "jacobi/spectral.hpp"
#include "jacobi/transport.hpp"

namespace {

using nlohmann::json;

void emit(const json& j, const std::string& format) {
  if (format == "csv") {
    std::string header, row;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        header += ',';
        row += ',';
      }
      first = false;
      header += it.key();
      row += it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    }
    std::cout << header << '\n' << row << '\n';
  } else {
    std::cout << j.dump() << '\n';
  }
}

struct ParamFlags {
  double d = 0.0;
  double alpha = 0.0, beta = 0.0;
  double alpha2 = 0.0, beta2 = 0.0, d2 = 0.0;
  CLI::Option* od = nullptr;
  CLI::Option* oalpha = nullptr;
  CLI::Option* obeta = nullptr;
  CLI::Option* oalpha2 = nullptr;
  CLI::Option* obeta2 = nullptr;
  CLI::Option* od2 = nullptr;

  void add_to(CLI::App* cmd, bool with_second = false) {
    od = cmd->add_option("--d", d, "symmetric dimension (alpha = beta = d/2)");
    oalpha = cmd->add_option("--alpha", alpha);
    obeta = cmd->add_option("--beta", beta);
    if (with_second) {
      oalpha2 = cmd->add_option("--alpha2", alpha2);
      obeta2 = cmd->add_option("--beta2", beta2);
      od2 = cmd->add_option("--d2", d2, "symmetric dimension of the second factor");
    }
  }

  jacobi::JacobiParams first() const {
    const bool has_d = od->count() > 0;
    const bool has_ab = oalpha->count() > 0 || obeta->count() > 0;
    if (has_d && has_ab) throw CLI::ValidationError("pass either --d or --alpha/--beta");
    if (has_d) return jacobi::JacobiParams::symmetric(d);
    if (oalpha->count() > 0 && obeta->count() > 0) return {alpha, beta};
    throw CLI::ValidationError("model parameters required (--d or --alpha --beta)");
  }

  std::optional<jacobi::JacobiParams> second() const {
    const bool has_ab2 =
        (oalpha2 && oalpha2->count() > 0) || (obeta2 && obeta2->count() > 0);
    const bool has_d2 = od2 && od2->count() > 0;
    if (has_ab2 && has_d2) throw CLI::ValidationError("pass either --d2 or --alpha2/--beta2");
    if (has_d2) return jacobi::JacobiParams::symmetric(d2);
    if (!has_ab2) return std::nullopt;
    if (!(oalpha2->count() > 0 && obeta2->count() > 0)) {
      throw CLI::ValidationError("need both --alpha2 and --beta2");
    }
    return jacobi::JacobiParams(alpha2, beta2);
  }
};

int run(int argc, char** argv) {
  CLI::App app{"numerical laboratory for optimal matching on Jacobi measures"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

  // dist
  auto* dist = app.add_subcommand("dist", "intrinsic distance |arccos x - arccos y|");
  double dx = 0.0, dy = 0.0;
  dist->add_option("--x", dx)->required();
  dist->add_option("--y", dy)->required();

  // kernel
  auto* kernel = app.add_subcommand("kernel", "heat kernel p_t(x,y)");
  ParamFlags kernel_params;
  kernel_params.add_to(kernel);
  double kt = 0.0, kx = 0.0, ky = 0.0;
  kernel->add_option("--t", kt)->required();
  kernel->add_option("--x", kx)->required();
  kernel->add_option("--y", ky)->required();

  // trace
  auto* trace = app.add_subcommand("trace", "spectral trace at time s");
  ParamFlags trace_params;
  trace_params.add_to(trace, /*with_second=*/true);
  double ts = 0.0;
  bool check_asymptotic = false;
  trace->add_option("--s", ts)->required();
  trace->add_flag("--check-asymptotic", check_asymptotic,
                  "also report the deviation from the small-s limit");

  // constant
  auto* constant = app.add_subcommand("constant", "limiting constant S(d)");
  double cd = 0.0, ctol = 1e-12;
  constant->add_option("--d", cd)->required();
  constant->add_option("--tol", ctol);

  // w2
  auto* w2 = app.add_subcommand("w2", "one matching-cost computation");
  ParamFlags w2_params;
  w2_params.add_to(w2, /*with_second=*/true);
  std::string w2_mode = "one-sample";
  std::size_t w2_n = 0, w2_ref_factor = 100, w2_order = 8;
  std::uint64_t w2_seed = 0;
  w2->add_option("--mode", w2_mode)
      ->check(CLI::IsMember({"one-sample", "bipartite", "reference-proxy"}));
  w2->add_option("--n", w2_n)->required();
  w2->add_option("--seed", w2_seed);
  w2->add_option("--ref-factor", w2_ref_factor);
  w2->add_option("--quad-order", w2_order);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a config-driven Monte Carlo experiment");
  std::string config_path;
  unsigned threads = 0;
  experiment->add_option("--config", config_path, "JSON config file")->required();
  experiment->add_option("--threads", threads, "worker threads (default: machine parallelism)");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  if (dist->parsed()) {
    emit({{"rho", jacobi::intrinsic_distance(dx, dy)}}, format);
    return 0;
  }

  if (kernel->parsed()) {
    jacobi::HeatKernelModel model(kernel_params.first());
    emit({{"t", kt}, {"x", kx}, {"y", ky}, {"p", model.heat_kernel(kt, kx, ky)}}, format);
    return 0;
  }

  if (trace->parsed()) {
    const jacobi::JacobiParams first = trace_params.first();
    const auto second = trace_params.second();
    json out{{"s", ts}};
    if (second) {
      jacobi::HeatKernelModel model(jacobi::ProductJacobiParams(first, *second));
      out["trace"] = model.trace(ts);
      if (check_asymptotic) out["deviation"] = model.trace_asymptotic_deviation(ts);
    } else {
      jacobi::HeatKernelModel model(first);
      out["trace"] = model.trace(ts);
      if (check_asymptotic) out["deviation"] = model.trace_asymptotic_deviation(ts);
    }
    emit(out, format);
    return 0;
  }

  if (constant->parsed()) {
    emit({{"S", jacobi::spectral_constant(cd, ctol)}}, format);
    return 0;
  }

  if (w2->parsed()) {
    const jacobi::JacobiParams first = w2_params.first();
    const auto second = w2_params.second();
    jacobi::ExperimentConfig cfg;
    if (second) {
      cfg.model = jacobi::ProductJacobiParams(first, *second);
    } else {
      cfg.model = first;
    }
    cfg.mode = jacobi::mode_from_string(w2_mode);
    cfg.n_grid = {w2_n};
    cfg.replicas = 1;
    cfg.base_seed = w2_seed;
    cfg.ref_factor = w2_ref_factor;
    cfg.quad.order = w2_order;
    const auto records = jacobi::run_replicas(cfg, 1);
    if (!records.front().ok()) throw std::runtime_error(records.front().status);
    emit({{"mode", w2_mode},
          {"n", w2_n},
          {"seed", records.front().seed},
          {"w2sq", records.front().w2sq}},
         format);
    return 0;
  }

  if (experiment->parsed()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    json config_json = json::parse(in);
    const auto cfg = jacobi::ExperimentConfig::from_json(config_json);
    const auto records = jacobi::run_replicas(cfg, threads);
    if (!cfg.output_path.empty()) {
      std::ofstream csv(cfg.output_path, std::ios::binary);
      if (!csv) throw std::runtime_error("cannot open output path: " + cfg.output_path);
      jacobi::write_csv(csv, cfg, records);
    }
    const json aggregate = jacobi::aggregate_json(cfg, records);
    if (format == "csv") {
      std::cout << "n,mean,stderr,scaled_mean,scaled_stderr\n";
      for (const auto& row : aggregate.at("per_n")) {
        std::cout << row.at("n") << ',' << row.at("mean").dump() << ','
                  << row.at("stderr").dump() << ',' << row.at("scaled_mean").dump() << ','
                  << row.at("scaled_stderr").dump() << '\n';
      }
    } else {
      std::cout << aggregate.dump() << '\n';
    }
    std::size_t failures = 0;
    for (const auto& r : records) {
      if (!r.ok()) ++failures;
    }
    if (failures > 0) {
      std::cerr << failures << " replica(s) failed\n";
      return 1;
    }
    return 0;
  }

  if (selftest->parsed()) {
    json checks = json::array();
    bool all = true;
    const auto check = [&](const std::string& name, bool pass) {
      checks.push_back({{"name", name}, {"pass", pass}});
      all = all && pass;
    };

    // Assignment solver vs exhaustive search on random instances.
    {
      std::mt19937_64 gen(12345);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      bool ok = true;
      for (int rep = 0; rep < 20; ++rep) {
        jacobi::CostMatrix c(6);
        for (std::size_t i = 0; i < 6; ++i) {
          for (std::size_t j = 0; j < 6; ++j) c(i, j) = unif(gen);
        }
        const double exact = jacobi::brute_force_assignment(c).total_cost;
        const double solved = jacobi::solve_assignment(c).total_cost;
        ok = ok && std::fabs(exact - solved) < 1e-12;
      }
      check("assignment_vs_brute_force", ok);
    }

    // cdf/quantile round trip.
    {
      bool ok = true;
      for (double a : {0.5, 1.0, 2.0}) {
        for (double b : {0.5, 1.0, 2.0}) {
          const jacobi::JacobiParams p(a, b);
          for (double u = 0.1; u < 0.95; u += 0.2) {
            ok = ok && std::fabs(jacobi::cdf(p, jacobi::quantile(p, u)) - u) < 1e-12;
          }
        }
      }
      check("cdf_quantile_round_trip", ok);
    }

    // Heat-kernel mass conservation at a spot check.
    {
      const jacobi::JacobiParams p(0.75, 0.75);
      jacobi::HeatKernelModel model(p);
      const auto& rule = jacobi::gauss_jacobi_rule(p, 256);
      double mass = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        mass += rule.weights[i] * model.heat_kernel(0.1, 0.3, rule.nodes[i]);
      }
      check("heat_kernel_mass_conservation", std::fabs(mass - 1.0) < 1e-8);
    }

    emit({{"checks", checks}, {"all_pass", all}}, "json");
    return all ? 0 : 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error&) {
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
