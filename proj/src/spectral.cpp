#include "jacobi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "jacobi/metric.hpp"
#include "jacobi/quadrature.hpp"

namespace jacobi {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kCoeffTable = 2048;

double integrate_gl(const std::function<double(double)>& f, double lo, double hi,
                    std::size_t order) {
  const GaussRule rule = gauss_legendre_rule(order);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double integrate_doubling(const std::function<double(double)>& f, double lo, double hi,
                          double tol, std::size_t order0, std::size_t order_max,
                          const char* what) {
  double prev = integrate_gl(f, lo, hi, order0);
  for (std::size_t order = 2 * order0; order <= order_max; order *= 2) {
    const double cur = integrate_gl(f, lo, hi, order);
    if (std::fabs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw std::runtime_error(std::string(what) + ": quadrature did not converge");
}

}  // namespace

double eigenvalue(const JacobiParams& params, std::size_t k) {
  const double kk = static_cast<double>(k);
  return kk * (kk + params.dim() - 1.0);
}

double spectral_constant(double d, double tol) {
  if (!(d >= 1.0)) throw std::invalid_argument("spectral_constant: requires d >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_constant: tol must be positive");
  const double c = d - 1.0;

  // Partial sum plus an Euler-Maclaurin tail; the neglected remainder is
  // O(K^-5), kept below tol.
  std::size_t cutoff = 2000;
  while (std::pow(static_cast<double>(cutoff), -5.0) > 0.5 * tol && cutoff < (1u << 20)) {
    cutoff *= 2;
  }
  double sum = 0.0;
  for (std::size_t k = cutoff; k >= 1; --k) {
    const double kk = static_cast<double>(k);
    sum += 1.0 / (kk * (kk + c));
  }
  const double a = static_cast<double>(cutoff) + 1.0;
  const double integral = (c > 1e-12) ? std::log1p(c / a) / c : 1.0 / a - c / (2.0 * a * a);
  const double f_a = 1.0 / (a * (a + c));
  const double fp_a = -(2.0 * a + c) / (a * a * (a + c) * (a + c));
  return sum + integral + 0.5 * f_a - fp_a / 12.0;
}

HeatKernelModel::HeatKernelModel(const JacobiParams& params, TruncationPolicy policy)
    : policy_(policy) {
  if (policy_.k_min > policy_.k_max) {
    throw std::invalid_argument("TruncationPolicy: k_min > k_max");
  }
  if (!(policy_.term_tol > 0.0)) throw std::invalid_argument("TruncationPolicy: term_tol <= 0");
  Factor f{params, {}, {}};
  f.a_tab.reserve(kCoeffTable);
  f.sb_tab.assign(1, 0.0);  // index 0 unused
  for (std::size_t k = 0; k < kCoeffTable; ++k) {
    f.a_tab.push_back(recurrence::monic_a(params, k));
    if (k >= 1) f.sb_tab.push_back(std::sqrt(recurrence::monic_b(params, k)));
  }
  factors_.push_back(std::move(f));
}

HeatKernelModel::HeatKernelModel(const ProductJacobiParams& params, TruncationPolicy policy)
    : HeatKernelModel(params.factor(0), policy) {
  for (std::size_t j = 1; j < params.size(); ++j) {
    HeatKernelModel other(params.factor(j), policy);
    factors_.push_back(std::move(other.factors_.front()));
  }
}

// Coefficient accessors fall back to the closed form beyond the precomputed
// table; both paths are pure, so concurrent reads stay safe.
static double coeff_a(const JacobiParams& p, const std::vector<double>& tab, std::size_t k) {
  return k < tab.size() ? tab[k] : recurrence::monic_a(p, k);
}

static double coeff_sb(const JacobiParams& p, const std::vector<double>& tab, std::size_t k) {
  return k < tab.size() ? tab[k] : std::sqrt(recurrence::monic_b(p, k));
}

double HeatKernelModel::basis_eval(std::size_t k, double x) const {
  if (is_product()) throw std::invalid_argument("basis_eval: 1-D models only");
  if (!(x >= -1.0 - 1e-12 && x <= 1.0 + 1e-12)) {
    throw std::invalid_argument("basis_eval: x outside [-1,1]");
  }
  x = clamp_unit(x);
  const Factor& f = factors_.front();
  double prev = 0.0, cur = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double a = coeff_a(f.params, f.a_tab, j);
    const double sb = (j >= 1) ? coeff_sb(f.params, f.sb_tab, j) : 0.0;
    const double sb1 = coeff_sb(f.params, f.sb_tab, j + 1);
    const double next = ((x - a) * cur - sb * prev) / sb1;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// The four recurrence streams needed by one kernel evaluation: values at x,
// y and at the endpoints +-1, where |J_k| attains its maximum for
// alpha, beta >= 1/2 (the endpoint values serve as a rigorous term bound).
struct KernelStreams {
  double x[4];
  double prev[4] = {0.0, 0.0, 0.0, 0.0};
  double cur[4] = {1.0, 1.0, 1.0, 1.0};

  KernelStreams(double xx, double yy) : x{xx, yy, 1.0, -1.0} {}

  void advance(const JacobiParams& p, const std::vector<double>& a_tab,
               const std::vector<double>& sb_tab, std::size_t j) {
    const double a = coeff_a(p, a_tab, j);
    const double sb = (j >= 1) ? coeff_sb(p, sb_tab, j) : 0.0;
    const double sb1 = coeff_sb(p, sb_tab, j + 1);
    for (int s = 0; s < 4; ++s) {
      const double next = ((x[s] - a) * cur[s] - sb * prev[s]) / sb1;
      prev[s] = cur[s];
      cur[s] = next;
    }
  }

  double envelope() const { return std::max(std::fabs(cur[2]), std::fabs(cur[3])); }
};

}  // namespace

static double factor_heat_kernel(const JacobiParams& params, const std::vector<double>& a_tab,
                                 const std::vector<double>& sb_tab,
                                 const TruncationPolicy& pol, double t, double x, double y) {
  KernelStreams st(clamp_unit(x), clamp_unit(y));
  double sum = 1.0;  // k = 0 term
  for (std::size_t k = 0;; ++k) {
    st.advance(params, a_tab, sb_tab, k);
    const std::size_t kk = k + 1;
    const double lambda = static_cast<double>(kk) * (static_cast<double>(kk) + params.dim() - 1.0);
    const double damp = std::exp(-lambda * t);
    // Grouping the basis product first keeps p_t(x,y) bitwise symmetric.
    sum += damp * (st.cur[0] * st.cur[1]);
    const double env = st.envelope();
    if (kk >= pol.k_min && damp * env * env < pol.term_tol) break;
    if (kk >= pol.k_max) throw std::runtime_error("heat_kernel: truncation failure (k_max reached)");
  }
  return sum;
}

double HeatKernelModel::heat_kernel(double t, double x, double y) const {
  if (is_product()) throw std::invalid_argument("heat_kernel(t,x,y): 1-D models only");
  if (!(t >= policy_.t_min)) throw std::invalid_argument("heat_kernel: t below policy t_min");
  if (!(x >= -1.0 - 1e-12 && x <= 1.0 + 1e-12) || !(y >= -1.0 - 1e-12 && y <= 1.0 + 1e-12)) {
    throw std::invalid_argument("heat_kernel: point outside [-1,1]");
  }
  const Factor& f = factors_.front();
  return factor_heat_kernel(f.params, f.a_tab, f.sb_tab, policy_, t, x, y);
}

double HeatKernelModel::heat_kernel(double t, std::span<const double> x,
                                    std::span<const double> y) const {
  if (x.size() != factors_.size() || y.size() != factors_.size()) {
    throw std::invalid_argument("heat_kernel: point dimension mismatch");
  }
  if (!(t >= policy_.t_min)) throw std::invalid_argument("heat_kernel: t below policy t_min");
  double prod = 1.0;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const Factor& f = factors_[j];
    prod *= factor_heat_kernel(f.params, f.a_tab, f.sb_tab, policy_, t, x[j], y[j]);
  }
  return prod;
}

double HeatKernelModel::factor_trace(const Factor& f, double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("trace: s must be positive");
  const double d = f.params.dim();
  double sum = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double kk = static_cast<double>(k);
    const double term = std::exp(-s * kk * (kk + d - 1.0));
    sum += term;
    if (k >= policy_.k_min && term < policy_.term_tol) break;
    if (k >= policy_.k_max) throw std::runtime_error("trace: truncation failure (k_max reached)");
  }
  return sum;
}

double HeatKernelModel::trace(double s) const {
  double prod = 1.0;
  for (const Factor& f : factors_) prod *= factor_trace(f, s);
  return prod;
}

double HeatKernelModel::trace_asymptotic_deviation(double s) const {
  const double k = static_cast<double>(factors_.size());
  return std::pow(s, 0.5 * k) * trace(s) - std::pow(0.5 * std::sqrt(kPi), k);
}

double HeatKernelModel::trace_excess_integral(double lower, double quad_tol) const {
  double lambda_min = eigenvalue(factors_.front().params, 1);
  for (const Factor& f : factors_) lambda_min = std::min(lambda_min, eigenvalue(f.params, 1));
  const double s_end = std::max(1.0, lower) + 45.0 / lambda_min;
  const auto excess = [this](double s) { return trace(s) - 1.0; };

  double total = 0.0;
  if (lower < 1.0) {
    // Substitute s = u^2 on (lower, 1] to remove the 1/sqrt(s) blow-up.
    const auto g = [this](double u) { return 2.0 * u * (trace(u * u) - 1.0); };
    if (lower == 0.0) {
      // Smooth down to u = 0 for a single factor (u * trace(u^2) has a
      // finite limit); one interval with order doubling suffices.
      if (is_product()) {
        throw std::invalid_argument("trace_excess_integral: divergent at 0 for products");
      }
      total += integrate_doubling(g, 0.0, 1.0, 0.5 * quad_tol, 32, 256, "trace integral");
    } else {
      // Dyadic panels from sqrt(lower) keep each panel well inside the
      // integrand's analyticity region even when lower is tiny.
      std::vector<double> cuts{std::sqrt(lower)};
      while (cuts.back() * 2.0 < 1.0) cuts.push_back(cuts.back() * 2.0);
      cuts.push_back(1.0);
      const double piece_tol = 0.5 * quad_tol / static_cast<double>(cuts.size());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += integrate_doubling(g, cuts[i], cuts[i + 1], piece_tol, 16, 128, "trace integral");
      }
    }
    total += integrate_doubling(excess, 1.0, s_end, 0.5 * quad_tol, 16, 128, "trace integral");
  } else {
    total += integrate_doubling(excess, lower, s_end, quad_tol, 16, 128, "trace integral");
  }
  return total;
}

std::pair<double, double> HeatKernelModel::trace_integral_identity_check(double quad_tol) const {
  if (is_product()) {
    throw std::invalid_argument("trace_integral_identity_check: 1-D models only");
  }
  const double lhs = trace_excess_integral(0.0, quad_tol);
  const double rhs = spectral_constant(factors_.front().params.dim(),
                                       std::min(1e-12, 0.1 * quad_tol));
  return {lhs, rhs};
}

double HeatKernelModel::factor_dispersion(const Factor& f, double t, double quad_tol) const {
  // Tensor-product Gauss-Jacobi rule evaluated in separated form: with
  // moments a_k = sum_i w_i theta_i J_k(x_i), b_k = sum_i w_i theta_i^2
  // J_k(x_i), c_k = sum_i w_i J_k(x_i), the double sum over the rule equals
  // 2 sum_k e^{-lambda_k t} (b_k c_k - a_k^2).
  const auto eval_order = [&](std::size_t m) {
    const GaussRule& rule = gauss_jacobi_rule(f.params, m);
    std::vector<double> theta(m);
    for (std::size_t i = 0; i < m; ++i) theta[i] = std::acos(clamp_unit(rule.nodes[i]));

    std::vector<double> prev(m, 0.0), cur(m, 1.0);
    double env_prev[2] = {0.0, 0.0}, env_cur[2] = {1.0, 1.0};
    double value = 0.0;
    for (std::size_t k = 0;; ++k) {
      const double lambda = eigenvalue(f.params, k);
      const double damp = std::exp(-lambda * t);
      double mom_a = 0.0, mom_b = 0.0, mom_c = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double wp = rule.weights[i] * cur[i];
        mom_c += wp;
        mom_a += wp * theta[i];
        mom_b += wp * theta[i] * theta[i];
      }
      value += 2.0 * damp * (mom_b * mom_c - mom_a * mom_a);

      const double a = coeff_a(f.params, f.a_tab, k);
      const double sb = (k >= 1) ? coeff_sb(f.params, f.sb_tab, k) : 0.0;
      const double sb1 = coeff_sb(f.params, f.sb_tab, k + 1);
      for (std::size_t i = 0; i < m; ++i) {
        const double next = ((rule.nodes[i] - a) * cur[i] - sb * prev[i]) / sb1;
        prev[i] = cur[i];
        cur[i] = next;
      }
      const double endpoints[2] = {1.0, -1.0};
      for (int s = 0; s < 2; ++s) {
        const double next = ((endpoints[s] - a) * env_cur[s] - sb * env_prev[s]) / sb1;
        env_prev[s] = env_cur[s];
        env_cur[s] = next;
      }
      const std::size_t kk = k + 1;
      const double env = std::max(std::fabs(env_cur[0]), std::fabs(env_cur[1]));
      const double bound = std::exp(-eigenvalue(f.params, kk) * t) * env * env;
      if (kk >= policy_.k_min && 4.0 * kPi * kPi * bound < policy_.term_tol) break;
      if (kk >= policy_.k_max) {
        throw std::runtime_error("dispersion_integral: truncation failure (k_max reached)");
      }
    }
    return value;
  };

  double prev_val = eval_order(128);
  for (std::size_t m = 256; m <= 2048; m *= 2) {
    const double cur_val = eval_order(m);
    if (std::fabs(cur_val - prev_val) <= quad_tol * std::max(1.0, std::fabs(cur_val))) {
      return cur_val;
    }
    prev_val = cur_val;
  }
  throw std::runtime_error("dispersion_integral: quadrature did not converge");
}

double HeatKernelModel::dispersion_integral(double t, double quad_tol) const {
  if (!(t >= policy_.t_min)) throw std::invalid_argument("dispersion_integral: t below t_min");
  // rho^2 on a product splits as a sum over factors and the complementary
  // factor kernels integrate to one, so the tensor rule reduces exactly to
  // per-factor contributions.
  double total = 0.0;
  for (const Factor& f : factors_) total += factor_dispersion(f, t, quad_tol);
  return total;
}

double HeatKernelModel::matching_upper_bound(double t, std::size_t n) const {
  if (n < 1) throw std::invalid_argument("matching_upper_bound: n must be >= 1");
  if (!(t >= policy_.t_min)) throw std::invalid_argument("matching_upper_bound: t below t_min");
  const double tail = trace_excess_integral(2.0 * t, 1e-8);
  return 2.0 * dispersion_integral(t) + (8.0 / static_cast<double>(n)) * tail;
}

}  // namespace jacobi
