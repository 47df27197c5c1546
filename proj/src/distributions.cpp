#include "jacobi/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jacobi/special.hpp"

namespace jacobi {

double pdf(const JacobiParams& params, double x) {
  const double a = params.alpha();
  const double b = params.beta();
  if (x < -1.0 || x > 1.0) return 0.0;
  if (x == 1.0) {
    if (a < 1.0) throw std::domain_error("pdf: density unbounded at x = 1");
    if (a > 1.0) return 0.0;
    return params.norm_const() * std::pow(2.0, b - 1.0);
  }
  if (x == -1.0) {
    if (b < 1.0) throw std::domain_error("pdf: density unbounded at x = -1");
    if (b > 1.0) return 0.0;
    return params.norm_const() * std::pow(2.0, a - 1.0);
  }
  return std::exp(params.log_norm_const() + (a - 1.0) * std::log1p(-x) +
                  (b - 1.0) * std::log1p(x));
}

double cdf(const JacobiParams& params, double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // With u = (1+x)/2, the measure of [-1,x] is I_u(beta, alpha).
  return reg_inc_beta(params.beta(), params.alpha(), 0.5 * (1.0 + x));
}

namespace {

double quantile_bracketed(const JacobiParams& params, double u, double x0) {
  constexpr double kFTol = 1e-14;
  constexpr int kMaxIter = 200;

  double lo = -1.0, hi = 1.0;
  double x = (x0 > -1.0 && x0 < 1.0) ? x0 : 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const double f = cdf(params, x) - u;
    if (std::fabs(f) <= kFTol) return x;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double deriv = 0.0;
    if (x > -1.0 && x < 1.0) deriv = pdf(params, x);
    double next;
    if (deriv > 0.0) {
      next = x - f / deriv;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (hi - lo < 4.0 * std::numeric_limits<double>::epsilon()) return 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace

double quantile(const JacobiParams& params, double u, double initial_guess) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("quantile: u outside [0,1]");
  if (u == 0.0) return -1.0;
  if (u == 1.0) return 1.0;
  return quantile_bracketed(params, u, initial_guess);
}

double quantile(const JacobiParams& params, double u) {
  // Mean of the measure as a generic starting point.
  const double mean = (params.beta() - params.alpha()) / params.dim();
  return quantile(params, u, mean);
}

double sample_gamma(RngState& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a).
    const double g = sample_gamma(rng, shape + 1.0);
    return g * std::pow(rng.next_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.next_normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double uu = rng.next_open();
    const double z2 = z * z;
    if (uu < 1.0 - 0.0331 * z2 * z2) return d * v;
    if (std::log(uu) < 0.5 * z2 + d - d * v + d * std::log(v)) return d * v;
  }
}

double sample_point(const JacobiParams& params, RngState& rng, const SampleOptions& opts) {
  if (opts.arcsine_shortcut && params.alpha() == 0.5 && params.beta() == 0.5) {
    return -std::cos(3.14159265358979323846 * rng.next_double());
  }
  // (1+x)/2 ~ Beta(beta, alpha) as a ratio of two gamma variates.
  const double g1 = sample_gamma(rng, params.beta());
  const double g2 = sample_gamma(rng, params.alpha());
  const double v = g1 / (g1 + g2);
  return clamp_unit(2.0 * v - 1.0);
}

EmpiricalSample sample(const JacobiParams& params, RngState& rng, std::size_t n,
                       const SampleOptions& opts) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<double> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_point(params, rng, opts));
  return EmpiricalSample(std::move(pts));
}

ProductEmpiricalSample sample(const ProductJacobiParams& params, RngState& rng, std::size_t n,
                              const SampleOptions& opts) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const std::size_t k = params.size();
  std::vector<double> coords;
  coords.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      coords.push_back(sample_point(params.factor(j), rng, opts));
    }
  }
  return ProductEmpiricalSample(std::move(coords), k);
}

}  // namespace jacobi
