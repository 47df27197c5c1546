// Shared test oracles: extended-precision summations, goodness-of-fit
// statistics and closed forms kept independent of the library paths they
// check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// Trace sum in extended precision with a much smaller cutoff tolerance.
inline long double trace_ld(double d, double s, long k_cap = 4000000) {
  long double sum = 0.0L;
  for (long k = 0; k < k_cap; ++k) {
    const long double kk = static_cast<long double>(k);
    const long double term = std::exp(-static_cast<long double>(s) * kk * (kk + d - 1.0L));
    sum += term;
    if (k > 16 && term < 1e-25L) break;
  }
  return sum;
}

// Orthonormal Jacobi recurrence in long double (independent re-derivation of
// the coefficient formulas is intentional duplication for oracle use).
struct JacobiRecLd {
  long double a, b;  // weight exponents alpha-1, beta-1

  long double monic_a(long k) const {
    if (k == 0) return (b - a) / (a + b + 2.0L);
    const long double s = 2.0L * k + a + b;
    return (b * b - a * a) / (s * (s + 2.0L));
  }
  long double monic_b(long k) const {
    if (k == 1) return 4.0L * (a + 1.0L) * (b + 1.0L) / ((a + b + 2.0L) * (a + b + 2.0L) * (a + b + 3.0L));
    const long double kk = static_cast<long double>(k);
    const long double s = 2.0L * kk + a + b;
    return 4.0L * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0L) * (s - 1.0L));
  }
};

// Heat kernel by direct extended-precision summation with a doubled term
// budget and a tighter term tolerance than the production evaluator.
inline long double heat_kernel_ld(double alpha, double beta, double t, double x, double y,
                                  long k_cap = 2000000, long double term_tol = 1e-22L) {
  const JacobiRecLd rec{alpha - 1.0L, beta - 1.0L};
  const long double d = static_cast<long double>(alpha) + beta;
  long double px_prev = 0.0L, px = 1.0L, py_prev = 0.0L, py = 1.0L;
  long double pe_prev = 0.0L, pe = 1.0L, pm_prev = 0.0L, pm = 1.0L;
  long double sum = 1.0L;
  for (long k = 0; k < k_cap; ++k) {
    const long double ak = rec.monic_a(k);
    const long double sbk = (k >= 1) ? std::sqrt(rec.monic_b(k)) : 0.0L;
    const long double sbk1 = std::sqrt(rec.monic_b(k + 1));
    const auto step = [&](long double xx, long double& prev, long double& cur) {
      const long double next = ((xx - ak) * cur - sbk * prev) / sbk1;
      prev = cur;
      cur = next;
    };
    step(x, px_prev, px);
    step(y, py_prev, py);
    step(1.0L, pe_prev, pe);
    step(-1.0L, pm_prev, pm);
    const long double kk = static_cast<long double>(k + 1);
    const long double damp = std::exp(-kk * (kk + d - 1.0L) * t);
    sum += damp * px * py;
    const long double env = std::max(std::fabs(pe), std::fabs(pm));
    if (k + 1 >= 32 && damp * env * env < term_tol) break;
  }
  return sum;
}

// Closed form S(d) = H_{d-1} / (d-1) for integer d >= 2.
inline double spectral_constant_closed(int d) {
  double h = 0.0;
  for (int k = 1; k <= d - 1; ++k) h += 1.0 / k;
  return h / (d - 1);
}

// Two-sided Kolmogorov-Smirnov statistic of sorted values against U[0,1].
inline double ks_statistic(const std::vector<double>& sorted_u) {
  const double n = static_cast<double>(sorted_u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - sorted_u[i];
    const double lo = sorted_u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

// Chi-square upper quantile via Wilson-Hilferty; accurate to ~0.1% for the
// degrees of freedom used here.
inline double chi2_quantile(double dof, double z_upper) {
  const double c = 2.0 / (9.0 * dof);
  const double t = 1.0 - c + z_upper * std::sqrt(c);
  return dof * t * t * t;
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // sample variance
  std::size_t n = 0;
};

inline MeanVar mean_var(const std::vector<double>& v) {
  MeanVar mv;
  mv.n = v.size();
  for (double x : v) mv.mean += x;
  mv.mean /= static_cast<double>(v.size());
  for (double x : v) mv.var += (x - mv.mean) * (x - mv.mean);
  mv.var /= static_cast<double>(v.size() - 1);
  return mv;
}

}  // namespace oracle
