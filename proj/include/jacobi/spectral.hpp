#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "jacobi/params.hpp"

namespace jacobi {

/// Truncation policy for spectral series evaluation.
struct TruncationPolicy {
  std::size_t k_min = 16;
  double term_tol = 1e-14;
  std::size_t k_max = 1000000;
  double t_min = 1e-8;  // kernel evaluations refuse below this time
};

/// k-th eigenvalue of the negative generator: k (k + alpha + beta - 1).
double eigenvalue(const JacobiParams& params, std::size_t k);

/// The limiting matching constant S(d) = sum_{k>=1} 1/(k(k+d-1)), d >= 1,
/// summed with an Euler-Maclaurin tail so the truncation error is below tol.
double spectral_constant(double d, double tol = 1e-12);

/// Truncated spectral representation of the semigroup kernel for a Jacobi
/// measure or a product of Jacobi measures. Recurrence coefficients of the
/// orthonormal basis are precomputed at construction; instances are immutable
/// and safe for unrestricted concurrent reads.
class HeatKernelModel {
 public:
  explicit HeatKernelModel(const JacobiParams& params, TruncationPolicy policy = {});
  explicit HeatKernelModel(const ProductJacobiParams& params, TruncationPolicy policy = {});

  std::size_t factor_count() const { return factors_.size(); }
  bool is_product() const { return factors_.size() > 1; }
  const JacobiParams& factor_params(std::size_t j = 0) const { return factors_.at(j).params; }
  const TruncationPolicy& policy() const { return policy_; }

  /// Value of the L2(mu)-orthonormal polynomial J_k at x (1-D models).
  double basis_eval(std::size_t k, double x) const;

  /// Kernel p_t(x,y) = sum_k exp(-lambda_k t) J_k(x) J_k(y) for 1-D models.
  /// Symmetric in (x,y) exactly (fixed summation order). Requires
  /// t >= policy().t_min; throws on truncation failure.
  double heat_kernel(double t, double x, double y) const;

  /// Product-model kernel: product of the factor kernels.
  double heat_kernel(double t, std::span<const double> x, std::span<const double> y) const;

  /// Trace sum_k exp(-s lambda_k); product models multiply factor traces.
  /// Valid for any s > 0 within the k_max budget.
  double trace(double s) const;

  /// s^(k/2) trace(s) - (sqrt(pi)/2)^k with k the number of factors; tends
  /// to 0 as s -> 0.
  double trace_asymptotic_deviation(double s) const;

  /// Two routes to the same number for 1-D models: the integrated trace
  /// excess int_0^inf (trace(s) - 1) ds (lhs, by quadrature split at s = 1
  /// with s = u^2 below) and the spectral series S(d) (rhs).
  std::pair<double, double> trace_integral_identity_check(double quad_tol = 1e-8) const;

  /// Tensorized Gauss-Jacobi value of the double integral of rho^2 p_t over
  /// mu x mu, with order doubling until two successive rules agree to
  /// quad_tol (relative). The arccos factor limits the rule to O(m^-2)
  /// convergence, hence the modest default. Product models reduce exactly
  /// to the sum of per-factor integrals. Bounded by 2t per factor.
  double dispersion_integral(double t, double quad_tol = 1e-6) const;

  /// Heat-kernel upper bound on the expected matching cost at sample size n:
  /// 2 * dispersion_integral(t) + (8/n) int_{2t}^inf (trace(s) - 1) ds.
  double matching_upper_bound(double t, std::size_t n) const;

 private:
  struct Factor {
    JacobiParams params;
    std::vector<double> a_tab;   // monic recurrence a_k
    std::vector<double> sb_tab;  // sqrt(b_k), k >= 1 at index k
  };

  double factor_trace(const Factor& f, double s) const;
  double factor_dispersion(const Factor& f, double t, double quad_tol) const;
  double trace_excess_integral(double lower, double quad_tol) const;

  std::vector<Factor> factors_;
  TruncationPolicy policy_;
};

}  // namespace jacobi
