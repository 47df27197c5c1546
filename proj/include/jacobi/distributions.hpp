#pragma once

#include <cstddef>

#include "jacobi/params.hpp"
#include "jacobi/rng.hpp"
#include "jacobi/sample.hpp"

namespace jacobi {

/// Density w.r.t. Lebesgue measure. Returns 0 outside [-1,1]; at an endpoint
/// returns the (finite) limit when the local exponent is >= 1 and throws
/// std::domain_error when the density is unbounded there.
double pdf(const JacobiParams& params, double x);

/// Distribution function, evaluated through the regularized incomplete beta.
/// Defined on all of R (0 left of the support, 1 right of it).
double cdf(const JacobiParams& params, double x);

/// Inverse of cdf on [0,1]; bracketed Newton with bisection fallback,
/// |cdf(quantile(u)) - u| <= 1e-12.
double quantile(const JacobiParams& params, double u);

/// Same, but started from a caller-supplied guess (useful when inverting at
/// a sweep of nearby u values).
double quantile(const JacobiParams& params, double u, double initial_guess);

struct SampleOptions {
  /// For alpha = beta = 1/2 draw x = -cos(pi U) instead of the gamma-ratio
  /// path. Changes the consumed random stream, so it is off by default and
  /// recorded in experiment configs.
  bool arcsine_shortcut = false;
};

/// Gamma(shape) variate, Marsaglia-Tsang squeeze with the shape < 1 boost.
double sample_gamma(RngState& rng, double shape);

/// One draw from the Jacobi measure.
double sample_point(const JacobiParams& params, RngState& rng, const SampleOptions& opts = {});

/// n i.i.d. draws.
EmpiricalSample sample(const JacobiParams& params, RngState& rng, std::size_t n,
                       const SampleOptions& opts = {});

/// n i.i.d. draws from a product measure; factors are drawn independently,
/// factor-major within each point.
ProductEmpiricalSample sample(const ProductJacobiParams& params, RngState& rng, std::size_t n,
                              const SampleOptions& opts = {});

}  // namespace jacobi
