#pragma once

#include <cstddef>
#include <vector>

#include "jacobi/params.hpp"

namespace jacobi {

/// Monic three-term recurrence coefficients for the orthogonal polynomials of
/// the weight (1-x)^(alpha-1) (1+x)^(beta-1):
///   pi_{k+1}(x) = (x - a_k) pi_k(x) - b_k pi_{k-1}(x).
namespace recurrence {
double monic_a(const JacobiParams& params, std::size_t k);
/// b_k for k >= 1 (b_0, the total weight mass, is absorbed into the
/// probability normalization and never needed here).
double monic_b(const JacobiParams& params, std::size_t k);
}  // namespace recurrence

struct GaussRule {
  std::vector<double> nodes;    // ascending in [-1,1]
  std::vector<double> weights;  // sum to 1 for a probability measure
};

/// Gauss rule of the given order for the Jacobi probability measure
/// mu_{alpha,beta}. Computed by Golub-Welsch (symmetric tridiagonal
/// eigenproblem) and cached per (alpha, beta, order); the returned reference
/// stays valid for the program lifetime.
const GaussRule& gauss_jacobi_rule(const JacobiParams& params, std::size_t order);

/// Gauss-Legendre rule on [-1,1] with weight dx (weights sum to 2).
GaussRule gauss_legendre_rule(std::size_t order);

}  // namespace jacobi
