#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "jacobi/params.hpp"
#include "jacobi/sample.hpp"

namespace jacobi {

/// Dense square cost matrix, row-major.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// An optimal (or candidate) assignment: row i is matched to assignment[i].
struct MatchingResult {
  std::vector<std::size_t> assignment;
  double total_cost = 0.0;  // unnormalized sum of matched entries
  std::vector<double> per_edge_costs;
};

/// Per-cell quadrature used by the empirical-vs-measure distance.
struct QuadratureSpec {
  std::size_t order = 8;
  std::optional<double> refine_tol;  // doubling-until-tol when set
};

/// Squared intrinsic costs between two 1-D point sets.
CostMatrix cost_matrix(const EmpiricalSample& a, const EmpiricalSample& b);

/// Squared product-intrinsic costs between two product-model point sets.
CostMatrix cost_matrix(const ProductEmpiricalSample& a, const ProductEmpiricalSample& b);

/// Exact minimum-cost assignment (shortest augmenting path with dual
/// potentials, O(n^3)). Throws on non-finite entries.
MatchingResult solve_assignment(const CostMatrix& cost);

/// Exhaustive minimum over all n! permutations; test oracle, n <= 10.
MatchingResult brute_force_assignment(const CostMatrix& cost);

/// W_2^2 between two same-size 1-D empirical measures under the intrinsic
/// metric: monotone rearrangement over the sorted angles.
double w2sq_sorted_1d(const EmpiricalSample& a, const EmpiricalSample& b);

/// W_2^2 between a 1-D empirical measure and the Jacobi measure itself:
/// sum_i int_{(i-1)/n}^{i/n} (theta_(i) - G^{-1}(u))^2 du with G the angle
/// distribution function, by per-cell Gauss-Legendre quadrature.
double w2sq_empirical_vs_measure_1d(const EmpiricalSample& a, const JacobiParams& params,
                                    const QuadratureSpec& quad = {});

/// W_2^2 between two same-size empirical measures via the exact assignment
/// solver (normalized by n).
double w2sq_bipartite(const EmpiricalSample& a, const EmpiricalSample& b);
double w2sq_bipartite(const ProductEmpiricalSample& a, const ProductEmpiricalSample& b);

/// Proxy for W_2^2(mu^n, mu) against a reference sample of size N = r * n:
/// each source point is replicated r times and matched to the reference
/// slots. The estimator carries a positive bias of order W_2(mu^N, mu),
/// reported in ref_n rather than corrected.
struct ReferenceProxyResult {
  double w2sq = 0.0;
  std::size_t ref_n = 0;
};
ReferenceProxyResult w2sq_vs_reference(const EmpiricalSample& a, const EmpiricalSample& ref);
ReferenceProxyResult w2sq_vs_reference(const ProductEmpiricalSample& a,
                                       const ProductEmpiricalSample& ref);

}  // namespace jacobi
