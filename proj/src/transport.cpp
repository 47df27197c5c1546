#include "jacobi/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "jacobi/distributions.hpp"
#include "jacobi/metric.hpp"
#include "jacobi/quadrature.hpp"

namespace jacobi {

CostMatrix cost_matrix(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cost_matrix: size mismatch");
  const std::size_t n = a.size();
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = a.points()[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double r = intrinsic_distance(xi, b.points()[j]);
      c(i, j) = r * r;
    }
  }
  return c;
}

CostMatrix cost_matrix(const ProductEmpiricalSample& a, const ProductEmpiricalSample& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) {
    throw std::invalid_argument("cost_matrix: size mismatch");
  }
  const std::size_t n = a.size();
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = a.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double r = product_distance(pi, b.point(j));
      c(i, j) = r * r;
    }
  }
  return c;
}

namespace {

MatchingResult finish_result(const CostMatrix& cost, std::vector<std::size_t> assignment) {
  MatchingResult res;
  res.assignment = std::move(assignment);
  res.per_edge_costs.reserve(res.assignment.size());
  for (std::size_t i = 0; i < res.assignment.size(); ++i) {
    const double e = cost(i, res.assignment[i]);
    res.per_edge_costs.push_back(e);
    res.total_cost += e;
  }
  return res;
}

}  // namespace

MatchingResult solve_assignment(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  if (n == 0) throw std::invalid_argument("solve_assignment: empty matrix");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(cost(i, j))) {
        throw std::invalid_argument("solve_assignment: non-finite cost entry");
      }
    }
  }

  // Shortest augmenting path with dual potentials (Jonker-Volgenant style),
  // 1-based with column 0 as the virtual root.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      std::size_t j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return finish_result(cost, std::move(assignment));
}

MatchingResult brute_force_assignment(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  if (n == 0 || n > 10) throw std::invalid_argument("brute_force_assignment: n must be in [1,10]");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost(i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return finish_result(cost, std::move(best));
}

double w2sq_sorted_1d(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.size() != b.size()) throw std::invalid_argument("w2sq_sorted_1d: size mismatch");
  const auto& ta = a.sorted_angles();
  const auto& tb = b.sorted_angles();
  double sum = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const double d = ta[i] - tb[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

namespace {

double measure_cost_at_order(const EmpiricalSample& a, const JacobiParams& params,
                             std::size_t order) {
  const GaussRule rule = gauss_legendre_rule(order);
  const std::size_t n = a.size();
  const auto& theta = a.sorted_angles();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Angle quantile G^{-1}(u) = arccos(quantile(params, 1-u)); u sweeps
  // upward, so each inversion warm-starts from the previous result.
  double hint = quantile(params, 1.0 - 0.5 * inv_n * (1.0 + rule.nodes.front()));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cell = 0.0;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double u = (static_cast<double>(i) + 0.5 * (1.0 + rule.nodes[g])) * inv_n;
      const double x = quantile(params, 1.0 - u, hint);
      hint = x;
      const double q = std::acos(clamp_unit(x));
      const double diff = theta[i] - q;
      cell += 0.5 * rule.weights[g] * diff * diff;
    }
    total += cell * inv_n;
  }
  return total;
}

}  // namespace

double w2sq_empirical_vs_measure_1d(const EmpiricalSample& a, const JacobiParams& params,
                                    const QuadratureSpec& quad) {
  if (quad.order < 2) throw std::invalid_argument("w2sq_empirical_vs_measure_1d: order < 2");
  double value = measure_cost_at_order(a, params, quad.order);
  if (!quad.refine_tol) return value;
  for (std::size_t order = 2 * quad.order; order <= 512; order *= 2) {
    const double next = measure_cost_at_order(a, params, order);
    if (std::fabs(next - value) <= *quad.refine_tol) return next;
    value = next;
  }
  throw std::runtime_error("w2sq_empirical_vs_measure_1d: quadrature did not converge");
}

double w2sq_bipartite(const EmpiricalSample& a, const EmpiricalSample& b) {
  return solve_assignment(cost_matrix(a, b)).total_cost / static_cast<double>(a.size());
}

double w2sq_bipartite(const ProductEmpiricalSample& a, const ProductEmpiricalSample& b) {
  return solve_assignment(cost_matrix(a, b)).total_cost / static_cast<double>(a.size());
}

namespace {

std::size_t replication_factor(std::size_t n, std::size_t ref_n) {
  if (ref_n < n || ref_n % n != 0) {
    throw std::invalid_argument("w2sq_vs_reference: ref size must be a multiple of sample size");
  }
  return ref_n / n;
}

}  // namespace

ReferenceProxyResult w2sq_vs_reference(const EmpiricalSample& a, const EmpiricalSample& ref) {
  const std::size_t r = replication_factor(a.size(), ref.size());
  // On the line the balanced assignment of replicated sorted angles to
  // sorted reference angles is the monotone one.
  const auto& ta = a.sorted_angles();
  const auto& tr = ref.sorted_angles();
  double sum = 0.0;
  for (std::size_t j = 0; j < tr.size(); ++j) {
    const double d = ta[j / r] - tr[j];
    sum += d * d;
  }
  return {sum / static_cast<double>(ref.size()), ref.size()};
}

ReferenceProxyResult w2sq_vs_reference(const ProductEmpiricalSample& a,
                                       const ProductEmpiricalSample& ref) {
  if (a.dim() != ref.dim()) throw std::invalid_argument("w2sq_vs_reference: dimension mismatch");
  const std::size_t r = replication_factor(a.size(), ref.size());
  const std::size_t big = ref.size();
  CostMatrix c(big);
  for (std::size_t i = 0; i < big; ++i) {
    const auto p = a.point(i / r);
    for (std::size_t j = 0; j < big; ++j) {
      const double d = product_distance(p, ref.point(j));
      c(i, j) = d * d;
    }
  }
  const MatchingResult res = solve_assignment(c);
  return {res.total_cost / static_cast<double>(big), big};
}

}  // namespace jacobi
