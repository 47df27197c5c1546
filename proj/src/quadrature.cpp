#include "jacobi/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace jacobi {

namespace recurrence {

// Weight exponents in the classical convention: w(x) = (1-x)^a (1+x)^b with
// a = alpha-1, b = beta-1 (both >= -1/2 under the parameter constraint).

double monic_a(const JacobiParams& params, std::size_t k) {
  const double a = params.alpha() - 1.0;
  const double b = params.beta() - 1.0;
  if (k == 0) return (b - a) / (a + b + 2.0);
  const double den = (2.0 * k + a + b) * (2.0 * k + a + b + 2.0);
  return (b * b - a * a) / den;
}

double monic_b(const JacobiParams& params, std::size_t k) {
  const double a = params.alpha() - 1.0;
  const double b = params.beta() - 1.0;
  if (k == 0) throw std::invalid_argument("monic_b: k must be >= 1");
  if (k == 1) {
    return 4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0) * (a + b + 2.0) * (a + b + 3.0));
  }
  const double kk = static_cast<double>(k);
  const double s = 2.0 * kk + a + b;
  return 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
}

}  // namespace recurrence

namespace {

GaussRule build_rule(const JacobiParams& params, std::size_t order) {
  if (order < 1) throw std::invalid_argument("gauss_jacobi_rule: order must be >= 1");
  const auto m = static_cast<Eigen::Index>(order);
  Eigen::VectorXd diag(m), sub(m > 1 ? m - 1 : 0);
  for (Eigen::Index k = 0; k < m; ++k) {
    diag[k] = recurrence::monic_a(params, static_cast<std::size_t>(k));
  }
  for (Eigen::Index k = 1; k < m; ++k) {
    sub[k - 1] = std::sqrt(recurrence::monic_b(params, static_cast<std::size_t>(k)));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_jacobi_rule: tridiagonal eigensolve failed");
  }

  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (Eigen::Index i = 0; i < m; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    const double v0 = solver.eigenvectors()(0, i);
    // First-component squared times the total mass (1 for a probability
    // measure).
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_jacobi_rule(const JacobiParams& params, std::size_t order) {
  using Key = std::tuple<double, double, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<GaussRule>> cache;

  const Key key{params.alpha(), params.beta(), order};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<GaussRule>(build_rule(params, order))).first;
  }
  return *it->second;
}

GaussRule gauss_legendre_rule(std::size_t order) {
  // Legendre is the alpha = beta = 1 member; rescale the probability weights
  // back to Lebesgue measure on [-1,1].
  GaussRule rule = gauss_jacobi_rule(JacobiParams(1.0, 1.0), order);
  for (double& w : rule.weights) w *= 2.0;
  return rule;
}

}  // namespace jacobi
