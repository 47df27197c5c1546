#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jacobi/special.hpp"

namespace jacobi {

/// Parameters of the measure C (1-x)^(alpha-1) (1+x)^(beta-1) dx on [-1,1].
/// Requires alpha, beta >= 1/2. The symmetric case alpha = beta = d/2 is
/// referred to by its dimension d.
class JacobiParams {
 public:
  JacobiParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha >= 0.5) || !(beta >= 0.5)) {
      throw std::invalid_argument("JacobiParams: alpha and beta must be >= 1/2");
    }
    // Total mass of the unnormalized weight is 2^(alpha+beta-1) B(alpha, beta).
    log_norm_ = -((alpha_ + beta_ - 1.0) * std::log(2.0) + log_beta(alpha_, beta_));
    norm_ = std::exp(log_norm_);
  }

  static JacobiParams symmetric(double dim) { return {dim / 2.0, dim / 2.0}; }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double dim() const { return alpha_ + beta_; }
  bool is_symmetric() const { return alpha_ == beta_; }

  /// Normalization constant C_{alpha,beta}.
  double norm_const() const { return norm_; }
  double log_norm_const() const { return log_norm_; }

  friend bool operator==(const JacobiParams& a, const JacobiParams& b) {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
  }

 private:
  double alpha_;
  double beta_;
  double log_norm_;
  double norm_;
};

/// Product of k >= 2 Jacobi measures on [-1,1]^k.
class ProductJacobiParams {
 public:
  explicit ProductJacobiParams(std::vector<JacobiParams> factors) : factors_(std::move(factors)) {
    if (factors_.size() < 2) {
      throw std::invalid_argument("ProductJacobiParams: need at least two factors");
    }
  }

  ProductJacobiParams(JacobiParams f0, JacobiParams f1)
      : ProductJacobiParams(std::vector<JacobiParams>{f0, f1}) {}

  const std::vector<JacobiParams>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  const JacobiParams& factor(std::size_t j) const { return factors_.at(j); }

 private:
  std::vector<JacobiParams> factors_;
};

}  // namespace jacobi
