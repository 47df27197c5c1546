#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace jacobi {

/// Clamp to [-1,1] so rounding (e.g. a point computed as 1+1e-17) never
/// produces NaN from acos.
inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// Intrinsic distance of the model: |arccos x - arccos y|.
/// Dominates |x - y| on [-1,1].
inline double intrinsic_distance(double x, double y) {
  return std::fabs(std::acos(clamp_unit(x)) - std::acos(clamp_unit(y)));
}

/// Product-model distance: Euclidean combination of per-factor intrinsic
/// distances.
inline double product_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("product_distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double r = intrinsic_distance(p[j], q[j]);
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace jacobi
