#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "jacobi/metric.hpp"

namespace jacobi {

/// n points of [-1,1] together with their arccos angles, cached sorted
/// ascending. Immutable after construction; safe for concurrent reads.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("EmpiricalSample: empty sample");
    angles_.reserve(points_.size());
    for (double x : points_) {
      if (!(x >= -1.0 && x <= 1.0)) {
        throw std::invalid_argument("EmpiricalSample: point outside [-1,1]");
      }
      angles_.push_back(std::acos(clamp_unit(x)));
    }
    std::sort(angles_.begin(), angles_.end());
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& sorted_angles() const { return angles_; }

 private:
  std::vector<double> points_;
  std::vector<double> angles_;
};

/// Sample from a product model: n tuples stored row-major.
class ProductEmpiricalSample {
 public:
  ProductEmpiricalSample(std::vector<double> coords, std::size_t dim)
      : coords_(std::move(coords)), dim_(dim) {
    if (dim_ < 2) throw std::invalid_argument("ProductEmpiricalSample: dim must be >= 2");
    if (coords_.empty() || coords_.size() % dim_ != 0) {
      throw std::invalid_argument("ProductEmpiricalSample: coords size not a multiple of dim");
    }
    for (double x : coords_) {
      if (!(x >= -1.0 && x <= 1.0)) {
        throw std::invalid_argument("ProductEmpiricalSample: point outside [-1,1]");
      }
    }
  }

  std::size_t size() const { return coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }

 private:
  std::vector<double> coords_;
  std::size_t dim_;
};

}  // namespace jacobi
