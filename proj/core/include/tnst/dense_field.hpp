#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace tnst {

using Shape4 = std::array<std::size_t, 4>;
using Index4 = std::array<std::size_t, 4>;

std::size_t element_count(const Shape4& shape);

/// Values of a scalar field on a 4-way (t, x, y, z) grid, flattened with t
/// slowest and z fastest.
class DenseField {
public:
  DenseField() = default;
  explicit DenseField(const Shape4& shape, double fill = 0.0);
  /// Throws std::invalid_argument on size mismatch and std::domain_error on
  /// non-finite values.
  DenseField(const Shape4& shape, Eigen::VectorXd values);

  static DenseField from_function(const Shape4& shape,
                                  const std::function<double(const Index4&)>& fn);

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  std::size_t offset(const Index4& idx) const {
    return ((idx[0] * shape_[1] + idx[1]) * shape_[2] + idx[2]) * shape_[3] + idx[3];
  }
  Index4 unravel(std::size_t offset) const;

  double operator()(const Index4& idx) const { return values_[static_cast<Eigen::Index>(offset(idx))]; }
  double& operator()(const Index4& idx) { return values_[static_cast<Eigen::Index>(offset(idx))]; }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double norm() const { return values_.norm(); }
  double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }
  bool all_finite() const { return values_.allFinite(); }

  DenseField& operator+=(const DenseField& other);
  DenseField& operator-=(const DenseField& other);
  DenseField& operator*=(double alpha);

private:
  Shape4 shape_{0, 0, 0, 0};
  Eigen::VectorXd values_;
};

DenseField operator+(DenseField lhs, const DenseField& rhs);
DenseField operator-(DenseField lhs, const DenseField& rhs);
DenseField operator*(double alpha, DenseField field);

/// Throws std::invalid_argument when the shapes differ.
void require_same_shape(const DenseField& a, const DenseField& b, const char* what);

}  // namespace tnst
