#include "tnst/dense_field.hpp"

#include <stdexcept>
#include <string>

namespace tnst {

namespace {

void require_finite(const Eigen::VectorXd& values, const char* what) {
  if (!values.allFinite()) {
    throw std::domain_error(std::string(what) + ": non-finite value in field");
  }
}

}  // namespace

std::size_t element_count(const Shape4& shape) {
  return shape[0] * shape[1] * shape[2] * shape[3];
}

DenseField::DenseField(const Shape4& shape, double fill)
    : shape_(shape), values_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(element_count(shape)), fill)) {}

DenseField::DenseField(const Shape4& shape, Eigen::VectorXd values)
    : shape_(shape), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != element_count(shape_)) {
    throw std::invalid_argument("DenseField: value count does not match shape");
  }
  require_finite(values_, "DenseField");
}

DenseField DenseField::from_function(const Shape4& shape,
                                     const std::function<double(const Index4&)>& fn) {
  DenseField field(shape);
  std::size_t k = 0;
  for (std::size_t i = 0; i < shape[0]; ++i)
    for (std::size_t j = 0; j < shape[1]; ++j)
      for (std::size_t l = 0; l < shape[2]; ++l)
        for (std::size_t m = 0; m < shape[3]; ++m)
          field.values_[static_cast<Eigen::Index>(k++)] = fn({i, j, l, m});
  require_finite(field.values_, "DenseField::from_function");
  return field;
}

Index4 DenseField::unravel(std::size_t offset) const {
  Index4 idx{};
  for (int k = 3; k >= 0; --k) {
    idx[k] = offset % shape_[k];
    offset /= shape_[k];
  }
  return idx;
}

void require_same_shape(const DenseField& a, const DenseField& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

DenseField& DenseField::operator+=(const DenseField& other) {
  require_same_shape(*this, other, "DenseField::operator+=");
  values_ += other.values_;
  require_finite(values_, "DenseField::operator+=");
  return *this;
}

DenseField& DenseField::operator-=(const DenseField& other) {
  require_same_shape(*this, other, "DenseField::operator-=");
  values_ -= other.values_;
  require_finite(values_, "DenseField::operator-=");
  return *this;
}

DenseField& DenseField::operator*=(double alpha) {
  values_ *= alpha;
  require_finite(values_, "DenseField::operator*=");
  return *this;
}

DenseField operator+(DenseField lhs, const DenseField& rhs) { return lhs += rhs; }
DenseField operator-(DenseField lhs, const DenseField& rhs) { return lhs -= rhs; }
DenseField operator*(double alpha, DenseField field) { return field *= alpha; }

}  // namespace tnst
