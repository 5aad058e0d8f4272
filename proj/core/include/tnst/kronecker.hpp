#pragma once

#include <array>
#include <optional>

#include "tnst/chebyshev.hpp"
#include "tnst/dense_field.hpp"

namespace tnst {

/// Contracts `matrix` against mode `mode` of a 4-way array:
/// out(.., i, ..) = sum_j matrix(i, j) * in(.., j, ..).
/// The output has shape[mode] == matrix.rows().
Eigen::VectorXd mode_apply(const Matrix& matrix, const Eigen::VectorXd& values,
                           const Shape4& shape, int mode);

DenseField mode_apply(const Matrix& matrix, const DenseField& field, int mode);

/// scale * (F_t (x) F_x (x) F_y (x) F_z). A missing factor is the identity of
/// whatever size the field has along that mode.
struct KroneckerTerm {
  std::array<std::optional<Matrix>, 4> factors;
  double scale = 1.0;

  static KroneckerTerm identity() { return {}; }
  /// A single non-identity factor in `mode`.
  static KroneckerTerm along(int mode, Matrix factor, double scale = 1.0);

  Shape4 output_shape(const Shape4& input) const;
};

/// Applies the Kronecker term without forming it. Identity factors cost nothing.
/// Throws std::invalid_argument when a factor does not conform with the field.
DenseField kron_apply(const KroneckerTerm& term, const DenseField& field);

/// Elementwise product, i.e. diag(weights) * field.
DenseField pointwise_scale(const DenseField& weights, const DenseField& field);

}  // namespace tnst
