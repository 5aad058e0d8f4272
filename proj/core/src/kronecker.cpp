#include "tnst/kronecker.hpp"

#include <stdexcept>

namespace tnst {

Eigen::VectorXd mode_apply(const Matrix& matrix, const Eigen::VectorXd& values,
                           const Shape4& shape, int mode) {
  if (mode < 0 || mode > 3) {
    throw std::invalid_argument("mode_apply: mode out of range");
  }
  const auto n = static_cast<Eigen::Index>(shape[mode]);
  if (matrix.cols() != n) {
    throw std::invalid_argument("mode_apply: matrix columns do not match mode size");
  }
  if (static_cast<std::size_t>(values.size()) != element_count(shape)) {
    throw std::invalid_argument("mode_apply: value count does not match shape");
  }
  Eigen::Index pre = 1;
  for (int k = 0; k < mode; ++k) pre *= static_cast<Eigen::Index>(shape[k]);
  Eigen::Index post = 1;
  for (int k = mode + 1; k < 4; ++k) post *= static_cast<Eigen::Index>(shape[k]);
  const Eigen::Index m = matrix.rows();

  Eigen::VectorXd out(pre * m * post);
  if (post == 1) {
    // Column-major view: each column is one fiber along the last mode.
    Eigen::Map<const Matrix> in_view(values.data(), n, pre);
    Eigen::Map<Matrix> out_view(out.data(), m, pre);
    out_view.noalias() = matrix * in_view;
    return out;
  }
  const Matrix mt = matrix.transpose();
  for (Eigen::Index p = 0; p < pre; ++p) {
    Eigen::Map<const Matrix> in_slab(values.data() + p * n * post, post, n);
    Eigen::Map<Matrix> out_slab(out.data() + p * m * post, post, m);
    out_slab.noalias() = in_slab * mt;
  }
  return out;
}

DenseField mode_apply(const Matrix& matrix, const DenseField& field, int mode) {
  Shape4 shape = field.shape();
  Eigen::VectorXd out = mode_apply(matrix, field.values(), shape, mode);
  shape[mode] = static_cast<std::size_t>(matrix.rows());
  return DenseField(shape, std::move(out));
}

KroneckerTerm KroneckerTerm::along(int mode, Matrix factor, double scale) {
  KroneckerTerm term;
  term.factors.at(static_cast<std::size_t>(mode)) = std::move(factor);
  term.scale = scale;
  return term;
}

Shape4 KroneckerTerm::output_shape(const Shape4& input) const {
  Shape4 out = input;
  for (std::size_t k = 0; k < 4; ++k) {
    if (factors[k]) {
      if (static_cast<std::size_t>(factors[k]->cols()) != input[k]) {
        throw std::invalid_argument("KroneckerTerm: factor does not conform with field shape");
      }
      out[k] = static_cast<std::size_t>(factors[k]->rows());
    }
  }
  return out;
}

DenseField kron_apply(const KroneckerTerm& term, const DenseField& field) {
  Shape4 shape = field.shape();
  const Shape4 out_shape = term.output_shape(shape);
  Eigen::VectorXd values = field.values();
  for (int k = 0; k < 4; ++k) {
    const auto& factor = term.factors[static_cast<std::size_t>(k)];
    if (!factor) continue;
    values = mode_apply(*factor, values, shape, k);
    shape[k] = static_cast<std::size_t>(factor->rows());
  }
  if (term.scale != 1.0) values *= term.scale;
  return DenseField(out_shape, std::move(values));
}

DenseField pointwise_scale(const DenseField& weights, const DenseField& field) {
  require_same_shape(weights, field, "pointwise_scale");
  return DenseField(field.shape(), weights.values().cwiseProduct(field.values()));
}

}  // namespace tnst
