#pragma once

#include <array>
#include <optional>

#include "tnst/kronecker.hpp"
#include "tnst/tt_tensor.hpp"

namespace tnst {

/// Four-way operator core of shape (r0, m, n, r1): entry (a, i, j, b) at
/// a + r0 * (i + m * (j + n * b)). `identity` marks a 1 x m x m x 1 core
/// equal to the identity, which matvec and compose skip.
struct TTMatrixCore {
  Eigen::Index r0 = 1;
  Eigen::Index m = 1;
  Eigen::Index n = 1;
  Eigen::Index r1 = 1;
  Eigen::VectorXd data;
  bool identity = false;

  TTMatrixCore() : data(Eigen::VectorXd::Zero(1)) {}
  TTMatrixCore(Eigen::Index left, Eigen::Index rows, Eigen::Index cols, Eigen::Index right)
      : r0(left), m(rows), n(cols), r1(right), data(Eigen::VectorXd::Zero(left * rows * cols * right)) {}

  double operator()(Eigen::Index a, Eigen::Index i, Eigen::Index j, Eigen::Index b) const {
    return data[a + r0 * (i + m * (j + n * b))];
  }
  double& operator()(Eigen::Index a, Eigen::Index i, Eigen::Index j, Eigen::Index b) {
    return data[a + r0 * (i + m * (j + n * b))];
  }

  /// The m x n block for bond indices (a, b).
  Matrix block(Eigen::Index a, Eigen::Index b) const;
  void set_block(Eigen::Index a, Eigen::Index b, const Matrix& value);

  static TTMatrixCore from_matrix(const Matrix& value);
  static TTMatrixCore identity_core(Eigen::Index size);
};

class TTMatrix {
public:
  TTMatrix();
  explicit TTMatrix(std::array<TTMatrixCore, 4> cores);

  static TTMatrix identity(const Shape4& sizes);
  /// scale * (F0 (x) F1 (x) F2 (x) F3); exact identity factors are tagged.
  static TTMatrix kronecker(const std::array<Matrix, 4>& factors, double scale = 1.0);
  /// Sum over active modes of I (x) .. (x) M_k (x) .. (x) I, assembled at rank 2.
  /// Modes without an operator contribute no term.
  static TTMatrix kronecker_sum(const std::array<std::optional<Matrix>, 4>& operators, const Shape4& sizes);

  Shape4 row_sizes() const;
  Shape4 col_sizes() const;
  Ranks3 ranks() const { return {cores_[0].r1, cores_[1].r1, cores_[2].r1}; }
  Eigen::Index max_rank() const;

  const TTMatrixCore& core(std::size_t k) const { return cores_[k]; }
  TTMatrixCore& core(std::size_t k) { return cores_[k]; }

private:
  std::array<TTMatrixCore, 4> cores_;
};

/// Kronecker term as a rank-1 TT matrix; empty factors become identities of
/// the matching size in `sizes`.
TTMatrix tt_from_kronecker(const KroneckerTerm& term, const Shape4& sizes);

/// A x; ranks multiply. Throws std::invalid_argument on mode mismatch.
TTTensor tt_matvec(const TTMatrix& a, const TTTensor& x);
/// tt_round(A x, eps) without forming the full-rank product.
TTTensor tt_matvec_round(const TTMatrix& a, const TTTensor& x, double eps);
/// diag(v); tt_matvec(tt_diag(v), x) equals tt_hadamard(v, x).
TTMatrix tt_diag(const TTTensor& v);
/// A B.
TTMatrix tt_compose(const TTMatrix& a, const TTMatrix& b);
TTMatrix tt_matrix_add(const TTMatrix& a, const TTMatrix& b);
TTMatrix tt_matrix_scale(const TTMatrix& a, double alpha);
/// Rounds the operator viewed as a TT vector over (row, col) index pairs.
TTMatrix tt_matrix_round(const TTMatrix& a, double eps);
double tt_matrix_norm(const TTMatrix& a);
/// Dense matrix in the t-slowest flattening. Throws std::length_error
/// when rows * cols exceeds `cap`.
Matrix tt_matrix_to_dense(const TTMatrix& a, std::size_t cap = kDenseElementCap);

}  // namespace tnst
