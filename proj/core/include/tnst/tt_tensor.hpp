#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "tnst/chebyshev.hpp"
#include "tnst/dense_field.hpp"

namespace tnst {

using Ranks3 = std::array<Eigen::Index, 3>;

/// Three-way TT core of shape (r0, n, r1), stored so that entry (a, i, b)
/// sits at a + r0 * (i + n * b). With this layout the left unfolding
/// (r0 n x r1) and the right unfolding (r0 x n r1) are the same buffer read
/// as column-major matrices.
struct TTCore {
  Eigen::Index r0 = 1;
  Eigen::Index n = 1;
  Eigen::Index r1 = 1;
  Eigen::VectorXd data;

  TTCore() : data(Eigen::VectorXd::Zero(1)) {}
  TTCore(Eigen::Index left, Eigen::Index size, Eigen::Index right)
      : r0(left), n(size), r1(right), data(Eigen::VectorXd::Zero(left * size * right)) {}

  double operator()(Eigen::Index a, Eigen::Index i, Eigen::Index b) const { return data[a + r0 * (i + n * b)]; }
  double& operator()(Eigen::Index a, Eigen::Index i, Eigen::Index b) { return data[a + r0 * (i + n * b)]; }

  Eigen::Map<const Matrix> left() const { return {data.data(), r0 * n, r1}; }
  Eigen::Map<Matrix> left() { return {data.data(), r0 * n, r1}; }
  Eigen::Map<const Matrix> right() const { return {data.data(), r0, n * r1}; }
  Eigen::Map<Matrix> right() { return {data.data(), r0, n * r1}; }

  /// The r0 x r1 matrix G(:, i, :).
  Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(Eigen::Index i) const {
    return {data.data() + r0 * i, r0, r1, Eigen::OuterStride<>(r0 * n)};
  }
  Eigen::Map<Matrix, 0, Eigen::OuterStride<>> slice(Eigen::Index i) {
    return {data.data() + r0 * i, r0, r1, Eigen::OuterStride<>(r0 * n)};
  }

  static TTCore from_left(const Matrix& m, Eigen::Index r0, Eigen::Index n);
  static TTCore from_right(const Matrix& m, Eigen::Index n, Eigen::Index r1);
};

/// Four-way tensor in tensor-train format; element (i, j, k, l) is the
/// product G1(i) G2(j) G3(k) G4(l) of core slices.
class TTTensor {
public:
  TTTensor();
  /// Throws std::invalid_argument when adjacent ranks do not chain or the
  /// boundary ranks are not 1.
  explicit TTTensor(std::array<TTCore, 4> cores);

  static TTTensor zeros(const Shape4& sizes);
  static TTTensor constant(const Shape4& sizes, double value);
  /// Rank-1 tensor p(i) q(j) r(k) s(l).
  static TTTensor rank_one(const std::array<Eigen::VectorXd, 4>& factors);
  /// Cores with i.i.d. entries uniform in [lo, hi].
  static TTTensor random(const Shape4& sizes, const Ranks3& ranks, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0);

  Shape4 mode_sizes() const;
  Ranks3 ranks() const { return {cores_[0].r1, cores_[1].r1, cores_[2].r1}; }
  Eigen::Index max_rank() const;
  std::size_t parameter_count() const;

  const TTCore& core(std::size_t k) const { return cores_[k]; }
  TTCore& core(std::size_t k) { return cores_[k]; }
  const std::array<TTCore, 4>& cores() const { return cores_; }

  double element(const Index4& idx) const;

private:
  std::array<TTCore, 4> cores_;
};

/// Largest tensor tt_to_dense will materialize by default.
inline constexpr std::size_t kDenseElementCap = std::size_t{1} << 24;

/// TT-SVD with per-unfolding threshold eps ||A|| / sqrt(3).
TTTensor tt_from_dense(const DenseField& field, double eps);
/// Throws std::length_error when the tensor exceeds `cap` elements.
DenseField tt_to_dense(const TTTensor& t, std::size_t cap = kDenseElementCap);

/// Throws std::invalid_argument on mode-size mismatch.
TTTensor tt_add(const TTTensor& x, const TTTensor& y);
TTTensor tt_scale(const TTTensor& x, double alpha);
/// alpha x + beta y, ranks add.
TTTensor tt_axpby(double alpha, const TTTensor& x, double beta, const TTTensor& y);
TTTensor tt_hadamard(const TTTensor& x, const TTTensor& y);
double tt_dot(const TTTensor& x, const TTTensor& y);
/// Frobenius norm computed through an orthogonalization sweep.
double tt_norm(const TTTensor& x);

/// Two-pass TT rounding: right-to-left QR orthogonalization followed by a
/// left-to-right truncated-SVD sweep with threshold eps ||x|| / sqrt(3).
/// With eps = 0 only numerically zero singular values are dropped.
TTTensor tt_round(const TTTensor& x, double eps, Eigen::Index max_rank = -1);

/// Makes cores 0..2 left-orthogonal in place; returns the norm.
double tt_left_orthogonalize(TTTensor& x);

void require_same_modes(const TTTensor& x, const TTTensor& y, const char* what);

}  // namespace tnst
