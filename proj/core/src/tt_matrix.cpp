#include "tnst/tt_matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tnst {

Matrix TTMatrixCore::block(Eigen::Index a, Eigen::Index b) const {
  Matrix out(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) out(i, j) = (*this)(a, i, j, b);
  return out;
}

void TTMatrixCore::set_block(Eigen::Index a, Eigen::Index b, const Matrix& value) {
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) (*this)(a, i, j, b) = value(i, j);
}

TTMatrixCore TTMatrixCore::from_matrix(const Matrix& value) {
  TTMatrixCore c(1, value.rows(), value.cols(), 1);
  c.data = Eigen::Map<const Eigen::VectorXd>(value.data(), value.size());
  c.identity = value.rows() == value.cols() && value.isIdentity(0.0);
  return c;
}

TTMatrixCore TTMatrixCore::identity_core(Eigen::Index size) {
  TTMatrixCore c = from_matrix(Matrix::Identity(size, size));
  c.identity = true;
  return c;
}

TTMatrix::TTMatrix() : TTMatrix(identity({1, 1, 1, 1})) {}

TTMatrix::TTMatrix(std::array<TTMatrixCore, 4> cores) : cores_(std::move(cores)) {
  if (cores_[0].r0 != 1 || cores_[3].r1 != 1) throw std::invalid_argument("TTMatrix: boundary ranks must be 1");
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& c = cores_[k];
    if (c.data.size() != c.r0 * c.m * c.n * c.r1) {
      throw std::invalid_argument("TTMatrix: core " + std::to_string(k) + " has inconsistent size");
    }
    if (k < 3 && c.r1 != cores_[k + 1].r0) throw std::invalid_argument("TTMatrix: ranks do not chain");
  }
}

TTMatrix TTMatrix::identity(const Shape4& sizes) {
  std::array<TTMatrixCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) cores[k] = TTMatrixCore::identity_core(static_cast<Eigen::Index>(sizes[k]));
  return TTMatrix(std::move(cores));
}

TTMatrix TTMatrix::kronecker(const std::array<Matrix, 4>& factors, double scale) {
  std::array<TTMatrixCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) cores[k] = TTMatrixCore::from_matrix(factors[k]);
  if (scale != 1.0) {
    cores[0].data *= scale;
    cores[0].identity = false;
  }
  return TTMatrix(std::move(cores));
}

TTMatrix TTMatrix::kronecker_sum(const std::array<std::optional<Matrix>, 4>& operators, const Shape4& sizes) {
  std::array<Matrix, 4> ops;
  std::array<Matrix, 4> eye;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto n = static_cast<Eigen::Index>(sizes[k]);
    eye[k] = Matrix::Identity(n, n);
    if (operators[k]) {
      if (operators[k]->rows() != n || operators[k]->cols() != n) {
        throw std::invalid_argument("TTMatrix::kronecker_sum: operator " + std::to_string(k) + " does not conform");
      }
      ops[k] = *operators[k];
    } else {
      ops[k] = Matrix::Zero(n, n);
    }
  }
  std::array<TTMatrixCore, 4> cores;
  const auto n0 = eye[0].rows(), n3 = eye[3].rows();
  cores[0] = TTMatrixCore(1, n0, n0, 2);
  cores[0].set_block(0, 0, ops[0]);
  cores[0].set_block(0, 1, eye[0]);
  for (std::size_t k = 1; k < 3; ++k) {
    const auto n = eye[k].rows();
    cores[k] = TTMatrixCore(2, n, n, 2);
    cores[k].set_block(0, 0, eye[k]);
    cores[k].set_block(1, 0, ops[k]);
    cores[k].set_block(1, 1, eye[k]);
  }
  cores[3] = TTMatrixCore(2, n3, n3, 1);
  cores[3].set_block(0, 0, eye[3]);
  cores[3].set_block(1, 0, ops[3]);
  return TTMatrix(std::move(cores));
}

Shape4 TTMatrix::row_sizes() const {
  Shape4 s{};
  for (std::size_t k = 0; k < 4; ++k) s[k] = static_cast<std::size_t>(cores_[k].m);
  return s;
}

Shape4 TTMatrix::col_sizes() const {
  Shape4 s{};
  for (std::size_t k = 0; k < 4; ++k) s[k] = static_cast<std::size_t>(cores_[k].n);
  return s;
}

Eigen::Index TTMatrix::max_rank() const {
  const Ranks3 r = ranks();
  return *std::max_element(r.begin(), r.end());
}

TTMatrix tt_from_kronecker(const KroneckerTerm& term, const Shape4& sizes) {
  std::array<Matrix, 4> f;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto n = static_cast<Eigen::Index>(sizes[k]);
    f[k] = term.factors[k] ? *term.factors[k] : Matrix::Identity(n, n);
  }
  return TTMatrix::kronecker(f, term.scale);
}

namespace {

bool block_is_zero(const TTMatrixCore& c, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index j = 0; j < c.n; ++j)
    for (Eigen::Index i = 0; i < c.m; ++i)
      if (c(a, i, j, b) != 0.0) return false;
  return true;
}

TTCore as_vector_core(const TTMatrixCore& c) {
  TTCore v(c.r0, c.m * c.n, c.r1);
  v.data = c.data;
  return v;
}

}  // namespace

TTTensor tt_matvec(const TTMatrix& a, const TTTensor& x) {
  if (a.col_sizes() != x.mode_sizes()) throw std::invalid_argument("tt_matvec: column modes do not match the vector");
  std::array<TTCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTMatrixCore& ac = a.core(k);
    const TTCore& xc = x.core(k);
    if (ac.identity) {
      cores[k] = xc;
      continue;
    }
    const Eigen::Index rx0 = xc.r0, rx1 = xc.r1, n = ac.n, m = ac.m;
    // xp(j, alpha + rx0 * beta) = X(alpha, j, beta)
    Matrix xp(n, rx0 * rx1);
    for (Eigen::Index b = 0; b < rx1; ++b)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index al = 0; al < rx0; ++al) xp(j, al + rx0 * b) = xc(al, j, b);
    TTCore yc(rx0 * ac.r0, m, rx1 * ac.r1);
    for (Eigen::Index bb = 0; bb < ac.r1; ++bb) {
      for (Eigen::Index aa = 0; aa < ac.r0; ++aa) {
        if (block_is_zero(ac, aa, bb)) continue;
        const Matrix yab = ac.block(aa, bb) * xp;  // m x (rx0 rx1)
        for (Eigen::Index be = 0; be < rx1; ++be)
          for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index al = 0; al < rx0; ++al) yc(al + rx0 * aa, i, be + rx1 * bb) = yab(i, al + rx0 * be);
      }
    }
    cores[k] = std::move(yc);
  }
  return TTTensor(std::move(cores));
}

TTTensor tt_matvec_round(const TTMatrix& a, const TTTensor& x, double eps) {
  if (a.col_sizes() != x.mode_sizes()) {
    throw std::invalid_argument("tt_matvec_round: column modes do not match the vector");
  }
  // Left-to-right sweep. `carry` (r x rx0 ra0, column al + rx0 aa) holds the
  // part of the product not yet absorbed into an output core; an empty carry
  // stands for the identity.
  std::array<TTCore, 4> cores;
  Matrix carry;
  bool have_carry = false;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTMatrixCore& ac = a.core(k);
    const TTCore& xc = x.core(k);
    const Eigen::Index rx0 = xc.r0, rx1 = xc.r1, n = ac.n, m = ac.m, ra0 = ac.r0, ra1 = ac.r1;
    const Eigen::Index r = have_carry ? carry.rows() : rx0 * ra0;

    // tp(j + n aa, rho + r be) = sum_al carry(rho, al + rx0 aa) X(al, j, be)
    Matrix tp(n * ra0, r * rx1);
    for (Eigen::Index aa = 0; aa < ra0; ++aa) {
      Matrix t;
      if (have_carry) {
        t = carry.middleCols(rx0 * aa, rx0) * xc.right();  // r x (n rx1)
      } else {
        t = Matrix::Zero(r, n * rx1);
        t.middleRows(rx0 * aa, rx0) = xc.right();
      }
      for (Eigen::Index be = 0; be < rx1; ++be)
        for (Eigen::Index j = 0; j < n; ++j) tp.block(j + n * aa, r * be, 1, r) = t.col(j + n * be).transpose();
    }

    // z(rho + r i, be + rx1 bb) = sum_{aa, j} A(aa, i, j, bb) tp(j + n aa, rho + r be)
    Matrix z(r * m, rx1 * ra1);
    Matrix ab(m, n * ra0);
    for (Eigen::Index bb = 0; bb < ra1; ++bb) {
      for (Eigen::Index aa = 0; aa < ra0; ++aa)
        for (Eigen::Index j = 0; j < n; ++j)
          for (Eigen::Index i = 0; i < m; ++i) ab(i, j + n * aa) = ac(aa, i, j, bb);
      const Matrix s = ab * tp;  // m x (r rx1)
      for (Eigen::Index be = 0; be < rx1; ++be)
        for (Eigen::Index i = 0; i < m; ++i)
          z.col(be + rx1 * bb).segment(r * i, r) = s.row(i).segment(r * be, r).transpose();
    }

    if (k == 3 || r * m > z.cols()) {
      cores[k] = TTCore::from_left(z, r, m);
      have_carry = false;
    } else {
      cores[k] = TTCore::from_left(Matrix::Identity(r * m, r * m), r, m);
      carry = std::move(z);
      have_carry = true;
    }
  }
  return tt_round(TTTensor(std::move(cores)), eps);
}

TTMatrix tt_diag(const TTTensor& v) {
  std::array<TTMatrixCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTCore& c = v.core(k);
    TTMatrixCore d(c.r0, c.n, c.n, c.r1);
    for (Eigen::Index b = 0; b < c.r1; ++b)
      for (Eigen::Index i = 0; i < c.n; ++i)
        for (Eigen::Index a = 0; a < c.r0; ++a) d(a, i, i, b) = c(a, i, b);
    cores[k] = std::move(d);
  }
  return TTMatrix(std::move(cores));
}

TTMatrix tt_compose(const TTMatrix& a, const TTMatrix& b) {
  if (a.col_sizes() != b.row_sizes()) throw std::invalid_argument("tt_compose: inner modes do not match");
  std::array<TTMatrixCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTMatrixCore& ac = a.core(k);
    const TTMatrixCore& bc = b.core(k);
    if (ac.identity) {
      cores[k] = bc;
      continue;
    }
    if (bc.identity) {
      cores[k] = ac;
      continue;
    }
    TTMatrixCore c(ac.r0 * bc.r0, ac.m, bc.n, ac.r1 * bc.r1);
    for (Eigen::Index ab = 0; ab < ac.r1; ++ab)
      for (Eigen::Index aa = 0; aa < ac.r0; ++aa) {
        if (block_is_zero(ac, aa, ab)) continue;
        const Matrix ablk = ac.block(aa, ab);
        for (Eigen::Index bb = 0; bb < bc.r1; ++bb)
          for (Eigen::Index ba = 0; ba < bc.r0; ++ba) {
            if (block_is_zero(bc, ba, bb)) continue;
            c.set_block(ba + bc.r0 * aa, bb + bc.r1 * ab, ablk * bc.block(ba, bb));
          }
      }
    cores[k] = std::move(c);
  }
  return TTMatrix(std::move(cores));
}

TTMatrix tt_matrix_add(const TTMatrix& a, const TTMatrix& b) {
  if (a.row_sizes() != b.row_sizes() || a.col_sizes() != b.col_sizes()) {
    throw std::invalid_argument("tt_matrix_add: mode sizes differ");
  }
  std::array<TTMatrixCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTMatrixCore& x = a.core(k);
    const TTMatrixCore& y = b.core(k);
    const Eigen::Index r0 = (k == 0) ? 1 : x.r0 + y.r0;
    const Eigen::Index r1 = (k == 3) ? 1 : x.r1 + y.r1;
    const Eigen::Index off0 = (k == 0) ? 0 : x.r0;
    const Eigen::Index off1 = (k == 3) ? 0 : x.r1;
    TTMatrixCore c(r0, x.m, x.n, r1);
    for (Eigen::Index bb = 0; bb < x.r1; ++bb)
      for (Eigen::Index j = 0; j < x.n; ++j)
        for (Eigen::Index i = 0; i < x.m; ++i)
          for (Eigen::Index aa = 0; aa < x.r0; ++aa) c(aa, i, j, bb) += x(aa, i, j, bb);
    for (Eigen::Index bb = 0; bb < y.r1; ++bb)
      for (Eigen::Index j = 0; j < y.n; ++j)
        for (Eigen::Index i = 0; i < y.m; ++i)
          for (Eigen::Index aa = 0; aa < y.r0; ++aa) c(aa + off0, i, j, bb + off1) += y(aa, i, j, bb);
    cores[k] = std::move(c);
  }
  return TTMatrix(std::move(cores));
}

TTMatrix tt_matrix_scale(const TTMatrix& a, double alpha) {
  TTMatrix out = a;
  out.core(0).data *= alpha;
  out.core(0).identity = out.core(0).identity && alpha == 1.0;
  return out;
}

TTMatrix tt_matrix_round(const TTMatrix& a, double eps) {
  std::array<TTCore, 4> vc;
  for (std::size_t k = 0; k < 4; ++k) vc[k] = as_vector_core(a.core(k));
  const TTTensor rounded = tt_round(TTTensor(std::move(vc)), eps);
  std::array<TTMatrixCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTCore& c = rounded.core(k);
    TTMatrixCore mc(c.r0, a.core(k).m, a.core(k).n, c.r1);
    mc.data = c.data;
    cores[k] = std::move(mc);
  }
  return TTMatrix(std::move(cores));
}

double tt_matrix_norm(const TTMatrix& a) {
  std::array<TTCore, 4> vc;
  for (std::size_t k = 0; k < 4; ++k) vc[k] = as_vector_core(a.core(k));
  return tt_norm(TTTensor(std::move(vc)));
}

Matrix tt_matrix_to_dense(const TTMatrix& a, std::size_t cap) {
  const Shape4 rs = a.row_sizes(), cs = a.col_sizes();
  const std::size_t rows = element_count(rs), cols = element_count(cs);
  if (rows * cols > cap) throw std::length_error("tt_matrix_to_dense: operator exceeds the dense size cap");
  std::array<TTCore, 4> vc;
  for (std::size_t k = 0; k < 4; ++k) vc[k] = as_vector_core(a.core(k));
  const DenseField pairs = tt_to_dense(TTTensor(std::move(vc)), cap);
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i0 = 0; i0 < rs[0]; ++i0)
    for (std::size_t i1 = 0; i1 < rs[1]; ++i1)
      for (std::size_t i2 = 0; i2 < rs[2]; ++i2)
        for (std::size_t i3 = 0; i3 < rs[3]; ++i3) {
          const std::size_t row = ((i0 * rs[1] + i1) * rs[2] + i2) * rs[3] + i3;
          for (std::size_t j0 = 0; j0 < cs[0]; ++j0)
            for (std::size_t j1 = 0; j1 < cs[1]; ++j1)
              for (std::size_t j2 = 0; j2 < cs[2]; ++j2)
                for (std::size_t j3 = 0; j3 < cs[3]; ++j3) {
                  const std::size_t col = ((j0 * cs[1] + j1) * cs[2] + j2) * cs[3] + j3;
                  out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                      pairs({i0 + rs[0] * j0, i1 + rs[1] * j1, i2 + rs[2] * j2, i3 + rs[3] * j3});
                }
        }
  return out;
}

}  // namespace tnst
