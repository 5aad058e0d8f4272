#include "tnst/tt_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tnst {

namespace {

constexpr double kSqrtD1 = 1.7320508075688772;  // sqrt(d - 1) for d = 4

// Number of singular values to keep so that the discarded tail has 2-norm
// at most delta. Values below the numerical-rank floor are always dropped.
Eigen::Index truncation_rank(const Eigen::VectorXd& sigma, double delta, Eigen::Index rows, Eigen::Index cols,
                             Eigen::Index max_rank) {
  const Eigen::Index full = sigma.size();
  if (full == 0 || sigma[0] == 0.0) return 1;
  const double floor = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma[0];
  Eigen::Index r = full;
  double tail = 0.0;
  while (r > 1) {
    const double s = sigma[r - 1];
    if (s <= floor || tail + s * s <= delta * delta) {
      tail += s * s;
      --r;
    } else {
      break;
    }
  }
  if (max_rank > 0) r = std::min(r, max_rank);
  return std::max<Eigen::Index>(r, 1);
}

struct Truncated {
  Matrix u;   // rows x r
  Matrix sv;  // r x cols  (S V^T)
};

// Eigen 3.4's divide-and-conquer SVD can return inaccurate vectors, or read
// out of bounds, when the input has singular values far below round-off. A
// column-pivoted QR strips that part first (the dropped block is below
// epsilon * |m|), the factorization is checked by reconstruction, and the
// one-sided Jacobi SVD is the fallback.
struct SvdFactors {
  Matrix u;
  Eigen::VectorXd s;
  Matrix v;
};

SvdFactors jacobi_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SvdFactors thin_svd(const Matrix& m) {
  if (!m.allFinite()) throw std::domain_error("tt_round: non-finite entries");
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (k <= 16) return jacobi_svd(m);

  const double scale = m.norm();
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double cut = std::numeric_limits<double>::epsilon() * scale;
  Eigen::Index rank = k;
  double tail = 0.0;
  while (rank > 1) {
    const double row = r.row(rank - 1).squaredNorm();
    if (tail + row > cut * cut) break;
    tail += row;
    --rank;
  }
  const Matrix b = r.topRows(rank) * qr.colsPermutation().transpose();
  SvdFactors f;
  if (rank <= 16) {
    f = jacobi_svd(b);
  } else {
    Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    f = {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  f.u = qr.householderQ() * (Matrix::Identity(m.rows(), rank) * f.u);
  if ((m - f.u * f.s.asDiagonal() * f.v.transpose()).norm() <= 1e-12 * scale) return f;
  return jacobi_svd(m);
}

Truncated truncated_svd(const Matrix& m, double delta, Eigen::Index max_rank) {
  const SvdFactors svd = thin_svd(m);
  const Eigen::VectorXd& s = svd.s;
  const Eigen::Index r = truncation_rank(s, delta, m.rows(), m.cols(), max_rank);
  Truncated out;
  if (s.size() == 0 || s[0] == 0.0) {
    out.u = Matrix::Zero(m.rows(), 1);
    out.u(0, 0) = 1.0;
    out.sv = Matrix::Zero(1, m.cols());
    return out;
  }
  out.u = svd.u.leftCols(r);
  out.sv = s.head(r).asDiagonal() * svd.v.leftCols(r).transpose();
  return out;
}

// Thin QR: m = q * r with q having min(rows, cols) orthonormal columns.
void thin_qr(const Matrix& m, Matrix& q, Matrix& r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

}  // namespace

TTCore TTCore::from_left(const Matrix& m, Eigen::Index r0, Eigen::Index n) {
  if (m.rows() != r0 * n) throw std::invalid_argument("TTCore::from_left: bad unfolding size");
  TTCore c(r0, n, m.cols());
  c.left() = m;
  return c;
}

TTCore TTCore::from_right(const Matrix& m, Eigen::Index n, Eigen::Index r1) {
  if (m.cols() != n * r1) throw std::invalid_argument("TTCore::from_right: bad unfolding size");
  TTCore c(m.rows(), n, r1);
  c.right() = m;
  return c;
}

TTTensor::TTTensor() : TTTensor(zeros({1, 1, 1, 1})) {}

TTTensor::TTTensor(std::array<TTCore, 4> cores) : cores_(std::move(cores)) {
  if (cores_[0].r0 != 1 || cores_[3].r1 != 1) {
    throw std::invalid_argument("TTTensor: boundary ranks must be 1");
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& c = cores_[k];
    if (c.data.size() != c.r0 * c.n * c.r1 || c.n < 1 || c.r0 < 1 || c.r1 < 1) {
      throw std::invalid_argument("TTTensor: core " + std::to_string(k) + " has inconsistent size");
    }
    if (k < 3 && c.r1 != cores_[k + 1].r0) {
      throw std::invalid_argument("TTTensor: ranks of cores " + std::to_string(k) + " and " +
                                  std::to_string(k + 1) + " do not chain");
    }
  }
}

TTTensor TTTensor::zeros(const Shape4& sizes) {
  std::array<TTCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) cores[k] = TTCore(1, static_cast<Eigen::Index>(sizes[k]), 1);
  return TTTensor(std::move(cores));
}

TTTensor TTTensor::constant(const Shape4& sizes, double value) {
  std::array<Eigen::VectorXd, 4> f;
  for (std::size_t k = 0; k < 4; ++k) f[k] = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(sizes[k]));
  f[0] *= value;
  return rank_one(f);
}

TTTensor TTTensor::rank_one(const std::array<Eigen::VectorXd, 4>& factors) {
  std::array<TTCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    cores[k] = TTCore(1, factors[k].size(), 1);
    cores[k].data = factors[k];
  }
  return TTTensor(std::move(cores));
}

TTTensor TTTensor::random(const Shape4& sizes, const Ranks3& ranks, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::array<TTCore, 4> cores;
  Eigen::Index left = 1;
  for (std::size_t k = 0; k < 4; ++k) {
    const Eigen::Index right = (k < 3) ? ranks[k] : 1;
    cores[k] = TTCore(left, static_cast<Eigen::Index>(sizes[k]), right);
    for (Eigen::Index i = 0; i < cores[k].data.size(); ++i) cores[k].data[i] = dist(rng);
    left = right;
  }
  return TTTensor(std::move(cores));
}

Shape4 TTTensor::mode_sizes() const {
  return {static_cast<std::size_t>(cores_[0].n), static_cast<std::size_t>(cores_[1].n),
          static_cast<std::size_t>(cores_[2].n), static_cast<std::size_t>(cores_[3].n)};
}

Eigen::Index TTTensor::max_rank() const {
  const Ranks3 r = ranks();
  return *std::max_element(r.begin(), r.end());
}

std::size_t TTTensor::parameter_count() const {
  std::size_t total = 0;
  for (const auto& c : cores_) total += static_cast<std::size_t>(c.data.size());
  return total;
}

double TTTensor::element(const Index4& idx) const {
  Eigen::RowVectorXd v = cores_[0].slice(static_cast<Eigen::Index>(idx[0]));
  for (std::size_t k = 1; k < 4; ++k) v = v * cores_[k].slice(static_cast<Eigen::Index>(idx[k]));
  return v(0);
}

void require_same_modes(const TTTensor& x, const TTTensor& y, const char* what) {
  if (x.mode_sizes() != y.mode_sizes()) {
    throw std::invalid_argument(std::string(what) + ": mode sizes differ");
  }
}

TTTensor tt_from_dense(const DenseField& field, double eps) {
  if (eps < 0.0) throw std::invalid_argument("tt_from_dense: eps must be non-negative");
  const Shape4 s = field.shape();
  const double delta = eps * field.norm() / kSqrtD1;
  std::array<TTCore, 4> cores;

  // Row-major first unfolding n0 x (n1 n2 n3).
  Eigen::Index rest = static_cast<Eigen::Index>(s[1] * s[2] * s[3]);
  Matrix c = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      field.values().data(), static_cast<Eigen::Index>(s[0]), rest);
  Eigen::Index r_prev = 1;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto nk = static_cast<Eigen::Index>(s[k]);
    auto t = truncated_svd(c, delta, -1);
    const Eigen::Index r = t.u.cols();
    cores[k] = TTCore::from_left(t.u, r_prev, nk);
    // t.sv is r x (n_{k+1} * rest'), column index j * rest' + q. Regroup to
    // the left-unfolding layout (a + r * j) x q of the next step.
    const auto nk1 = static_cast<Eigen::Index>(s[k + 1]);
    const Eigen::Index rest_next = rest / nk1;
    Matrix next(r * nk1, rest_next);
    for (Eigen::Index j = 0; j < nk1; ++j)
      for (Eigen::Index q = 0; q < rest_next; ++q)
        for (Eigen::Index a = 0; a < r; ++a) next(a + r * j, q) = t.sv(a, j * rest_next + q);
    c = std::move(next);
    rest = rest_next;
    r_prev = r;
  }
  cores[3] = TTCore::from_left(c, r_prev, static_cast<Eigen::Index>(s[3]));
  return TTTensor(std::move(cores));
}

DenseField tt_to_dense(const TTTensor& t, std::size_t cap) {
  const Shape4 s = t.mode_sizes();
  const std::size_t total = element_count(s);
  if (total > cap) throw std::length_error("tt_to_dense: tensor exceeds the dense size cap");

  // Contract from the right: p holds (a, i_k, ..., i_3) with a fastest.
  Matrix p = t.core(3).left();  // (r2 * n3) x 1, row a + r2 * l
  Eigen::Index trailing = static_cast<Eigen::Index>(s[3]);
  for (int k = 2; k >= 0; --k) {
    const TTCore& c = t.core(static_cast<std::size_t>(k));
    // Reinterpret p as r_k x trailing, then left-unfolding times it.
    Eigen::Map<const Matrix> pm(p.data(), c.r1, trailing);
    Matrix next = c.left() * pm;  // (r0 * n) x trailing, row a + r0 * i
    trailing *= c.n;
    p = Eigen::Map<const Matrix>(next.data(), next.size(), 1);
  }
  // p now has i0 fastest; reorder to t-slowest layout.
  DenseField out(s);
  Eigen::VectorXd& v = out.values();
  std::size_t idx = 0;
  for (std::size_t l = 0; l < s[3]; ++l)
    for (std::size_t k = 0; k < s[2]; ++k)
      for (std::size_t j = 0; j < s[1]; ++j)
        for (std::size_t i = 0; i < s[0]; ++i)
          v[static_cast<Eigen::Index>(out.offset({i, j, k, l}))] = p(static_cast<Eigen::Index>(idx++), 0);
  return out;
}

TTTensor tt_axpby(double alpha, const TTTensor& x, double beta, const TTTensor& y) {
  require_same_modes(x, y, "tt_add");
  std::array<TTCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTCore& a = x.core(k);
    const TTCore& b = y.core(k);
    const Eigen::Index r0 = (k == 0) ? 1 : a.r0 + b.r0;
    const Eigen::Index r1 = (k == 3) ? 1 : a.r1 + b.r1;
    TTCore c(r0, a.n, r1);
    const Eigen::Index off0 = (k == 0) ? 0 : a.r0;
    const Eigen::Index off1 = (k == 3) ? 0 : a.r1;
    const double sa = (k == 0) ? alpha : 1.0;
    const double sb = (k == 0) ? beta : 1.0;
    for (Eigen::Index i = 0; i < a.n; ++i) {
      c.slice(i).block(0, 0, a.r0, a.r1) = sa * a.slice(i);
      auto blk = c.slice(i).block(off0, off1, b.r0, b.r1);
      if (k == 0 || k == 3) {
        blk += sb * b.slice(i);
      } else {
        blk = sb * b.slice(i);
      }
    }
    cores[k] = std::move(c);
  }
  return TTTensor(std::move(cores));
}

TTTensor tt_add(const TTTensor& x, const TTTensor& y) { return tt_axpby(1.0, x, 1.0, y); }

TTTensor tt_scale(const TTTensor& x, double alpha) {
  TTTensor out = x;
  out.core(0).data *= alpha;
  return out;
}

TTTensor tt_hadamard(const TTTensor& x, const TTTensor& y) {
  require_same_modes(x, y, "tt_hadamard");
  std::array<TTCore, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) {
    const TTCore& a = x.core(k);
    const TTCore& b = y.core(k);
    TTCore c(a.r0 * b.r0, a.n, a.r1 * b.r1);
    for (Eigen::Index i = 0; i < a.n; ++i) {
      // Kronecker product of slices; combined index is b-index + rb * a-index.
      const auto as = a.slice(i);
      const auto bs = b.slice(i);
      auto cs = c.slice(i);
      for (Eigen::Index p = 0; p < a.r0; ++p)
        for (Eigen::Index q = 0; q < a.r1; ++q) cs.block(p * b.r0, q * b.r1, b.r0, b.r1) = as(p, q) * bs;
    }
    cores[k] = std::move(c);
  }
  return TTTensor(std::move(cores));
}

double tt_dot(const TTTensor& x, const TTTensor& y) {
  require_same_modes(x, y, "tt_dot");
  Matrix v = Matrix::Ones(1, 1);
  for (std::size_t k = 0; k < 4; ++k) {
    const TTCore& a = x.core(k);
    const TTCore& b = y.core(k);
    Matrix next = Matrix::Zero(a.r1, b.r1);
    for (Eigen::Index i = 0; i < a.n; ++i) next.noalias() += a.slice(i).transpose() * v * b.slice(i);
    v = std::move(next);
  }
  return v(0, 0);
}

double tt_left_orthogonalize(TTTensor& x) {
  for (std::size_t k = 0; k < 3; ++k) {
    TTCore& c = x.core(k);
    Matrix q, r;
    thin_qr(c.left(), q, r);
    const Eigen::Index n = c.n, r0 = c.r0;
    TTCore& next = x.core(k + 1);
    Matrix merged = r * next.right();
    const Eigen::Index n1 = next.n, r1 = next.r1;
    c = TTCore::from_left(q, r0, n);
    next = TTCore::from_right(merged, n1, r1);
  }
  return x.core(3).data.norm();
}

double tt_norm(const TTTensor& x) {
  TTTensor copy = x;
  return tt_left_orthogonalize(copy);
}

TTTensor tt_round(const TTTensor& x, double eps, Eigen::Index max_rank) {
  if (eps < 0.0) throw std::invalid_argument("tt_round: eps must be non-negative");
  TTTensor y = x;
  // Right-to-left orthogonalization: cores 1..3 become right-orthogonal.
  for (std::size_t k = 3; k >= 1; --k) {
    TTCore& c = y.core(k);
    Matrix q, r;
    thin_qr(c.right().transpose(), q, r);  // right^T = q r  =>  right = r^T q^T
    const Eigen::Index n = c.n, r1 = c.r1;
    TTCore& prev = y.core(k - 1);
    Matrix merged = prev.left() * r.transpose();
    const Eigen::Index pr0 = prev.r0, pn = prev.n;
    c = TTCore::from_right(q.transpose(), n, r1);
    prev = TTCore::from_left(merged, pr0, pn);
  }
  const double norm = y.core(0).data.norm();
  if (norm == 0.0) return TTTensor::zeros(x.mode_sizes());
  const double delta = eps * norm / kSqrtD1;

  for (std::size_t k = 0; k < 3; ++k) {
    TTCore& c = y.core(k);
    auto t = truncated_svd(c.left(), delta, max_rank);
    const Eigen::Index r0 = c.r0, n = c.n;
    TTCore& next = y.core(k + 1);
    Matrix merged = t.sv * next.right();
    const Eigen::Index n1 = next.n, r1 = next.r1;
    c = TTCore::from_left(t.u, r0, n);
    next = TTCore::from_right(merged, n1, r1);
  }
  return y;
}

}  // namespace tnst
