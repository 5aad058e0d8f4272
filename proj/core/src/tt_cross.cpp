#include "tnst/tt_cross.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace tnst {

std::vector<Eigen::Index> maxvol(const Matrix& m, double tol, int max_sweeps) {
  const Eigen::Index n = m.rows(), r = m.cols();
  if (r == 0) return {};
  if (n < r) throw std::invalid_argument("maxvol: matrix must have at least as many rows as columns");

  // Greedy start from Gaussian elimination with row pivoting.
  Matrix a = m;
  std::vector<Eigen::Index> rows;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw std::domain_error("maxvol: zero matrix");
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index best = -1;
    double best_val = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double v = std::abs(a(i, j));
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best < 0 || best_val <= 1e-13 * scale) throw std::domain_error("maxvol: matrix is rank deficient");
    used[static_cast<std::size_t>(best)] = true;
    rows.push_back(best);
    if (j + 1 < r) {
      const Eigen::RowVectorXd pivot = a.row(best).tail(r - j - 1) / a(best, j);
      a.rightCols(r - j - 1).noalias() -= a.col(j) * pivot;
    }
  }

  Matrix sub(r, r);
  for (Eigen::Index j = 0; j < r; ++j) sub.row(j) = m.row(rows[static_cast<std::size_t>(j)]);
  Eigen::FullPivLU<Matrix> lu(sub);
  if (!lu.isInvertible()) throw std::domain_error("maxvol: selected submatrix is singular");
  Matrix b = lu.solve(Matrix::Identity(r, r));  // sub^{-1}
  b = m * b;                                     // n x r, identity on selected rows

  for (int sweep = 0; sweep < max_sweeps * r; ++sweep) {
    Eigen::Index i = 0, j = 0;
    const double big = b.cwiseAbs().maxCoeff(&i, &j);
    if (big <= 1.0 + tol) break;
    // Swap row rows[j] out for row i. Rank-one update of B.
    const Eigen::VectorXd col = b.col(j);
    Eigen::RowVectorXd row = b.row(i);
    row(j) -= 1.0;
    b.noalias() -= col * row / b(i, j);
    rows[static_cast<std::size_t>(j)] = i;
  }
  return rows;
}

namespace {

// Uniform random multi-index restricted to modes [from, to).
Index4 random_index(const Shape4& sizes, std::mt19937_64& rng, std::size_t from = 0, std::size_t to = 4) {
  Index4 idx{0, 0, 0, 0};
  for (std::size_t k = from; k < to; ++k) {
    std::uniform_int_distribution<std::size_t> d(0, sizes[k] - 1);
    idx[k] = d(rng);
  }
  return idx;
}

// Keeps singular values above rel * sigma_max, at most cap.
Eigen::Index keep_rank(const Eigen::VectorXd& s, double rel, Eigen::Index cap) {
  if (s.size() == 0 || s[0] <= 0.0) return 1;
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > rel * s[0]) ++r;
  return std::clamp<Eigen::Index>(r, 1, cap);
}

class CrossEngine {
public:
  CrossEngine(const BatchEvaluator& f, const Shape4& sizes, const CrossOptions& opt)
      : f_(f), sizes_(sizes), opt_(opt), rng_(opt.seed) {
    for (std::size_t k = 0; k < 4; ++k) n_[k] = static_cast<Eigen::Index>(sizes[k]);
    // right_[k] holds indices for modes k..3, used as columns at bond k-1|k.
    for (std::size_t k = 1; k < 4; ++k) {
      for (Eigen::Index q = 0; q < opt.initial_rank; ++q) right_[k].push_back(random_index(sizes, rng_, k, 4));
    }
    left_[0] = {Index4{0, 0, 0, 0}};
    right_[4] = {Index4{0, 0, 0, 0}};
    std::mt19937_64 vrng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    validation_.reserve(opt.validation_size);
    for (std::size_t q = 0; q < opt.validation_size; ++q) validation_.push_back(random_index(sizes, vrng));
    validation_values_.resize(validation_.size());
    evaluate(validation_, validation_values_);
  }

  CrossResult run() {
    CrossResult best;
    double best_err = std::numeric_limits<double>::infinity();
    int sweeps = 0;
    for (int s = 0; s < opt_.max_sweeps; ++s) {
      TTTensor t = (s % 2 == 0) ? sweep_left_to_right() : sweep_right_to_left();
      ++sweeps;
      const double err = validation_error(t);
      if (err < best_err) {
        best_err = err;
        best.tensor = std::move(t);
      }
      if (err <= opt_.eps) break;
    }
    best.report.converged = best_err <= opt_.eps;
    best.report.validation_error = best_err;
    best.report.sweeps = sweeps;
    best.report.evaluations = evaluations_;
    return best;
  }

private:
  void evaluate(const std::vector<Index4>& idx, std::vector<double>& out) {
    out.resize(idx.size());
    if (idx.empty()) return;
    f_(std::span<const Index4>(idx), std::span<double>(out));
    evaluations_ += idx.size();
    for (double v : out) {
      if (!std::isfinite(v)) throw std::domain_error("tt_cross: evaluator returned a non-finite value");
    }
  }

  static Index4 merge(const Index4& left, const Index4& right, std::size_t k, Eigen::Index i) {
    Index4 idx = right;
    for (std::size_t m = 0; m < k; ++m) idx[m] = left[m];
    idx[k] = static_cast<std::size_t>(i);
    return idx;
  }

  // Fiber matrix with rows a + rl * i over left_[k] x mode k and columns over cols.
  Matrix left_fiber(std::size_t k, const std::vector<Index4>& cols) {
    const auto& lset = left_[k];
    const Eigen::Index rl = static_cast<Eigen::Index>(lset.size());
    const Eigen::Index n = n_[k];
    std::vector<Index4> idx;
    idx.reserve(static_cast<std::size_t>(rl * n) * cols.size());
    for (const auto& c : cols)
      for (Eigen::Index i = 0; i < n; ++i)
        for (const auto& l : lset) idx.push_back(merge(l, c, k, i));
    std::vector<double> v;
    evaluate(idx, v);
    return Eigen::Map<const Matrix>(v.data(), rl * n, static_cast<Eigen::Index>(cols.size()));
  }

  std::vector<Index4> enriched(const std::vector<Index4>& base, std::size_t from, std::size_t to) {
    std::vector<Index4> out = base;
    for (Eigen::Index q = 0; q < opt_.rank_step; ++q) out.push_back(random_index(sizes_, rng_, from, to));
    return out;
  }

  // Orthonormal basis of the dominant column space of m.
  Matrix dominant_basis(const Matrix& m) const {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const Eigen::Index r = keep_rank(svd.singularValues(), opt_.eps * 1e-2, std::min(opt_.rank_cap, m.cols()));
    return svd.matrixU().leftCols(r);
  }

  TTTensor sweep_left_to_right() {
    std::array<TTCore, 4> cores;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto cols = enriched(right_[k + 1], k + 1, 4);
      const Matrix c = left_fiber(k, cols);
      const Matrix q = dominant_basis(c);
      const auto rows = maxvol(q, opt_.maxvol_tol);
      Matrix sub(q.cols(), q.cols());
      for (Eigen::Index j = 0; j < q.cols(); ++j) sub.row(j) = q.row(rows[static_cast<std::size_t>(j)]);
      const Matrix interp = q * sub.fullPivLu().inverse();
      const Eigen::Index rl = static_cast<Eigen::Index>(left_[k].size());
      cores[k] = TTCore::from_left(interp, rl, n_[k]);
      std::vector<Index4> next;
      for (Eigen::Index row : rows) {
        const Eigen::Index a = row % rl, i = row / rl;
        Index4 idx = left_[k][static_cast<std::size_t>(a)];
        idx[k] = static_cast<std::size_t>(i);
        next.push_back(idx);
      }
      left_[k + 1] = std::move(next);
    }
    const Matrix last = left_fiber(3, right_[4]);
    cores[3] = TTCore::from_left(last, static_cast<Eigen::Index>(left_[3].size()), n_[3]);
    return TTTensor(std::move(cores));
  }

  TTTensor sweep_right_to_left() {
    std::array<TTCore, 4> cores;
    for (std::size_t k = 3; k >= 1; --k) {
      const auto rows_left = enriched(left_[k], 0, k);
      const auto& rset = right_[k + 1];
      const Eigen::Index rr = static_cast<Eigen::Index>(rset.size());
      const Eigen::Index rl = static_cast<Eigen::Index>(rows_left.size());
      const Eigen::Index n = n_[k];
      // m(i + n * b, a) = f(left a, i, right b)
      std::vector<Index4> idx;
      idx.reserve(static_cast<std::size_t>(rl * n * rr));
      for (const auto& l : rows_left)
        for (const auto& r : rset)
          for (Eigen::Index i = 0; i < n; ++i) idx.push_back(merge(l, r, k, i));
      std::vector<double> v;
      evaluate(idx, v);
      const Matrix m = Eigen::Map<const Matrix>(v.data(), n * rr, rl);
      const Matrix q = dominant_basis(m);
      const auto rows = maxvol(q, opt_.maxvol_tol);
      Matrix sub(q.cols(), q.cols());
      for (Eigen::Index j = 0; j < q.cols(); ++j) sub.row(j) = q.row(rows[static_cast<std::size_t>(j)]);
      const Matrix interp = q * sub.fullPivLu().inverse();  // (n rr) x r
      cores[k] = TTCore::from_right(interp.transpose(), n, rr);
      std::vector<Index4> next;
      for (Eigen::Index row : rows) {
        const Eigen::Index i = row % n, b = row / n;
        Index4 id = rset[static_cast<std::size_t>(b)];
        id[k] = static_cast<std::size_t>(i);
        next.push_back(id);
      }
      right_[k] = std::move(next);
    }
    const Matrix first = left_fiber(0, right_[1]);
    cores[0] = TTCore::from_left(first, 1, n_[0]);
    return TTTensor(std::move(cores));
  }

  double validation_error(const TTTensor& t) const {
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < validation_.size(); ++q) {
      const double d = t.element(validation_[q]) - validation_values_[q];
      num += d * d;
      den += validation_values_[q] * validation_values_[q];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }

  const BatchEvaluator& f_;
  Shape4 sizes_;
  CrossOptions opt_;
  std::mt19937_64 rng_;
  std::array<Eigen::Index, 4> n_{};
  std::array<std::vector<Index4>, 5> left_;   // left_[k]: indices for modes 0..k-1
  std::array<std::vector<Index4>, 5> right_;  // right_[k]: indices for modes k..3
  std::vector<Index4> validation_;
  std::vector<double> validation_values_;
  std::size_t evaluations_ = 0;
};

}  // namespace

CrossResult tt_cross(const BatchEvaluator& f, const Shape4& sizes, const CrossOptions& options) {
  for (std::size_t k = 0; k < 4; ++k) {
    if (sizes[k] == 0) throw std::invalid_argument("tt_cross: mode sizes must be positive");
  }
  if (options.eps <= 0.0 || options.rank_cap < 1 || options.initial_rank < 1) {
    throw std::invalid_argument("tt_cross: invalid options");
  }
  CrossEngine engine(f, sizes, options);
  return engine.run();
}

CrossResult tt_cross(const PointEvaluator& f, const Shape4& sizes, const CrossOptions& options) {
  BatchEvaluator batch = [&f](std::span<const Index4> idx, std::span<double> out) {
    for (std::size_t q = 0; q < idx.size(); ++q) out[q] = f(idx[q]);
  };
  return tt_cross(batch, sizes, options);
}

}  // namespace tnst
