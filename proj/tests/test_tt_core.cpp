#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tnst/chebyshev.hpp"
#include "tnst/kronecker.hpp"
#include "tnst/problems.hpp"
#include "tnst/tt_cross.hpp"
#include "tnst/tt_io.hpp"
#include "tnst/tt_newton.hpp"
#include "tnst/tt_matrix.hpp"
#include "tnst/tt_tensor.hpp"

using namespace tnst;

namespace {

DenseField random_field(const Shape4& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  return DenseField::from_function(shape, [&](const Index4&) { return dist(rng); });
}

double rel_diff(const DenseField& a, const DenseField& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// Per-element matrix-product evaluation G1(i) G2(j) G3(k) G4(l).
double element_oracle(const TTTensor& t, const Index4& idx) {
  Matrix v = Matrix::Ones(1, 1);
  for (std::size_t k = 0; k < 4; ++k) {
    const TTCore& c = t.core(k);
    Matrix s(c.r0, c.r1);
    for (Eigen::Index a = 0; a < c.r0; ++a)
      for (Eigen::Index b = 0; b < c.r1; ++b) s(a, b) = c(a, static_cast<Eigen::Index>(idx[k]), b);
    v = v * s;
  }
  return v(0, 0);
}

// Tensor with geometrically decaying components so that truncation is active.
TTTensor graded_tensor(const Shape4& sizes, std::mt19937_64& rng, int terms) {
  TTTensor x = TTTensor::random(sizes, {1, 1, 1}, rng);
  for (int k = 1; k < terms; ++k) {
    const TTTensor y = TTTensor::random(sizes, {1 + k % 3, 2, 1 + k % 2}, rng);
    x = tt_axpby(1.0, x, std::pow(10.0, -0.7 * k), y);
  }
  return x;
}

}  // namespace

TEST(TTFromDense, SeparableFieldHasRankOne) {
  const DenseField f = DenseField::from_function({5, 4, 3, 6}, [](const Index4& i) {
    return (1.0 + static_cast<double>(i[0])) * std::cos(static_cast<double>(i[1])) * (2.0 - static_cast<double>(i[2])) *
           std::exp(0.1 * static_cast<double>(i[3]));
  });
  const TTTensor t = tt_from_dense(f, 1e-12);
  EXPECT_EQ(t.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_LT(rel_diff(tt_to_dense(t), f), 1e-13);
}

TEST(TTFromDense, ZeroField) {
  const TTTensor t = tt_from_dense(DenseField({3, 3, 3, 3}), 1e-8);
  EXPECT_EQ(t.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_EQ(tt_to_dense(t).max_abs(), 0.0);
}

TEST(TTFromDense, RandomRoundTrip) {
  std::mt19937_64 rng(41);
  const DenseField f = random_field({4, 4, 4, 4}, rng);
  EXPECT_LE(rel_diff(tt_to_dense(tt_from_dense(f, 1e-10)), f), 1e-10);
  EXPECT_LE(rel_diff(tt_to_dense(tt_from_dense(f, 0.0)), f), 1e-13);
  EXPECT_THROW(tt_from_dense(f, -1.0), std::invalid_argument);
}

TEST(TTFromDense, ErrorBoundAndExactRanks) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const TTTensor x = TTTensor::random({5, 6, 5, 4}, {2, 3, 2}, rng);
    const DenseField f = tt_to_dense(x);
    const TTTensor t = tt_from_dense(f, 0.0);
    EXPECT_EQ(t.ranks(), (Ranks3{2, 3, 2}));
    for (double eps : {1e-1, 1e-3}) {
      const DenseField noisy = f + 1e-3 * random_field(f.shape(), rng);
      const DenseField g = tt_to_dense(tt_from_dense(noisy, eps));
      EXPECT_LE(rel_diff(g, noisy), eps);
    }
  }
}

TEST(TTToDense, OnesAndElementOracle) {
  const TTTensor ones = TTTensor::constant({3, 4, 2, 5}, 1.0);
  EXPECT_EQ(tt_to_dense(ones).values(), DenseField({3, 4, 2, 5}, 1.0).values());
  std::mt19937_64 rng(43);
  const TTTensor x = TTTensor::random({3, 4, 5, 2}, {2, 3, 2}, rng);
  const DenseField d = tt_to_dense(x);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Index4 i = d.unravel(k);
    EXPECT_NEAR(d(i), element_oracle(x, i), 1e-14);
    EXPECT_NEAR(x.element(i), element_oracle(x, i), 1e-14);
  }
  EXPECT_THROW(tt_to_dense(x, 10), std::length_error);
}

TEST(TTTensor, RejectsInconsistentCores) {
  std::array<TTCore, 4> cores{TTCore(1, 2, 2), TTCore(3, 2, 2), TTCore(2, 2, 2), TTCore(2, 2, 1)};
  EXPECT_THROW(TTTensor{cores}, std::invalid_argument);
  std::array<TTCore, 4> open{TTCore(2, 2, 2), TTCore(2, 2, 2), TTCore(2, 2, 2), TTCore(2, 2, 1)};
  EXPECT_THROW(TTTensor{open}, std::invalid_argument);
}

TEST(TTArithmetic, AddNegationIsNumericallyZero) {
  std::mt19937_64 rng(44);
  const TTTensor x = TTTensor::random({4, 4, 4, 4}, {2, 3, 2}, rng);
  const TTTensor z = tt_round(tt_add(x, tt_scale(x, -1.0)), 1e-12);
  EXPECT_LT(tt_norm(z), 1e-14 * tt_norm(x));
  EXPECT_LT(tt_to_dense(z).max_abs(), 1e-14 * tt_to_dense(x).max_abs());
  // An exactly zero tensor rounds to rank one.
  EXPECT_EQ(tt_round(TTTensor::zeros({4, 4, 4, 4}), 1e-12).ranks(), (Ranks3{1, 1, 1}));
}

TEST(TTArithmetic, HadamardWithOnes) {
  std::mt19937_64 rng(45);
  const TTTensor x = TTTensor::random({4, 3, 4, 3}, {2, 2, 3}, rng);
  const TTTensor y = tt_hadamard(TTTensor::constant(x.mode_sizes(), 1.0), x);
  EXPECT_LT(rel_diff(tt_to_dense(y), tt_to_dense(x)), 1e-15);
}

TEST(TTArithmetic, MatchesDenseArithmetic) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 5; ++trial) {
    const TTTensor x = TTTensor::random({4, 4, 4, 4}, {2, 3, 2}, rng);
    const TTTensor y = TTTensor::random({4, 4, 4, 4}, {3, 1, 2}, rng);
    const DenseField dx = tt_to_dense(x), dy = tt_to_dense(y);

    const TTTensor s = tt_add(x, y);
    EXPECT_EQ(s.ranks(), (Ranks3{5, 4, 4}));
    EXPECT_LT(rel_diff(tt_to_dense(s), dx + dy), 1e-12);
    EXPECT_LT(rel_diff(tt_to_dense(tt_axpby(0.5, x, -2.0, y)), 0.5 * dx - 2.0 * dy), 1e-12);
    EXPECT_LT(rel_diff(tt_to_dense(tt_scale(x, -3.0)), -3.0 * dx), 1e-12);

    const TTTensor h = tt_hadamard(x, y);
    EXPECT_EQ(h.ranks(), (Ranks3{6, 3, 4}));
    EXPECT_LT(rel_diff(tt_to_dense(h), DenseField(dx.shape(), dx.values().cwiseProduct(dy.values()))), 1e-12);

    EXPECT_NEAR(tt_dot(x, y), dx.values().dot(dy.values()), 1e-12 * dx.norm() * dy.norm());
    EXPECT_NEAR(tt_norm(x), dx.norm(), 1e-12 * dx.norm());
  }
  const TTTensor a = TTTensor::zeros({2, 2, 2, 2}), b = TTTensor::zeros({2, 2, 2, 3});
  EXPECT_THROW(tt_add(a, b), std::invalid_argument);
  EXPECT_THROW(tt_hadamard(a, b), std::invalid_argument);
  EXPECT_THROW(tt_dot(a, b), std::invalid_argument);
}

TEST(TTRound, InflatedRankOneReturnsToRankOne) {
  std::mt19937_64 rng(47);
  const TTTensor x = TTTensor::random({5, 5, 5, 5}, {1, 1, 1}, rng);
  const TTTensor doubled = tt_add(x, tt_scale(x, 1.0));
  EXPECT_EQ(doubled.ranks(), (Ranks3{2, 2, 2}));
  const TTTensor r = tt_round(doubled, 1e-12);
  EXPECT_EQ(r.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_LT(rel_diff(tt_to_dense(r), 2.0 * tt_to_dense(x)), 1e-13);
}

TEST(TTRound, ZeroToleranceKeepsGenericRanks) {
  std::mt19937_64 rng(48);
  const TTTensor x = TTTensor::random({4, 5, 5, 4}, {3, 4, 3}, rng);
  const TTTensor r = tt_round(x, 0.0);
  EXPECT_EQ(r.ranks(), x.ranks());
  EXPECT_LT(rel_diff(tt_to_dense(r), tt_to_dense(x)), 1e-13);
  EXPECT_THROW(tt_round(x, -1e-3), std::invalid_argument);
}

TEST(TTRound, RandomRanksFourAtEightToTheFourth) {
  std::mt19937_64 rng(49);
  const TTTensor x = tt_add(TTTensor::random({8, 8, 8, 8}, {4, 4, 4}, rng),
                            tt_scale(TTTensor::random({8, 8, 8, 8}, {4, 4, 4}, rng), 1e-3));
  const TTTensor r = tt_round(x, 1e-3);
  const DenseField dx = tt_to_dense(x);
  EXPECT_LE((tt_to_dense(r) - dx).norm(), 1e-3 * dx.norm());
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(r.ranks()[k], x.ranks()[k]);
}

TEST(TTRound, RankCapIsHonoured) {
  std::mt19937_64 rng(50);
  const TTTensor x = TTTensor::random({6, 6, 6, 6}, {5, 5, 5}, rng);
  EXPECT_LE(tt_round(x, 0.0, 2).max_rank(), 2);
}

TEST(TTRound, BoundPropertyOnRandomTensors) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  for (int trial = 0; trial < 150; ++trial) {
    const Shape4 s{size(rng), size(rng), size(rng), size(rng)};
    const TTTensor x = graded_tensor(s, rng, 8);
    const DenseField dx = tt_to_dense(x);
    for (double eps : {1e-2, 1e-5, 1e-9}) {
      const TTTensor r = tt_round(x, eps);
      EXPECT_LE((tt_to_dense(r) - dx).norm(), eps * dx.norm() * (1.0 + 1e-10) + 1e-15) << trial;
      // Ranks never exceed the unfolding sizes.
      EXPECT_LE(r.ranks()[0], static_cast<Eigen::Index>(s[0]));
      EXPECT_LE(r.ranks()[2], static_cast<Eigen::Index>(s[3]));
      EXPECT_LE(r.ranks()[1], static_cast<Eigen::Index>(std::min(s[0] * s[1], s[2] * s[3])));
    }
  }
}

TEST(TTLeftOrthogonalize, CoresBecomeOrthonormal) {
  std::mt19937_64 rng(52);
  TTTensor x = TTTensor::random({4, 5, 3, 4}, {3, 4, 2}, rng);
  const DenseField before = tt_to_dense(x);
  const double n = tt_left_orthogonalize(x);
  EXPECT_NEAR(n, before.norm(), 1e-12 * n);
  EXPECT_LT(rel_diff(tt_to_dense(x), before), 1e-13);
  for (std::size_t k = 0; k < 3; ++k) {
    const Matrix l = x.core(k).left();
    EXPECT_LT((l.transpose() * l - Matrix::Identity(l.cols(), l.cols())).norm(), 1e-13);
  }
}

TEST(Maxvol, IdentityOverZeros) {
  Matrix m = Matrix::Zero(6, 3);
  m.topRows(3) = Matrix::Identity(3, 3);
  auto rows = maxvol(m);
  std::sort(rows.begin(), rows.end());
  EXPECT_EQ(rows, (std::vector<Eigen::Index>{0, 1, 2}));
}

TEST(Maxvol, SmallExampleByEnumeration) {
  Matrix m(3, 2);
  m << 1, 0, 0, 1, 0.1, 0.1;
  // Enumerate every pair of rows; the best |det| is attained by {0, 1}.
  double best = 0.0;
  std::pair<int, int> arg{-1, -1};
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const double d = std::abs(m(a, 0) * m(b, 1) - m(a, 1) * m(b, 0));
      if (d > best) {
        best = d;
        arg = {a, b};
      }
    }
  auto rows = maxvol(m);
  std::sort(rows.begin(), rows.end());
  EXPECT_EQ(rows, (std::vector<Eigen::Index>{arg.first, arg.second}));
}

TEST(Maxvol, DominanceProperty) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 20 + trial, r = 1 + trial % 8;
    Matrix m(n, r);
    for (Eigen::Index j = 0; j < r; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = g(rng);
    const double tol = 1e-2;
    const auto rows = maxvol(m, tol);
    ASSERT_EQ(static_cast<Eigen::Index>(rows.size()), r);
    Matrix sub(r, r);
    for (Eigen::Index j = 0; j < r; ++j) sub.row(j) = m.row(rows[static_cast<std::size_t>(j)]);
    const Matrix coeff = m * sub.inverse();
    EXPECT_LE(coeff.cwiseAbs().maxCoeff(), 1.0 + tol + 1e-10);
  }
}

TEST(Maxvol, Errors) {
  EXPECT_THROW(maxvol(Matrix::Ones(2, 3)), std::invalid_argument);
  EXPECT_THROW(maxvol(Matrix::Ones(5, 2)), std::domain_error);
}

TEST(TTCross, ConstantAndSeparable) {
  const Shape4 s{7, 6, 5, 8};
  CrossOptions o;
  o.eps = 1e-12;
  auto c = tt_cross([](const Index4&) { return 2.5; }, s, o);
  EXPECT_TRUE(c.report.converged);
  EXPECT_EQ(c.tensor.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_LT((tt_to_dense(c.tensor) - DenseField(s, 2.5)).max_abs(), 1e-13);

  auto f = [](const Index4& i) {
    return std::cos(0.3 * static_cast<double>(i[0])) * (1.0 + static_cast<double>(i[1])) *
           std::exp(-0.2 * static_cast<double>(i[2])) * (3.0 - 0.1 * static_cast<double>(i[3]));
  };
  auto sep = tt_cross(f, s, o);
  EXPECT_TRUE(sep.report.converged);
  EXPECT_EQ(sep.tensor.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_LE(sep.report.validation_error, 1e-12);
}

TEST(TTCross, BurgersSamplesAgainstDenseEvaluation) {
  const ProblemSpec p = burgers3d();
  const std::size_t n = 12;
  const auto tg = gauss_lobatto_nodes(n, p.time);
  const auto xg = gauss_lobatto_nodes(n, p.space[0]);
  auto f = [&](const Index4& i) { return burgers_exact(tg[i[0]], xg[i[1]], xg[i[2]], xg[i[3]]); };
  CrossOptions o;
  o.eps = 1e-8;
  const auto c = tt_cross(f, {n, n, n, n}, o);
  EXPECT_TRUE(c.report.converged);
  EXPECT_LE(c.report.validation_error, 1e-8);
  const DenseField dense = DenseField::from_function({n, n, n, n}, f);
  EXPECT_LE(rel_diff(tt_to_dense(c.tensor), dense), 1e-7);
  EXPECT_LT(c.report.evaluations, dense.size());
}

TEST(TTCross, BatchEvaluatorSeesOnlyRequestedIndices) {
  const Shape4 s{10, 10, 10, 10};
  std::size_t calls = 0;
  BatchEvaluator f = [&](std::span<const Index4> idx, std::span<double> out) {
    calls += idx.size();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const Index4& i = idx[k];
      out[k] = 1.0 / (1.0 + static_cast<double>(i[0] + i[1] + i[2] + i[3]));
    }
  };
  CrossOptions o;
  o.eps = 1e-6;
  const auto c = tt_cross(f, s, o);
  EXPECT_TRUE(c.report.converged);
  EXPECT_EQ(calls, c.report.evaluations);
  EXPECT_LT(calls, std::size_t{10000});
}

TEST(TTCross, RankCapReportsFailure) {
  const Shape4 s{8, 8, 8, 8};
  std::mt19937_64 rng(54);
  const DenseField noise = random_field(s, rng);
  CrossOptions o;
  o.eps = 1e-10;
  o.rank_cap = 3;
  o.max_sweeps = 6;
  const auto c = tt_cross([&](const Index4& i) { return noise(i); }, s, o);
  EXPECT_FALSE(c.report.converged);
  EXPECT_LE(c.tensor.max_rank(), 3);
  EXPECT_GT(c.report.validation_error, 1e-10);
}

TEST(TTDiag, OnesIsIdentityAndMatvecIsHadamard) {
  const Shape4 s{3, 4, 3, 2};
  const Matrix id = tt_matrix_to_dense(tt_diag(TTTensor::constant(s, 1.0)));
  EXPECT_LT((id - Matrix::Identity(id.rows(), id.cols())).norm(), 1e-15);

  std::mt19937_64 rng(55);
  const TTTensor v = TTTensor::random({4, 4, 4, 4}, {2, 3, 2}, rng);
  const TTTensor x = TTTensor::random({4, 4, 4, 4}, {3, 2, 2}, rng);
  const TTMatrix d = tt_diag(v);
  EXPECT_LT(rel_diff(tt_to_dense(tt_matvec(d, TTTensor::constant(v.mode_sizes(), 1.0))), tt_to_dense(v)), 1e-14);
  const DenseField dv = tt_to_dense(v), dx = tt_to_dense(x);
  const DenseField expected(dx.shape(), Matrix(dv.values().asDiagonal()) * dx.values());
  EXPECT_LT(rel_diff(tt_to_dense(tt_matvec(d, x)), expected), 1e-12);
  EXPECT_LT(rel_diff(tt_to_dense(tt_matvec(d, x)), tt_to_dense(tt_hadamard(v, x))), 1e-14);
}

TEST(TTMatvec, IdentityAndKroneckerTerm) {
  std::mt19937_64 rng(56);
  const TTTensor x = TTTensor::random({5, 4, 4, 3}, {2, 3, 2}, rng);
  EXPECT_LT(rel_diff(tt_to_dense(tt_matvec(TTMatrix::identity(x.mode_sizes()), x)), tt_to_dense(x)), 1e-15);

  const ChebyshevGrid1D g(5, {0.0, 1.0});
  const KroneckerTerm term = KroneckerTerm::along(0, g.d1(), 0.5);
  const TTMatrix a = tt_from_kronecker(term, x.mode_sizes());
  EXPECT_EQ(a.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_LT(rel_diff(tt_to_dense(tt_matvec(a, x)), kron_apply(term, tt_to_dense(x))), 1e-13);
  EXPECT_THROW(tt_matvec(a, TTTensor::zeros({4, 4, 4, 3})), std::invalid_argument);
}

TEST(TTMatvec, MatchesDenseOperatorAndRankBound) {
  std::mt19937_64 rng(57);
  const Shape4 s{3, 4, 3, 3};
  std::array<std::optional<Matrix>, 4> ops;
  for (std::size_t k = 1; k < 4; ++k) ops[k] = Matrix::Random(static_cast<Eigen::Index>(s[k]), static_cast<Eigen::Index>(s[k]));
  const TTMatrix lap = TTMatrix::kronecker_sum(ops, s);
  const TTMatrix a = tt_matrix_add(tt_compose(tt_diag(TTTensor::random(s, {2, 2, 2}, rng)), lap),
                                   tt_matrix_scale(TTMatrix::identity(s), 0.3));
  const TTTensor x = TTTensor::random(s, {2, 3, 2}, rng);
  const TTTensor y = tt_matvec(a, x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(y.ranks()[k], a.ranks()[k] * x.ranks()[k]);
  const Matrix dense = tt_matrix_to_dense(a);
  const DenseField expected(s, dense * tt_to_dense(x).values());
  EXPECT_LT(rel_diff(tt_to_dense(y), expected), 1e-12);

  // The fused product with rounding gives the same tensor.
  for (double eps : {0.0, 1e-8, 1e-3}) {
    const TTTensor z = tt_matvec_round(a, x, eps);
    EXPECT_LE((tt_to_dense(z) - expected).norm(), (eps + 1e-13) * expected.norm());
  }
}

TEST(TTMatrix, KroneckerSumAndCompositionMatchDense) {
  const Shape4 s{2, 3, 2, 3};
  std::array<std::optional<Matrix>, 4> ops;
  ops[1] = Matrix::Random(3, 3);
  ops[3] = Matrix::Random(3, 3);
  const TTMatrix sum = TTMatrix::kronecker_sum(ops, s);
  const Matrix i2 = Matrix::Identity(2, 2), i3 = Matrix::Identity(3, 3);
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  const Matrix expected = kron(kron(kron(i2, *ops[1]), i2), i3) + kron(kron(kron(i2, i3), i2), *ops[3]);
  EXPECT_LT((tt_matrix_to_dense(sum) - expected).norm(), 1e-13);
  const Matrix sq = tt_matrix_to_dense(tt_compose(sum, sum));
  EXPECT_LT((sq - expected * expected).norm(), 1e-12 * expected.squaredNorm());
  const TTMatrix r = tt_matrix_round(tt_matrix_add(sum, sum), 1e-12);
  EXPECT_LE(r.max_rank(), 2);
  EXPECT_LT((tt_matrix_to_dense(r) - 2.0 * expected).norm(), 1e-11 * expected.norm());
  EXPECT_NEAR(tt_matrix_norm(sum), expected.norm(), 1e-12 * expected.norm());
}

TEST(TTIo, RoundTripAndBadMagic) {
  std::mt19937_64 rng(58);
  const TTTensor x = TTTensor::random({3, 4, 5, 2}, {2, 3, 2}, rng);
  std::stringstream buf;
  write_tt(buf, x);
  const TTTensor y = read_tt(buf);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(x.core(k).data, y.core(k).data);
  std::stringstream bad("NOTATENS");
  EXPECT_ANY_THROW(read_tt(bad));
}

TEST(CompressionRatio, DirectCounts) {
  const Shape4 s{16, 16, 16, 16};
  EXPECT_NEAR(compression_ratio(TTTensor::constant(s, 1.0)), 64.0 / 65536.0, 1e-18);
  std::mt19937_64 rng(59);
  EXPECT_NEAR(compression_ratio(TTTensor::random(s, {4, 4, 4}, rng)), 640.0 / 65536.0, 1e-18);
  EXPECT_NEAR(compression_ratio(TTTensor::random({2, 2, 2, 2}, {2, 4, 2}, rng)), 2.5, 1e-15);
}
