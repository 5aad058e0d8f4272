#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tnst/fullgrid.hpp"
#include "tnst/problems.hpp"
#include "tnst/tt_newton.hpp"
#include "tnst/tt_operators.hpp"

using namespace tnst;

namespace {

double rel_diff(const DenseField& a, const DenseField& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix eye(std::size_t n) { return Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)); }

DenseField perturbed_guess(const ProblemSpec& p, const SpaceTimeGrid& grid, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> dist(-amp, amp);
  DenseField u = initial_guess(p, grid);
  for (Eigen::Index i = 0; i < u.values().size(); ++i) u.values()[i] += dist(rng);
  return u;
}

ProblemSpec heat_with_data() { return heat_problem(); }

ProblemSpec heat_zero_data() {
  ProblemSpec p = heat_problem();
  p.boundary = [](double, double, double, double) { return 0.0; };
  p.initial = [](double, double, double) { return 0.0; };
  p.exact.reset();
  return p;
}

}  // namespace

TEST(TTOperators, TimeOperatorMatchesKroneckerOracle) {
  const auto p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(4, p.time, p.space);
  const TTOperatorSet ops = build_tt_operators(p, grid);
  const Shape4 in = ops.interior_sizes;
  EXPECT_EQ(in, (Shape4{3, 2, 2, 2}));
  const Matrix expected = kron(kron(kron(grid.d1_interior(0), eye(in[1])), eye(in[2])), eye(in[3]));
  EXPECT_LT((tt_matrix_to_dense(ops.a_t) - expected).norm(), 1e-12 * expected.norm());
  EXPECT_EQ(ops.a_t.ranks(), (Ranks3{1, 1, 1}));
  EXPECT_LE(ops.laplacian.max_rank(), 3);
}

TEST(TTOperators, DensifiedOperatorsMatchFullGrid) {
  const auto p = manufactured_ncd();
  const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
  const TTOperatorSet ops = build_tt_operators(p, grid);
  const FullGridSystem sys(p, grid);
  const Shape4 in = ops.interior_sizes;
  const Matrix i0 = eye(in[0]), i1 = eye(in[1]), i2 = eye(in[2]), i3 = eye(in[3]);
  const Matrix lap = kron(kron(kron(i0, sys.d2_interior(1)), i2), i3) + kron(kron(kron(i0, i1), sys.d2_interior(2)), i3) +
                     kron(kron(kron(i0, i1), i2), sys.d2_interior(3));
  EXPECT_LT((tt_matrix_to_dense(ops.laplacian) - lap).norm(), 1e-12 * lap.norm());
  const Matrix gx = kron(kron(kron(i0, sys.d1_interior(1)), i2), i3);
  EXPECT_LT((tt_matrix_to_dense(ops.gradients[0]) - gx).norm(), 1e-12 * gx.norm());
}

TEST(TTOperators, MapLaplacianAnnihilatesLinearFields) {
  const auto p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(6, p.time, p.space);
  const TTOperatorSet ops = build_tt_operators(p, grid);
  const DenseField lin =
      sample_on_grid([](double t, double x, double y, double z) { return 1.0 + t + 2 * x - y + 0.5 * z; }, grid);
  const TTTensor u = tt_from_dense(lin, 0.0);
  EXPECT_LT(tt_to_dense(tt_matvec(ops.map_laplacian, u)).max_abs(), 1e-10);
  // The time map differentiates the t-component exactly.
  const DenseField dt = tt_to_dense(tt_matvec(ops.map_t, u));
  EXPECT_LT((dt.values().array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(TTOperators, HomogeneousBoundaryTermsVanish) {
  const auto p = heat_zero_data();
  const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
  const CrossResult bc = build_boundary_tensor(p, grid);
  EXPECT_EQ(tt_to_dense(bc.tensor).max_abs(), 0.0);
  const TTOperatorSet ops = build_tt_operators(p, grid);
  EXPECT_EQ(tt_norm(ops.bc_t), 0.0);
  EXPECT_EQ(tt_norm(ops.bc_laplacian), 0.0);
  EXPECT_EQ(tt_norm(tt_matvec(ops.map_t, ops.g_bc)), 0.0);
}

TEST(TTOperators, BoundaryTensorMatchesFullGrid) {
  const auto p = manufactured_ncd();
  const auto grid = SpaceTimeGrid::cube(7, p.time, p.space);
  CrossOptions o;
  o.eps = 1e-10;
  const CrossResult bc = build_boundary_tensor(p, grid, o);
  EXPECT_TRUE(bc.report.converged);
  const DenseField dense = tt_to_dense(bc.tensor);
  const DenseField ref = boundary_values(p, grid);
  EXPECT_LE(rel_diff(dense, ref), 1e-10);
  // Spatial faces vanish for this solution, so only the t = 0 plane carries data.
  for (std::size_t k = 0; k < dense.size(); ++k) {
    const Index4 i = dense.unravel(k);
    if (i[0] > 0) EXPECT_LT(std::abs(dense(i)), 1e-10);
  }
}

TEST(TTCoefficient, IdentityPolynomialAndExponential) {
  std::mt19937_64 rng(61);
  const TTTensor u = TTTensor::random({4, 4, 4, 4}, {2, 2, 2}, rng, -0.5, 0.5);
  const DenseField du = tt_to_dense(u);
  const TTTensor id = tt_coefficient(ScalarFunction::polynomial({0.0, 1.0}), u, 1e-12);
  EXPECT_LT(rel_diff(tt_to_dense(id), du), 1e-12);

  const double eps = 1e-10;
  const TTTensor a = tt_coefficient(ScalarFunction::polynomial({1.0, 0.0, 1.0}), u, eps);
  const DenseField expected(du.shape(), (1.0 + du.values().array().square()).matrix());
  EXPECT_LE(rel_diff(tt_to_dense(a), expected), eps);
  const TTTensor da = tt_coefficient_derivative(ScalarFunction::polynomial({1.0, 0.0, 1.0}), u, eps);
  EXPECT_LE(rel_diff(tt_to_dense(da), 2.0 * du), eps);

  const ScalarFunction ex = ScalarFunction::general([](double v) { return std::exp(-v); },
                                                    [](double v) { return -std::exp(-v); });
  CrossOptions o;
  o.eps = 1e-10;
  const TTTensor e = tt_coefficient(ex, u, 1e-10, o);
  const DenseField eref(du.shape(), (-du.values().array()).exp().matrix());
  EXPECT_LE(rel_diff(tt_to_dense(e), eref), 1e-9);
}

TEST(TTResidual, ZeroForHomogeneousLinearProblem) {
  const auto p = heat_zero_data();
  const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
  const TTSpaceTimeSystem sys(p, grid);
  EXPECT_LT(tt_norm(sys.residual(TTTensor::zeros(sys.shape()), 1e-10)), 1e-14);
}

TEST(TTResidual, MatchesFullGridOnRandomStates) {
  std::mt19937_64 rng(62);
  const double eps = 1e-10;
  for (const auto& p : {manufactured_ncd(), burgers3d()}) {
    const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
    const TTSpaceTimeSystem tt(p, grid);
    const FullGridSystem fg(p, grid);
    const DenseField u = perturbed_guess(p, grid, rng, 0.2);
    const DenseField ref = fg.residual(u);
    const DenseField got = tt_to_dense(tt.residual(tt_from_dense(u, 0.0), eps));
    EXPECT_LE(rel_diff(got, ref), 10 * eps) << p.name;
  }
}

TEST(TTResidual, ExactSolutionDefectMatchesFullGrid) {
  const double eps = 1e-10;
  for (const auto& p : {manufactured_ncd(), burgers3d()}) {
    const auto grid = SpaceTimeGrid::cube(13, p.time, p.space);
    const TTSpaceTimeSystem tt(p, grid);
    CrossOptions o;
    o.eps = 1e-12;
    const auto exact = tt_sample_interior(*p.exact, grid, o);
    const DenseField ref = residual(grid.restrict_to_interior(sample_on_grid(*p.exact, grid)), p, grid);
    EXPECT_LE(rel_diff(tt_to_dense(tt.residual(exact.tensor, eps)), ref), 100 * eps) << p.name;
  }
}

TEST(TTJacobian, MatchesFullGridJacobianAction) {
  std::mt19937_64 rng(63);
  const double eps = 1e-10;
  for (const auto& p : {manufactured_ncd(), burgers3d()}) {
    const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
    const TTSpaceTimeSystem tt(p, grid);
    const FullGridSystem fg(p, grid);
    const DenseField u = perturbed_guess(p, grid, rng, 0.2);
    const DenseField v = perturbed_guess(p, grid, rng, 1.0);
    const TTMatrix j = tt.jacobian(tt_from_dense(u, 0.0), eps);
    const DenseField got(v.shape(), tt_matrix_to_dense(j) * v.values());
    EXPECT_LE(rel_diff(got, fg.jacobian_apply(u, v)), 10 * eps) << p.name;
    EXPECT_EQ(tt_norm(tt_matvec(j, TTTensor::zeros(tt.shape()))), 0.0);
  }
}

TEST(TTJacobian, LinearProblemEqualsSpaceTimeOperator) {
  const auto p = heat_with_data();
  const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
  const TTSpaceTimeSystem tt(p, grid);
  std::mt19937_64 rng(64);
  const Matrix j1 = tt_matrix_to_dense(tt.jacobian(TTTensor::random(tt.shape(), {2, 2, 2}, rng), 1e-12));
  const Matrix j0 = tt_matrix_to_dense(tt.jacobian(TTTensor::zeros(tt.shape()), 1e-12));
  const Matrix op = tt_matrix_to_dense(tt_matrix_add(tt.operators().a_t, tt_matrix_scale(tt.operators().laplacian, -1.0)));
  EXPECT_LT((j1 - op).norm(), 1e-10 * op.norm());
  EXPECT_LT((j0 - op).norm(), 1e-10 * op.norm());
}

TEST(TTLinearSolve, TrivialOperators) {
  std::mt19937_64 rng(65);
  const TTTensor b = TTTensor::random({4, 3, 3, 3}, {2, 2, 2}, rng);
  const auto id = tt_linear_solve(TTMatrix::identity(b.mode_sizes()), b, 1e-10);
  EXPECT_TRUE(id.converged);
  EXPECT_LT(rel_diff(tt_to_dense(id.x), tt_to_dense(b)), 1e-10);
  const auto half = tt_linear_solve(tt_diag(TTTensor::constant(b.mode_sizes(), 2.0)), b, 1e-10);
  EXPECT_TRUE(half.converged);
  EXPECT_LT(rel_diff(tt_to_dense(half.x), 0.5 * tt_to_dense(b)), 1e-10);
}

TEST(TTLinearSolve, JacobianSystemAgainstDenseSolve) {
  const auto p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
  const TTSpaceTimeSystem tt(p, grid);
  const TTTensor u = tt.initial_guess(1e-12);
  const TTMatrix j = tt.jacobian(u, 1e-12);
  const TTTensor rhs = tt.residual(u, 1e-12);
  const double eps = 1e-8;
  const auto sol = tt_linear_solve(j, rhs, eps);
  ASSERT_TRUE(sol.converged);
  const Matrix dj = tt_matrix_to_dense(j);
  const Eigen::VectorXd db = tt_to_dense(rhs).values();
  const Eigen::VectorXd direct = dj.partialPivLu().solve(db);
  const Eigen::VectorXd x = tt_to_dense(sol.x).values();
  EXPECT_LE((dj * x - db).norm(), 1.01 * eps * db.norm());
  EXPECT_LE((x - direct).norm(), 100 * eps * direct.norm());
}

TEST(TTGmres, RoundedLinearMapIsUsed) {
  std::mt19937_64 rng(66);
  const TTTensor b = TTTensor::random({3, 3, 3, 3}, {2, 2, 2}, rng);
  int calls = 0;
  TTKrylovOptions o;
  o.tol = 1e-10;
  o.round_eps = 1e-12;
  const auto r = tt_gmres(
      [&](const TTTensor& x, double e) {
        ++calls;
        EXPECT_EQ(e, 1e-12);
        return tt_round(tt_scale(x, 3.0), e);
      },
      b, o);
  EXPECT_TRUE(r.converged);
  EXPECT_GT(calls, 0);
  EXPECT_LT(rel_diff(tt_to_dense(r.x), (1.0 / 3.0) * tt_to_dense(b)), 1e-10);
}

TEST(StepTruncation, LinearProblemConvergesInOneIteration) {
  const auto p = heat_with_data();
  const auto grid = SpaceTimeGrid::cube(6, p.time, p.space);
  const TTSpaceTimeSystem sys(p, grid);
  for (double eps0 : {1e-1, 1e-3}) {
    StepTruncationOptions o;
    o.eps0 = eps0;
    o.eps_floor = 1e-10;
    const auto st = step_truncation_newton(sys, sys.initial_guess(1e-10), o);
    EXPECT_TRUE(st.converged) << st.criterion;
    EXPECT_EQ(st.iterations, 1) << eps0;
  }
  StepTruncationOptions bad;
  bad.eps0 = 0.0;
  EXPECT_THROW(step_truncation_newton(sys, sys.initial_guess(1e-10), bad), std::invalid_argument);
}

TEST(StepTruncation, SmallRootFindConvergesWithControlledRanks) {
  const RootFindProblem rf = experiment1_rootfind(1, {8, 8, 8, 8});
  const TTRootFindSystem sys(rf);
  StepTruncationOptions o;
  o.eps0 = 1e-1;
  o.eps_floor = 1e-8;
  const auto st = step_truncation_newton(sys, TTTensor::zeros(rf.mode_sizes()), o);
  ASSERT_TRUE(st.converged) << st.criterion;
  EXPECT_LE(st.max_rank(), 9);
  const double err = tt_norm(tt_axpby(1.0, st.iterate, -1.0, rf.exact)) / tt_norm(rf.exact);
  EXPECT_LE(err, 5e-6);
  // eps_k discipline: a running minimum bounded below by the floor.
  const auto eps = st.eps_trace();
  ASSERT_FALSE(eps.empty());
  EXPECT_EQ(eps.front(), 1e-1);
  for (std::size_t k = 1; k < eps.size(); ++k) EXPECT_LE(eps[k], eps[k - 1]);
  for (double e : eps) EXPECT_GE(e, o.eps_floor);
  // Accepted residuals never increase.
  double prev = st.residual_norm_0;
  for (const auto& h : st.history) {
    EXPECT_LE(h.residual_norm, prev);
    prev = h.residual_norm;
  }
}

TEST(StepTruncation, FixedToleranceCarriesLargerRanks) {
  const RootFindProblem rf = experiment1_rootfind(1, {8, 8, 8, 8});
  const TTRootFindSystem sys(rf);
  StepTruncationOptions o;
  o.adaptive = false;
  o.eps0 = 1e-8;
  o.eps_floor = 1e-8;
  const auto st = step_truncation_newton(sys, TTTensor::zeros(rf.mode_sizes()), o);
  ASSERT_TRUE(st.converged) << st.criterion;
  for (const auto& h : st.history) EXPECT_EQ(h.eps, 1e-8);
  StepTruncationOptions adaptive;
  adaptive.eps_floor = 1e-8;
  const auto sa = step_truncation_newton(sys, TTTensor::zeros(rf.mode_sizes()), adaptive);
  ASSERT_TRUE(sa.converged) << sa.criterion;
  EXPECT_GT(st.max_rank(), sa.max_rank());
}

TEST(StepTruncation, AgreesWithFullGridAtSmallN) {
  for (const auto& p : {manufactured_ncd(), burgers3d()}) {
    for (std::size_t n : {4u, 6u}) {
      const auto grid = SpaceTimeGrid::cube(n + 1, p.time, p.space);
      const FullGridSystem fg(p, grid);
      NewtonOptions no;
      no.tol_res = 1e-10;
      no.tol_update = 1e-10;
      const NewtonResult ref = newton_solve(fg, initial_guess(p, grid), no);
      ASSERT_TRUE(ref.report.converged);

      TTSystemOptions to;
      to.eps_cross = 1e-10;
      const TTSpaceTimeSystem tt(p, grid, to);
      StepTruncationOptions so;
      so.adaptive = false;
      so.eps0 = so.eps_floor = 1e-10;
      so.tol_res = so.tol_update = 1e-10;
      const auto st = step_truncation_newton(tt, tt.initial_guess(1e-10), so);
      const DenseField got = tt.assemble_dense(st.iterate);
      EXPECT_LE(rel_diff(got, fg.assemble(ref.u)), 1e-7) << p.name << " N=" << n;
    }
  }
}

TEST(TTEmbed, InteriorValuesLandOnInteriorNodes) {
  const auto p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(5, p.time, p.space);
  std::mt19937_64 rng(67);
  const TTTensor u = TTTensor::random(grid.interior_shape(), {2, 2, 2}, rng);
  const DenseField full = tt_to_dense(tt_embed_interior(u, grid));
  EXPECT_LT(rel_diff(grid.restrict_to_interior(full), tt_to_dense(u)), 1e-15);
  for (const auto& i : split_indices(grid).boundary) EXPECT_EQ(full(i), 0.0);
}
