#include <random>

#include <benchmark/benchmark.h>

#include "tnst/fullgrid.hpp"
#include "tnst/kronecker.hpp"
#include "tnst/problems.hpp"
#include "tnst/tt_cross.hpp"
#include "tnst/tt_matrix.hpp"
#include "tnst/tt_tensor.hpp"

namespace {

using namespace tnst;

void BM_ModeApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int mode = static_cast<int>(state.range(1));
  const Shape4 shape{n, n, n, n};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  Eigen::VectorXd v(static_cast<Eigen::Index>(element_count(shape)));
  for (auto& x : v) x = d(rng);
  const Matrix m = Matrix::Random(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto _ : state) benchmark::DoNotOptimize(mode_apply(m, v, shape, mode));
}
BENCHMARK(BM_ModeApply)->ArgsProduct({{9, 13, 17}, {0, 1, 3}});

void BM_FullGridResidual(benchmark::State& state) {
  const ProblemSpec p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(static_cast<std::size_t>(state.range(0)) + 1, p.time, p.space);
  FullGridSystem sys(p, grid);
  const DenseField u = initial_guess(p, grid);
  for (auto _ : state) benchmark::DoNotOptimize(sys.residual(u));
}
BENCHMARK(BM_FullGridResidual)->Arg(8)->Arg(12)->Arg(16);

void BM_FullGridJacobian(benchmark::State& state) {
  const ProblemSpec p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(static_cast<std::size_t>(state.range(0)) + 1, p.time, p.space);
  FullGridSystem sys(p, grid);
  const DenseField u = initial_guess(p, grid);
  const FullGridJacobian j = sys.linearize(u);
  for (auto _ : state) benchmark::DoNotOptimize(j.apply(u));
}
BENCHMARK(BM_FullGridJacobian)->Arg(8)->Arg(16);

void BM_TTRound(benchmark::State& state) {
  const auto r = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(2);
  const TTTensor x = TTTensor::random({16, 15, 15, 15}, {r, r, r}, rng);
  const TTTensor y = tt_add(x, tt_scale(x, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(tt_round(y, 1e-8));
}
BENCHMARK(BM_TTRound)->Arg(4)->Arg(8)->Arg(16);

void BM_TTMatvecRound(benchmark::State& state) {
  const auto r = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  const TTTensor x = TTTensor::random({16, 15, 15, 15}, {r, r, r}, rng);
  std::array<std::optional<Matrix>, 4> ops;
  for (std::size_t k = 1; k < 4; ++k) ops[k] = Matrix::Random(15, 15);
  const TTMatrix lap = TTMatrix::kronecker_sum(ops, {16, 15, 15, 15});
  for (auto _ : state) benchmark::DoNotOptimize(tt_round(tt_matvec(lap, x), 1e-8));
}
BENCHMARK(BM_TTMatvecRound)->Arg(4)->Arg(8)->Arg(16);

void BM_CrossBurgers(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ProblemSpec p = burgers3d();
  const auto grid = SpaceTimeGrid::cube(n, p.time, p.space);
  const PointEvaluator f = [&](const Index4& i) {
    return burgers_exact(grid.node(0, i[0]), grid.node(1, i[1]), grid.node(2, i[2]), grid.node(3, i[3]));
  };
  CrossOptions opts;
  opts.eps = 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(tt_cross(f, grid.full_shape(), opts));
}
BENCHMARK(BM_CrossBurgers)->Arg(12)->Arg(17);

}  // namespace
BENCHMARK_MAIN();
