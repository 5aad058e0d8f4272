#include "tnst/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "tnst/kronecker.hpp"
#include "tnst/tt_cross.hpp"

namespace tnst {

namespace {

constexpr double kPi = std::numbers::pi;

struct BurgersParts {
  double u, u_s, u_ss, u_t;
};

BurgersParts burgers_parts(double t, double x, double y, double z) {
  const double c = 2.0 * kPi / 3.0;
  const double theta = kPi * (x + y + z) / 3.0;
  const double e = std::exp(-kPi * kPi * t / 3.0);
  const double sn = std::sin(theta), cs = std::cos(theta);
  const double d = 5.0 + e * cs;
  const double a = 5.0 * e * cs + e * e;
  BurgersParts p;
  p.u = c * e * sn / d;
  p.u_s = (kPi / 3.0) * c * a / (d * d);
  p.u_ss = (kPi / 3.0) * (kPi / 3.0) * c * (-5.0 * e * sn * d + 2.0 * a * e * sn) / (d * d * d);
  p.u_t = -(kPi * kPi / 3.0) * e * 5.0 * c * sn / (d * d);
  return p;
}

}  // namespace

double manufactured_exact(double t, double x, double y, double z) {
  return std::exp(-0.1 * t) * std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z);
}

double burgers_exact(double t, double x, double y, double z) { return burgers_parts(t, x, y, z).u; }

ProblemSpec manufactured_ncd() {
  ProblemSpec p;
  p.name = "manufactured";
  p.diffusion = ScalarFunction::polynomial({1.0, 0.0, 1.0});
  p.convection = {ScalarFunction::polynomial({0.0, 1.0}), ScalarFunction::constant(1.0),
                  ScalarFunction::constant(1.0)};
  p.forcing = ScalarFunction::polynomial({0.0, 1.0, 0.0, -1.0});
  p.time = {0.0, 1.0};
  p.space = {Interval{-2.0, 2.0}, Interval{-2.0, 2.0}, Interval{-2.0, 2.0}};
  p.exact = manufactured_exact;
  p.boundary = manufactured_exact;
  p.initial = [](double x, double y, double z) { return manufactured_exact(0.0, x, y, z); };

  const ScalarFunction a = p.diffusion, f = p.forcing;
  const auto b = p.convection;
  p.source = [a, b, f](double t, double x, double y, double z) {
    const double e = std::exp(-0.1 * t);
    const double sx = std::sin(kPi * x), sy = std::sin(kPi * y), sz = std::sin(kPi * z);
    const double u = e * sx * sy * sz;
    const double u_t = -0.1 * u;
    const double lap = -3.0 * kPi * kPi * u;
    const double ux = kPi * e * std::cos(kPi * x) * sy * sz;
    const double uy = kPi * e * sx * std::cos(kPi * y) * sz;
    const double uz = kPi * e * sx * sy * std::cos(kPi * z);
    return u_t - a(u) * lap + b[0](u) * ux + b[1](u) * uy + b[2](u) * uz - f(u);
  };
  return p;
}

ProblemSpec burgers3d() {
  ProblemSpec p;
  p.name = "burgers";
  p.diffusion = ScalarFunction::constant(1.0);
  const ScalarFunction identity = ScalarFunction::polynomial({0.0, 1.0});
  p.convection = {identity, identity, identity};
  p.forcing = ScalarFunction::constant(0.0);
  p.time = {0.0, 1.0};
  p.space = {Interval{0.0, 6.0}, Interval{0.0, 6.0}, Interval{0.0, 6.0}};
  p.exact = burgers_exact;
  p.boundary = burgers_exact;
  p.initial = [](double x, double y, double z) { return burgers_exact(0.0, x, y, z); };
  return p;
}

double manufactured_defect(const ProblemSpec& problem, double t, double x, double y, double z) {
  const double e = std::exp(-0.1 * t);
  const double sx = std::sin(kPi * x), sy = std::sin(kPi * y), sz = std::sin(kPi * z);
  const double u = e * sx * sy * sz;
  const double grad[3] = {kPi * e * std::cos(kPi * x) * sy * sz, kPi * e * sx * std::cos(kPi * y) * sz,
                          kPi * e * sx * sy * std::cos(kPi * z)};
  double r = -0.1 * u + problem.diffusion(u) * 3.0 * kPi * kPi * u - problem.forcing(u);
  for (int i = 0; i < 3; ++i) r += problem.convection[static_cast<std::size_t>(i)](u) * grad[i];
  if (problem.source) r -= problem.source(t, x, y, z);
  return r;
}

double burgers_defect(const ProblemSpec& problem, double t, double x, double y, double z) {
  const BurgersParts p = burgers_parts(t, x, y, z);
  double r = p.u_t - problem.diffusion(p.u) * 3.0 * p.u_ss - problem.forcing(p.u);
  for (const auto& b : problem.convection) r += b(p.u) * p.u_s;
  if (problem.source) r -= problem.source(t, x, y, z);
  return r;
}

ProblemSpec heat_problem(Interval time, std::array<Interval, 3> space) {
  ProblemSpec p;
  p.name = "heat";
  p.diffusion = ScalarFunction::constant(1.0);
  p.convection = {ScalarFunction::constant(0.0), ScalarFunction::constant(0.0), ScalarFunction::constant(0.0)};
  p.forcing = ScalarFunction::constant(0.0);
  p.time = time;
  p.space = space;
  const auto mode = [space](int k, double v) {
    const Interval& s = space[static_cast<std::size_t>(k)];
    return std::sin(kPi * (v - s.lower) / (s.upper - s.lower));
  };
  double rate = 0.0;
  for (const auto& s : space) rate += kPi * kPi / ((s.upper - s.lower) * (s.upper - s.lower));
  p.exact = [mode, rate](double t, double x, double y, double z) {
    return std::exp(-rate * t) * mode(0, x) * mode(1, y) * mode(2, z);
  };
  p.boundary = *p.exact;
  p.initial = [mode](double x, double y, double z) { return mode(0, x) * mode(1, y) * mode(2, z); };
  return p;
}

RootFindProblem experiment1_rootfind(std::uint64_t seed, const Shape4& sizes, const Ranks3& ranks) {
  std::mt19937_64 rng(seed);
  RootFindProblem p;
  // Entries of the raw tensor lie in [0, r1 r2 r3]; scale them into [0, 1].
  const double scale = 1.0 / static_cast<double>(ranks[0] * ranks[1] * ranks[2]);
  p.exact = tt_scale(tt_round(TTTensor::random(sizes, ranks, rng, 0.0, 1.0), 0.0), scale);

  // exp(-Y*) by cross; -Y*^3 exactly.
  CrossOptions opts;
  opts.eps = 1e-14;
  opts.max_sweeps = 40;
  opts.seed = seed + 1;
  const TTTensor& y = p.exact;
  auto exp_part = tt_cross([&y](const Index4& idx) { return std::exp(-y.element(idx)); }, sizes, opts).tensor;
  const TTTensor cube = tt_hadamard(y, tt_round(tt_hadamard(y, y), 1e-15));
  p.g = tt_round(tt_axpby(1.0, exp_part, -1.0, cube), 1e-14);
  return p;
}

DenseField rootfind_residual_dense(const RootFindProblem& problem, const DenseField& y) {
  const DenseField g = tt_to_dense(problem.g);
  require_same_shape(g, y, "rootfind_residual_dense");
  DenseField out(y.shape());
  for (Eigen::Index i = 0; i < y.values().size(); ++i)
    out.values()[i] = RootFindProblem::q_scalar(y.values()[i], g.values()[i]);
  return out;
}

DenseField rootfind_jacobian_diagonal(const DenseField& y) {
  DenseField out(y.shape());
  for (Eigen::Index i = 0; i < y.values().size(); ++i) out.values()[i] = RootFindProblem::dq_scalar(y.values()[i]);
  return out;
}

DenseRootFindSystem::DenseRootFindSystem(const RootFindProblem& problem) : g_(tt_to_dense(problem.g)) {}

DenseField DenseRootFindSystem::residual(const DenseField& y) const {
  require_same_shape(g_, y, "DenseRootFindSystem::residual");
  DenseField out(y.shape());
  for (Eigen::Index i = 0; i < y.values().size(); ++i)
    out.values()[i] = RootFindProblem::q_scalar(y.values()[i], g_.values()[i]);
  return out;
}

FieldOperator DenseRootFindSystem::jacobian(const DenseField& y) const {
  DenseField d = rootfind_jacobian_diagonal(y);
  return [d = std::move(d)](const DenseField& v) { return pointwise_scale(d, v); };
}

}  // namespace tnst
