#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tnst/chebyshev.hpp"

namespace tnst {

/// Scalar coefficient u -> c(u) together with its derivative. Polynomial
/// coefficients are kept when known so the TT path can evaluate them with
/// exact arithmetic instead of cross interpolation.
class ScalarFunction {
public:
  /// The zero constant.
  ScalarFunction();

  static ScalarFunction constant(double value);
  /// c0 + c1 u + c2 u^2 + ...
  static ScalarFunction polynomial(std::vector<double> coefficients);
  static ScalarFunction general(std::function<double(double)> value,
                                std::function<double(double)> derivative);

  double operator()(double u) const { return value_(u); }
  double derivative(double u) const { return derivative_(u); }

  const std::optional<std::vector<double>>& polynomial_coefficients() const { return poly_; }
  bool is_constant() const;
  /// Degree of the polynomial form, or -1 when not polynomial.
  int degree() const;

private:
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
  std::optional<std::vector<double>> poly_;
};

using SpaceTimeFunction = std::function<double(double t, double x, double y, double z)>;
using SpaceFunction = std::function<double(double x, double y, double z)>;

/// u_t - a(u) Lap u + b(u) . grad u = f(u) + s(t, x) on [0, T] x box, with
/// u = g on the spatial boundary and u(0, .) = h.
struct ProblemSpec {
  std::string name;
  ScalarFunction diffusion;
  std::array<ScalarFunction, 3> convection;
  ScalarFunction forcing;
  /// Optional explicit source s(t, x, y, z); empty means zero.
  SpaceTimeFunction source;
  SpaceTimeFunction boundary;
  SpaceFunction initial;
  Interval time{0.0, 1.0};
  std::array<Interval, 3> space{};
  std::optional<SpaceTimeFunction> exact;

  /// True when the Jacobian does not depend on u.
  bool is_affine() const;
};

}  // namespace tnst
