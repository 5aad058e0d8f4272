#include "tnst/problem.hpp"

#include <stdexcept>

namespace tnst {

ScalarFunction::ScalarFunction()
    : value_([](double) { return 0.0; }), derivative_([](double) { return 0.0; }), poly_(std::vector<double>{0.0}) {}

ScalarFunction ScalarFunction::constant(double value) {
  return polynomial({value});
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();

  ScalarFunction fn;
  fn.value_ = [c = coefficients](double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  fn.derivative_ = [c = coefficients](double u) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * c[k];
    return acc;
  };
  fn.poly_ = std::move(coefficients);
  return fn;
}

ScalarFunction ScalarFunction::general(std::function<double(double)> value,
                                       std::function<double(double)> derivative) {
  if (!value || !derivative) {
    throw std::invalid_argument("ScalarFunction::general: value and derivative are required");
  }
  ScalarFunction fn;
  fn.value_ = std::move(value);
  fn.derivative_ = std::move(derivative);
  fn.poly_.reset();
  return fn;
}

bool ScalarFunction::is_constant() const { return poly_ && poly_->size() == 1; }

int ScalarFunction::degree() const {
  return poly_ ? static_cast<int>(poly_->size()) - 1 : -1;
}

bool ProblemSpec::is_affine() const {
  if (!diffusion.is_constant()) return false;
  for (const auto& b : convection) {
    if (!b.is_constant()) return false;
  }
  const int d = forcing.degree();
  return d >= 0 && d <= 1;
}

}  // namespace tnst
