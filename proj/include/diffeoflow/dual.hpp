#pragma once

#include <Eigen/Core>

#include <cmath>

namespace diffeoflow {

/// First-order forward-mode number over the variables (x, y, z, t).
struct Dual {
  using Gradient = Eigen::Matrix<double, 4, 1>;

  double value = 0.0;
  Gradient grad = Gradient::Zero();

  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  Dual(double v, Gradient g) : value(v), grad(std::move(g)) {}

  static Dual variable(double v, int index) {
    Dual d(v);
    d.grad[index] = 1.0;
    return d;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.value + b.value, a.grad + b.grad}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.value - b.value, a.grad - b.grad}; }
inline Dual operator-(const Dual& a) { return {-a.value, -a.grad}; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.value * b.value, a.grad * b.value + b.grad * a.value};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  return {a.value / b.value, (a.grad * b.value - b.grad * a.value) / (b.value * b.value)};
}

inline Dual chain(const Dual& a, double value, double slope) { return {value, slope * a.grad}; }

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e);
}
inline Dual sin(const Dual& a) { return chain(a, std::sin(a.value), std::cos(a.value)); }
inline Dual cos(const Dual& a) { return chain(a, std::cos(a.value), -std::sin(a.value)); }
inline Dual tanh(const Dual& a) {
  const double th = std::tanh(a.value);
  return chain(a, th, 1.0 - th * th);
}
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s);
}
inline Dual pow(const Dual& a, double c) {
  if (c == 0.0) return Dual(1.0);
  return chain(a, std::pow(a.value, c), c * std::pow(a.value, c - 1.0));
}

}  // namespace diffeoflow
