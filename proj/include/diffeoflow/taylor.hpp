#pragma once

#include "diffeoflow/errors.hpp"
#include "diffeoflow/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace diffeoflow {

/// Truncated multivariate Taylor polynomial in n <= 3 variables, total degree <= order.
///
/// Coefficient of the monomial v^beta is the normalized derivative d^beta F / beta!.
/// Storage is a dense (order+1)^n cube; entries with |beta| > order stay zero.
template <typename Scalar>
class TaylorSeries {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TaylorSeries() = default;
  TaylorSeries(int vars, int order)
      : vars_(vars), order_(order), coeffs_(Coefficients::Zero(cube_size(vars, order))) {}

  static TaylorSeries constant(int vars, int order, Scalar c) {
    TaylorSeries s(vars, order);
    s.coeffs_[0] = c;
    return s;
  }

  /// The coordinate function v_index expanded around `value`.
  static TaylorSeries variable(int vars, int order, int index, Scalar value) {
    TaylorSeries s = constant(vars, order, value);
    if (order >= 1) {
      MultiIndex beta{};
      beta[static_cast<std::size_t>(index)] = 1;
      s[beta] = Scalar(1);
    }
    return s;
  }

  int vars() const { return vars_; }
  int order() const { return order_; }
  Scalar value() const { return coeffs_[0]; }

  Scalar& operator[](const MultiIndex& beta) { return coeffs_[flat(beta)]; }
  Scalar operator[](const MultiIndex& beta) const { return coeffs_[flat(beta)]; }

  /// All exponent vectors of total degree exactly `degree`, lexicographic.
  std::vector<MultiIndex> monomials(int degree) const {
    std::vector<MultiIndex> out;
    MultiIndex beta{};
    enumerate(0, degree, beta, out);
    return out;
  }

  TaylorSeries& operator+=(const TaylorSeries& o) {
    coeffs_ += o.coeffs_;
    return *this;
  }
  TaylorSeries& operator-=(const TaylorSeries& o) {
    coeffs_ -= o.coeffs_;
    return *this;
  }

  friend TaylorSeries operator+(TaylorSeries a, const TaylorSeries& b) { return a += b; }
  friend TaylorSeries operator-(TaylorSeries a, const TaylorSeries& b) { return a -= b; }
  friend TaylorSeries operator-(TaylorSeries a) {
    a.coeffs_ = -a.coeffs_;
    return a;
  }
  friend TaylorSeries operator*(Scalar c, TaylorSeries a) {
    a.coeffs_ *= c;
    return a;
  }

  friend TaylorSeries operator*(const TaylorSeries& a, const TaylorSeries& b) {
    TaylorSeries out(a.vars_, a.order_);
    const int side = a.order_ + 1;
    const Eigen::Index size = a.coeffs_.size();
    for (Eigen::Index i = 0; i < size; ++i) {
      if (a.coeffs_[i] == Scalar(0)) continue;
      const MultiIndex bi = a.unflat(i);
      const int di = total_order(bi);
      for (Eigen::Index j = 0; j < size; ++j) {
        if (b.coeffs_[j] == Scalar(0)) continue;
        const MultiIndex bj = a.unflat(j);
        if (di + total_order(bj) > a.order_) continue;
        Eigen::Index k = 0;
        for (int v = 0; v < a.vars_; ++v)
          k = k * side + bi[static_cast<std::size_t>(v)] + bj[static_cast<std::size_t>(v)];
        out.coeffs_[k] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return out;
  }

  /// f(s) for a univariate f given f^(k)(s.value()) for k = 0..order.
  TaylorSeries apply(const std::vector<Scalar>& derivatives) const {
    TaylorSeries shifted = *this;
    shifted.coeffs_[0] = Scalar(0);
    // Horner in the nilpotent part.
    std::vector<Scalar> c(static_cast<std::size_t>(order_ + 1));
    Scalar fact(1);
    for (int k = 0; k <= order_; ++k) {
      if (k > 0) fact *= Scalar(k);
      c[static_cast<std::size_t>(k)] = derivatives[static_cast<std::size_t>(k)] / fact;
    }
    TaylorSeries acc = constant(vars_, order_, c[static_cast<std::size_t>(order_)]);
    for (int k = order_ - 1; k >= 0; --k) {
      acc = acc * shifted;
      acc.coeffs_[0] += c[static_cast<std::size_t>(k)];
    }
    return acc;
  }

  friend TaylorSeries operator/(const TaylorSeries& a, const TaylorSeries& b) {
    const Scalar b0 = b.value();
    std::vector<Scalar> d(static_cast<std::size_t>(b.order_ + 1));
    Scalar sign(1), fact(1);
    for (int k = 0; k <= b.order_; ++k) {
      if (k > 0) fact *= Scalar(k);
      d[static_cast<std::size_t>(k)] = sign * fact / pow_int(b0, k + 1);
      sign = -sign;
    }
    return a * b.apply(d);
  }

 private:
  static Eigen::Index cube_size(int vars, int order) {
    Eigen::Index s = 1;
    for (int v = 0; v < vars; ++v) s *= order + 1;
    return s;
  }

  static Scalar pow_int(Scalar x, int k) {
    Scalar r(1);
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  }

  Eigen::Index flat(const MultiIndex& beta) const {
    Eigen::Index k = 0;
    for (int v = 0; v < vars_; ++v) k = k * (order_ + 1) + beta[static_cast<std::size_t>(v)];
    return k;
  }

  MultiIndex unflat(Eigen::Index k) const {
    MultiIndex beta{};
    for (int v = vars_ - 1; v >= 0; --v) {
      beta[static_cast<std::size_t>(v)] = static_cast<int>(k % (order_ + 1));
      k /= order_ + 1;
    }
    return beta;
  }

  void enumerate(int axis, int remaining, MultiIndex& beta, std::vector<MultiIndex>& out) const {
    if (axis == vars_ - 1) {
      beta[static_cast<std::size_t>(axis)] = remaining;
      out.push_back(beta);
      return;
    }
    for (int b = remaining; b >= 0; --b) {
      beta[static_cast<std::size_t>(axis)] = b;
      enumerate(axis + 1, remaining - b, beta, out);
    }
    beta[static_cast<std::size_t>(axis)] = 0;
  }

  int vars_ = 1;
  int order_ = 0;
  Coefficients coeffs_ = Coefficients::Zero(1);
};

template <typename Scalar>
TaylorSeries<Scalar> exp(const TaylorSeries<Scalar>& s) {
  using std::exp;
  return s.apply(std::vector<Scalar>(static_cast<std::size_t>(s.order() + 1), exp(s.value())));
}

template <typename Scalar>
TaylorSeries<Scalar> sin(const TaylorSeries<Scalar>& s) {
  using std::cos;
  using std::sin;
  const Scalar cycle[4] = {sin(s.value()), cos(s.value()), -sin(s.value()), -cos(s.value())};
  std::vector<Scalar> d;
  for (int k = 0; k <= s.order(); ++k) d.push_back(cycle[k % 4]);
  return s.apply(d);
}

template <typename Scalar>
TaylorSeries<Scalar> cos(const TaylorSeries<Scalar>& s) {
  using std::cos;
  using std::sin;
  const Scalar cycle[4] = {cos(s.value()), -sin(s.value()), -cos(s.value()), sin(s.value())};
  std::vector<Scalar> d;
  for (int k = 0; k <= s.order(); ++k) d.push_back(cycle[k % 4]);
  return s.apply(d);
}

/// Derivatives of tanh are polynomials in T = tanh: P_{k+1}(T) = P_k'(T) (1 - T^2).
template <typename Scalar>
TaylorSeries<Scalar> tanh(const TaylorSeries<Scalar>& s) {
  using std::tanh;
  const Scalar th = tanh(s.value());
  std::vector<Scalar> poly{Scalar(0), Scalar(1)};  // P_0(T) = T
  std::vector<Scalar> d;
  for (int k = 0; k <= s.order(); ++k) {
    Scalar v(0), p(1);
    for (const auto& c : poly) {
      v += c * p;
      p *= th;
    }
    d.push_back(v);
    std::vector<Scalar> deriv(poly.size() > 1 ? poly.size() - 1 : 1, Scalar(0));
    for (std::size_t i = 1; i < poly.size(); ++i) deriv[i - 1] = Scalar(static_cast<double>(i)) * poly[i];
    std::vector<Scalar> next(deriv.size() + 2, Scalar(0));
    for (std::size_t i = 0; i < deriv.size(); ++i) {
      next[i] += deriv[i];
      next[i + 2] -= deriv[i];
    }
    poly = std::move(next);
  }
  return s.apply(d);
}

/// s^c. Non-integer c requires a positive base.
template <typename Scalar>
TaylorSeries<Scalar> pow(const TaylorSeries<Scalar>& s, double c) {
  using std::pow;
  const double ci = std::round(c);
  if (ci == c && ci >= 0) {
    auto r = TaylorSeries<Scalar>::constant(s.vars(), s.order(), Scalar(1));
    for (int i = 0; i < static_cast<int>(ci); ++i) r = r * s;
    return r;
  }
  if (ci == c) {
    const auto one = TaylorSeries<Scalar>::constant(s.vars(), s.order(), Scalar(1));
    return one / pow(s, -c);
  }
  std::vector<Scalar> d;
  Scalar falling(1);
  for (int k = 0; k <= s.order(); ++k) {
    d.push_back(falling * pow(s.value(), Scalar(c - k)));
    falling *= Scalar(c - k);
  }
  return s.apply(d);
}

template <typename Scalar>
TaylorSeries<Scalar> sqrt(const TaylorSeries<Scalar>& s) {
  return pow(s, 0.5);
}

}  // namespace diffeoflow
