#include "diffeoflow/descriptor.hpp"
#include "diffeoflow/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace diffeoflow;

namespace {

Point pt(double x) { return Point::Constant(1, x); }
Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("grammar and evaluation") {
  CHECK(Descriptor::parse("1 + 2*3", 1)(pt(0)) == 7.0);
  CHECK(Descriptor::parse("2^3^2", 1)(pt(0)) == 512.0);
  CHECK(Descriptor::parse("-x^2", 1)(pt(3)) == -9.0);
  CHECK(Descriptor::parse("(1 - x)/4", 1)(pt(-1)) == 0.5);
  CHECK(Descriptor::parse("pi", 1)(pt(0)) == std::numbers::pi);
  CHECK(Descriptor::parse("1.5e-1*x", 1)(pt(2)) == doctest::Approx(0.3));
  CHECK(Descriptor::parse("gauss(x)", 1)(pt(0.7)) == std::exp(-0.49));
  CHECK(Descriptor::parse("bump(x)", 1)(pt(0.5)) == std::exp(-1.0 / 0.75));
  CHECK(Descriptor::parse("bump(x)", 1)(pt(1.0)) == 0.0);
  CHECK(Descriptor::parse("bump(x)", 1)(pt(-3.0)) == 0.0);
  CHECK(Descriptor::parse("sqrt(2 + y)*tanh(x)", 2)(pt(0.3, 2.0)) == doctest::Approx(2.0 * std::tanh(0.3)));
  CHECK(Descriptor::parse("exp(-(x - 0.5*t)^2)", 1, true)(pt(1.0), 2.0) == 1.0);
  CHECK(Descriptor::parse("0", 2).is_constant_zero());
  CHECK_FALSE(Descriptor::parse("x", 2).is_constant_zero());
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(Descriptor::parse("foo(x)", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("y", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("z + x", 2), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("t*x", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("x^x", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("(x", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("x)", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("", 1), ParseError);
  CHECK_THROWS_AS(Descriptor::parse("2 *", 1), ParseError);
  CHECK_THROWS_AS(VectorDescriptor::parse("x; y; x", 2), ParseError);
  CHECK_THROWS_AS(VectorDescriptor::parse("x", 2), ParseError);
}

TEST_CASE("vector descriptors") {
  const auto v = VectorDescriptor::parse("x*y; sin(x) + y^2", 2);
  CHECK(v.dim() == 2);
  const Point p = pt(0.4, -1.1);
  const Point val = v(p);
  CHECK(val[0] == doctest::Approx(0.4 * -1.1));
  CHECK(val[1] == doctest::Approx(std::sin(0.4) + 1.21));
  const SmallMatrix j = v.jacobian(p);
  CHECK(j(0, 0) == doctest::Approx(-1.1));
  CHECK(j(0, 1) == doctest::Approx(0.4));
  CHECK(j(1, 0) == doctest::Approx(std::cos(0.4)));
  CHECK(j(1, 1) == doctest::Approx(-2.2));
  CHECK(VectorDescriptor::parse("x", 1).dim() == 1);
}

TEST_CASE("dual gradients against central differences") {
  const auto d = Descriptor::parse("exp(-x^2)*cos(y + t) + tanh(x*y) + sqrt(3 + x) + (1 + y^2)^(-1.5)", 2, true);
  const Point p = pt(0.3, -0.6);
  const double t = 0.25, h = 1e-5;
  const auto g = d.gradient(p, t);
  for (int k = 0; k < 2; ++k) {
    Point a = p, b = p;
    a[k] += h;
    b[k] -= h;
    CHECK(g[k] == doctest::Approx((d(a, t) - d(b, t)) / (2 * h)).epsilon(1e-8));
  }
  CHECK(g[3] == doctest::Approx((d(p, t + h) - d(p, t - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("taylor coefficients in 1-D") {
  auto coeffs = [](const std::string& text, double x0, int order) {
    const auto s = Descriptor::parse(text, 1).taylor(pt(x0), order);
    std::vector<double> c;
    for (int k = 0; k <= order; ++k) c.push_back(s[MultiIndex{k, 0, 0}]);
    return c;
  };
  // exp(sin x) at 0: 1, 1, 1/2, 0, -1/8, -1/15.
  const std::vector<double> es{1.0, 1.0, 0.5, 0.0, -0.125, -1.0 / 15};
  const auto c = coeffs("exp(sin(x))", 0.0, 5);
  for (int k = 0; k <= 5; ++k) CHECK(std::abs(c[static_cast<std::size_t>(k)] - es[static_cast<std::size_t>(k)]) <= 1e-14);

  const auto geo = coeffs("(1 + x^2)^(-1)", 0.0, 6);
  const std::vector<double> geo_oracle{1, 0, -1, 0, 1, 0, -1};
  for (int k = 0; k <= 6; ++k) CHECK(geo[static_cast<std::size_t>(k)] == doctest::Approx(geo_oracle[static_cast<std::size_t>(k)]));

  const auto th = coeffs("tanh(x)", 0.0, 5);
  CHECK(th[1] == doctest::Approx(1.0));
  CHECK(th[3] == doctest::Approx(-1.0 / 3));
  CHECK(th[5] == doctest::Approx(2.0 / 15));

  // sqrt(1 + x): binomial coefficients C(1/2, k).
  const auto sq = coeffs("sqrt(1 + x)", 0.0, 4);
  double binom = 1.0;
  for (int k = 0; k <= 4; ++k) {
    CHECK(sq[static_cast<std::size_t>(k)] == doctest::Approx(binom));
    binom *= (0.5 - k) / (k + 1);
  }

  // bump at 0: e^-1 (1 - x^2 - x^4/2).
  const auto b = coeffs("bump(x)", 0.0, 4);
  CHECK(b[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(b[2] == doctest::Approx(-std::exp(-1.0)));
  CHECK(b[4] == doctest::Approx(-0.5 * std::exp(-1.0)));
  CHECK(coeffs("bump(x)", 1.5, 3) == std::vector<double>{0, 0, 0, 0});

  // Shifted base point: sin around 0.7.
  const auto s = coeffs("sin(x)", 0.7, 3);
  CHECK(s[0] == doctest::Approx(std::sin(0.7)));
  CHECK(s[1] == doctest::Approx(std::cos(0.7)));
  CHECK(s[2] == doctest::Approx(-std::sin(0.7) / 2));
  CHECK(s[3] == doctest::Approx(-std::cos(0.7) / 6));
}

TEST_CASE("taylor coefficients in 2-D") {
  const double a = 0.2, b = -0.4;
  const auto s = Descriptor::parse("exp(x)*cos(y)", 2).taylor(pt(a, b), 4);
  const double cyc[4] = {std::cos(b), -std::sin(b), -std::cos(b), std::sin(b)};
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; i + j <= 4; ++j) {
      const double oracle = std::exp(a) / std::tgamma(i + 1) * cyc[j % 4] / std::tgamma(j + 1);
      CHECK(s[MultiIndex{i, j, 0}] == doctest::Approx(oracle).epsilon(1e-13));
    }
  }
  const auto m = Descriptor::parse("x*y^2", 2).taylor(pt(1.0, 2.0), 3);
  CHECK(m[MultiIndex{0, 0, 0}] == 4.0);
  CHECK(m[MultiIndex{1, 0, 0}] == 4.0);
  CHECK(m[MultiIndex{0, 1, 0}] == 4.0);
  CHECK(m[MultiIndex{1, 1, 0}] == 4.0);
  CHECK(m[MultiIndex{0, 2, 0}] == 1.0);
  CHECK(m[MultiIndex{1, 2, 0}] == 1.0);
  CHECK(m[MultiIndex{3, 0, 0}] == 0.0);
}

TEST_CASE("sample rejects non-finite values and mismatched grids") {
  const Grid g(2, 1.0, 17);
  CHECK_THROWS_AS(sample(Descriptor::parse("1/x", 2), g), NonFiniteSample);
  CHECK_THROWS_AS(sample(VectorDescriptor::parse("x", 1), g), DimensionMismatch);
  const auto f = sample(VectorDescriptor::parse("x; y", 2), g);
  CHECK(f.dim() == 2);
  CHECK(f.component(1)[g.node_count() - 1] == 1.0);
}
