#include "diffeoflow/descriptor.hpp"
#include "diffeoflow/diffeo.hpp"
#include "diffeoflow/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace diffeoflow;

namespace {

const Grid kLine(1, 8.0, 513);

Diffeo make(const std::string& text, DecayClass c, const Grid& grid = kLine) {
  return Diffeo(sample(VectorDescriptor::parse(text, grid.dim()), grid), c);
}

Diffeo translation(double c, const Grid& grid = kLine) {
  return Diffeo(DisplacementField::constant(grid, Point::Constant(grid.dim(), c)), DecayClass::BoundedAll);
}

double sup_diff(const DisplacementField& a, const DisplacementField& b) { return (a - b).sup_norm(); }

double sup_diff(const ScalarField& a, const ScalarField& b) { return (a.samples() - b.samples()).cwiseAbs().maxCoeff(); }

// Root of x + a exp(-x^2) = y by Newton from x = y.
double newton_preimage(double a, double y) {
  double x = y;
  for (int it = 0; it < 100; ++it) {
    const double e = a * std::exp(-x * x);
    const double step = (x + e - y) / (1.0 - 2.0 * x * e);
    x -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return x;
}

}  // namespace

TEST_CASE("membership") {
  const auto id = membership_check(DisplacementField::zeros(kLine), DecayClass::CompactSupport);
  CHECK(id.ok);
  CHECK(id.epsilon == 1.0);

  const auto folded = membership_check(sample(VectorDescriptor::parse("-1.2*x*exp(-x^2)", 1), kLine),
                                       DecayClass::BoundedAll);
  CHECK_FALSE(folded.ok);
  CHECK(folded.epsilon <= 0.0);
  CHECK(folded.epsilon == doctest::Approx(-0.2).epsilon(1e-4));

  const auto g = sample(VectorDescriptor::parse("0.3*exp(-x^2)", 1), kLine);
  const auto s = membership_check(g, DecayClass::Schwartz);
  CHECK(s.ok);
  CHECK(s.report.inferred_class == DecayClass::Schwartz);
  double node_min = 1.0;
  for (std::size_t i = 0; i < kLine.node_count(); ++i) {
    const double x = kLine.node(i)[0];
    node_min = std::min(node_min, 1.0 - 0.6 * x * std::exp(-x * x));
  }
  CHECK(s.epsilon == doctest::Approx(node_min).epsilon(1e-6));
  CHECK_FALSE(membership_check(sample(VectorDescriptor::parse("0.3*tanh(x)", 1), kLine), DecayClass::Schwartz).ok);

  CHECK_THROWS_AS(make("-1.2*x*exp(-x^2)", DecayClass::Schwartz), NonDiffeomorphic);
}

TEST_CASE("compose") {
  const auto id = Diffeo::identity(kLine);
  const auto idid = compose(id, id);
  CHECK(idid.displacement().sup_norm() == 0.0);
  CHECK(idid.decay_class() == DecayClass::CompactSupport);

  const auto t = compose(translation(0.5), translation(0.25));
  CHECK((t.displacement().component(0).samples().array() == 0.75).all());
  CHECK(t.decay_class() == DecayClass::BoundedAll);

  const auto phi = make("0.2*exp(-x^2)", DecayClass::Schwartz);
  const auto psi = make("0.1*exp(-(x - 1)^2)", DecayClass::Schwartz);
  const auto c = compose(phi, psi);
  double err = 0.0;
  for (std::size_t i = 0; i < kLine.node_count(); ++i) {
    const double x = kLine.node(i)[0];
    const double y = x + 0.1 * std::exp(-(x - 1) * (x - 1));
    err = std::max(err, std::abs(x + c.displacement().component(0)[i] - (y + 0.2 * std::exp(-y * y))));
  }
  CHECK(err <= 1e-6);
  CHECK(c.decay_class() == DecayClass::Schwartz);
  CHECK(compose(phi, translation(0.1)).decay_class() == DecayClass::BoundedAll);

  // Identity is a two-sided unit at the nodes.
  CHECK(sup_diff(compose(phi, id).displacement(), phi.displacement()) == 0.0);
  CHECK(sup_diff(compose(id, phi).displacement(), phi.displacement()) == 0.0);
}

TEST_CASE("compose rejects under-resolved and mismatched inputs") {
  CHECK_THROWS_AS(compose(Diffeo::identity(kLine), translation(1.0)), UnderResolved);
  const Grid other(1, 8.0, 257);
  CHECK_THROWS_AS(compose(Diffeo::identity(other), Diffeo::identity(kLine)), DimensionMismatch);
}

TEST_CASE("det propagation") {
  const auto phi = make("0.4*exp(-x^2)", DecayClass::Schwartz);
  const auto psi = make("-0.3*exp(-(x + 0.5)^2)", DecayClass::Schwartz);
  const auto c = compose(phi, psi);
  CHECK(c.epsilon() >= phi.epsilon() * psi.epsilon() - 1e-3);
  CHECK(c.epsilon() == doctest::Approx(min_jacobian_determinant(c.displacement())));

  const Grid plane(2, 6.0, 129);
  const auto p2 = make("0.3*exp(-x^2 - y^2); 0.2*sin(x)*exp(-x^2 - y^2)", DecayClass::Schwartz, plane);
  const auto q2 = make("0.25*tanh(y); 0.1*exp(-(x - 1)^2)", DecayClass::BoundedAll, plane);
  const auto c2 = compose(p2, q2);
  CHECK(c2.epsilon() >= p2.epsilon() * q2.epsilon() - 1e-3);
}

TEST_CASE("invert") {
  InversionReport rep;
  const auto id = invert(Diffeo::identity(kLine), {}, &rep);
  CHECK(id.displacement().sup_norm() == 0.0);
  CHECK(rep.residual == 0.0);

  const auto back = invert(translation(0.375));
  CHECK((back.displacement().component(0).samples().array() == -0.375).all());

  const auto phi = make("0.3*exp(-x^2)", DecayClass::Schwartz);
  const auto inv = invert(phi, {}, &rep);
  CHECK(rep.residual <= 1e-8);
  CHECK(inv.decay_class() == DecayClass::Schwartz);
  double err = 0.0;
  for (std::size_t i = 0; i < kLine.node_count(); ++i) {
    const double y = kLine.node(i)[0];
    err = std::max(err, std::abs(inv.displacement().component(0)[i] - (newton_preimage(0.3, y) - y)));
  }
  CHECK(err <= 1e-8);

  // Steep displacement: Lipschitz above the fixed-point limit forces Newton.
  const auto steep = make("0.95*tanh(x)", DecayClass::BoundedAll);
  const auto steep_inv = invert(steep, {}, &rep);
  CHECK(rep.newton_used);
  CHECK(rep.residual <= 1e-8 * 9.0);
  CHECK(sup_diff(compose(steep, steep_inv).displacement(), DisplacementField::zeros(kLine)) <= 1e-7);
}

TEST_CASE("group axioms on random Schwartz triples") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> amp(-0.3, 0.3), centre(-2.0, 2.0), width(0.7, 1.5);
  auto draw = [&] {
    const double a = amp(rng), c = centre(rng), w = width(rng);
    return Diffeo(DisplacementField::from_function(kLine, [&](const Point& p) {
                    const double u = (p[0] - c) / w;
                    return Point::Constant(1, a * std::exp(-u * u));
                  }),
                  DecayClass::Schwartz);
  };
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = draw(), g = draw(), h = draw();
    CHECK(sup_diff(compose(compose(f, g), h).displacement(), compose(f, compose(g, h)).displacement()) <= 1e-6);
    const auto fi = invert(f);
    CHECK(compose(f, fi).displacement().sup_norm() <= 1e-7);
    CHECK(compose(fi, f).displacement().sup_norm() <= 1e-7);
  }
}

TEST_CASE("conjugate") {
  const auto outer = make("0.5*tanh(x)", DecayClass::BoundedAll);
  const auto inner = make("0.2*exp(-x^2)", DecayClass::Schwartz);

  const auto fixed = conjugate(outer, Diffeo::identity(kLine, DecayClass::Schwartz));
  CHECK(fixed.displacement().sup_norm() == 0.0);

  const auto same = conjugate(Diffeo::identity(kLine, DecayClass::BoundedAll), inner);
  CHECK(sup_diff(same.displacement(), inner.displacement()) == 0.0);

  ConjugationReport rep;
  const auto c = conjugate(outer, inner, &rep);
  CHECK(rep.normal);
  CHECK(rep.classification.inferred_class == DecayClass::Schwartz);
  CHECK(c.decay_class() == DecayClass::Schwartz);
  for (const auto& e : rep.classification.entries) CHECK(std::isfinite(e.value));
  CHECK(rep.remainder_defect <= 1e-6);
  CHECK(rep.classified_half_width > 0.0);
  CHECK(rep.classified_half_width <= kLine.half_width());

  // Against the definition: outer^-1 o inner o outer by generic compositions.
  const auto chained = compose(invert(outer), compose(inner, outer));
  CHECK(sup_diff(chained.displacement(), c.displacement()) <= 1e-6);
}

TEST_CASE("pullback") {
  const auto h = sample(Descriptor::parse("exp(-x^2)", 1), kLine);
  CHECK(sup_diff(pullback(Diffeo::identity(kLine), h), h) == 0.0);

  const double c = 0.3;
  const auto shifted = pullback(translation(c), h);
  CHECK(sup_diff(shifted, sample(Descriptor::parse("exp(-(x + 0.3)^2)", 1), kLine)) <= 1e-6);

  const auto bent = pullback(make("0.5*tanh(x) + 0.1*sin(x)", DecayClass::BoundedAll), h);
  CHECK(classify_decay(bent, kGroupOrderCap, kGroupWeightCap).inferred_class == DecayClass::Schwartz);

  const auto phi = make("0.2*exp(-x^2)", DecayClass::Schwartz);
  const auto psi = make("0.3*tanh(x - 1)", DecayClass::BoundedAll);
  CHECK(sup_diff(pullback(psi, pullback(phi, h)), pullback(compose(phi, psi), h)) <= 1e-6);
}

TEST_CASE("adjoint action") {
  const auto x_field = sample(VectorDescriptor::parse("0.4*exp(-(x - 0.5)^2)", 1), kLine);
  CHECK(sup_diff(adjoint_action(Diffeo::identity(kLine), x_field), x_field) == 0.0);

  const auto moved = adjoint_action(translation(0.25), x_field);
  CHECK(sup_diff(moved, sample(VectorDescriptor::parse("0.4*exp(-(x - 0.75)^2)", 1), kLine)) <= 1e-6);

  const auto bent = adjoint_action(make("0.5*tanh(x)", DecayClass::BoundedAll), x_field);
  CHECK(classify_decay(bent, kGroupOrderCap, kGroupWeightCap).inferred_class == DecayClass::Schwartz);

  // Ad_phi X = dphi(x) X(x) at y = phi(x) for a Schwartz phi, checked on the nodes
  // of the pulled-back field.
  const auto phi = make("0.3*exp(-x^2)", DecayClass::Schwartz);
  const auto ad = adjoint_action(phi, x_field);
  double err = 0.0;
  for (std::size_t i = 0; i < kLine.node_count(); ++i) {
    const double y = kLine.node(i)[0];
    const double x = newton_preimage(0.3, y);
    const double dphi = 1.0 - 0.6 * x * std::exp(-x * x);
    err = std::max(err, std::abs(ad.component(0)[i] - dphi * 0.4 * std::exp(-(x - 0.5) * (x - 0.5))));
  }
  CHECK(err <= 1e-6);
}

TEST_CASE("diffeo files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "diffeoflow_test_group";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "phi.dff").string();
  const auto phi = make("0.3*exp(-x^2) + 0.1*gauss(x - 2)", DecayClass::Schwartz);
  write_diffeo(path, phi);
  CHECK(std::filesystem::exists(path + ".meta.json"));
  const auto back = read_diffeo(path);
  CHECK(back.decay_class() == DecayClass::Schwartz);
  CHECK(back.epsilon() == phi.epsilon());
  CHECK(back.grid() == kLine);
  CHECK(sup_diff(back.displacement(), phi.displacement()) == 0.0);

  std::filesystem::remove(path + ".meta.json");
  CHECK(read_diffeo(path).decay_class() != DecayClass::CompactSupport);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_diffeo(path), IoError);
}
