#include "diffeoflow/errors.hpp"
#include "diffeoflow/evolution.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace diffeoflow;

namespace {

const Grid kLine(1, 8.0, 513);

TimeDependentVectorField field(const std::string& text, DecayClass c, int dim = 1) {
  return TimeDependentVectorField::parse(text, dim, c);
}

EvolveOptions quiet() {
  EvolveOptions o;
  o.diagnostics = false;
  return o;
}

double final_error(const FlowResult& a, const FlowResult& b) {
  return (a.snapshots.back() - b.snapshots.back()).sup_norm();
}

}  // namespace

TEST_CASE("zero and constant fields") {
  const auto zero = field("0", DecayClass::CompactSupport);
  const auto r0 = evolve(zero, kLine, 1.0, 1.0 / 16);
  CHECK(r0.snapshots.size() == 17);
  CHECK(r0.times.back() == 1.0);
  for (const auto& s : r0.snapshots) CHECK(s.sup_norm() == 0.0);

  const auto c = field("0.3", DecayClass::BoundedAll);
  const auto rc = evolve(c, kLine, 1.0, 1.0 / 16);
  for (std::size_t k = 0; k < rc.snapshots.size(); ++k) {
    const auto& f = rc.snapshots[k].component(0).samples();
    CHECK((f.array() - 0.3 * rc.times[k]).abs().maxCoeff() <= 1e-15);
  }
  CHECK(rc.snapshots.front().sup_norm() == 0.0);
}

TEST_CASE("linear field against the exponential") {
  // y' = -0.3 y gives f = x (exp(-0.3 t) - 1); RK4 error per unit time ~ dt^4.
  const auto lin = field("-0.3*x", DecayClass::BoundedAll);
  const auto r = evolve(lin, kLine, 1.0, 1.0 / 32);
  double err = 0.0;
  for (std::size_t i = 0; i < kLine.node_count(); ++i) {
    const double x = kLine.node(i)[0];
    err = std::max(err, std::abs(r.snapshots.back().component(0)[i] - x * (std::exp(-0.3) - 1.0)));
  }
  CHECK(err <= 1e-9);
}

TEST_CASE("gaussian flow converges at fourth order") {
  const auto g = field("0.5*exp(-x^2)", DecayClass::Schwartz);
  const auto oracle = evolve(g, kLine, 1.0, 1.0 / 4096, quiet());
  CHECK(final_error(evolve(g, kLine, 1.0, 1.0 / 64, quiet()), oracle) <= 1e-8);
  std::vector<double> errs;
  for (int m : {8, 16, 32}) errs.push_back(final_error(evolve(g, kLine, 1.0, 1.0 / m, quiet()), oracle));
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) >= 3.8);
}

TEST_CASE("flow property") {
  const auto x_field = field("0.4*exp(-x^2)*cos(t)", DecayClass::Schwartz);
  const auto whole = evolve(x_field, kLine, 1.0, 1.0 / 64, quiet());
  const auto first = evolve(x_field, kLine, 0.5, 1.0 / 64, quiet());
  EvolveOptions later = quiet();
  later.t_start = 0.5;
  const auto second = evolve(x_field, kLine, 1.0, 1.0 / 64, later);
  const auto composed = compose(second.diffeo(second.snapshots.size() - 1), first.diffeo(first.snapshots.size() - 1));
  CHECK((composed.displacement() - whole.snapshots.back()).sup_norm() <= 2e-7);
}

TEST_CASE("flow failure") {
  CHECK_THROWS_AS(evolve(field("x", DecayClass::BoundedAll), kLine, 1.0, 1.0 / 16), FlowFailure);
  CHECK_THROWS_AS(evolve(field("2", DecayClass::BoundedAll), kLine, 1.0, 1.0 / 16), FlowFailure);
  CHECK_THROWS_AS(evolve(field("0", DecayClass::BoundedAll), kLine, 1.0, 0.3), InvalidArgument);
}

TEST_CASE("displacement sup bound") {
  const auto r0 = evolve(field("0", DecayClass::CompactSupport), kLine, 1.0, 1.0 / 16);
  const auto b0 = displacement_sup_bound(r0, field("0", DecayClass::CompactSupport));
  CHECK(b0.holds);
  for (std::size_t k = 0; k < b0.times.size(); ++k) {
    CHECK(b0.bound[k] == 0.0);
    CHECK(b0.measured[k] == 0.0);
  }

  const auto c = field("-0.3", DecayClass::BoundedAll);
  const auto bc = displacement_sup_bound(evolve(c, kLine, 1.0, 1.0 / 16), c);
  CHECK(bc.holds);
  for (std::size_t k = 0; k < bc.times.size(); ++k) {
    CHECK(bc.bound[k] == doctest::Approx(0.3 * bc.times[k]).epsilon(1e-14));
    CHECK(bc.measured[k] == doctest::Approx(0.3 * bc.times[k]).epsilon(1e-14));
  }

  const auto g = field("0.5*exp(-x^2)", DecayClass::Schwartz);
  const auto bg = displacement_sup_bound(evolve(g, kLine, 1.0, 1.0 / 64), g);
  CHECK(bg.holds);
  CHECK(bg.violations == 0);
  CHECK(bg.min_margin >= -1e-8);
}

TEST_CASE("gronwall bound") {
  const auto c = field("0.3", DecayClass::BoundedAll);
  const auto gc = gronwall_bound(evolve(c, kLine, 1.0, 1.0 / 16), c);
  CHECK(gc.inequality.holds);
  for (std::size_t k = 0; k < gc.inequality.times.size(); ++k) {
    CHECK(gc.inequality.bound[k] == 0.0);
    CHECK(gc.inequality.measured[k] <= 1e-8);
  }

  const auto g = field("0.5*exp(-x^2)", DecayClass::Schwartz);
  const auto gg = gronwall_bound(evolve(g, kLine, 1.0, 1.0 / 64), g);
  CHECK(gg.inequality.holds);
  CHECK(gg.inequality.violations == 0);
  // beta is the sup of |X'| = 0.5 sqrt(2) exp(-1/2) up to the node sampling of the trajectories.
  for (double b : gg.beta) CHECK(b <= std::sqrt(2.0) * 0.5 * std::exp(-0.5) + 1e-12);
  CHECK(gg.alpha.front() == 0.0);

  const Grid plane(2, 6.0, 129);
  const auto x2 = field("0.3*exp(-x^2 - y^2); 0.2*sin(t)*exp(-x^2 - y^2)", DecayClass::Schwartz, 2);
  const auto r2 = evolve(x2, plane, 1.0, 1.0 / 32);
  CHECK(displacement_sup_bound(r2, x2).holds);
  CHECK(gronwall_bound(r2, x2).inequality.holds);
}

TEST_CASE("sobolev tracking") {
  const auto zero = field("0", DecayClass::CompactSupport);
  const auto z = sobolev_tracking(evolve(zero, kLine, 1.0, 1.0 / 16), zero);
  CHECK(z.ok());
  for (const auto& snap : z.norms)
    for (double v : snap) CHECK(v == 0.0);

  const auto g = field("0.5*exp(-x^2)", DecayClass::Schwartz);
  const auto r = evolve(g, kLine, 1.0, 1.0 / 32);
  const auto s = sobolev_tracking(r, g);
  CHECK(s.ok());
  CHECK(s.alphas.size() == 3);
  CHECK(s.norms.size() == r.snapshots.size());
  CHECK(s.enlargement_checked);
  CHECK(s.enlargement_defect <= 1e-6);
  CHECK(s.edge_checked);
  CHECK(s.edge_sup < 1e-6);
  // The L^2 norm of f grows with t from 0.
  CHECK(s.norms.front()[0] == 0.0);
  CHECK(s.norms.back()[0] > s.norms[s.norms.size() / 2][0]);
  CHECK(classify_decay(r.snapshots.back(), kGroupOrderCap, kGroupWeightCap).inferred_class == DecayClass::Schwartz);
}

TEST_CASE("right logarithmic derivative") {
  const auto zero = field("0", DecayClass::CompactSupport);
  const auto dz = right_log_derivative(evolve(zero, kLine, 1.0, 1.0 / 16));
  CHECK(dz.size() == 13);
  for (const auto& d : dz) CHECK(d.value.sup_norm() == 0.0);

  const auto c = field("0.3", DecayClass::BoundedAll);
  const auto dc = right_log_derivative(evolve(c, kLine, 1.0, 1.0 / 16));
  CHECK(log_derivative_defect(dc, c) <= 1e-8);

  const auto g = field("0.5*exp(-x^2)*(1 + 0.5*sin(2*t))", DecayClass::Schwartz);
  std::vector<double> errs;
  for (int m : {8, 16, 32}) {
    const auto r = evolve(g, kLine, 1.0, 1.0 / m, quiet());
    errs.push_back(log_derivative_defect(right_log_derivative(r, 1e-13, {0.5}), g));
  }
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) >= 3.5);

  const auto short_run = evolve(zero, kLine, 0.5, 0.25);
  CHECK_THROWS_AS(right_log_derivative(short_run), TooFewSnapshots);
}

TEST_CASE("smoothness in a parameter") {
  const std::vector<std::size_t> probes{128, 256, 300};
  const std::vector<double> steps{0.1, 0.05, 0.025};

  const auto flat = evol_smoothness_probe(
      [](double s) { return field("0", DecayClass::CompactSupport).scaled(s); }, 1.0, steps, kLine, 1.0, 1.0 / 16,
      probes);
  for (const auto& row : flat.first)
    for (double v : row) CHECK(v == 0.0);
  CHECK(flat.first_converges);
  CHECK(flat.second_stable);

  const auto lin = evol_smoothness_probe(
      [](double s) { return field("0.3", DecayClass::BoundedAll).scaled(s); }, 1.0, steps, kLine, 1.0, 1.0 / 16,
      probes);
  for (const auto& row : lin.first)
    for (double v : row) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(lin.first_converges);

  const auto gauss = evol_smoothness_probe(
      [](double s) { return field("0.5*exp(-x^2)", DecayClass::Schwartz).scaled(s); }, 1.0, steps, kLine, 1.0,
      1.0 / 32, probes);
  CHECK(gauss.first_converges);
  CHECK(gauss.second_stable);
  CHECK(gauss.second_change <= 1e-4);
}

TEST_CASE("flow csv") {
  const auto g = field("0.5*exp(-x^2)", DecayClass::Schwartz);
  const auto r = evolve(g, kLine, 0.5, 1.0 / 16);
  std::ostringstream out;
  write_flow_csv(out, r, displacement_sup_bound(r, g), gronwall_bound(r, g), sobolev_tracking(r, g));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "t,sup_f,sup_df,min_det,sup_bound,sup_measured,gronwall_predicted,gronwall_measured,sobolev_p0,sobolev_p1,"
        "sobolev_p2");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 10);
    ++rows;
  }
  CHECK(rows == 9);
}
