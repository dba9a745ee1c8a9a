#include "diffeoflow/verification.hpp"

#include "diffeoflow/diffeo.hpp"
#include "diffeoflow/evolution.hpp"
#include "diffeoflow/jet.hpp"
#include "diffeoflow/matrix_bounds.hpp"
#include "diffeoflow/stencil.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

namespace diffeoflow {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Sum of two Gaussian bumps with sup |g'| < 0.6.
DisplacementField random_schwartz(std::mt19937_64& rng, const Grid& grid) {
  const double a1 = uniform(rng, -0.35, 0.35), c1 = uniform(rng, -2.0, 2.0), w1 = uniform(rng, 0.8, 1.5);
  const double a2 = uniform(rng, -0.15, 0.15), c2 = uniform(rng, -3.0, 3.0), w2 = uniform(rng, 0.8, 1.5);
  return DisplacementField::from_function(grid, [=](const Point& x) {
    const double u1 = (x[0] - c1) / w1, u2 = (x[0] - c2) / w2;
    Point out(1);
    out[0] = a1 * std::exp(-u1 * u1) + a2 * std::exp(-u2 * u2);
    return out;
  });
}

Eigen::VectorXd as_vector(const Point& p) { return Eigen::VectorXd(p); }

/// Independent oracle: finite-difference derivative d^beta of h at x0 by
/// tensor-product 13-point stencils.
double fd_derivative(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& h, const Eigen::VectorXd& x0,
                     const MultiIndex& beta, int component, double delta) {
  const int n = static_cast<int>(x0.size());
  std::vector<double> offsets;
  for (int i = -6; i <= 6; ++i) offsets.push_back(i);
  std::vector<std::vector<double>> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = fd_weights(offsets, 0.0, beta[static_cast<std::size_t>(k)]);
  double acc = 0.0;
  std::array<int, kMaxDim> idx{};
  const int points = static_cast<int>(offsets.size());
  std::function<void(int, double)> rec = [&](int axis, double weight) {
    if (axis == n) {
      Eigen::VectorXd x = x0;
      for (int k = 0; k < n; ++k) x[k] += offsets[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] * delta;
      acc += weight * h(x)[component];
      return;
    }
    for (int i = 0; i < points; ++i) {
      const double wi = w[static_cast<std::size_t>(axis)][static_cast<std::size_t>(i)];
      if (wi == 0.0) continue;
      idx[static_cast<std::size_t>(axis)] = i;
      rec(axis + 1, weight * wi);
    }
  };
  rec(0, 1.0);
  return acc / std::pow(delta, total_order(beta));
}

Jet<double> descriptor_jet(const VectorDescriptor& d, const Eigen::VectorXd& x, int order) {
  std::vector<Descriptor> parts;
  for (int k = 0; k < d.dim(); ++k) parts.push_back(d.component(k));
  return jet_of(parts, x, order);
}

/// Random square jet at x with linear part near I.
Jet<double> random_jet(std::mt19937_64& rng, int n, int order) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform(rng, -1.0, 1.0);
  Jet<double> jet(order, x, n);
  for (int j = 0; j <= order; ++j) {
    auto& c = jet.term(j).coefficients();
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = uniform(rng, -0.5, 0.5);
  }
  jet.term(1).coefficients() += Eigen::MatrixXd::Identity(n, n);
  return jet;
}

}  // namespace

CriterionResult verify_group_axioms(const VerifyConfig& config) {
  CriterionResult r{1, "group axioms", false, "", Json::object()};
  std::mt19937_64 rng(config.seed ^ 0x1001);
  const Grid grid(1, 8.0, 513);
  std::vector<Diffeo> battery;
  for (int i = 0; i < 20; ++i) battery.emplace_back(random_schwartz(rng, grid), DecayClass::Schwartz);

  double assoc = 0.0, inv_right = 0.0, inv_left = 0.0, residual = 0.0;
  bool unit_exact = true;
  const Diffeo id = Diffeo::identity(grid);
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto& a = battery[i];
    const auto& b = battery[(i + 1) % battery.size()];
    const auto& c = battery[(i + 2) % battery.size()];
    const auto lhs = compose(compose(a, b), c);
    const auto rhs = compose(a, compose(b, c));
    assoc = std::max(assoc, (lhs.displacement() - rhs.displacement()).sup_norm());

    InversionReport rep;
    const auto inv = invert(a, {}, &rep);
    residual = std::max(residual, rep.residual);
    inv_right = std::max(inv_right, compose(a, inv).displacement().sup_norm());
    inv_left = std::max(inv_left, compose(inv, a).displacement().sup_norm());

    const auto l = compose(id, a).displacement().component(0).samples();
    const auto rr = compose(a, id).displacement().component(0).samples();
    if (l != a.displacement().component(0).samples() || rr != a.displacement().component(0).samples())
      unit_exact = false;
  }
  r.passed = assoc <= 1e-6 && inv_right <= 1e-7 && inv_left <= 1e-7 && residual <= 1e-7 && unit_exact;
  r.metrics["diffeos"] = battery.size();
  r.metrics["associativity_defect"] = assoc;
  r.metrics["inversion_residual"] = residual;
  r.metrics["phi_o_inverse_defect"] = inv_right;
  r.metrics["inverse_o_phi_defect"] = inv_left;
  r.metrics["identity_exact"] = unit_exact;
  r.summary = fmt("associativity %.3g (<= 1e-6), inversion %.3g (<= 1e-7)", assoc, std::max({residual, inv_right, inv_left}));
  return r;
}

CriterionResult verify_faa_di_bruno(const VerifyConfig&) {
  CriterionResult r{2, "Faa di Bruno oracle equivalence", false, "", Json::object()};
  const int order = 4;
  struct Case {
    std::string f, g;
    int dim;
    std::vector<double> x0;
  };
  const std::vector<Case> cases = {
      {"exp(x)", "sin(x) + 0.3*x^2", 1, {0.4}},
      {"tanh(x)*cos(x)", "exp(-x^2) + x", 1, {-0.3}},
      {"exp(x)*cos(y); x*y + sin(x)", "sin(x) + y^2; x*y + cos(y)", 2, {0.3, -0.2}},
      {"gauss(x - y); sqrt(2 + x^2)*y", "x + 0.2*x*y; y - 0.1*sin(x)", 2, {0.5, 0.7}},
  };
  double worst = 0.0;
  Json per_case = Json::array();
  for (const auto& c : cases) {
    const auto f = VectorDescriptor::parse(c.f, c.dim);
    const auto g = VectorDescriptor::parse(c.g, c.dim);
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(c.x0.data(), c.dim);
    const auto gj = descriptor_jet(g, x0, order);
    const auto fj = descriptor_jet(f, gj.value(), order);
    const auto h = compose_jets(fj, gj);
    auto composite = [&](const Eigen::VectorXd& x) { return as_vector(f(g(x))); };
    double case_worst = 0.0;
    for (int j = 1; j <= order; ++j) {
      const auto& t = h.term(j);
      double jfact = 1.0;
      for (int i = 2; i <= j; ++i) jfact *= i;
      double max_fd = 0.0, max_diff = 0.0;
      for (std::size_t rank = 0; rank < t.size(); ++rank) {
        MultiIndex beta{};
        for (int i : t.multi_index(rank)) ++beta[static_cast<std::size_t>(i)];
        for (int comp = 0; comp < c.dim; ++comp) {
          const double fd = fd_derivative(composite, x0, beta, comp, 0.05);
          const double jet = jfact * t.coefficients()(comp, static_cast<Eigen::Index>(rank));
          max_fd = std::max(max_fd, std::abs(fd));
          max_diff = std::max(max_diff, std::abs(fd - jet));
        }
      }
      case_worst = std::max(case_worst, max_diff / std::max(max_fd, 1e-300));
    }
    worst = std::max(worst, case_worst);
    per_case.push_back({{"f", c.f}, {"g", c.g}, {"relative_error", case_worst}});
  }

  // exp(sin x) at 0 by series multiplication: e' = s' e gives c_n = (1/n) sum k s_k c_{n-k}.
  const int p = 5;
  std::vector<double> s(p + 1, 0.0), e(p + 1, 0.0);
  double fact = 1.0;
  for (int k = 1; k <= p; ++k) {
    fact *= k;
    if (k % 2 == 1) s[static_cast<std::size_t>(k)] = ((k / 2) % 2 == 0 ? 1.0 : -1.0) / fact;
  }
  e[0] = 1.0;
  for (int n = 1; n <= p; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += k * s[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(n - k)];
    e[static_cast<std::size_t>(n)] = acc / n;
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const auto sin_jet = descriptor_jet(VectorDescriptor::parse("sin(x)", 1), zero, p);
  const auto exp_jet = descriptor_jet(VectorDescriptor::parse("exp(x)", 1), sin_jet.value(), p);
  const auto es = compose_jets(exp_jet, sin_jet);
  double series_err = 0.0;
  Json coeffs = Json::array();
  for (int j = 0; j <= p; ++j) {
    const double v = es.term(j).coefficients()(0, 0);
    coeffs.push_back(v);
    series_err = std::max(series_err, std::abs(v - e[static_cast<std::size_t>(j)]));
  }

  r.passed = worst <= 1e-4 && series_err <= 1e-12;
  r.metrics["max_relative_error"] = worst;
  r.metrics["cases"] = per_case;
  r.metrics["exp_sin_coefficients"] = coeffs;
  r.metrics["exp_sin_error"] = series_err;
  r.summary = fmt("finite-difference relative error %.3g (<= 1e-4), exp(sin x) series error %.3g (<= 1e-12)", worst,
                  series_err);
  return r;
}

CriterionResult verify_jet_inversion(const VerifyConfig& config) {
  CriterionResult r{3, "jet inversion", false, "", Json::object()};
  // x + a x^2 inverts to (-1 + sqrt(1 + 4 a y)) / (2 a); expand sqrt(1+z) binomially.
  const int p = 4;
  double reversion_err = 0.0;
  for (double a : {0.7, -1.3, 0.25}) {
    Jet<double> g(p, Eigen::VectorXd::Zero(1), 1);
    g.term(1).coefficients()(0, 0) = 1.0;
    g.term(2).coefficients()(0, 0) = a;
    const auto inv = invert_jet(g, p);
    double binom = 1.0;  // C(1/2, k)
    for (int k = 1; k <= p; ++k) {
      binom *= (0.5 - (k - 1)) / k;
      const double oracle = binom * std::pow(4.0 * a, k) / (2.0 * a);
      reversion_err = std::max(reversion_err, std::abs(inv.term(k).coefficients()(0, 0) - oracle));
    }
  }

  std::mt19937_64 rng(config.seed ^ 0x3003);
  double two_sided = 0.0;
  int jets = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 5; ++trial, ++jets) {
      const auto g = random_jet(rng, n, p);
      const auto inv = invert_jet(g, p);
      const auto left = compose_jets(inv, g, 1e-9);
      const auto right = compose_jets(g, inv, 1e-9);
      two_sided = std::max(two_sided, left.distance(Jet<double>::identity(g.base_point(), p)));
      two_sided = std::max(two_sided, right.distance(Jet<double>::identity(inv.base_point(), p)));
    }
  }
  r.passed = reversion_err <= 1e-10 && two_sided <= 1e-10;
  r.metrics["reversion_error"] = reversion_err;
  r.metrics["two_sided_error"] = two_sided;
  r.metrics["random_jets"] = jets;
  r.summary = fmt("series reversion error %.3g, two-sided identity error %.3g (both <= 1e-10)", reversion_err, two_sided);
  return r;
}

CriterionResult verify_inverse_norm(const VerifyConfig& config) {
  CriterionResult r{4, "matrix inverse norm bound", false, "", Json::object()};
  std::mt19937_64 rng(config.seed ^ 0x4004);
  int tested = 0, violations = 0;
  double tightest = std::numeric_limits<double>::infinity();
  while (tested < 1000) {
    const int n = tested % 2 == 0 ? 2 : 3;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = uniform(rng, -2.0, 2.0);
    if (std::abs(a.determinant()) < 0.1) continue;
    const auto b = inverse_norm_bound(a);
    if (!b.holds) ++violations;
    tightest = std::min(tightest, b.bound - b.inverse_norm);
    ++tested;
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const auto eq = inverse_norm_bound(d);
  const double gap = std::abs(eq.bound - eq.inverse_norm);
  r.passed = violations == 0 && eq.holds && gap <= 1e-12;
  r.metrics["matrices"] = tested;
  r.metrics["violations"] = violations;
  r.metrics["smallest_slack"] = tightest;
  r.metrics["diag_2_1_gap"] = gap;
  r.summary = fmt("%.0f matrices, %.0f violations, diag(2,1) gap %.3g", tested, violations, gap);
  return r;
}

CriterionResult verify_flow(const VerifyConfig&) {
  CriterionResult r{5, "flow correctness", false, "", Json::object()};
  const Grid grid(1, 8.0, 513);
  const auto X = TimeDependentVectorField::parse("0.5*exp(-x^2)", 1, DecayClass::Schwartz);
  EvolveOptions quiet;
  quiet.diagnostics = false;
  const auto oracle = evolve(X, grid, 1.0, 1.0 / 4096, quiet);
  const Eigen::VectorXd& ref = oracle.snapshots.back().component(0).samples();
  std::vector<double> errors, orders;
  for (int m : {8, 16, 32, 64}) {
    const auto run = evolve(X, grid, 1.0, 1.0 / m, quiet);
    errors.push_back((run.snapshots.back().component(0).samples() - ref).cwiseAbs().maxCoeff());
    if (errors.size() > 1) orders.push_back(std::log2(errors[errors.size() - 2] / errors.back()));
  }
  const double min_order = *std::min_element(orders.begin(), orders.end());

  const auto Xt = TimeDependentVectorField::parse("0.5*exp(-(x - 0.5*t)^2)", 1, DecayClass::Schwartz);
  const auto full = evolve(Xt, grid, 1.0, 1.0 / 64, quiet);
  const auto first = evolve(Xt, grid, 0.5, 1.0 / 64, quiet);
  EvolveOptions late = quiet;
  late.t_start = 0.5;
  const auto second = evolve(Xt, grid, 1.0, 1.0 / 64, late);
  const auto chained = compose(second.diffeo(second.snapshots.size() - 1), first.diffeo(first.snapshots.size() - 1));
  const double flow_defect = (chained.displacement() - full.snapshots.back()).sup_norm();

  r.passed = min_order >= 3.8 && flow_defect <= 2e-7 && errors.back() <= 1e-8;
  r.metrics["dt"] = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  r.metrics["errors"] = errors;
  r.metrics["orders"] = orders;
  r.metrics["flow_property_defect"] = flow_defect;
  r.summary = fmt("RK4 order %.3f (>= 3.8), dt=1/64 error %.3g, flow property defect %.3g (<= 2e-7)", min_order,
                  errors.back(), flow_defect);
  return r;
}

CriterionResult verify_inequalities(const VerifyConfig&) {
  CriterionResult r{6, "inequality verification", false, "", Json::object()};
  struct Case {
    std::string descriptor;
    int dim;
    DecayClass cls;
    int points = 513;
  };
  const std::vector<Case> battery = {
      {"0", 1, DecayClass::CompactSupport},
      {"0.25", 1, DecayClass::BoundedAll},
      {"0.5*exp(-x^2)", 1, DecayClass::Schwartz},
      {"0.5*exp(-(x - 0.5*t)^2)", 1, DecayClass::Schwartz},
      {"0.3*tanh(x)", 1, DecayClass::BoundedAll},
      {"0.3*(1 + x^2)^(-2)", 1, DecayClass::SobolevInfinity},
      {"0.2*bump(x/2)", 1, DecayClass::CompactSupport, 1025},
      {"0.4*exp(-x^2 - y^2); 0.3*exp(-(x - 1)^2 - y^2)", 2, DecayClass::Schwartz, 129},
      {"0.3*exp(-x^2)*cos(y + t); 0.2*sin(x)*exp(-y^2)", 2, DecayClass::BoundedAll, 129},
  };
  std::size_t sup_violations = 0, gronwall_violations = 0, snapshots = 0;
  double sup_margin = std::numeric_limits<double>::infinity();
  double gronwall_ratio = std::numeric_limits<double>::infinity();
  Json cases = Json::array();
  for (const auto& c : battery) {
    const Grid grid(c.dim, 8.0, c.points);
    const auto X = TimeDependentVectorField::parse(c.descriptor, c.dim, c.cls);
    const auto flow = evolve(X, grid, 1.0, c.dim == 1 ? 1.0 / 64 : 1.0 / 32);
    const auto sb = displacement_sup_bound(flow, X);
    const auto gb = gronwall_bound(flow, X);
    sup_violations += sb.violations;
    gronwall_violations += gb.inequality.violations;
    snapshots += flow.snapshots.size();
    sup_margin = std::min(sup_margin, sb.min_margin);
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gb.inequality.bound.size(); ++k)
      if (gb.inequality.measured[k] > 1e-8)
        ratio = std::min(ratio, gb.inequality.bound[k] / gb.inequality.measured[k]);
    gronwall_ratio = std::min(gronwall_ratio, ratio);
    cases.push_back({{"X", c.descriptor},
                     {"sup_bound_violations", sb.violations},
                     {"gronwall_violations", gb.inequality.violations},
                     {"final_bound", sb.bound.back()},
                     {"final_sup", sb.measured.back()},
                     {"final_gronwall_predicted", gb.inequality.bound.back()},
                     {"final_gronwall_measured", gb.inequality.measured.back()}});
  }
  r.passed = sup_violations == 0 && gronwall_violations == 0;
  r.metrics["snapshots"] = snapshots;
  r.metrics["sup_bound_violations"] = sup_violations;
  r.metrics["gronwall_violations"] = gronwall_violations;
  r.metrics["min_sup_margin"] = sup_margin;
  r.metrics["min_gronwall_ratio"] = gronwall_ratio;
  r.metrics["cases"] = cases;
  r.summary = fmt("%.0f snapshots, %.0f sup-bound and %.0f Gronwall violations", snapshots, sup_violations,
                  gronwall_violations);
  return r;
}

CriterionResult verify_class_preservation(const VerifyConfig&) {
  CriterionResult r{7, "class preservation", false, "", Json::object()};
  struct Case {
    std::string descriptor;
    DecayClass cls;
    double half_width;
    int points;
  };
  const std::vector<Case> battery = {
      {"0.5*exp(-x^2)", DecayClass::Schwartz, 8.0, 513},
      {"0.3*(1 + x^2)^(-2)", DecayClass::SobolevInfinity, 32.0, 1025},
  };
  bool ok = true;
  Json cases = Json::array();
  std::string summary;
  for (const auto& c : battery) {
    const Grid grid(1, c.half_width, c.points);
    const auto X = TimeDependentVectorField::parse(c.descriptor, 1, c.cls);
    const auto flow = evolve(X, grid, 1.0, 1.0 / 32);
    std::size_t misclassified = 0;
    DecayClass final_class = DecayClass::CompactSupport;
    for (const auto& snap : flow.snapshots) {
      const auto rep = classify_decay(snap, kGroupOrderCap, kGroupWeightCap);
      if (!contained_in(rep.inferred_class, c.cls)) ++misclassified;
      final_class = rep.inferred_class;
    }
    const auto st = sobolev_tracking(flow, X);
    const bool case_ok = misclassified == 0 && final_class == c.cls && st.ok();
    ok = ok && case_ok;
    cases.push_back({{"X", c.descriptor},
                     {"class", std::string(to_string(c.cls))},
                     {"final_class", std::string(to_string(final_class))},
                     {"misclassified_snapshots", misclassified},
                     {"sobolev_enlargement_defect", st.enlargement_defect},
                     {"weighted_enlargement_defect", st.weighted_enlargement_defect},
                     {"edge_sup_dxf", st.edge_sup},
                     {"passed", case_ok}});
    summary += std::string(to_string(c.cls)) + (case_ok ? " ok" : " FAILED") +
               fmt(" (L->2L defect %.3g, edge %.3g); ", std::max(st.enlargement_defect, st.weighted_enlargement_defect),
                   st.edge_sup);
  }
  r.passed = ok;
  r.metrics["cases"] = cases;
  r.summary = summary.substr(0, summary.size() - 2);
  return r;
}

CriterionResult verify_normality(const VerifyConfig& config) {
  CriterionResult r{8, "normality under conjugation", false, "", Json::object()};
  std::mt19937_64 rng(config.seed ^ 0x8008);
  const Grid grid(1, 16.0, 1025);
  std::vector<Diffeo> outers;
  for (int i = 0; i < 5; ++i) {
    const double a = uniform(rng, 0.2, 0.5), w = uniform(rng, 1.0, 2.0), c = uniform(rng, -1.0, 1.0);
    const double b = uniform(rng, -0.15, 0.15), s = uniform(rng, 0.0, 0.15);
    outers.emplace_back(DisplacementField::from_function(grid,
                                                         [=](const Point& x) {
                                                           Point o(1);
                                                           o[0] = a * std::tanh((x[0] - c) / w) + b + s * std::sin(x[0]);
                                                           return o;
                                                         }),
                        DecayClass::BoundedAll);
  }
  auto inner_family = [&](bool algebraic) {
    std::vector<Diffeo> out;
    for (int i = 0; i < 10; ++i) {
      const double a = algebraic ? uniform(rng, 0.1, 0.25) * (i % 2 ? -1.0 : 1.0) : uniform(rng, -0.3, 0.3);
      const double w = algebraic ? uniform(rng, 0.7, 1.3) : uniform(rng, 0.8, 1.5);
      const double c = uniform(rng, -2.0, 2.0);
      out.emplace_back(DisplacementField::from_function(grid,
                                                        [=](const Point& x) {
                                                          const double u = (x[0] - c) / w;
                                                          Point o(1);
                                                          o[0] = algebraic ? a * std::pow(1.0 + u * u, -2.0)
                                                                           : a * std::exp(-u * u);
                                                          return o;
                                                        }),
                       algebraic ? DecayClass::SobolevInfinity : DecayClass::Schwartz);
    }
    return out;
  };
  const auto schwartz = inner_family(false);
  const auto sobolev = inner_family(true);
  int checked = 0, normal = 0;
  double worst_defect = 0.0, min_half_width = grid.half_width();
  Json tallies = Json::object();
  for (const auto* family : {&schwartz, &sobolev}) {
    Json tally = Json::object();
    for (const auto& outer : outers) {
      for (const auto& inner : *family) {
        ConjugationReport rep;
        conjugate(outer, inner, &rep);
        ++checked;
        const std::string cls(to_string(rep.classification.inferred_class));
        tally[cls] = tally.value(cls, 0) + 1;
        if (rep.normal) ++normal;
        worst_defect = std::max(worst_defect, rep.remainder_defect);
        min_half_width = std::min(min_half_width, rep.classified_half_width);
      }
    }
    tallies[std::string(to_string(family->front().decay_class())) + "_inner"] = tally;
  }
  r.passed = checked == 100 && normal == checked;
  r.metrics["conjugations"] = checked;
  r.metrics["classified_in_inner_class"] = normal;
  r.metrics["max_remainder_identity_defect"] = worst_defect;
  r.metrics["min_classified_half_width"] = min_half_width;
  r.metrics["classified_as"] = tallies;
  r.summary = fmt("%.0f of %.0f conjugates stay in the inner class", normal, checked);
  return r;
}

CriterionResult verify_log_derivative(const VerifyConfig&) {
  CriterionResult r{9, "right logarithmic derivative", false, "", Json::object()};
  const auto X = TimeDependentVectorField::parse("0.5*exp(-(x - 0.5*t)^2)", 1, DecayClass::Schwartz);
  std::vector<double> errors, orders;
  const int steps[] = {8, 16, 32, 64};
  const int points[] = {129, 257, 513, 1025};
  EvolveOptions quiet;
  quiet.diagnostics = false;
  for (int i = 0; i < 4; ++i) {
    const Grid grid(1, 8.0, points[i]);
    const auto flow = evolve(X, grid, 1.0, 1.0 / steps[i], quiet);
    errors.push_back(log_derivative_defect(right_log_derivative(flow, 1e-13, {0.5}), X));
    if (i > 0) orders.push_back(std::log2(errors[static_cast<std::size_t>(i) - 1] / errors.back()));
  }
  const double min_order = *std::min_element(orders.begin(), orders.end());
  r.passed = min_order >= 3.5;
  r.metrics["dt"] = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  r.metrics["points_per_axis"] = {129, 257, 513, 1025};
  r.metrics["errors"] = errors;
  r.metrics["orders"] = orders;
  r.summary = fmt("convergence order %.3f (>= 3.5), finest error %.3g", min_order, errors.back());
  return r;
}

std::vector<CriterionResult> run_acceptance(const VerifyConfig& config, const std::vector<int>& which) {
  using Suite = CriterionResult (*)(const VerifyConfig&);
  static constexpr Suite suites[] = {verify_group_axioms,   verify_faa_di_bruno,       verify_jet_inversion,
                                     verify_inverse_norm,   verify_flow,               verify_inequalities,
                                     verify_class_preservation, verify_normality,      verify_log_derivative};
  std::vector<int> ids = which;
  if (ids.empty())
    for (int i = 1; i <= 9; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    if (id < 1 || id > 9) throw InvalidArgument("unknown criterion " + std::to_string(id));
    out.push_back(suites[id - 1](config));
  }
  return out;
}

Json to_json(const CriterionResult& result) {
  Json j;
  j["id"] = result.id;
  j["name"] = result.name;
  j["passed"] = result.passed;
  j["summary"] = result.summary;
  j["metrics"] = result.metrics;
  return j;
}

}  // namespace diffeoflow
