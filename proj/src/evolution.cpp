#include "diffeoflow/evolution.hpp"

#include "diffeoflow/parallel.hpp"
#include "diffeoflow/stencil.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace diffeoflow {

namespace {

struct Stages {
  Point y[4];
  Point k[4];
  double t[4];

  Point increment(double dt) const { return dt * ((k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]) / 6.0); }
};

Stages rk4_stages(const TimeDependentVectorField& X, double t, const Point& x, const Point& f, double dt) {
  Stages s;
  s.t[0] = t;
  s.t[1] = s.t[2] = t + 0.5 * dt;
  s.t[3] = t + dt;
  s.y[0] = x + f;
  s.k[0] = X(s.t[0], s.y[0]);
  s.y[1] = x + f + (0.5 * dt) * s.k[0];
  s.k[1] = X(s.t[1], s.y[1]);
  s.y[2] = x + f + (0.5 * dt) * s.k[1];
  s.k[2] = X(s.t[2], s.y[2]);
  s.y[3] = x + f + dt * s.k[2];
  s.k[3] = X(s.t[3], s.y[3]);
  return s;
}

/// dt * (w1 + 2 w2 + 2 w3 + w4) / 6.
double stage_quadrature(double dt, const double w[4]) { return dt * ((w[0] + 2.0 * w[1] + 2.0 * w[2] + w[3]) / 6.0); }

StepDiagnostics diagnose(double t, const DisplacementField& f) {
  StepDiagnostics d;
  d.t = t;
  d.sup_displacement = f.sup_norm();
  const auto dg = jacobian(f);
  double sup = 0.0, det = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.grid().node_count(); ++i) {
    det = std::min(det, identity_plus(dg, i).determinant());
    sup = std::max(sup, spectral_norm(jacobian_at(dg, i)));
  }
  d.sup_jacobian = sup;
  d.min_det = det;
  return d;
}

std::size_t step_count(double t_start, double t_final, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_final > t_start)) throw InvalidArgument("final time must exceed the start time");
  const double steps = (t_final - t_start) / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    throw InvalidArgument("time span must be an integer multiple of dt");
  return static_cast<std::size_t>(rounded);
}

bool decays(DecayClass c) { return c == DecayClass::Schwartz || c == DecayClass::SobolevInfinity; }

}  // namespace

TimeDependentVectorField::TimeDependentVectorField(VectorDescriptor descriptor, DecayClass decay_class,
                                                   double t_final)
    : descriptor_(std::move(descriptor)), decay_class_(decay_class), t_final_(t_final) {}

TimeDependentVectorField TimeDependentVectorField::parse(const std::string& text, int dim, DecayClass decay_class,
                                                         double t_final) {
  return TimeDependentVectorField(VectorDescriptor::parse(text, dim, true), decay_class, t_final);
}

TimeDependentVectorField TimeDependentVectorField::scaled(double s) const {
  TimeDependentVectorField out = *this;
  out.scale_ = scale_ * s;
  return out;
}

FlowResult evolve(const TimeDependentVectorField& X, const Grid& grid, double t_final, double dt,
                  const EvolveOptions& options) {
  if (X.dim() != grid.dim()) throw DimensionMismatch("vector field and grid dimensions differ");
  const std::size_t steps = step_count(options.t_start, t_final, dt);
  const auto n = static_cast<Eigen::Index>(grid.dim());
  const auto nodes = static_cast<Eigen::Index>(grid.node_count());
  const double limit = options.domain_factor * grid.half_width();

  FlowResult result{grid, X.decay_class(), dt, {}, {}, {}};
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, nodes);
  result.times.push_back(options.t_start);
  result.snapshots.push_back(DisplacementField::zeros(grid));
  if (options.diagnostics) result.diagnostics.push_back(diagnose(options.t_start, result.snapshots.back()));

  std::vector<char> failed(grid.node_count());
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = options.t_start + static_cast<double>(k) * dt;
    Eigen::MatrixXd next(n, nodes);
    parallel_for(grid.node_count(), [&](std::size_t i) {
      const auto c = static_cast<Eigen::Index>(i);
      const Point x = grid.node(i);
      const Point fi = f.col(c);
      const Point nf = fi + rk4_stages(X, t, x, fi, dt).increment(dt);
      next.col(c) = nf;
      char code = 0;
      if (!nf.allFinite()) code = 2;
      else if ((x + nf).cwiseAbs().maxCoeff() > limit) code = 1;
      failed[i] = code;
    });
    for (std::size_t i = 0; i < failed.size(); ++i) {
      if (!failed[i]) continue;
      std::ostringstream msg;
      const Point x = grid.node(i);
      msg << (failed[i] == 2 ? "non-finite displacement" : "trajectory left the enlarged box") << " at t = "
          << t + dt << " for the node at (";
      for (int a = 0; a < x.size(); ++a) msg << (a ? ", " : "") << x[a];
      msg << ")";
      throw FlowFailure(msg.str());
    }
    f.swap(next);
    const double tn = options.t_start + static_cast<double>(k + 1) * dt;
    result.times.push_back(tn);
    result.snapshots.push_back(displacement_from_matrix(grid, f));
    if (options.diagnostics) result.diagnostics.push_back(diagnose(tn, result.snapshots.back()));
  }
  return result;
}

InequalityReport displacement_sup_bound(const FlowResult& result, const TimeDependentVectorField& X) {
  const Grid& grid = result.grid;
  const auto nodes = grid.node_count();
  InequalityReport rep;
  Eigen::VectorXd bound = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes));
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const auto& f = result.snapshots[k];
    if (k > 0) {
      const auto& prev = result.snapshots[k - 1];
      const double t = result.times[k - 1];
      parallel_for(nodes, [&](std::size_t i) {
        const Stages s = rk4_stages(X, t, grid.node(i), prev.at(i), result.dt);
        const double w[4] = {s.k[0].norm(), s.k[1].norm(), s.k[2].norm(), s.k[3].norm()};
        bound[static_cast<Eigen::Index>(i)] += stage_quadrature(result.dt, w);
      });
    }
    double measured = 0.0, margin = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double fi = f.at(i).norm();
      const double b = bound[static_cast<Eigen::Index>(i)];
      measured = std::max(measured, fi);
      margin = std::min(margin, b - fi);
      if (!(fi <= b + 1e-8)) ++violations;
    }
    rep.times.push_back(result.times[k]);
    rep.bound.push_back(bound.maxCoeff());
    rep.measured.push_back(measured);
    rep.violations += violations;
    rep.min_margin = std::min(rep.min_margin, margin);
  }
  rep.holds = rep.violations == 0;
  return rep;
}

GronwallReport gronwall_bound(const FlowResult& result, const TimeDependentVectorField& X) {
  const Grid& grid = result.grid;
  const auto nodes = grid.node_count();
  const std::size_t K = result.snapshots.size();
  GronwallReport rep;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes));
  Eigen::VectorXd b(static_cast<Eigen::Index>(nodes));
  for (std::size_t k = 0; k < K; ++k) {
    const auto& f = result.snapshots[k];
    const double t = result.times[k];
    parallel_for(nodes, [&](std::size_t i) {
      b[static_cast<Eigen::Index>(i)] = spectral_norm(X.jacobian(t, grid.node(i) + f.at(i)));
    });
    rep.beta.push_back(b.maxCoeff());
    if (k > 0) {
      const auto& prev = result.snapshots[k - 1];
      const double tp = result.times[k - 1];
      parallel_for(nodes, [&](std::size_t i) {
        const Stages s = rk4_stages(X, tp, grid.node(i), prev.at(i), result.dt);
        double w[4];
        for (int q = 0; q < 4; ++q) w[q] = spectral_norm(X.jacobian(s.t[q], s.y[q]));
        a[static_cast<Eigen::Index>(i)] += stage_quadrature(result.dt, w);
      });
    }
    rep.alpha.push_back(a.maxCoeff());
  }

  // alpha and beta are taken piecewise linear between snapshots, int beta is
  // exact for that model, and the outer integral uses the trapezoid rule on
  // kSubsteps sub-intervals per snapshot interval.
  constexpr int kSubsteps = 16;
  std::vector<double> beta_int(K, 0.0);
  for (std::size_t j = 1; j < K; ++j)
    beta_int[j] = beta_int[j - 1] + 0.5 * (result.times[j] - result.times[j - 1]) * (rep.beta[j] + rep.beta[j - 1]);

  auto& ineq = rep.inequality;
  ineq.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    double integral = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double h = result.times[j] - result.times[j - 1];
      const double a0 = rep.alpha[j - 1], da = rep.alpha[j] - a0;
      const double b0 = rep.beta[j - 1], db = rep.beta[j] - b0;
      auto integrand = [&](double u) {
        const double b_int = beta_int[j - 1] + h * u * (b0 + 0.5 * db * u);
        return (a0 + da * u) * (b0 + db * u) * std::exp(beta_int[k] - b_int);
      };
      double prev = integrand(0.0);
      for (int m = 1; m <= kSubsteps; ++m) {
        const double cur = integrand(static_cast<double>(m) / kSubsteps);
        integral += 0.5 * (h / kSubsteps) * (prev + cur);
        prev = cur;
      }
    }
    const double predicted = rep.alpha[k] + integral;
    const double measured = k < result.diagnostics.size() ? result.diagnostics[k].sup_jacobian
                                                          : diagnose(result.times[k], result.snapshots[k]).sup_jacobian;
    ineq.times.push_back(result.times[k]);
    ineq.bound.push_back(predicted);
    ineq.measured.push_back(measured);
    ineq.min_margin = std::min(ineq.min_margin, predicted - measured);
    if (!(measured <= predicted * (1.0 + 1e-6) + 1e-8)) ++ineq.violations;
  }
  ineq.holds = ineq.violations == 0;
  return rep;
}

SobolevTrackingReport sobolev_tracking(const FlowResult& result, const TimeDependentVectorField& X,
                                       const SobolevTrackingOptions& options) {
  SobolevTrackingReport rep;
  const Grid& grid = result.grid;
  rep.alphas = multi_indices(grid.dim(), options.p_max);
  auto norms_of = [&](const DisplacementField& f) {
    std::vector<double> out;
    for (int c = 0; c < f.dim(); ++c)
      for (const auto& alpha : rep.alphas) out.push_back(sobolev_seminorm(f.component(c), alpha));
    return out;
  };
  auto weighted_of = [&](const DisplacementField& f) {
    std::vector<double> out;
    for (int c = 0; c < f.dim(); ++c)
      for (const auto& alpha : rep.alphas) {
        const auto d = partial_derivative(f.component(c), alpha);
        for (int m = 0; m <= options.max_weight; ++m) out.push_back(weighted_seminorm(d, MultiIndex{}, m));
      }
    return out;
  };
  for (const auto& f : result.snapshots) {
    rep.norms.push_back(norms_of(f));
    for (double v : rep.norms.back())
      if (!std::isfinite(v)) rep.finite = false;
  }

  if (!decays(result.decay_class)) return rep;
  const DisplacementField& last = result.snapshots.back();

  if (options.check_enlargement) {
    rep.enlargement_checked = true;
    EvolveOptions eo;
    eo.t_start = result.times.front();
    eo.diagnostics = false;
    const auto wide = evolve(X, grid.enlarged(), result.times.back(), result.dt, eo);
    const auto wide_norms = norms_of(wide.snapshots.back());
    const auto& narrow = rep.norms.back();
    for (std::size_t i = 0; i < narrow.size(); ++i)
      rep.enlargement_defect = std::max(rep.enlargement_defect, std::abs(narrow[i] - wide_norms[i]));
    bool stable = rep.enlargement_defect <= options.enlargement_tolerance;
    if (result.decay_class == DecayClass::Schwartz) {
      const auto a = weighted_of(last);
      const auto b = weighted_of(wide.snapshots.back());
      for (std::size_t i = 0; i < a.size(); ++i)
        rep.weighted_enlargement_defect = std::max(rep.weighted_enlargement_defect, std::abs(a[i] - b[i]));
      stable = stable && rep.weighted_enlargement_defect <= options.enlargement_tolerance;
    }
    rep.enlargement_stable = stable;
  }

  rep.edge_checked = true;
  const auto dg = jacobian(last);
  const double edge = options.edge_fraction * grid.half_width();
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    if (grid.node(i).cwiseAbs().maxCoeff() < edge) continue;
    rep.edge_sup = std::max(rep.edge_sup, spectral_norm(jacobian_at(dg, i)));
  }
  rep.edge_decays = rep.edge_sup < options.edge_tolerance;
  return rep;
}

std::vector<LogDerivativeSample> right_log_derivative(const FlowResult& result, double invert_tolerance,
                                                      const std::vector<double>& at_times) {
  const std::size_t K = result.snapshots.size();
  if (K < 5) throw TooFewSnapshots("right_log_derivative needs at least 5 snapshots, got " + std::to_string(K));
  std::vector<std::size_t> indices;
  if (at_times.empty()) {
    for (std::size_t k = 2; k + 2 < K; ++k) indices.push_back(k);
  } else {
    for (double t : at_times) {
      const double u = (t - result.times.front()) / result.dt;
      const double r = std::round(u);
      if (std::abs(u - r) > 1e-9 || r < 2 || r + 2 >= static_cast<double>(K))
        throw TooFewSnapshots("time " + std::to_string(t) + " is not an interior snapshot time");
      indices.push_back(static_cast<std::size_t>(r));
    }
  }
  const Grid& grid = result.grid;
  const double inv12 = 1.0 / (12.0 * result.dt);
  InvertOptions io;
  io.tolerance = invert_tolerance;
  io.max_iterations = 500;
  std::vector<LogDerivativeSample> out;
  for (std::size_t k : indices) {
    std::vector<ScalarField> dt_f;
    for (int c = 0; c < grid.dim(); ++c) {
      const auto& s = result.snapshots;
      const Eigen::VectorXd v = (-s[k + 2].component(c).samples() + 8.0 * s[k + 1].component(c).samples() -
                                 8.0 * s[k - 1].component(c).samples() + s[k - 2].component(c).samples()) *
                                inv12;
      dt_f.emplace_back(grid, v);
    }
    const Diffeo inverse = invert(result.diffeo(k), io);
    out.push_back({result.times[k], resample_displaced(DisplacementField(std::move(dt_f)), inverse.displacement(),
                                                       extrapolation_for(result.decay_class))});
  }
  return out;
}

double log_derivative_defect(const std::vector<LogDerivativeSample>& samples, const TimeDependentVectorField& X) {
  double out = 0.0;
  for (const auto& s : samples) {
    const Grid& grid = s.value.grid();
    for (std::size_t i = 0; i < grid.node_count(); ++i)
      out = std::max(out, (s.value.at(i) - X(s.t, grid.node(i))).norm());
  }
  return out;
}

SmoothnessReport evol_smoothness_probe(const std::function<TimeDependentVectorField(double)>& family, double s0,
                                       const std::vector<double>& steps, const Grid& grid, double t_final, double dt,
                                       const std::vector<std::size_t>& probe_nodes) {
  if (steps.empty()) throw InvalidArgument("smoothness probe needs at least one s-step");
  EvolveOptions eo;
  eo.diagnostics = false;
  auto endpoint = [&](double s) {
    const auto r = evolve(family(s), grid, t_final, dt, eo);
    std::vector<double> v;
    for (std::size_t node : probe_nodes) {
      const Point p = r.snapshots.back().at(node);
      for (int c = 0; c < p.size(); ++c) v.push_back(p[c]);
    }
    return v;
  };
  SmoothnessReport rep;
  rep.steps = steps;
  const auto centre = endpoint(s0);
  for (double h : steps) {
    const auto plus = endpoint(s0 + h), minus = endpoint(s0 - h);
    std::vector<double> d1(centre.size()), d2(centre.size());
    for (std::size_t p = 0; p < centre.size(); ++p) {
      d1[p] = (plus[p] - minus[p]) / (2.0 * h);
      d2[p] = (plus[p] - 2.0 * centre[p] + minus[p]) / (h * h);
    }
    rep.first.push_back(d1);
    rep.second.push_back(d2);
  }
  auto change = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
    return m;
  };
  for (std::size_t i = 2; i < steps.size(); ++i) {
    const double e1 = change(rep.first[i - 2], rep.first[i - 1]);
    const double e2 = change(rep.first[i - 1], rep.first[i]);
    if (e2 <= 1e-12) {
      rep.first_orders.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const double order = std::log(e1 / e2) / std::log(steps[i - 2] / steps[i - 1]);
    rep.first_orders.push_back(order);
    if (!(order >= 1.5)) rep.first_converges = false;
  }
  if (steps.size() >= 2) rep.second_change = change(rep.second[steps.size() - 2], rep.second.back());
  rep.second_stable = rep.second_change <= 1e-4;
  return rep;
}

void write_flow_csv(std::ostream& out, const FlowResult& result, const InequalityReport& sup_bound,
                    const GronwallReport& gronwall, const SobolevTrackingReport& sobolev) {
  int p_max = 0;
  for (const auto& a : sobolev.alphas) p_max = std::max(p_max, total_order(a));
  out << "t,sup_f,sup_df,min_det,sup_bound,sup_measured,gronwall_predicted,gronwall_measured";
  for (int p = 0; p <= p_max; ++p) out << ",sobolev_p" << p;
  out << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  const std::size_t per_component = sobolev.alphas.size();
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", result.times[k]);
    out << buf;
    const auto d = k < result.diagnostics.size() ? result.diagnostics[k] : diagnose(result.times[k], result.snapshots[k]);
    put(d.sup_displacement);
    put(d.sup_jacobian);
    put(d.min_det);
    put(sup_bound.bound[k]);
    put(sup_bound.measured[k]);
    put(gronwall.inequality.bound[k]);
    put(gronwall.inequality.measured[k]);
    for (int p = 0; p <= p_max; ++p) {
      double sq = 0.0;
      for (std::size_t i = 0; i < sobolev.norms[k].size(); ++i)
        if (total_order(sobolev.alphas[i % per_component]) == p) sq += sobolev.norms[k][i] * sobolev.norms[k][i];
      put(std::sqrt(sq));
    }
    out << '\n';
  }
}

}  // namespace diffeoflow
