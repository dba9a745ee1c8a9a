#include "diffeoflow/seminorm.hpp"

#include "diffeoflow/stencil.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace diffeoflow {

namespace {

double squared_radius(const Grid& grid, std::size_t node) { return grid.node(node).squaredNorm(); }

WeightedSup weighted_max(const Grid& grid, const Eigen::VectorXd& values, int m) {
  WeightedSup out;
  double best_r2 = 0.0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const double r2 = squared_radius(grid, i);
    const double v = std::pow(1.0 + r2, m) * std::abs(values[static_cast<Eigen::Index>(i)]);
    if (v > out.value) {
      out.value = v;
      best_r2 = r2;
    }
  }
  out.argmax_radius = std::sqrt(best_r2);
  out.non_decaying = out.value > 0.0 && out.argmax_radius >= 0.5 * grid.half_width();
  return out;
}

double trapezoid_l2(const Grid& grid, const Eigen::VectorXd& values) {
  const int N = grid.points_per_axis();
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const auto idx = grid.node_index(i);
    double w = 1.0;
    for (int k = 0; k < grid.dim(); ++k) {
      const int ik = idx[static_cast<std::size_t>(k)];
      if (ik == 0 || ik == N - 1) w *= 0.5;
    }
    const double v = values[static_cast<Eigen::Index>(i)];
    acc += w * v * v;
  }
  return std::sqrt(acc * std::pow(grid.spacing(), grid.dim()));
}

std::vector<double> dyadic_radii(const Grid& grid) {
  const double L = grid.half_width();
  std::vector<double> radii;
  for (double r = 1.0; r <= L * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);
  return radii;
}

/// Sup of |values| over each annulus [r/2, r].
std::vector<double> annulus_sups(const Grid& grid, const Eigen::VectorXd& values,
                                 const std::vector<double>& radii) {
  std::vector<double> sups(radii.size(), 0.0);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const double r = std::sqrt(squared_radius(grid, i));
    const double v = std::abs(values[static_cast<Eigen::Index>(i)]);
    for (std::size_t a = 0; a < radii.size(); ++a)
      if (r >= 0.5 * radii[a] && r <= radii[a]) sups[a] = std::max(sups[a], v);
  }
  return sups;
}

/// Local power-law exponent at the edge of the box: -log(s2/s1)/log(3/2) with
/// s1, s2 the sups over the shells L/2 <= |x| <= 3L/4 and 3L/4 <= |x| <= L.
double tail_exponent(const Grid& grid, const Eigen::VectorXd& values) {
  const double L = grid.half_width();
  double inner = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const double r = std::sqrt(squared_radius(grid, i));
    const double v = std::abs(values[static_cast<Eigen::Index>(i)]);
    if (r >= 0.5 * L && r <= 0.75 * L) inner = std::max(inner, v);
    if (r >= 0.75 * L && r <= L) outer = std::max(outer, v);
  }
  if (outer == 0.0) return std::numeric_limits<double>::infinity();
  if (inner == 0.0) return 0.0;
  return -std::log(outer / inner) / std::log(1.5);
}

void require_annuli(const Grid& grid, const std::vector<double>& radii) {
  if (radii.size() < 4) {
    std::ostringstream msg;
    msg << "classify_decay needs at least 4 dyadic annuli inside the box; half width "
        << grid.half_width() << " fits " << radii.size() << " (use L >= 8)";
    throw InsufficientAnnuli(msg.str());
  }
  if (grid.spacing() > 0.25)
    throw InsufficientAnnuli("grid spacing too coarse to resolve the innermost annulus");
}

struct ComponentResult {
  DecayClass cls;
  std::string why;
};

ComponentResult classify_component(const ScalarField& field, int component, int max_order,
                                   int max_weight, const ClassifyOptions& opt,
                                   const std::vector<double>& radii, SeminormReport& report) {
  const Grid& grid = field.grid();
  const auto alphas = multi_indices(grid.dim(), max_order);

  bool all_schwartz = true, all_sobolev = true;
  std::ostringstream why;
  for (const auto& alpha : alphas) {
    const Eigen::VectorXd d =
        total_order(alpha) == 0 ? field.samples() : partial_derivative(field, alpha).samples();
    double sup = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) sup = std::max(sup, std::abs(d[i]));
    report.entries.push_back({SeminormKind::Sup, component, alpha, 0, sup, false});
    for (int m = 1; m <= max_weight; ++m) {
      const auto w = weighted_max(grid, d, m);
      report.entries.push_back({SeminormKind::WeightedSup, component, alpha, m, w.value, w.non_decaying});
      if (w.non_decaying) all_schwartz = false;
    }
    const double l2 = trapezoid_l2(grid, d);
    report.entries.push_back({SeminormKind::SobolevL2, component, alpha, 0, l2, false});

    const auto sups = annulus_sups(grid, d, radii);
    const double exponent = tail_exponent(grid, d);
    report.decay_rates.push_back({component, alpha, exponent, sups});

    if (!(exponent >= max_weight + opt.schwartz_margin)) all_schwartz = false;
    const bool shrinking = sups.back() < sups[1] || sups.back() == 0.0;
    if (!(exponent > 0.5 * grid.dim()) || !shrinking || !(l2 <= opt.sobolev_threshold)) {
      if (all_sobolev) {
        why << "alpha=(" << alpha[0] << "," << alpha[1] << "," << alpha[2] << ") tail exponent "
            << exponent << (shrinking ? "" : ", annulus sups not shrinking") << "; ";
      }
      all_sobolev = false;
    }
  }

  // Compact support: the samples vanish on the outermost annulus and beyond.
  double support_radius = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    if (std::abs(field[i]) > opt.zero_tolerance) {
      support_radius = std::max(support_radius, std::sqrt(squared_radius(grid, i)));
      any = true;
    }
  }
  const double outer_inner_radius = 0.5 * radii.back();
  if (!any || support_radius < outer_inner_radius) {
    std::ostringstream s;
    s << "samples vanish for |x| > " << support_radius;
    return {DecayClass::CompactSupport, s.str()};
  }
  if (all_schwartz && all_sobolev) {
    std::ostringstream s;
    s << "all tail exponents >= " << max_weight + opt.schwartz_margin
      << " and weighted sups peak inside |x| < L/2";
    return {DecayClass::Schwartz, s.str()};
  }
  if (all_sobolev) return {DecayClass::SobolevInfinity, "L^2-integrable tails, not rapidly decreasing"};
  return {DecayClass::BoundedAll, why.str()};
}

}  // namespace

double sup_seminorm(const ScalarField& field, const MultiIndex& alpha) {
  const auto d = partial_derivative(field, alpha);
  return d.samples().size() ? d.samples().cwiseAbs().maxCoeff() : 0.0;
}

double weighted_seminorm(const ScalarField& field, const MultiIndex& alpha, int m) {
  return weighted_seminorm_probe(field, alpha, m).value;
}

WeightedSup weighted_seminorm_probe(const ScalarField& field, const MultiIndex& alpha, int m) {
  if (m < 0) throw InvalidArgument("weight exponent must be non-negative");
  return weighted_max(field.grid(), partial_derivative(field, alpha).samples(), m);
}

double sobolev_seminorm(const ScalarField& field, const MultiIndex& alpha) {
  return trapezoid_l2(field.grid(), partial_derivative(field, alpha).samples());
}

std::string_view to_string(SeminormKind kind) {
  switch (kind) {
    case SeminormKind::Sup: return "sup";
    case SeminormKind::WeightedSup: return "weighted_sup";
    case SeminormKind::SobolevL2: return "sobolev_l2";
  }
  return "sup";
}

SeminormReport classify_decay(const ScalarField& field, int max_order, int max_weight,
                              const ClassifyOptions& options) {
  const auto radii = dyadic_radii(field.grid());
  require_annuli(field.grid(), radii);
  if (max_order < 0 || max_order > kMaxDerivativeOrder) throw UnsupportedOrder("max_order must be in 0..6");
  if (max_weight < 0) throw InvalidArgument("max_weight must be non-negative");
  SeminormReport report;
  report.annulus_radii = radii;
  report.max_order = max_order;
  report.max_weight = max_weight;
  const auto r = classify_component(field, 0, max_order, max_weight, options, radii, report);
  report.inferred_class = r.cls;
  report.rationale = r.why;
  return report;
}

SeminormReport classify_decay(const DisplacementField& field, int max_order, int max_weight,
                              const ClassifyOptions& options) {
  const auto radii = dyadic_radii(field.grid());
  require_annuli(field.grid(), radii);
  if (max_order < 0 || max_order > kMaxDerivativeOrder) throw UnsupportedOrder("max_order must be in 0..6");
  if (max_weight < 0) throw InvalidArgument("max_weight must be non-negative");
  SeminormReport report;
  report.annulus_radii = radii;
  report.max_order = max_order;
  report.max_weight = max_weight;
  report.inferred_class = DecayClass::CompactSupport;
  for (int k = 0; k < field.dim(); ++k) {
    const auto r = classify_component(field.component(k), k, max_order, max_weight, options, radii, report);
    if (!contained_in(r.cls, report.inferred_class)) {
      report.inferred_class = r.cls;
      report.rationale = "component " + std::to_string(k) + ": " + r.why;
    } else if (report.rationale.empty()) {
      report.rationale = "component " + std::to_string(k) + ": " + r.why;
    }
  }
  return report;
}

}  // namespace diffeoflow
