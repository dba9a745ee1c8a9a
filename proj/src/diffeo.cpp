#include "diffeoflow/diffeo.hpp"

#include "diffeoflow/dff_io.hpp"
#include "diffeoflow/json_text.hpp"
#include "diffeoflow/parallel.hpp"
#include "diffeoflow/stencil.hpp"

#include <Eigen/LU>

#include <cmath>
#include <fstream>
#include <sstream>

namespace diffeoflow {

namespace {

std::string describe_node(const Grid& grid, std::size_t node) {
  std::ostringstream s;
  s << "node " << node << " at (";
  const Point x = grid.node(node);
  for (int k = 0; k < x.size(); ++k) s << (k ? ", " : "") << x[k];
  s << ")";
  return s.str();
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DimensionMismatch("diffeomorphisms live on different grids");
}

/// Interpolators for every component of a displacement.
struct VectorInterpolator {
  std::vector<Interpolator> parts;
  VectorInterpolator(const DisplacementField& field, Extrapolation mode) {
    for (const auto& c : field.components()) parts.emplace_back(c, mode);
  }
  Point operator()(const Point& x) const {
    Point out(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t k = 0; k < parts.size(); ++k) out[static_cast<Eigen::Index>(k)] = parts[k](x);
    return out;
  }
  /// Value and Jacobian (rows = components).
  Point value_and_jacobian(const Point& x, SmallMatrix& jac) const {
    const auto n = static_cast<Eigen::Index>(parts.size());
    Point out(n);
    jac.resize(n, n);
    Point grad;
    for (Eigen::Index k = 0; k < n; ++k) {
      out[k] = parts[static_cast<std::size_t>(k)].value_and_gradient(x, grad);
      jac.row(k) = grad.transpose();
    }
    return out;
  }
};

void check_resolved(const Grid& grid, const Point& x, std::size_t node) {
  const double limit = 1.1 * grid.half_width();
  for (int k = 0; k < x.size(); ++k) {
    if (!(std::abs(x[k]) <= limit))
      throw UnderResolved("displaced point leaves the box by more than 0.1 L at " + describe_node(grid, node));
  }
}

double max_norm(const Eigen::MatrixXd& m) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.cols(); ++i) out = std::max(out, m.col(i).norm());
  return out;
}

}  // namespace

double min_jacobian_determinant(const DisplacementField& g) { return jacobian_determinant(g).minCoeff(); }

Diffeo::Diffeo(DisplacementField displacement, DecayClass decay_class)
    : displacement_(std::move(displacement)),
      decay_class_(decay_class),
      epsilon_(min_jacobian_determinant(displacement_)) {
  if (!(epsilon_ > 0.0)) {
    std::ostringstream s;
    s << "min det(I + dg) = " << epsilon_ << " is not positive";
    throw NonDiffeomorphic(s.str());
  }
}

Diffeo Diffeo::identity(const Grid& grid, DecayClass decay_class) {
  return Diffeo(DisplacementField::zeros(grid), decay_class);
}

MembershipResult membership_check(const DisplacementField& g, DecayClass decay_class, int max_order,
                                  int max_weight) {
  MembershipResult out;
  out.epsilon = min_jacobian_determinant(g);
  try {
    out.report = classify_decay(g, max_order, max_weight);
  } catch (const Error& e) {
    out.ok = false;
    out.reason = std::string("classification failed: ") + e.what();
    return out;
  }
  const bool det_ok = out.epsilon >= kMinDeterminant;
  const bool class_ok = contained_in(out.report.inferred_class, decay_class);
  out.ok = det_ok && class_ok;
  std::ostringstream why;
  if (!det_ok) why << "min det(I + dg) = " << out.epsilon << " < " << kMinDeterminant << "; ";
  if (!class_ok)
    why << "classified " << to_string(out.report.inferred_class) << ", not within " << to_string(decay_class) << "; ";
  out.reason = why.str();
  return out;
}

Diffeo compose(const Diffeo& phi, const Diffeo& psi) {
  require_same_grid(phi.grid(), psi.grid());
  const Grid& grid = psi.grid();
  const auto& g = psi.displacement();
  const VectorInterpolator f(phi.displacement(), phi.extrapolation());
  const auto n = static_cast<Eigen::Index>(grid.dim());
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(grid.node_count()));
  parallel_for(grid.node_count(), [&](std::size_t i) {
    const Point gi = g.at(i);
    const Point y = grid.node(i) + gi;
    check_resolved(grid, y, i);
    out.col(static_cast<Eigen::Index>(i)) = gi + f(y);
  });
  return Diffeo(displacement_from_matrix(grid, out), weaker(phi.decay_class(), psi.decay_class()));
}

Diffeo invert(const Diffeo& phi, const InvertOptions& options, InversionReport* report) {
  const Grid& grid = phi.grid();
  const auto& g = phi.displacement();
  const double tol = options.tolerance > 0.0 ? options.tolerance : 1e-8 * (1.0 + grid.half_width());
  const double target = 1e-4 * tol;
  const VectorInterpolator gi(g, phi.extrapolation());
  const auto n = static_cast<Eigen::Index>(grid.dim());
  const auto nodes = static_cast<Eigen::Index>(grid.node_count());

  InversionReport rep;
  rep.lipschitz = jacobian_norm(g).maxCoeff();

  // Column i holds f at node i; the residual column is f(y) + g(y + f(y)).
  Eigen::MatrixXd f(n, nodes), next(n, nodes);
  for (Eigen::Index i = 0; i < nodes; ++i) f.col(i) = -g.at(static_cast<std::size_t>(i));
  auto step = [&](const Eigen::MatrixXd& cur, Eigen::MatrixXd& image) {
    parallel_for(grid.node_count(), [&](std::size_t i) {
      const auto c = static_cast<Eigen::Index>(i);
      image.col(c) = -gi(grid.node(i) + cur.col(c));
    });
    return max_norm(cur - image);
  };

  double residual = step(f, next);
  if (residual > target && rep.lipschitz < options.contraction_limit) {
    for (int it = 0; it < options.max_iterations; ++it) {
      f.swap(next);
      ++rep.fixed_point_iterations;
      const double previous = residual;
      residual = step(f, next);
      if (residual <= target || residual >= previous) break;
    }
  }

  if (residual > target) {
    rep.newton_used = true;
    parallel_for(grid.node_count(), [&](std::size_t i) {
      const auto c = static_cast<Eigen::Index>(i);
      const Point y = grid.node(i);
      Point x = y + f.col(c);
      SmallMatrix jac;
      auto value = [&](const Point& p, SmallMatrix& j) { return Point(p + gi.value_and_jacobian(p, j) - y); };
      Point r = value(x, jac);
      double rn = r.norm();
      for (int it = 0; it < 50 && rn > target; ++it) {
        jac += SmallMatrix::Identity(n, n);
        Eigen::FullPivLU<SmallMatrix> lu(jac);
        if (!lu.isInvertible()) break;
        const Point delta = lu.solve(r);
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
          const Point trial = x - lambda * delta;
          SmallMatrix tj;
          const Point tr = value(trial, tj);
          if (tr.norm() < rn) {
            x = trial;
            r = tr;
            rn = tr.norm();
            jac = tj;
            improved = true;
            break;
          }
        }
        if (!improved) break;
      }
      f.col(c) = x - y;
    });
    residual = step(f, next);
  }
  rep.residual = residual;
  if (report) *report = rep;

  if (!(residual <= tol)) {
    Eigen::Index worst = 0;
    double worst_r = -1.0;
    for (Eigen::Index i = 0; i < nodes; ++i) {
      const double r = (f.col(i) - next.col(i)).norm();
      if (r > worst_r) {
        worst_r = r;
        worst = i;
      }
    }
    std::ostringstream s;
    s << "inversion did not converge: residual " << residual << " > " << tol << " at "
      << describe_node(grid, static_cast<std::size_t>(worst));
    throw InversionFailure(s.str());
  }
  return Diffeo(displacement_from_matrix(grid, f), phi.decay_class());
}

Diffeo conjugate(const Diffeo& outer, const Diffeo& inner, ConjugationReport* report,
                 const InvertOptions& options) {
  require_same_grid(outer.grid(), inner.grid());
  const Grid& grid = outer.grid();
  const auto n = static_cast<Eigen::Index>(grid.dim());
  const auto nodes = static_cast<Eigen::Index>(grid.node_count());
  const Diffeo outer_inv = invert(outer, options);
  const VectorInterpolator s(inner.displacement(), inner.extrapolation());
  const VectorInterpolator f(outer_inv.displacement(), outer_inv.extrapolation());
  const auto& g = outer.displacement();

  Eigen::MatrixXd pulled(n, nodes), remainder(n, nodes);
  Eigen::VectorXd defect(nodes);
  // 5-point Gauss-Legendre on [-1, 1].
  static constexpr double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                     0.9061798459386640};
  static constexpr double gl_w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
  parallel_for(grid.node_count(), [&](std::size_t i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Point u = grid.node(i) + g.at(i);
    check_resolved(grid, u, i);
    const Point si = s(u);
    const Point v = u + si;
    check_resolved(grid, v, i);
    pulled.col(c) = si;
    remainder.col(c) = f(v) - f(u);
    Point integral = Point::Zero(n);
    if (report && si.squaredNorm() > 0.0) {
      SmallMatrix jac;
      for (int q = 0; q < 5; ++q) {
        const double t = 0.5 * (gl_x[q] + 1.0);
        f.value_and_jacobian(u + t * si, jac);
        integral += 0.5 * gl_w[q] * (jac * si);
      }
    }
    defect[c] = (remainder.col(c) - integral).norm();
  });

  Diffeo result(displacement_from_matrix(grid, pulled + remainder), inner.decay_class());
  if (report) {
    report->pulled_inner = displacement_from_matrix(grid, pulled);
    report->remainder = displacement_from_matrix(grid, remainder);
    report->remainder_defect = defect.maxCoeff();
    // Nodes whose evaluation points stay inside the box.
    const double reach = g.sup_norm() + outer_inv.displacement().sup_norm() + inner.displacement().sup_norm();
    const int trim = static_cast<int>(std::ceil(reach / grid.spacing() - 1e-9));
    report->classified_half_width = grid.half_width();
    try {
      const auto resolved = crop(result.displacement(), trim);
      report->classification = classify_decay(resolved, kGroupOrderCap, kGroupWeightCap);
      report->classified_half_width = resolved.grid().half_width();
    } catch (const Error&) {
      report->classification = classify_decay(result.displacement(), kGroupOrderCap, kGroupWeightCap);
    }
    report->normal = contained_in(report->classification.inferred_class, inner.decay_class());
  }
  return result;
}

ScalarField pullback(const Diffeo& phi, const ScalarField& h, Extrapolation mode) {
  return resample_displaced(h, phi.displacement(), mode);
}

DisplacementField adjoint_action(const Diffeo& phi, const DisplacementField& x_field, Extrapolation mode,
                                 const InvertOptions& options) {
  require_same_grid(phi.grid(), x_field.grid());
  const Grid& grid = phi.grid();
  const auto n = static_cast<Eigen::Index>(grid.dim());
  const Diffeo inv = invert(phi, options);
  const auto dg = jacobian(phi.displacement());
  std::vector<Interpolator> dg_interp;
  for (const auto& row : dg)
    for (const auto& entry : row) dg_interp.emplace_back(entry, phi.extrapolation());
  const VectorInterpolator xi(x_field, mode);
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(grid.node_count()));
  parallel_for(grid.node_count(), [&](std::size_t i) {
    const Point x = grid.node(i) + inv.displacement().at(i);
    SmallMatrix a = SmallMatrix::Identity(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) a(r, c) += dg_interp[static_cast<std::size_t>(r * n + c)](x);
    out.col(static_cast<Eigen::Index>(i)) = a * xi(x);
  });
  return displacement_from_matrix(grid, out);
}

void write_diffeo(const std::string& path, const Diffeo& phi) {
  write_dff(path, phi.displacement().components(), phi.decay_class());
  Json meta;
  meta["decay_class"] = std::string(to_string(phi.decay_class()));
  meta["epsilon"] = phi.epsilon();
  std::ofstream out(path + ".meta.json");
  if (!out) throw IoError("cannot open '" + path + ".meta.json' for writing");
  out << dump_json(meta) << '\n';
}

Diffeo read_diffeo(const std::string& path) {
  const auto data = read_dff(path);
  DecayClass cls = data.class_hint.value_or(DecayClass::BoundedAll);
  std::ifstream meta(path + ".meta.json");
  if (meta) {
    try {
      const auto j = Json::parse(meta);
      const auto name = j.at("decay_class").get<std::string>();
      const auto parsed = parse_decay_class(name);
      if (!parsed) throw ParseError("sidecar: unknown decay_class '" + name + "'");
      cls = *parsed;
    } catch (const Json::exception& e) {
      throw ParseError(std::string("sidecar: ") + e.what());
    }
  }
  return Diffeo(data.displacement(), cls);
}

}  // namespace diffeoflow
