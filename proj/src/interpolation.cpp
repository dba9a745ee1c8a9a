#include "diffeoflow/interpolation.hpp"

#include "diffeoflow/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace diffeoflow {

namespace {

constexpr double kSnap = 1e-10;

struct AxisWeights {
  int count = 0;
  int node[6]{};
  double w[6]{};
  double dw[6]{};
};

AxisWeights lagrange6(double u, int N) {
  AxisWeights a;
  const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, N - 2);
  const int s = std::clamp(i0 - 2, 0, N - 6);
  const double t = u - s;
  a.count = 6;
  for (int j = 0; j < 6; ++j) {
    a.node[j] = s + j;
    double num = 1.0, den = 1.0;
    for (int k = 0; k < 6; ++k) {
      if (k == j) continue;
      num *= t - k;
      den *= j - k;
    }
    a.w[j] = num / den;
    double d = 0.0;
    for (int m = 0; m < 6; ++m) {
      if (m == j) continue;
      double p = 1.0;
      for (int k = 0; k < 6; ++k) {
        if (k == j || k == m) continue;
        p *= t - k;
      }
      d += p;
    }
    a.dw[j] = d / den;
  }
  return a;
}

AxisWeights catmull_rom(double u, int N) {
  const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, N - 2);
  const double t = u - i0;
  const double t2 = t * t, t3 = t2 * t;
  double w[4] = {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
                 0.5 * (t3 - t2)};
  double dw[4] = {0.5 * (-3 * t2 + 4 * t - 1), 0.5 * (9 * t2 - 10 * t), 0.5 * (-9 * t2 + 8 * t + 1),
                  0.5 * (3 * t2 - 2 * t)};
  int first = i0 - 1;
  // Linear ghost nodes: f(-1) = 2 f(0) - f(1), f(N) = 2 f(N-1) - f(N-2).
  if (first < 0) {
    w[1] += 2 * w[0];
    w[2] -= w[0];
    dw[1] += 2 * dw[0];
    dw[2] -= dw[0];
    w[0] = dw[0] = 0.0;
  }
  if (i0 + 2 > N - 1) {
    w[2] += 2 * w[3];
    w[1] -= w[3];
    dw[2] += 2 * dw[3];
    dw[1] -= dw[3];
    w[3] = dw[3] = 0.0;
  }
  AxisWeights a;
  for (int j = 0; j < 4; ++j) {
    const int node = first + j;
    if (node < 0 || node > N - 1) continue;
    a.node[a.count] = node;
    a.w[a.count] = w[j];
    a.dw[a.count] = dw[j];
    ++a.count;
  }
  return a;
}

/// Puts the node nearest u first, so the difference form reproduces node values exactly.
void lead_with_nearest(AxisWeights& a, double u) {
  const int nearest = static_cast<int>(std::lround(u));
  for (int j = 1; j < a.count; ++j) {
    if (a.node[j] != nearest) continue;
    std::swap(a.node[0], a.node[j]);
    std::swap(a.w[0], a.w[j]);
    std::swap(a.dw[0], a.dw[j]);
    return;
  }
}

}  // namespace

Interpolator::Interpolator(const ScalarField& field, Extrapolation mode, InterpolationKind kind)
    : field_(&field), mode_(mode), kind_(kind) {}

double Interpolator::value_and_gradient(const Point& x, Point& gradient) const {
  const Grid& grid = field_->grid();
  const int n = grid.dim();
  const int N = grid.points_per_axis();
  const double L = grid.half_width();
  const double h = grid.spacing();
  gradient = Point::Zero(n);
  if (x.size() != n) throw DimensionMismatch("point dimension does not match grid");

  AxisWeights axes[kMaxDim];
  bool clamped[kMaxDim] = {false, false, false};
  for (int k = 0; k < n; ++k) {
    double xk = x[k];
    if (std::isnan(xk)) throw InvalidArgument("NaN coordinate passed to resample");
    if (xk < -L - kSnap * h || xk > L + kSnap * h) {
      if (mode_ == Extrapolation::Zero) return 0.0;
      clamped[k] = true;
    }
    xk = std::clamp(xk, -L, L);
    double u = (xk + L) / h;
    const double r = std::round(u);
    if (std::abs(u - r) < kSnap) u = r;
    axes[k] = kind_ == InterpolationKind::Lagrange6 ? lagrange6(u, N) : catmull_rom(u, N);
    lead_with_nearest(axes[k], u);
  }

  const Eigen::VectorXd& f = field_->samples();
  // derivative_axis == -1 gives the value, otherwise d/dx_axis of the interpolant.
  auto contract = [&](auto&& self, int axis, std::size_t base, int derivative_axis) -> double {
    if (axis >= n || axis >= kMaxDim) return f[static_cast<Eigen::Index>(base)];
    const AxisWeights& a = axes[axis];
    const double* w = axis == derivative_axis ? a.dw : a.w;
    const std::size_t stride = grid.stride(axis);
    const double ref = self(self, axis + 1, base + static_cast<std::size_t>(a.node[0]) * stride, derivative_axis);
    // Derivative weights sum to zero, so both passes use differences against ref.
    double acc = axis == derivative_axis ? 0.0 : ref;
    for (int j = 1; j < a.count; ++j) {
      const double v = self(self, axis + 1, base + static_cast<std::size_t>(a.node[j]) * stride, derivative_axis);
      acc += w[j] * (v - ref);
    }
    return acc;
  };

  const double value = contract(contract, 0, 0, -1);
  for (int k = 0; k < n; ++k) {
    if (clamped[k]) continue;
    gradient[k] = contract(contract, 0, 0, k) / h;
  }
  return value;
}

double Interpolator::operator()(const Point& x) const {
  Point g;
  return value_and_gradient(x, g);
}

std::vector<double> resample(const ScalarField& field, const std::vector<Point>& points,
                             Extrapolation mode, InterpolationKind kind) {
  Interpolator interp(field, mode, kind);
  std::vector<double> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = interp(points[i]); });
  return out;
}

ScalarField resample_displaced(const ScalarField& field, const DisplacementField& g,
                               Extrapolation mode, InterpolationKind kind) {
  const Grid& grid = g.grid();
  if (!(grid == field.grid())) throw DimensionMismatch("fields live on different grids");
  Interpolator interp(field, mode, kind);
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.node_count()));
  parallel_for(grid.node_count(), [&](std::size_t i) {
    out[static_cast<Eigen::Index>(i)] = interp(grid.node(i) + g.at(i));
  });
  return ScalarField(grid, std::move(out));
}

DisplacementField resample_displaced(const DisplacementField& field, const DisplacementField& g,
                                     Extrapolation mode, InterpolationKind kind) {
  std::vector<ScalarField> comps;
  for (int k = 0; k < field.dim(); ++k)
    comps.push_back(resample_displaced(field.component(k), g, mode, kind));
  return DisplacementField(std::move(comps));
}

}  // namespace diffeoflow
