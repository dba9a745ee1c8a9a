#pragma once

#include "diffeoflow/field.hpp"

#include <vector>

namespace diffeoflow {

enum class InterpolationKind {
  /// Separable Catmull-Rom cubic (C^1, O(h^3)); linear ghost nodes at the box edge.
  CatmullRom,
  /// Separable 6-point Lagrange (quintic, O(h^6)); windows shift inward at the edge.
  Lagrange6,
};

/// Evaluates a grid field at arbitrary points.
///
/// Each 1-D pass is computed as f_ref + sum w_j (f_j - f_ref), so constant
/// fields are reproduced bit-exactly; points within 1e-10 cells of a node
/// return the node value.
class Interpolator {
 public:
  Interpolator(const ScalarField& field, Extrapolation mode,
               InterpolationKind kind = InterpolationKind::Lagrange6);

  double operator()(const Point& x) const;
  /// Value and gradient of the interpolant.
  double value_and_gradient(const Point& x, Point& gradient) const;

 private:
  const ScalarField* field_;
  Extrapolation mode_;
  InterpolationKind kind_;
};

/// Interpolated values of `field` at `points`. NaN coordinates raise InvalidArgument.
std::vector<double> resample(const ScalarField& field, const std::vector<Point>& points,
                             Extrapolation mode,
                             InterpolationKind kind = InterpolationKind::Lagrange6);

/// field(x + g(x)) at every node x.
ScalarField resample_displaced(const ScalarField& field, const DisplacementField& g,
                               Extrapolation mode,
                               InterpolationKind kind = InterpolationKind::Lagrange6);

DisplacementField resample_displaced(const DisplacementField& field, const DisplacementField& g,
                                     Extrapolation mode,
                                     InterpolationKind kind = InterpolationKind::Lagrange6);

}  // namespace diffeoflow
