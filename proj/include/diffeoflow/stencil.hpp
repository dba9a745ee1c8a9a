#pragma once

#include "diffeoflow/field.hpp"

#include <vector>

namespace diffeoflow {

/// Finite-difference weights for the derivative of order `derivative` at `at`,
/// using samples at `offsets` (Fornberg's recursion).
std::vector<double> fd_weights(const std::vector<double>& offsets, double at, int derivative);

/// Fourth-order accurate d-th derivative along one grid line.
///
/// Interior nodes use the centred stencil with 2*floor((d+1)/2)+3 points; the
/// boundary band switches to d+4 point one-sided stencils. Spacing is 1; the
/// caller scales by h^-d.
class LineStencil {
 public:
  LineStencil(int points, int derivative);

  int derivative() const { return derivative_; }
  /// First node of the window used at node i.
  int window_start(int i) const;
  /// Weights of the window used at node i.
  const std::vector<double>& weights(int i) const;

 private:
  int points_;
  int derivative_;
  int radius_;
  int boundary_width_;
  std::vector<double> central_;
  std::vector<std::vector<double>> left_, right_;
};

/// Fourth-order finite-difference approximation of d^alpha field.
/// Throws UnsupportedOrder if |alpha| > 6.
ScalarField partial_derivative(const ScalarField& field, const MultiIndex& alpha);

/// Stencil Jacobian of a displacement: out[k][j] = d g_k / d x_j.
std::vector<std::vector<ScalarField>> jacobian(const DisplacementField& g);

/// Node-wise det(I + dg).
Eigen::VectorXd jacobian_determinant(const DisplacementField& g);

/// Node-wise spectral norm of dg.
Eigen::VectorXd jacobian_norm(const DisplacementField& g);

/// dg(node) assembled from a stencil Jacobian.
SmallMatrix jacobian_at(const std::vector<std::vector<ScalarField>>& dg, std::size_t node);

/// (I + dg)(node) assembled from a stencil Jacobian.
SmallMatrix identity_plus(const std::vector<std::vector<ScalarField>>& dg, std::size_t node);

/// Spectral norm of a small matrix (absolute value for 1x1).
double spectral_norm(const SmallMatrix& a);

/// All multi-indices of total order <= max_order for dimension dim, graded.
std::vector<MultiIndex> multi_indices(int dim, int max_order);

}  // namespace diffeoflow
