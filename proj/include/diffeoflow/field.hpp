#pragma once

#include "diffeoflow/errors.hpp"
#include "diffeoflow/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <vector>

namespace diffeoflow {

/// Uniform tensor grid on the box [-L, L]^n with N points per axis.
///
/// N is odd so that the origin is a node. Nodes are numbered row-major: the
/// last axis varies fastest.
class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return points_; }
  double spacing() const { return spacing_; }
  std::size_t node_count() const { return node_count_; }

  /// Stride of axis k in the flat node index.
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  std::array<int, kMaxDim> node_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<int, kMaxDim>& idx) const;
  double coordinate(int index_on_axis) const { return -half_width_ + index_on_axis * spacing_; }
  Point node(std::size_t flat) const;

  /// Same spacing, twice the half width (N' = 2N - 1). Nodes of *this are nodes of the result.
  Grid enlarged() const;
  /// Same box, halved spacing (N' = 2N - 1).
  Grid refined() const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.half_width_ == b.half_width_ && a.points_ == b.points_;
  }

 private:
  int dim_;
  double half_width_;
  int points_;
  double spacing_;
  std::size_t node_count_;
  std::array<std::size_t, kMaxDim> strides_{};
};

/// Real function on the grid nodes.
class ScalarField {
 public:
  ScalarField(Grid grid, Eigen::VectorXd samples);

  static ScalarField zeros(const Grid& grid);
  static ScalarField constant(const Grid& grid, double value);
  /// Samples `fn` at every node.
  static ScalarField from_function(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[static_cast<Eigen::Index>(i)]; }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double c, const ScalarField& a);

 private:
  Grid grid_;
  Eigen::VectorXd samples_;
};

/// Map R^n -> R^n on the grid, one ScalarField per component.
class DisplacementField {
 public:
  explicit DisplacementField(std::vector<ScalarField> components);

  static DisplacementField zeros(const Grid& grid);
  static DisplacementField constant(const Grid& grid, const Point& value);
  static DisplacementField from_function(const Grid& grid,
                                         const std::function<Point(const Point&)>& fn);

  const Grid& grid() const { return components_.front().grid(); }
  int dim() const { return static_cast<int>(components_.size()); }
  const ScalarField& component(int k) const { return components_[static_cast<std::size_t>(k)]; }
  const std::vector<ScalarField>& components() const { return components_; }
  Point at(std::size_t node) const;

  /// max over nodes of the Euclidean norm.
  double sup_norm() const;

  friend DisplacementField operator+(const DisplacementField& a, const DisplacementField& b);
  friend DisplacementField operator-(const DisplacementField& a, const DisplacementField& b);
  friend DisplacementField operator*(double c, const DisplacementField& a);

 private:
  std::vector<ScalarField> components_;
};

/// Column-major storage helper: builds a DisplacementField from an n x nodes matrix.
DisplacementField displacement_from_matrix(const Grid& grid, const Eigen::MatrixXd& values);

/// Restriction to the centered sub-box with `trim` nodes removed from each end
/// of every axis; same spacing. Throws InvalidArgument if fewer than 16 points remain.
ScalarField crop(const ScalarField& field, int trim);
DisplacementField crop(const DisplacementField& field, int trim);

}  // namespace diffeoflow
