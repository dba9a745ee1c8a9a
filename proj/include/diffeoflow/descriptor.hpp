#pragma once

#include "diffeoflow/dual.hpp"
#include "diffeoflow/field.hpp"
#include "diffeoflow/taylor.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace diffeoflow {

/// Closed-form function of (x, y, z, t) from a small whitelisted grammar.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          exponent must be constant
///   primary := number | x | y | z | t | pi | func '(' expr ')' | '(' expr ')'
///   func    := exp | sin | cos | tanh | sqrt | gauss | bump
///
/// gauss(u) = exp(-u^2); bump(u) = exp(-1/(1-u^2)) for |u| < 1 and 0 otherwise.
class Descriptor {
 public:
  struct Node;

  /// Parses `text`; variables beyond `dim` (and t unless allow_time) are rejected.
  static Descriptor parse(const std::string& text, int dim, bool allow_time = false);

  const std::string& text() const { return text_; }
  bool is_constant_zero() const;

  /// vars = (x, y, z, t); unused entries are ignored.
  template <typename T>
  T evaluate(const std::array<T, 4>& vars) const;

  double operator()(const Point& x, double t = 0.0) const;

  /// Gradient with respect to (x, y, z, t).
  Dual::Gradient gradient(const Point& x, double t = 0.0) const;

  /// Exact truncated Taylor expansion in the spatial variables around x.
  TaylorSeries<double> taylor(const Point& x, int order, double t = 0.0) const;

 private:
  Descriptor(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

/// One descriptor per component, written "c_1; c_2; ...". A single component
/// is broadcast to every axis only when dim == 1.
class VectorDescriptor {
 public:
  static VectorDescriptor parse(const std::string& text, int dim, bool allow_time = false);

  int dim() const { return static_cast<int>(components_.size()); }
  const Descriptor& component(int k) const { return components_[static_cast<std::size_t>(k)]; }
  std::string text() const;

  Point operator()(const Point& x, double t = 0.0) const;
  /// Spatial Jacobian d_x X(t, x).
  SmallMatrix jacobian(const Point& x, double t = 0.0) const;

 private:
  std::vector<Descriptor> components_;
};

/// Samples a descriptor at every node; non-finite values raise NonFiniteSample
/// naming the offending coordinate.
ScalarField sample(const Descriptor& descriptor, const Grid& grid, double t = 0.0);
DisplacementField sample(const VectorDescriptor& descriptor, const Grid& grid, double t = 0.0);

}  // namespace diffeoflow
