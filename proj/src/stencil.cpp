#include "diffeoflow/stencil.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <map>
#include <mutex>

namespace diffeoflow {

std::vector<double> fd_weights(const std::vector<double>& offsets, double at, int derivative) {
  const int n = static_cast<int>(offsets.size());
  const int m = derivative;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  auto C = [&](int i, int k) -> double& {
    return c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  };
  auto X = [&](int i) { return offsets[static_cast<std::size_t>(i)]; };
  double c1 = 1.0;
  double c4 = X(0) - at;
  C(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = X(i) - at;
    for (int j = 0; j < i; ++j) {
      const double c3 = X(i) - X(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = C(i, m);
  return w;
}

LineStencil::LineStencil(int points, int derivative)
    : points_(points),
      derivative_(derivative),
      radius_((derivative + 1) / 2 + 1),
      boundary_width_(derivative + 4) {
  if (derivative < 1 || derivative > kMaxDerivativeOrder)
    throw UnsupportedOrder("derivative order must be in 1..6");
  if (points < boundary_width_) throw InvalidArgument("grid line too short for stencil");
  std::vector<double> offs;
  for (int o = -radius_; o <= radius_; ++o) offs.push_back(o);
  central_ = fd_weights(offs, 0.0, derivative);
  std::vector<double> window;
  for (int o = 0; o < boundary_width_; ++o) window.push_back(o);
  for (int i = 0; i < radius_; ++i) {
    left_.push_back(fd_weights(window, i, derivative));
    right_.push_back(fd_weights(window, boundary_width_ - radius_ + i, derivative));
  }
}

int LineStencil::window_start(int i) const {
  if (i < radius_) return 0;
  if (i > points_ - 1 - radius_) return points_ - boundary_width_;
  return i - radius_;
}

const std::vector<double>& LineStencil::weights(int i) const {
  if (i < radius_) return left_[static_cast<std::size_t>(i)];
  if (i > points_ - 1 - radius_) return right_[static_cast<std::size_t>(i - (points_ - radius_))];
  return central_;
}

namespace {

const LineStencil& cached_stencil(int points, int derivative) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, LineStencil> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({points, derivative});
  if (it == cache.end()) it = cache.emplace(std::pair{points, derivative}, LineStencil(points, derivative)).first;
  return it->second;
}

Eigen::VectorXd differentiate_axis(const Grid& grid, const Eigen::VectorXd& in, int axis, int order) {
  const LineStencil& st = cached_stencil(grid.points_per_axis(), order);
  const int N = grid.points_per_axis();
  const std::size_t stride = grid.stride(axis);
  const double scale = std::pow(grid.spacing(), -order);
  Eigen::VectorXd out(in.size());
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
    const int i = static_cast<int>((flat / stride) % static_cast<std::size_t>(N));
    const std::size_t line_base = flat - static_cast<std::size_t>(i) * stride;
    const int start = st.window_start(i);
    const auto& w = st.weights(i);
    double acc = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q)
      acc += w[q] * in[static_cast<Eigen::Index>(line_base + (static_cast<std::size_t>(start) + q) * stride)];
    out[static_cast<Eigen::Index>(flat)] = acc * scale;
  }
  return out;
}

}  // namespace

ScalarField partial_derivative(const ScalarField& field, const MultiIndex& alpha) {
  const int order = total_order(alpha);
  if (order > kMaxDerivativeOrder)
    throw UnsupportedOrder("derivative order " + std::to_string(order) + " exceeds cap of 6");
  const Grid& grid = field.grid();
  for (int k = grid.dim(); k < kMaxDim; ++k)
    if (alpha[static_cast<std::size_t>(k)] != 0)
      throw DimensionMismatch("multi-index has entries beyond the grid dimension");
  Eigen::VectorXd v = field.samples();
  for (int k = 0; k < grid.dim(); ++k) {
    const int d = alpha[static_cast<std::size_t>(k)];
    if (d < 0) throw InvalidArgument("negative multi-index entry");
    if (d > 0) v = differentiate_axis(grid, v, k, d);
  }
  return ScalarField(grid, std::move(v));
}

std::vector<std::vector<ScalarField>> jacobian(const DisplacementField& g) {
  const int n = g.dim();
  std::vector<std::vector<ScalarField>> dg;
  for (int k = 0; k < n; ++k) {
    std::vector<ScalarField> row;
    for (int j = 0; j < n; ++j) {
      MultiIndex e{};
      e[static_cast<std::size_t>(j)] = 1;
      row.push_back(partial_derivative(g.component(k), e));
    }
    dg.push_back(std::move(row));
  }
  return dg;
}

SmallMatrix jacobian_at(const std::vector<std::vector<ScalarField>>& dg, std::size_t node) {
  const int n = static_cast<int>(dg.size());
  SmallMatrix a(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) a(k, j) = dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)][node];
  return a;
}

SmallMatrix identity_plus(const std::vector<std::vector<ScalarField>>& dg, std::size_t node) {
  SmallMatrix a = jacobian_at(dg, node);
  a.diagonal().array() += 1.0;
  return a;
}

double spectral_norm(const SmallMatrix& a) {
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<SmallMatrix> svd(a);
  return svd.singularValues()[0];
}

Eigen::VectorXd jacobian_determinant(const DisplacementField& g) {
  const auto dg = jacobian(g);
  const std::size_t nodes = g.grid().node_count();
  Eigen::VectorXd det(static_cast<Eigen::Index>(nodes));
  for (std::size_t i = 0; i < nodes; ++i) det[static_cast<Eigen::Index>(i)] = identity_plus(dg, i).determinant();
  return det;
}

Eigen::VectorXd jacobian_norm(const DisplacementField& g) {
  const auto dg = jacobian(g);
  const std::size_t nodes = g.grid().node_count();
  Eigen::VectorXd out(static_cast<Eigen::Index>(nodes));
  for (std::size_t i = 0; i < nodes; ++i) {
    out[static_cast<Eigen::Index>(i)] = spectral_norm(jacobian_at(dg, i));
  }
  return out;
}

std::vector<MultiIndex> multi_indices(int dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int order = 0; order <= max_order; ++order) {
    if (dim == 1) {
      out.push_back({order, 0, 0});
    } else if (dim == 2) {
      for (int a = order; a >= 0; --a) out.push_back({a, order - a, 0});
    } else {
      for (int a = order; a >= 0; --a)
        for (int b = order - a; b >= 0; --b) out.push_back({a, b, order - a - b});
    }
  }
  return out;
}

}  // namespace diffeoflow
