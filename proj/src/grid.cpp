#include "diffeoflow/field.hpp"

#include <cmath>
#include <sstream>

namespace diffeoflow {

std::string_view to_string(DecayClass c) {
  switch (c) {
    case DecayClass::CompactSupport: return "CompactSupport";
    case DecayClass::Schwartz: return "Schwartz";
    case DecayClass::SobolevInfinity: return "SobolevInfinity";
    case DecayClass::BoundedAll: return "BoundedAll";
  }
  return "BoundedAll";
}

std::optional<DecayClass> parse_decay_class(std::string_view name) {
  for (auto c : {DecayClass::CompactSupport, DecayClass::Schwartz, DecayClass::SobolevInfinity,
                 DecayClass::BoundedAll}) {
    if (name == to_string(c)) return c;
  }
  if (name == "C_c" || name == "c") return DecayClass::CompactSupport;
  if (name == "S") return DecayClass::Schwartz;
  if (name == "H_inf" || name == "Hinf") return DecayClass::SobolevInfinity;
  if (name == "B") return DecayClass::BoundedAll;
  return std::nullopt;
}

Grid::Grid(int dim, double half_width, int points_per_axis)
    : dim_(dim), half_width_(half_width), points_(points_per_axis) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  if (!(half_width > 0) || !std::isfinite(half_width))
    throw InvalidArgument("grid half width must be positive");
  if (points_per_axis < 16) throw InvalidArgument("grid needs at least 16 points per axis");
  if (points_per_axis % 2 == 0)
    throw InvalidArgument("points per axis must be odd so the origin is a node");
  spacing_ = 2.0 * half_width / (points_per_axis - 1);
  node_count_ = 1;
  for (int k = dim - 1; k >= 0; --k) {
    strides_[static_cast<std::size_t>(k)] = node_count_;
    node_count_ *= static_cast<std::size_t>(points_per_axis);
  }
}

std::array<int, kMaxDim> Grid::node_index(std::size_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int k = 0; k < dim_; ++k) {
    const auto s = strides_[static_cast<std::size_t>(k)];
    idx[static_cast<std::size_t>(k)] = static_cast<int>(flat / s);
    flat %= s;
  }
  return idx;
}

std::size_t Grid::flat_index(const std::array<int, kMaxDim>& idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < dim_; ++k)
    flat += static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]) *
            strides_[static_cast<std::size_t>(k)];
  return flat;
}

Point Grid::node(std::size_t flat) const {
  const auto idx = node_index(flat);
  Point x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = coordinate(idx[static_cast<std::size_t>(k)]);
  return x;
}

Grid Grid::enlarged() const { return Grid(dim_, 2.0 * half_width_, 2 * points_ - 1); }

Grid Grid::refined() const { return Grid(dim_, half_width_, 2 * points_ - 1); }

ScalarField::ScalarField(Grid grid, Eigen::VectorXd samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (static_cast<std::size_t>(samples_.size()) != grid_.node_count())
    throw DimensionMismatch("sample count does not match grid node count");
  if (!samples_.allFinite()) {
    for (Eigen::Index i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i])) {
        std::ostringstream msg;
        msg << "non-finite sample at x = (" << grid_.node(static_cast<std::size_t>(i)).transpose()
            << ")";
        throw NonFiniteSample(msg.str());
      }
    }
  }
}

ScalarField ScalarField::zeros(const Grid& grid) {
  return ScalarField(grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.node_count())));
}

ScalarField ScalarField::constant(const Grid& grid, double value) {
  return ScalarField(grid,
                     Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.node_count()), value));
}

ScalarField ScalarField::from_function(const Grid& grid,
                                       const std::function<double(const Point&)>& fn) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.node_count()));
  for (std::size_t i = 0; i < grid.node_count(); ++i) v[static_cast<Eigen::Index>(i)] = fn(grid.node(i));
  return ScalarField(grid, std::move(v));
}

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DimensionMismatch("fields live on different grids");
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid_, b.grid_);
  return ScalarField(a.grid_, a.samples_ + b.samples_);
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid_, b.grid_);
  return ScalarField(a.grid_, a.samples_ - b.samples_);
}

ScalarField operator*(double c, const ScalarField& a) { return ScalarField(a.grid_, c * a.samples_); }

DisplacementField::DisplacementField(std::vector<ScalarField> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DimensionMismatch("displacement field needs components");
  const Grid& g = components_.front().grid();
  if (static_cast<int>(components_.size()) != g.dim())
    throw DimensionMismatch("displacement component count must equal grid dimension");
  for (const auto& c : components_) require_same_grid(g, c.grid());
}

DisplacementField DisplacementField::zeros(const Grid& grid) {
  return DisplacementField(std::vector<ScalarField>(static_cast<std::size_t>(grid.dim()),
                                                    ScalarField::zeros(grid)));
}

DisplacementField DisplacementField::constant(const Grid& grid, const Point& value) {
  std::vector<ScalarField> comps;
  for (int k = 0; k < grid.dim(); ++k) comps.push_back(ScalarField::constant(grid, value[k]));
  return DisplacementField(std::move(comps));
}

DisplacementField DisplacementField::from_function(const Grid& grid,
                                                   const std::function<Point(const Point&)>& fn) {
  Eigen::MatrixXd values(grid.dim(), static_cast<Eigen::Index>(grid.node_count()));
  for (std::size_t i = 0; i < grid.node_count(); ++i)
    values.col(static_cast<Eigen::Index>(i)) = fn(grid.node(i));
  return displacement_from_matrix(grid, values);
}

Point DisplacementField::at(std::size_t node) const {
  Point v(dim());
  for (int k = 0; k < dim(); ++k) v[k] = components_[static_cast<std::size_t>(k)][node];
  return v;
}

double DisplacementField::sup_norm() const {
  double best = 0.0;
  const std::size_t n = grid().node_count();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& c : components_) s += c[i] * c[i];
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

DisplacementField operator+(const DisplacementField& a, const DisplacementField& b) {
  std::vector<ScalarField> out;
  for (int k = 0; k < a.dim(); ++k) out.push_back(a.component(k) + b.component(k));
  return DisplacementField(std::move(out));
}

DisplacementField operator-(const DisplacementField& a, const DisplacementField& b) {
  std::vector<ScalarField> out;
  for (int k = 0; k < a.dim(); ++k) out.push_back(a.component(k) - b.component(k));
  return DisplacementField(std::move(out));
}

DisplacementField operator*(double c, const DisplacementField& a) {
  std::vector<ScalarField> out;
  for (int k = 0; k < a.dim(); ++k) out.push_back(c * a.component(k));
  return DisplacementField(std::move(out));
}

DisplacementField displacement_from_matrix(const Grid& grid, const Eigen::MatrixXd& values) {
  if (values.rows() != grid.dim() ||
      static_cast<std::size_t>(values.cols()) != grid.node_count())
    throw DimensionMismatch("displacement matrix shape does not match grid");
  std::vector<ScalarField> comps;
  for (int k = 0; k < grid.dim(); ++k) comps.emplace_back(grid, values.row(k).transpose());
  return DisplacementField(std::move(comps));
}

ScalarField crop(const ScalarField& field, int trim) {
  const Grid& grid = field.grid();
  if (trim < 0) throw InvalidArgument("crop trim must be non-negative");
  const int points = grid.points_per_axis() - 2 * trim;
  if (points < 16) throw InvalidArgument("crop leaves fewer than 16 points per axis");
  const Grid inner(grid.dim(), grid.half_width() - trim * grid.spacing(), points);
  Eigen::VectorXd samples(static_cast<Eigen::Index>(inner.node_count()));
  for (std::size_t i = 0; i < inner.node_count(); ++i) {
    auto idx = inner.node_index(i);
    for (int k = 0; k < grid.dim(); ++k) idx[static_cast<std::size_t>(k)] += trim;
    samples[static_cast<Eigen::Index>(i)] = field[grid.flat_index(idx)];
  }
  return ScalarField(inner, std::move(samples));
}

DisplacementField crop(const DisplacementField& field, int trim) {
  std::vector<ScalarField> comps;
  for (const auto& c : field.components()) comps.push_back(crop(c, trim));
  return DisplacementField(std::move(comps));
}

}  // namespace diffeoflow
