#pragma once

#include "diffeoflow/symmetric_tensor.hpp"
#include "diffeoflow/taylor.hpp"

#include <Eigen/LU>

#include <cmath>
#include <vector>

namespace diffeoflow {

/// Truncated Taylor expansion of a map R^n -> R^m at a base point:
/// term(j) holds d^j F(x) / j! as a symmetric j-linear map.
template <typename Scalar>
class Jet {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  /// Zero jet of the given order.
  Jet(int order, Vector base_point, int codomain_dim) : base_point_(std::move(base_point)) {
    if (order < 0 || order > kMaxJetOrder) throw UnsupportedOrder("jet order must be in 0..6");
    const int n = static_cast<int>(base_point_.size());
    for (int j = 0; j <= order; ++j) terms_.emplace_back(j, n, codomain_dim);
  }

  /// Jet of the identity map at x.
  static Jet identity(const Vector& x, int order) {
    Jet jet(order, x, static_cast<int>(x.size()));
    jet.terms_[0].coefficients().col(0) = x;
    if (order >= 1) jet.terms_[1].coefficients() = Matrix::Identity(x.size(), x.size());
    return jet;
  }

  /// Jet from one multivariate Taylor series per component, all expanded at x.
  static Jet from_taylor(const std::vector<TaylorSeries<Scalar>>& components, const Vector& x) {
    if (components.empty()) throw DimensionMismatch("jet needs at least one component");
    const int order = components.front().order();
    Jet jet(order, x, static_cast<int>(components.size()));
    for (std::size_t c = 0; c < components.size(); ++c) {
      const auto& series = components[c];
      if (series.order() != order || series.vars() != x.size())
        throw DimensionMismatch("taylor components disagree on order or dimension");
      for (int j = 0; j <= order; ++j) {
        auto& t = jet.terms_[static_cast<std::size_t>(j)];
        // Coefficient of x^beta in the series is d^beta F / beta!; the tensor
        // entry T(e_i1..e_ij) equals d^j F / j! / multinomial = c_beta * beta! / j!.
        Scalar jfact(1);
        for (int i = 2; i <= j; ++i) jfact *= Scalar(i);
        for (std::size_t r = 0; r < t.size(); ++r) {
          const auto& idx = t.multi_index(r);
          MultiIndex beta{};
          for (int i : idx) ++beta[static_cast<std::size_t>(i)];
          Scalar bfact(1);
          for (int b : beta)
            for (int i = 2; i <= b; ++i) bfact *= Scalar(i);
          t.coefficients()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) =
              series[beta] * bfact / jfact;
        }
      }
    }
    return jet;
  }

  int order() const { return static_cast<int>(terms_.size()) - 1; }
  int domain_dim() const { return static_cast<int>(base_point_.size()); }
  int codomain_dim() const { return terms_.front().codomain_dim(); }
  const Vector& base_point() const { return base_point_; }
  Vector value() const { return terms_.front().coefficients().col(0); }

  const SymmetricTensor<Scalar>& term(int j) const { return terms_[static_cast<std::size_t>(j)]; }
  SymmetricTensor<Scalar>& term(int j) { return terms_[static_cast<std::size_t>(j)]; }

  /// Linear part dF(x) as an m x n matrix.
  Matrix linear_part() const {
    if (order() < 1) throw UnsupportedOrder("jet of order 0 has no linear part");
    return terms_[1].coefficients();
  }

  /// Largest absolute coefficient difference over all degrees (base points ignored).
  Scalar distance(const Jet& other) const {
    if (order() != other.order() || codomain_dim() != other.codomain_dim() || domain_dim() != other.domain_dim())
      throw DimensionMismatch("jets have different shapes");
    Scalar d(0);
    for (int j = 0; j <= order(); ++j) {
      const Matrix diff = term(j).coefficients() - other.term(j).coefficients();
      for (Eigen::Index i = 0; i < diff.size(); ++i) {
        using std::abs;
        const Scalar a = abs(diff.data()[i]);
        if (a > d) d = a;
      }
    }
    return d;
  }

 private:
  Vector base_point_;
  std::vector<SymmetricTensor<Scalar>> terms_;
};

namespace detail {

/// Ordered compositions of q into exactly j positive parts.
inline const std::vector<std::vector<int>>& compositions(int q, int j) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({q, j});
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> out;
  std::vector<int> parts;
  auto rec = [&](auto&& self, int remaining, int slots) -> void {
    if (slots == 0) {
      if (remaining == 0) out.push_back(parts);
      return;
    }
    for (int a = 1; a <= remaining - (slots - 1); ++a) {
      parts.push_back(a);
      self(self, remaining - a, slots - 1);
      parts.pop_back();
    }
  };
  rec(rec, q, j);
  return cache.emplace(std::pair{q, j}, std::move(out)).first->second;
}

/// Degree-q term of F o G:
/// sym_q sum_j sum_{a_1+..+a_j=q} F_j(G_{a_1}, ..., G_{a_j}).
template <typename Scalar>
SymmetricTensor<Scalar> compose_term(const Jet<Scalar>& f, const Jet<Scalar>& g, int q) {
  using Vector = typename Jet<Scalar>::Vector;
  const int n = g.domain_dim();
  MultilinearMap<Scalar> full(q, n, f.codomain_dim());
  const auto& lay = layout(q, n);
  std::vector<Vector> args;
  std::vector<int> block;
  for (std::size_t fi = 0; fi < lay.full_size; ++fi) {
    const auto& tuple = lay.full_tuple[fi];
    Vector acc = Vector::Zero(f.codomain_dim());
    for (int j = 1; j <= std::min(q, f.order()); ++j) {
      for (const auto& parts : compositions(q, j)) {
        args.clear();
        std::size_t pos = 0;
        for (int a : parts) {
          block.assign(tuple.begin() + static_cast<std::ptrdiff_t>(pos),
                       tuple.begin() + static_cast<std::ptrdiff_t>(pos) + a);
          args.push_back(g.term(a).coeff(block));
          pos += static_cast<std::size_t>(a);
        }
        acc += f.term(j)(args);
      }
    }
    full.data.col(static_cast<Eigen::Index>(fi)) = acc;
  }
  return symmetrize(full);
}

}  // namespace detail

/// Jet of f o g at x from the jet F of f at g(x) and the jet G of g at x
/// (Faa di Bruno over ordered compositions, symmetrized once per degree).
template <typename Scalar>
Jet<Scalar> compose_jets(const Jet<Scalar>& f, const Jet<Scalar>& g, double base_tolerance = 1e-12) {
  if (f.order() != g.order()) throw DimensionMismatch("jet orders differ");
  if (f.domain_dim() != g.codomain_dim()) throw DimensionMismatch("inner codomain does not match outer domain");
  const auto gv = g.value();
  for (Eigen::Index i = 0; i < gv.size(); ++i) {
    using std::abs;
    if (abs(f.base_point()[i] - gv[i]) > base_tolerance * (1.0 + abs(gv[i])))
      throw DimensionMismatch("outer jet is not based at the value of the inner jet");
  }
  Jet<Scalar> out(f.order(), g.base_point(), f.codomain_dim());
  out.term(0) = f.term(0);
  for (int q = 1; q <= f.order(); ++q) out.term(q) = detail::compose_term(f, g, q);
  return out;
}

/// Jet of the inverse map at y = G.value(): degree 1 is dG^-1, and degree k
/// solves [Psi o G]_k = 0 for Psi_k given the lower-degree terms.
template <typename Scalar>
Jet<Scalar> invert_jet(const Jet<Scalar>& g, int order) {
  using Matrix = typename Jet<Scalar>::Matrix;
  if (g.domain_dim() != g.codomain_dim()) throw DimensionMismatch("only square jets can be inverted");
  if (order < 1 || order > g.order()) throw UnsupportedOrder("inversion order must be in 1..jet order");
  const Matrix a = g.linear_part();
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw SingularMatrix("linear part of the jet is singular");
  const Matrix a_inv = lu.inverse();

  Jet<Scalar> g_cut(order, g.base_point(), g.codomain_dim());
  for (int j = 0; j <= order; ++j) g_cut.term(j) = g.term(j);

  Jet<Scalar> psi(order, g.value(), g.domain_dim());
  psi.term(0).coefficients().col(0) = g.base_point();
  psi.term(1).coefficients() = a_inv;
  for (int k = 2; k <= order; ++k) {
    const auto rest = detail::compose_term(psi, g_cut, k);
    psi.term(k) = rest.pulled_back(a_inv);
    psi.term(k).coefficients() *= Scalar(-1);
  }
  return psi;
}

/// Jet of a map given by per-component Taylor series providers, e.g. descriptors.
template <typename Provider>
Jet<double> jet_of(const std::vector<Provider>& components, const Eigen::VectorXd& x, int order) {
  std::vector<TaylorSeries<double>> series;
  Point p = x;
  for (const auto& c : components) series.push_back(c.taylor(p, order));
  return Jet<double>::from_taylor(series, x);
}

}  // namespace diffeoflow
