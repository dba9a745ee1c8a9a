#pragma once

#include "diffeoflow/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

namespace diffeoflow {

inline constexpr int kMaxJetOrder = 6;

namespace detail {

/// Index tables for degree-j tensors over R^n: every full index tuple
/// (base-n, first slot most significant) maps to the rank of its sorted tuple.
struct TensorLayout {
  int degree = 0;
  int dim = 0;
  std::size_t full_size = 1;
  std::vector<std::vector<int>> sorted;     // rank -> non-decreasing tuple
  std::vector<std::size_t> full_to_rank;    // full index -> rank
  std::vector<std::vector<int>> full_tuple; // full index -> tuple

  std::size_t full_index(const std::vector<int>& tuple) const {
    std::size_t f = 0;
    for (int i : tuple) f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
    return f;
  }
};

inline const TensorLayout& layout(int degree, int dim) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<TensorLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{degree, dim}];
  if (!slot) {
    auto t = std::make_unique<TensorLayout>();
    t->degree = degree;
    t->dim = dim;
    for (int i = 0; i < degree; ++i) t->full_size *= static_cast<std::size_t>(dim);
    std::map<std::vector<int>, std::size_t> rank_of;
    t->full_to_rank.resize(t->full_size);
    t->full_tuple.resize(t->full_size);
    for (std::size_t f = 0; f < t->full_size; ++f) {
      std::vector<int> tuple(static_cast<std::size_t>(degree));
      std::size_t r = f;
      for (int s = degree - 1; s >= 0; --s) {
        tuple[static_cast<std::size_t>(s)] = static_cast<int>(r % static_cast<std::size_t>(dim));
        r /= static_cast<std::size_t>(dim);
      }
      t->full_tuple[f] = tuple;
      std::sort(tuple.begin(), tuple.end());
      auto it = rank_of.find(tuple);
      if (it == rank_of.end()) {
        it = rank_of.emplace(tuple, t->sorted.size()).first;
        t->sorted.push_back(tuple);
      }
      t->full_to_rank[f] = it->second;
    }
    slot = std::move(t);
  }
  return *slot;
}

}  // namespace detail

/// General (not necessarily symmetric) multilinear map (R^n)^degree -> R^m,
/// stored as an m x n^degree coefficient array.
template <typename Scalar>
struct MultilinearMap {
  int degree = 0;
  int domain_dim = 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> data;

  MultilinearMap(int degree_, int n, int m) : degree(degree_), domain_dim(n) {
    std::size_t size = 1;
    for (int i = 0; i < degree_; ++i) size *= static_cast<std::size_t>(n);
    data = decltype(data)::Zero(m, static_cast<Eigen::Index>(size));
  }
  int codomain_dim() const { return static_cast<int>(data.rows()); }
};

/// Symmetric multilinear map (R^n)^degree -> R^m; one coefficient column per
/// non-decreasing index tuple, coefficient = T(e_i1, ..., e_ij).
template <typename Scalar>
class SymmetricTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SymmetricTensor() : SymmetricTensor(0, 1, 1) {}
  SymmetricTensor(int degree, int domain_dim, int codomain_dim)
      : degree_(degree), n_(domain_dim), layout_(&detail::layout(degree, domain_dim)) {
    if (degree < 0 || degree > kMaxJetOrder) throw UnsupportedOrder("tensor degree must be in 0..6");
    coeffs_ = Matrix::Zero(codomain_dim, static_cast<Eigen::Index>(layout_->sorted.size()));
  }

  int degree() const { return degree_; }
  int domain_dim() const { return n_; }
  int codomain_dim() const { return static_cast<int>(coeffs_.rows()); }
  std::size_t size() const { return layout_->sorted.size(); }
  const std::vector<int>& multi_index(std::size_t rank) const { return layout_->sorted[rank]; }

  const Matrix& coefficients() const { return coeffs_; }
  Matrix& coefficients() { return coeffs_; }

  /// T(e_i1, ..., e_ij) for any ordering of the tuple.
  auto coeff(const std::vector<int>& tuple) const { return coeffs_.col(rank(tuple)); }
  auto coeff(const std::vector<int>& tuple) { return coeffs_.col(rank(tuple)); }

  Eigen::Index rank(const std::vector<int>& tuple) const {
    return static_cast<Eigen::Index>(layout_->full_to_rank[layout_->full_index(tuple)]);
  }

  /// T(args[0], ..., args[j-1]).
  template <typename VectorLike>
  Vector operator()(const std::vector<VectorLike>& args) const {
    if (static_cast<int>(args.size()) != degree_) throw DimensionMismatch("wrong argument count for tensor");
    Vector out = Vector::Zero(coeffs_.rows());
    for (std::size_t f = 0; f < layout_->full_size; ++f) {
      const auto& tuple = layout_->full_tuple[f];
      Scalar w(1);
      for (int s = 0; s < degree_; ++s) w *= args[static_cast<std::size_t>(s)][tuple[static_cast<std::size_t>(s)]];
      if (w != Scalar(0)) out += w * coeffs_.col(static_cast<Eigen::Index>(layout_->full_to_rank[f]));
    }
    return out;
  }

  /// Full coefficient array of the symmetric map.
  MultilinearMap<Scalar> to_multilinear() const {
    MultilinearMap<Scalar> m(degree_, n_, codomain_dim());
    for (std::size_t f = 0; f < layout_->full_size; ++f)
      m.data.col(static_cast<Eigen::Index>(f)) = coeffs_.col(static_cast<Eigen::Index>(layout_->full_to_rank[f]));
    return m;
  }

  /// (v_1..v_j) -> T(M v_1, ..., M v_j) for an n x n' matrix M.
  SymmetricTensor pulled_back(const Matrix& m) const {
    SymmetricTensor out(degree_, static_cast<int>(m.cols()), codomain_dim());
    std::vector<Vector> args(static_cast<std::size_t>(degree_));
    for (std::size_t r = 0; r < out.size(); ++r) {
      const auto& idx = out.multi_index(r);
      for (int s = 0; s < degree_; ++s) args[static_cast<std::size_t>(s)] = m.col(idx[static_cast<std::size_t>(s)]);
      out.coeffs_.col(static_cast<Eigen::Index>(r)) = (*this)(args);
    }
    return out;
  }

  friend bool operator==(const SymmetricTensor& a, const SymmetricTensor& b) {
    return a.degree_ == b.degree_ && a.n_ == b.n_ && a.coeffs_ == b.coeffs_;
  }

 private:
  int degree_;
  int n_;
  const detail::TensorLayout* layout_;
  Matrix coeffs_;
};

/// Average over all argument permutations.
///
/// Each coefficient is computed as ref + sum_perm (T_perm - ref) / j! with
/// ref = T at the sorted tuple, so an already-symmetric input is returned
/// exactly and symmetrize is an exact projection.
template <typename Scalar>
SymmetricTensor<Scalar> symmetrize(const MultilinearMap<Scalar>& t) {
  if (t.degree > kMaxJetOrder) throw UnsupportedOrder("symmetrize supports degree <= 6");
  SymmetricTensor<Scalar> out(t.degree, t.domain_dim, t.codomain_dim());
  const auto& lay = detail::layout(t.degree, t.domain_dim);
  Scalar factorial(1);
  for (int i = 2; i <= t.degree; ++i) factorial *= Scalar(i);
  std::vector<int> perm(static_cast<std::size_t>(t.degree));
  std::vector<int> tuple(perm.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto& idx = out.multi_index(r);
    const auto ref = t.data.col(static_cast<Eigen::Index>(lay.full_index(idx))).eval();
    auto acc = decltype(ref)::Zero(ref.size()).eval();
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (std::size_t s = 0; s < perm.size(); ++s) tuple[s] = idx[static_cast<std::size_t>(perm[s])];
      acc += t.data.col(static_cast<Eigen::Index>(lay.full_index(tuple))) - ref;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.coefficients().col(static_cast<Eigen::Index>(r)) = ref + acc / factorial;
  }
  return out;
}

}  // namespace diffeoflow
