#pragma once

#include <Eigen/Core>

#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

namespace diffeoflow {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxDerivativeOrder = 6;

/// Point of R^n, n <= 3, stored inline.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
/// n x n matrix, n <= 3, stored inline.
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Derivative multi-index; unused trailing axes are zero.
using MultiIndex = std::array<int, kMaxDim>;

inline int total_order(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

/// Decay classes ordered by inclusion: C_c < S < H^inf < B.
enum class DecayClass { CompactSupport = 0, Schwartz = 1, SobolevInfinity = 2, BoundedAll = 3 };

/// True when every function of class `a` also belongs to class `b`.
inline bool contained_in(DecayClass a, DecayClass b) {
  return static_cast<int>(a) <= static_cast<int>(b);
}

/// The larger (weaker) of two classes.
inline DecayClass weaker(DecayClass a, DecayClass b) {
  return contained_in(a, b) ? b : a;
}

std::string_view to_string(DecayClass c);
std::optional<DecayClass> parse_decay_class(std::string_view name);

/// Behaviour of resampling outside [-L, L]^n.
enum class Extrapolation { Zero, Clamp };

/// Fields of class B keep their boundary value; decaying classes are zero outside.
inline Extrapolation extrapolation_for(DecayClass c) {
  return c == DecayClass::BoundedAll ? Extrapolation::Clamp : Extrapolation::Zero;
}

}  // namespace diffeoflow
