#pragma once

#include "diffeoflow/field.hpp"

#include <string>
#include <vector>

namespace diffeoflow {

/// max over nodes of |d^alpha f|.
double sup_seminorm(const ScalarField& field, const MultiIndex& alpha);

/// Result of a weighted sup seminorm, with where the maximum was attained.
struct WeightedSup {
  double value = 0.0;
  double argmax_radius = 0.0;
  /// Maximum attained in the outer half of the box (|x| >= L/2): the weighted
  /// quantity is still growing at the truncation edge.
  bool non_decaying = false;
};

/// max over nodes of (1+|x|^2)^m |d^alpha f|.
double weighted_seminorm(const ScalarField& field, const MultiIndex& alpha, int m);
WeightedSup weighted_seminorm_probe(const ScalarField& field, const MultiIndex& alpha, int m);

/// Trapezoid-rule L^2 norm of d^alpha f (boundary nodes carry half weight per axis).
double sobolev_seminorm(const ScalarField& field, const MultiIndex& alpha);

enum class SeminormKind { Sup, WeightedSup, SobolevL2 };
std::string_view to_string(SeminormKind kind);

struct SeminormEntry {
  SeminormKind kind;
  int component = 0;
  MultiIndex alpha{};
  int weight = 0;
  double value = 0.0;
  bool non_decaying = false;
};

/// Power-law tail fit of annulus sups of |d^alpha f|.
struct DecayFit {
  int component = 0;
  MultiIndex alpha{};
  /// Local power-law exponent over the outermost annulus: -log(s2/s1)/log(3/2),
  /// s1 and s2 the sups over L/2 <= |x| <= 3L/4 and 3L/4 <= |x| <= L (inf when s2 = 0).
  double exponent = 0.0;
  std::vector<double> annulus_sups;
};

struct SeminormReport {
  std::vector<SeminormEntry> entries;
  DecayClass inferred_class = DecayClass::BoundedAll;
  std::vector<DecayFit> decay_rates;
  /// Outer radii 2^k of the dyadic annuli {2^(k-1) <= |x| <= 2^k}.
  std::vector<double> annulus_radii;
  int max_order = 0;
  int max_weight = 0;
  std::string rationale;
};

struct ClassifyOptions {
  /// Schwartz requires every fitted exponent >= max_weight + schwartz_margin.
  double schwartz_margin = 1.0;
  /// SobolevInfinity requires every Sobolev seminorm <= this.
  double sobolev_threshold = 1e6;
  /// Samples with |f| <= zero_tolerance count as vanishing for compact support.
  double zero_tolerance = 0.0;
};

/// Classifies a field into the smallest decay class consistent with finitely
/// many seminorm checks (|alpha| <= max_order, weights m <= max_weight).
///
/// Decision order: CompactSupport if the samples vanish on the outermost
/// annulus and beyond; Schwartz if all tail exponents reach max_weight + margin
/// and no weighted sup peaks in the outer half of the box; SobolevInfinity if
/// every tail exponent exceeds n/2 (L^2-integrable tail), annulus sups shrink
/// outward and Sobolev seminorms stay below threshold; otherwise BoundedAll.
/// Throws InsufficientAnnuli when fewer than 4 dyadic annuli fit in the box.
SeminormReport classify_decay(const ScalarField& field, int max_order, int max_weight,
                              const ClassifyOptions& options = {});

/// Component-wise classification; the inferred class is the weakest component class.
SeminormReport classify_decay(const DisplacementField& field, int max_order, int max_weight,
                              const ClassifyOptions& options = {});

}  // namespace diffeoflow
