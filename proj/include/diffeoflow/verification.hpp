#pragma once

#include "diffeoflow/json_text.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diffeoflow {

struct VerifyConfig {
  std::uint64_t seed = 20240611;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// One-line human summary of the decisive measurements.
  std::string summary;
  Json metrics;
};

/// 1: associativity and inversion on 20 seeded Schwartz diffeos (1-D, L=8, N=513).
CriterionResult verify_group_axioms(const VerifyConfig& config);
/// 2: compose_jets against finite differences of sampled compositions (orders <= 4,
/// 1-D and 2-D) and against the exp(sin x) series product.
CriterionResult verify_faa_di_bruno(const VerifyConfig& config);
/// 3: jet inversion against the series-reversion oracle and the two-sided identity property.
CriterionResult verify_jet_inversion(const VerifyConfig& config);
/// 4: ||A^-1|| <= ||A||^(n-1)/|det A| on 1000 seeded matrices, equality on diag(2,1).
CriterionResult verify_inverse_norm(const VerifyConfig& config);
/// 5: RK4 order against a dense-step oracle and the flow (semigroup) property.
CriterionResult verify_flow(const VerifyConfig& config);
/// 6: sup bound and Bellman-Gronwall bound at every snapshot of the battery.
CriterionResult verify_inequalities(const VerifyConfig& config);
/// 7: Schwartz and H^inf class preservation along flows, with L -> 2L stability.
CriterionResult verify_class_preservation(const VerifyConfig& config);
/// 8: conjugation of Schwartz and H^inf inner diffeos by B-class outers.
CriterionResult verify_normality(const VerifyConfig& config);
/// 9: right logarithmic derivative convergence under simultaneous dt and h halving.
CriterionResult verify_log_derivative(const VerifyConfig& config);

/// Runs the listed criteria (all of 1..9 when empty) in order.
std::vector<CriterionResult> run_acceptance(const VerifyConfig& config, const std::vector<int>& which = {});

Json to_json(const CriterionResult& result);

}  // namespace diffeoflow
