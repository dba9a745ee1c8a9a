#pragma once

#include "diffeoflow/descriptor.hpp"
#include "diffeoflow/diffeo.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace diffeoflow {

/// X(t, x) given by one descriptor per component, tagged with a decay class.
class TimeDependentVectorField {
 public:
  TimeDependentVectorField(VectorDescriptor descriptor, DecayClass decay_class, double t_final = 1.0);
  static TimeDependentVectorField parse(const std::string& text, int dim, DecayClass decay_class,
                                        double t_final = 1.0);

  const VectorDescriptor& descriptor() const { return descriptor_; }
  DecayClass decay_class() const { return decay_class_; }
  double t_final() const { return t_final_; }
  int dim() const { return descriptor_.dim(); }

  double scale() const { return scale_; }
  /// s X, same class.
  TimeDependentVectorField scaled(double s) const;

  Point operator()(double t, const Point& x) const { return scale_ * descriptor_(x, t); }
  /// d_x X(t, x).
  SmallMatrix jacobian(double t, const Point& x) const { return scale_ * descriptor_.jacobian(x, t); }
  /// X(t, .) sampled on a grid.
  DisplacementField slice(const Grid& grid, double t) const { return scale_ * sample(descriptor_, grid, t); }

 private:
  VectorDescriptor descriptor_;
  DecayClass decay_class_;
  double t_final_;
  double scale_ = 1.0;
};

struct StepDiagnostics {
  double t = 0.0;
  double sup_displacement = 0.0;
  double sup_jacobian = 0.0;
  double min_det = 1.0;
};

/// Snapshots f(t_k, .) of Evol(X)(t, x) = x + f(t, x) at every step.
struct FlowResult {
  Grid grid;
  DecayClass decay_class = DecayClass::BoundedAll;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<DisplacementField> snapshots;
  std::vector<StepDiagnostics> diagnostics;

  Diffeo diffeo(std::size_t k) const { return Diffeo(snapshots[k], decay_class); }
};

struct EvolveOptions {
  double t_start = 0.0;
  /// Trajectories must stay in [-factor L, factor L]^n.
  double domain_factor = 1.1;
  bool diagnostics = true;
};

/// Classical RK4 on the displacement ODE f' = X(t, x + f), f(t_start) = 0,
/// from t_start to t_final with fixed dt; (t_final - t_start) / dt must be an
/// integer. Throws FlowFailure when a trajectory leaves the enlarged box or
/// a value is not finite.
FlowResult evolve(const TimeDependentVectorField& x_field, const Grid& grid, double t_final, double dt,
                  const EvolveOptions& options = {});

/// A bound curve against a measured curve over the snapshot times.
struct InequalityReport {
  std::vector<double> times;
  std::vector<double> bound;
  std::vector<double> measured;
  std::size_t violations = 0;
  bool holds = true;
  /// Smallest bound - measured over the snapshots.
  double min_margin = 0.0;
};

/// |f(t, x)| <= int_0^t |X(s, x + f(s, x))| ds, node by node, with the
/// integral taken by the RK4 stage quadrature along the stored trajectories.
/// bound(t) is the node sup of the right side; holds iff every node satisfies
/// the inequality within 1e-8.
InequalityReport displacement_sup_bound(const FlowResult& result, const TimeDependentVectorField& x_field);

struct GronwallReport {
  InequalityReport inequality;
  /// alpha(t) = sup_x int_0^t |d_x X(s, x + f(s, x))| ds.
  std::vector<double> alpha;
  /// beta(s) = sup_x |d_x X(s, x + f(s, x))|.
  std::vector<double> beta;
};

/// predicted(t) = alpha(t) + int_0^t alpha beta exp(int_s^t beta) ds, with
/// alpha and beta piecewise linear between snapshots and the trapezoid rule on
/// 16 sub-intervals per snapshot interval;
/// measured(t) = sup_x |d_x f(t, x)| by stencil; holds iff
/// measured <= predicted (1 + 1e-6) + 1e-8 at every snapshot. Norms are spectral.
GronwallReport gronwall_bound(const FlowResult& result, const TimeDependentVectorField& x_field);

struct SobolevTrackingOptions {
  int p_max = 2;
  /// Re-run the flow on the grid with doubled half width and compare norms.
  bool check_enlargement = true;
  double enlargement_tolerance = 1e-6;
  /// Nodes with max |x_k| >= edge_fraction L form the edge shell.
  double edge_fraction = 0.875;
  double edge_tolerance = 1e-6;
  /// Weighted sups (m <= max_weight) joining the enlargement comparison.
  int max_weight = 4;
};

struct SobolevTrackingReport {
  std::vector<MultiIndex> alphas;
  /// norms[k][c * alphas.size() + a]: component c, multi-index a, snapshot k.
  std::vector<std::vector<double>> norms;
  bool finite = true;
  bool enlargement_checked = false;
  double enlargement_defect = 0.0;
  double weighted_enlargement_defect = 0.0;
  bool enlargement_stable = true;
  bool edge_checked = false;
  double edge_sup = 0.0;
  bool edge_decays = true;
  bool ok() const { return finite && enlargement_stable && edge_decays; }
};

/// L^2 norms of d^alpha f(t, .) for |alpha| <= p_max at every snapshot. For
/// Schwartz and H^inf fields also checks stability under L -> 2L (final
/// snapshot) and that d_x f(T, .) is below edge_tolerance on the edge shell.
SobolevTrackingReport sobolev_tracking(const FlowResult& result, const TimeDependentVectorField& x_field,
                                       const SobolevTrackingOptions& options = {});

struct LogDerivativeSample {
  double t;
  DisplacementField value;
};

/// D(t) = (d_t f(t)) o g(t)^-1 at interior snapshots, with d_t by the
/// five-point fourth-order difference and g(t)^-1 from invert.
/// Throws TooFewSnapshots below five snapshots.
/// `at_times` restricts the output to those snapshot times (empty: all interior ones).
std::vector<LogDerivativeSample> right_log_derivative(const FlowResult& result, double invert_tolerance = 1e-13,
                                                      const std::vector<double>& at_times = {});

/// Largest node-wise |D(t) - X(t, .)| over the samples.
double log_derivative_defect(const std::vector<LogDerivativeSample>& samples, const TimeDependentVectorField& x_field);

struct SmoothnessReport {
  std::vector<double> steps;
  /// first[i][p]: central first difference in s at probe p with steps[i].
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  /// Observed convergence orders of the first difference between successive halvings.
  std::vector<double> first_orders;
  /// max |second(step_i) - second(step_{i+1})| for the last halving.
  double second_change = 0.0;
  bool first_converges = true;
  bool second_stable = true;
};

/// Evolves X_s for s = s0 and s0 +- step over the given steps and checks that
/// the s-differences of f(T, .) at the probe nodes converge: first
/// differences at order >= 1.5 (or unchanged to 1e-12), second differences
/// changing by at most 1e-4 over the last halving.
SmoothnessReport evol_smoothness_probe(const std::function<TimeDependentVectorField(double)>& family, double s0,
                                       const std::vector<double>& steps, const Grid& grid, double t_final, double dt,
                                       const std::vector<std::size_t>& probe_nodes);

/// CSV time series: t, sup_f, sup_df, min_det, sup_bound, sup_measured,
/// gronwall_predicted, gronwall_measured, sobolev_p<j> (root-sum-square per order).
void write_flow_csv(std::ostream& out, const FlowResult& result, const InequalityReport& sup_bound,
                    const GronwallReport& gronwall, const SobolevTrackingReport& sobolev);

}  // namespace diffeoflow
