#pragma once

#include "diffeoflow/field.hpp"
#include "diffeoflow/interpolation.hpp"
#include "diffeoflow/seminorm.hpp"

#include <optional>
#include <string>

namespace diffeoflow {

/// Diffeomorphism x -> x + g(x) with its decay class and the node minimum
/// epsilon of det(I + dg).
class Diffeo {
 public:
  /// Validates epsilon > 0; throws NonDiffeomorphic otherwise. The class is
  /// taken as claimed (see membership_check for a classification).
  Diffeo(DisplacementField displacement, DecayClass decay_class);

  static Diffeo identity(const Grid& grid, DecayClass decay_class = DecayClass::CompactSupport);

  const DisplacementField& displacement() const { return displacement_; }
  DecayClass decay_class() const { return decay_class_; }
  double epsilon() const { return epsilon_; }
  const Grid& grid() const { return displacement_.grid(); }
  int dim() const { return displacement_.dim(); }
  Extrapolation extrapolation() const { return extrapolation_for(decay_class_); }

 private:
  DisplacementField displacement_;
  DecayClass decay_class_;
  double epsilon_;
};

/// Node minimum of det(I + dg) with stencil derivatives.
double min_jacobian_determinant(const DisplacementField& g);

/// Default finite caps for classification inside the group operations.
inline constexpr int kGroupOrderCap = 2;
inline constexpr int kGroupWeightCap = 4;
/// Minimum accepted det(I + dg) for membership (every class).
inline constexpr double kMinDeterminant = 1e-6;

struct MembershipResult {
  bool ok = false;
  double epsilon = 0.0;
  SeminormReport report;
  std::string reason;
};

/// ok iff min det(I + dg) >= 1e-6 and classify_decay(g) lies in `decay_class`.
/// Never throws for a valid grid; classification errors give ok = false.
MembershipResult membership_check(const DisplacementField& g, DecayClass decay_class,
                                  int max_order = kGroupOrderCap, int max_weight = kGroupWeightCap);

/// phi o psi = Id + g + f(Id + g) for phi = Id + f, psi = Id + g.
///
/// f is resampled with the extrapolation rule of phi's class. Throws
/// UnderResolved if some x + g(x) leaves the box by more than 0.1 L and
/// NonDiffeomorphic if the composed epsilon is not positive.
Diffeo compose(const Diffeo& phi, const Diffeo& psi);

struct InvertOptions {
  /// Residual tolerance; <= 0 means 1e-8 (1 + L).
  double tolerance = 0.0;
  int max_iterations = 200;
  /// Lipschitz threshold for the fixed-point phase.
  double contraction_limit = 0.9;
};

struct InversionReport {
  /// max over nodes of |f(y) + g(y + f(y))|, g interpolated.
  double residual = 0.0;
  int fixed_point_iterations = 0;
  bool newton_used = false;
  double lipschitz = 0.0;
};

/// Inverse Id + f of phi = Id + g, solving f(y) = -g(y + f(y)) at the nodes.
/// Throws InversionFailure naming the worst node if the residual stays above tolerance.
Diffeo invert(const Diffeo& phi, const InvertOptions& options = {}, InversionReport* report = nullptr);

struct ConjugationReport {
  /// Classification of the result on [-classified_half_width, ...]^n, the
  /// sub-box whose evaluation points x + g, x + g + s(x + g) and the inverse
  /// lookups all stay in the sampled box (the full box if that is too small).
  SeminormReport classification;
  double classified_half_width = 0.0;
  /// classification lies in the inner class.
  bool normal = false;
  /// s(x + g(x)).
  std::optional<DisplacementField> pulled_inner;
  /// f(x + g + s(x + g)) - f(x + g).
  std::optional<DisplacementField> remainder;
  /// max |remainder - int_0^1 df(x + g + t s)(s) dt| (Gauss-Legendre quadrature).
  double remainder_defect = 0.0;
};

/// outer^-1 o inner o outer, computed as s(x+g) + [f(x+g+s(x+g)) - f(x+g)]
/// with outer = Id + g, outer^-1 = Id + f, inner = Id + s. The result carries
/// the inner class; the report states whether its classification agrees.
Diffeo conjugate(const Diffeo& outer, const Diffeo& inner, ConjugationReport* report = nullptr,
                 const InvertOptions& options = {});

/// h o phi.
ScalarField pullback(const Diffeo& phi, const ScalarField& h, Extrapolation mode = Extrapolation::Zero);

/// (Ad_phi X)(y) = (I + dg)(x) X(x) with x = phi^-1(y); dg by stencil, resampled at x.
DisplacementField adjoint_action(const Diffeo& phi, const DisplacementField& x_field,
                                 Extrapolation mode = Extrapolation::Zero,
                                 const InvertOptions& options = {});

/// Writes the displacement as dff-v1 to `path` and {decay_class, epsilon} to `path`.meta.json.
void write_diffeo(const std::string& path, const Diffeo& phi);
/// Reads a displacement file; the class comes from the sidecar if present,
/// else the header class_hint, else BoundedAll.
Diffeo read_diffeo(const std::string& path);

}  // namespace diffeoflow
