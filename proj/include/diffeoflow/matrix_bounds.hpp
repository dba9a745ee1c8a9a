#pragma once

#include <Eigen/Core>

namespace diffeoflow {

struct InverseNormBound {
  /// ||A||^(n-1) / |det A| in the spectral norm.
  double bound = 0.0;
  /// ||A^-1|| in the spectral norm.
  double inverse_norm = 0.0;
  bool holds = false;
};

/// Checks ||A^-1|| <= ||A||^(n-1) / |det A| (+1e-12). Throws SingularMatrix if det A == 0.
InverseNormBound inverse_norm_bound(const Eigen::MatrixXd& a);

}  // namespace diffeoflow
