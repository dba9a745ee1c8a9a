#include "diffeoflow/matrix_bounds.hpp"

#include "diffeoflow/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

namespace diffeoflow {

InverseNormBound inverse_norm_bound(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionMismatch("matrix must be square");
  const double det = a.determinant();
  if (det == 0.0 || !std::isfinite(det)) throw SingularMatrix("matrix is singular");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  InverseNormBound out;
  out.inverse_norm = 1.0 / s[s.size() - 1];
  out.bound = std::pow(s[0], static_cast<double>(a.rows() - 1)) / std::abs(det);
  out.holds = out.inverse_norm <= out.bound + 1e-12;
  return out;
}

}  // namespace diffeoflow
