#pragma once

#include <Eigen/Dense>

namespace sketchkrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest singular value. Empty matrices have norm 0.
double operator_norm(const Matrix& a);

}  // namespace sketchkrr
