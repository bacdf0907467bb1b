#include "sketchkrr/linalg.hpp"


namespace sketchkrr {

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace sketchkrr
