#include "sketchkrr/satisfiability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sketchkrr/errors.hpp"

namespace sketchkrr {

SatisfiabilityReport check_k_satisfiable(const Matrix& sketch, const KernelMatrix& k,
                                         const ComplexityProfile& profile, double c_threshold) {
  if (sketch.rows() < 1) throw DomainError("check_k_satisfiable: sketch has no rows");
  if (sketch.cols() != k.n()) {
    std::ostringstream os;
    os << "check_k_satisfiable: sketch has " << sketch.cols() << " columns, kernel n=" << k.n();
    throw DomainError(os.str());
  }
  if (!(c_threshold > 0.0)) throw DomainError("check_k_satisfiable: c_threshold must be positive");
  const Eigen::Index n = k.n();
  const Eigen::Index d = profile.d_n;
  if (d < 0 || d > n) throw DomainError("check_k_satisfiable: d_n out of range");

  const EigenPairs& eig = k.decompose();
  SatisfiabilityReport r;
  r.delta_n = profile.delta_n;
  r.c_threshold = c_threshold;
  r.d_n = d;

  if (d > 0) {
    const Matrix su1 = sketch * eig.vectors.leftCols(d);
    Matrix gram = su1.transpose() * su1;
    gram.diagonal().array() -= 1.0;
    r.lhs_isometry = operator_norm(gram);
  }
  if (d < n) {
    const Vector root = eig.values.tail(n - d).cwiseSqrt();
    const Matrix tail = (sketch * eig.vectors.rightCols(n - d)) * root.asDiagonal();
    r.lhs_tail = operator_norm(tail);
  }
  r.pass = r.lhs_isometry <= 0.5 && r.lhs_tail <= c_threshold * profile.delta_n;
  return r;
}

SatisfiabilityReport check_k_satisfiable(const SketchOperator& sketch, const KernelMatrix& k,
                                         const ComplexityProfile& profile, double c_threshold) {
  return check_k_satisfiable(sketch.materialize(), k, profile, c_threshold);
}

Eigen::Index recommended_sketch_dim(SketchKind kind, Eigen::Index d_n, double n, double c) {
  if (d_n < 1) throw DomainError("recommended_sketch_dim: d_n must be >= 1");
  if (!(c > 0.0)) throw DomainError("recommended_sketch_dim: c must be positive");
  double m = c * static_cast<double>(d_n);
  if (kind == SketchKind::kRos) m *= std::pow(std::log(n), 4);
  // Guard against 1 + 1e-16 style round-up from the log factor.
  const double rounded = std::ceil(m - 1e-9 * std::max(1.0, m));
  const double upper = std::floor(n);
  return static_cast<Eigen::Index>(std::clamp(rounded, 1.0, std::max(1.0, upper)));
}

Eigen::Index recommended_sketch_dim(SketchKind kind, Eigen::Index d_n, Eigen::Index n, double c) {
  return recommended_sketch_dim(kind, d_n, static_cast<double>(n), c);
}

}  // namespace sketchkrr
