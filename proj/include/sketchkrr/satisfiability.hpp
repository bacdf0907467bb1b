#pragma once

#include "sketchkrr/complexity.hpp"
#include "sketchkrr/kernel.hpp"
#include "sketchkrr/sketch.hpp"

namespace sketchkrr {

inline constexpr double kDefaultSatisfiabilityC = 4.0;

/// Raw norms of the two K-satisfiability conditions and the verdict.
struct SatisfiabilityReport {
  double lhs_isometry = 0.0;  // ‖(SU₁)ᵀSU₁ − I‖_op
  double lhs_tail = 0.0;      // ‖SU₂D₂^{1/2}‖_op
  double delta_n = 0.0;
  double c_threshold = kDefaultSatisfiabilityC;
  Eigen::Index d_n = 0;
  bool pass = false;
};

/// U₁ holds the leading d_n eigenvectors of K, U₂ and D₂ the trailing ones.
/// Passes when lhs_isometry ≤ 1/2 and lhs_tail ≤ c·δ_n.
SatisfiabilityReport check_k_satisfiable(const Matrix& sketch, const KernelMatrix& k,
                                         const ComplexityProfile& profile,
                                         double c_threshold = kDefaultSatisfiabilityC);
SatisfiabilityReport check_k_satisfiable(const SketchOperator& sketch, const KernelMatrix& k,
                                         const ComplexityProfile& profile,
                                         double c_threshold = kDefaultSatisfiabilityC);

/// Gaussian → ceil(c·d_n); ROS → ceil(c·d_n·(ln n)⁴); clamped to [1, n].
/// SubSample has no guarantee of its own and uses the Gaussian rule.
Eigen::Index recommended_sketch_dim(SketchKind kind, Eigen::Index d_n, Eigen::Index n, double c);
/// Real-valued n, so the log factor can be probed at non-integer sizes.
Eigen::Index recommended_sketch_dim(SketchKind kind, Eigen::Index d_n, double n, double c);

}  // namespace sketchkrr
