#pragma once

#include <optional>
#include <vector>

#include "sketchkrr/kernel.hpp"
#include "sketchkrr/linalg.hpp"
#include "sketchkrr/sketch.hpp"

namespace sketchkrr {

/// Relative eigenvalue cutoff applied to SKSᵀ: directions below it are dropped
/// from the sketched program and the fit is flagged rank-deficient.
inline constexpr double kPinvRelTol = 1e-12;

enum class FitVariant { kExact, kSketched, kNystromDual };

/// Output of a KRR solve.
///
/// The estimate is f(·) = n^{-1/2} Σ_i w_i k(·, x_i) with expansion weights
/// w = ω (exact) or w = Sᵀα (sketched); `fitted` holds f at the training
/// points, which equals sqrt(n)·K·w under the 1/n kernel-matrix scaling.
struct FitResult {
  FitVariant variant = FitVariant::kExact;
  Vector coefficients;
  std::optional<SketchOperator> sketch;
  double lambda_n = 0.0;
  Vector fitted;
  bool rank_deficient = false;
  Eigen::Index effective_rank = 0;

  Vector expansion_weights() const;
};

struct RegressionSample {
  DesignPoints pts;
  Vector y;
  std::optional<Vector> fstar;
  double sigma = 1.0;
};

/// ω† = (K + 2λI)⁻¹ y/sqrt(n), the minimizer of
/// ½ωᵀK²ω − ωᵀKy/sqrt(n) + λωᵀKω.
FitResult solve_krr(const KernelMatrix& k, const Vector& y, double lambda_n);

/// α̂ solving (SK²Sᵀ + 2λSKSᵀ)α = SKy/sqrt(n). When SKSᵀ is singular the
/// solution restricted to its range is returned and the fit is flagged.
FitResult solve_sketched_krr(const KernelMatrix& k, const Vector& y, const SketchOperator& s,
                             double lambda_n);

/// Sketched program with y replaced by the noiseless values z*.
FitResult solve_zero_noise(const KernelMatrix& k, const Vector& z_star, const SketchOperator& s,
                           double lambda_n);

struct ErrorDecomposition {
  double approx_err = 0.0;  // ‖f† − f*‖²_n
  double est_err = 0.0;     // ‖f† − f̂‖²_n
  double total_err = 0.0;   // ‖f̂ − f*‖²_n
};

ErrorDecomposition error_decomposition(const KernelMatrix& k, const Vector& z_star, const Vector& y,
                                       const SketchOperator& s, double lambda_n);

/// Evaluates the fitted kernel expansion at arbitrary points.
Vector predict(const FitResult& fit, const KernelSpec& spec, const DesignPoints& train,
               const std::vector<double>& query);

/// (1/n) Σ (a_i − b_i)².
double empirical_error(const Vector& fhat_vals, const Vector& fstar_vals);

struct DualSolution {
  Vector xi;
  Vector omega;
};

/// Maximizes −(n/4λ)ξᵀKξ + ξᵀy − (n/2)ξᵀξ and recovers ω = (sqrt(n)/2λ)ξ.
DualSolution solve_dual_krr(const KernelMatrix& k, const Vector& y, double lambda_n);

/// Dual program with K replaced by K̃ = KSᵀ(SKSᵀ)⁺SK; with a SubSample sketch
/// this is the Nyström approximation. Recovers α = (sqrt(n)/2λ)(SKSᵀ)⁺SKξ.
FitResult solve_nystrom_dual(const KernelMatrix& k, const Vector& y, const SketchOperator& s,
                             double lambda_n);

/// Objectives, used to certify solutions by perturbation.
double krr_objective(const KernelMatrix& k, const Vector& y, const Vector& omega, double lambda_n);
double sketched_objective(const KernelMatrix& k, const Vector& y, const SketchOperator& s,
                          const Vector& alpha, double lambda_n);
double zero_noise_objective(const KernelMatrix& k, const Vector& z_star, const SketchOperator& s,
                            const Vector& alpha, double lambda_n);

}  // namespace sketchkrr
