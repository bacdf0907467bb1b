#pragma once

#include <vector>

#include "sketchkrr/linalg.hpp"

namespace sketchkrr {

/// Noise level, critical radius and statistical dimension of a kernel matrix.
struct ComplexityProfile {
  double sigma = 1.0;
  double delta_n = 0.0;
  double delta_n_sq = 0.0;
  Eigen::Index d_n = 0;
  Eigen::Index n = 0;
};

/// R(δ) = sqrt((1/n) Σ_j min(δ², μ_j)).
double kernel_complexity(const Vector& mu_hat, Eigen::Index n, double delta);

/// Smallest δ > 0 with R(δ)/δ ≤ δ/σ. Zero when every eigenvalue is zero.
///
/// The gap g(δ) = R(δ)/δ − δ/σ is strictly decreasing wherever some μ_j > 0,
/// so the root is bracketed by doubling up from min(σ, 1e-3) (or halving down
/// when that start already satisfies the inequality) and refined by bisection
/// to a relative width of 1e-10.
double critical_radius(const Vector& mu_hat, Eigen::Index n, double sigma);

/// #{j : μ_j > δ_n²}.
Eigen::Index statistical_dimension(const Vector& mu_hat, double delta_n);

/// Convenience: critical radius and statistical dimension of a spectrum.
ComplexityProfile make_profile(const Vector& mu_hat, double sigma);

enum class SpectrumKind { kPolynomial, kGaussian, kSobolev1 };

/// Population eigenvalue model of one of the built-in kernels.
struct PopulationSpectrum {
  SpectrumKind kind = SpectrumKind::kSobolev1;
  int degree = 1;
  double bandwidth = 1.0;

  static PopulationSpectrum polynomial(int degree) { return {SpectrumKind::kPolynomial, degree, 1.0}; }
  static PopulationSpectrum gaussian(double h) { return {SpectrumKind::kGaussian, 1, h}; }
  static PopulationSpectrum sobolev1() { return {SpectrumKind::kSobolev1, 1, 1.0}; }
};

/// μ_1..μ_{j_max}: polynomial → D+1 unit eigenvalues then zeros;
/// gaussian → exp(−π h² j²); sobolev1 → (2 / ((2j − 1)π))².
Vector population_eigenvalues(const PopulationSpectrum& spec, Eigen::Index j_max);

/// Least-squares slope of log δ_n² against log n, where δ_n is computed from
/// the population spectrum truncated at j_max = n.
double rate_exponent_check(const PopulationSpectrum& spec, const std::vector<Eigen::Index>& n_grid,
                           double sigma);

}  // namespace sketchkrr
