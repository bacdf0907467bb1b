#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sketchkrr/linalg.hpp"

namespace sketchkrr {

enum class SketchKind { kGaussian, kRos, kSubSample };

std::string to_string(SketchKind kind);
/// Accepts "gaussian", "ros", "subsample" (also "nystrom" for subsample).
SketchKind parse_sketch_kind(const std::string& text);

/// An m×n random sketch matrix S.
///
///  - Gaussian: dense i.i.d. N(0, 1/m) entries, so E[SᵀS] = I.
///  - ROS: rows sqrt(n_pad/m)·p_iᵀ H R restricted to the first n columns, where
///    H is the orthonormal Hadamard matrix of order n_pad (next power of two),
///    R a Rademacher diagonal and p_i distinct rows drawn without replacement.
///  - SubSample: rows sqrt(n/m)·e_{p_i}ᵀ with distinct p_i.
///
/// Immutable after construction; applying it is thread-safe.
class SketchOperator {
 public:
  SketchKind kind() const { return kind_; }
  Eigen::Index m() const { return m_; }
  Eigen::Index n() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  /// Padded length used by the Hadamard transform (ROS only; n otherwise).
  Eigen::Index padded_n() const { return n_pad_; }
  const std::vector<Eigen::Index>& indices() const { return indices_; }
  const std::vector<double>& signs() const { return signs_; }
  const Matrix& dense() const { return dense_; }
  double scale() const { return scale_; }

  /// S·M for an n×k matrix M.
  Matrix apply(const Matrix& mat) const;
  Vector apply(const Vector& v) const;
  /// Sᵀ·A for an m×k matrix A.
  Matrix apply_transpose(const Matrix& mat) const;
  Vector apply_transpose(const Vector& v) const;

  /// Dense m×n form.
  Matrix materialize() const;

  friend SketchOperator draw_sketch(SketchKind kind, Eigen::Index m, Eigen::Index n,
                                    std::uint64_t seed);
  /// SubSample sketch with explicit (0-based) row indices and scale sqrt(n/m).
  static SketchOperator subsample_with_indices(Eigen::Index n, std::vector<Eigen::Index> indices);
  /// S = I_n, the identity permutation as a SubSample sketch with m = n.
  static SketchOperator identity(Eigen::Index n);

 private:
  SketchOperator(SketchKind kind, Eigen::Index m, Eigen::Index n, std::uint64_t seed)
      : kind_(kind), m_(m), n_(n), n_pad_(n), seed_(seed) {}

  Vector apply_column(const Eigen::Ref<const Vector>& col) const;
  Vector apply_transpose_column(const Eigen::Ref<const Vector>& col) const;

  SketchKind kind_;
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index n_pad_;
  std::uint64_t seed_;
  double scale_ = 1.0;
  std::vector<Eigen::Index> indices_;
  std::vector<double> signs_;
  Matrix dense_;
};

/// Deterministic in (kind, m, n, seed). Requires 1 ≤ m ≤ n.
SketchOperator draw_sketch(SketchKind kind, Eigen::Index m, Eigen::Index n, std::uint64_t seed);

bool is_power_of_two(std::size_t n);

/// In-place fast Walsh–Hadamard transform (Sylvester ordering). With
/// `normalized` the result is H·v for the orthonormal H (entries ±1/sqrt(len)).
void fwht_inplace(std::span<double> v, bool normalized);
std::vector<double> fwht(std::vector<double> v, bool normalized);

}  // namespace sketchkrr
