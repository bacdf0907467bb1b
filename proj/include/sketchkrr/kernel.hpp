#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sketchkrr/linalg.hpp"

namespace sketchkrr {

enum class KernelKind { kPolynomial, kGaussian, kSobolev1 };

/// A scalar PSD kernel: (1 + uv)^D, exp(-(u-v)^2 / 2h^2) or min(u, v).
class KernelSpec {
 public:
  static KernelSpec polynomial(int degree);
  static KernelSpec gaussian(double bandwidth);
  static KernelSpec sobolev1();

  KernelKind kind() const { return kind_; }
  int degree() const { return degree_; }
  double bandwidth() const { return bandwidth_; }

  double operator()(double u, double v) const;
  std::string name() const;

 private:
  KernelSpec(KernelKind kind, int degree, double bandwidth)
      : kind_(kind), degree_(degree), bandwidth_(bandwidth) {}

  KernelKind kind_;
  int degree_ = 0;
  double bandwidth_ = 0.0;
};

/// Throws DomainError on non-finite arguments.
double kernel_eval(const KernelSpec& spec, double u, double v);

/// Scalar covariates x_1..x_n.
struct DesignPoints {
  std::vector<double> x;

  DesignPoints() = default;
  explicit DesignPoints(std::vector<double> values) : x(std::move(values)) {}
  Eigen::Index size() const { return static_cast<Eigen::Index>(x.size()); }
};

/// Symmetric eigendecomposition with eigenvalues sorted descending.
struct EigenPairs {
  Matrix vectors;  // columns are eigenvectors
  Vector values;   // nonincreasing, clamped at zero
};

/// Eigenvalues within -1e-10·max of zero are clamped; anything more negative
/// means the matrix is not PSD at working precision and raises NumericalError.
EigenPairs eigendecompose(const Matrix& k);

/// Eigenvalues only, same ordering and clamping rules.
Vector eigenvalues_descending(const Matrix& k);

/// Empirical kernel matrix K_ij = k(x_i, x_j) / n with a lazily cached
/// eigendecomposition. Call decompose() before sharing across threads.
class KernelMatrix {
 public:
  explicit KernelMatrix(Matrix k);

  const Matrix& matrix() const { return k_; }
  Eigen::Index n() const { return k_.rows(); }

  const EigenPairs& decompose() const;
  const Vector& eigenvalues() const { return decompose().values; }
  const Matrix& eigenvectors() const { return decompose().vectors; }
  bool has_decomposition() const { return eigen_.has_value(); }

 private:
  Matrix k_;
  mutable std::optional<EigenPairs> eigen_;
};

KernelMatrix build_kernel_matrix(const KernelSpec& spec, const DesignPoints& pts);

/// Rows are query points, columns training points; entries k(q_i, x_j) (no 1/n).
Matrix cross_kernel(const KernelSpec& spec, const std::vector<double>& query,
                    const DesignPoints& train);

}  // namespace sketchkrr
