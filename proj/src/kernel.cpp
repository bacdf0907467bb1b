#include "sketchkrr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "sketchkrr/errors.hpp"

namespace sketchkrr {

KernelSpec KernelSpec::polynomial(int degree) {
  if (degree < 1) throw DomainError("polynomial kernel degree must be >= 1");
  return KernelSpec(KernelKind::kPolynomial, degree, 0.0);
}

KernelSpec KernelSpec::gaussian(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DomainError("gaussian kernel bandwidth must be positive and finite");
  }
  return KernelSpec(KernelKind::kGaussian, 0, bandwidth);
}

KernelSpec KernelSpec::sobolev1() { return KernelSpec(KernelKind::kSobolev1, 0, 0.0); }

double KernelSpec::operator()(double u, double v) const {
  switch (kind_) {
    case KernelKind::kPolynomial:
      return std::pow(1.0 + u * v, degree_);
    case KernelKind::kGaussian: {
      const double d = u - v;
      return std::exp(-d * d / (2.0 * bandwidth_ * bandwidth_));
    }
    case KernelKind::kSobolev1:
      return std::min(u, v);
  }
  return 0.0;
}

std::string KernelSpec::name() const {
  std::ostringstream os;
  switch (kind_) {
    case KernelKind::kPolynomial:
      os << "polynomial(D=" << degree_ << ")";
      break;
    case KernelKind::kGaussian:
      os << "gaussian(h=" << bandwidth_ << ")";
      break;
    case KernelKind::kSobolev1:
      os << "sobolev1";
      break;
  }
  return os.str();
}

double kernel_eval(const KernelSpec& spec, double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v)) {
    throw DomainError("kernel_eval: non-finite covariate");
  }
  return spec(u, v);
}

namespace {

// Sorts eigenpairs descending (stable, so ties keep solver order) and clamps
// round-off negatives.
EigenPairs sort_and_clamp(const Vector& values, const Matrix* vectors) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  EigenPairs out;
  out.values.resize(n);
  if (vectors != nullptr) out.vectors.resize(vectors->rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = values(order[static_cast<std::size_t>(j)]);
    if (vectors != nullptr) out.vectors.col(j) = vectors->col(order[static_cast<std::size_t>(j)]);
  }

  const double top = n > 0 ? std::max(out.values(0), 0.0) : 0.0;
  const double floor = -1e-10 * top;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (out.values(j) < 0.0) {
      if (out.values(j) < floor) {
        std::ostringstream os;
        os << "kernel matrix is not PSD at working precision: eigenvalue " << out.values(j)
           << " below " << floor;
        throw NumericalError(os.str());
      }
      out.values(j) = 0.0;
    }
  }
  return out;
}

void check_finite(const Matrix& k) {
  if (!k.allFinite()) throw NumericalError("eigendecompose: matrix has non-finite entries");
}

}  // namespace

EigenPairs eigendecompose(const Matrix& k) {
  check_finite(k);
  if (k.rows() != k.cols()) throw DomainError("eigendecompose: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: solver did not converge");
  Matrix vectors = es.eigenvectors();
  return sort_and_clamp(es.eigenvalues(), &vectors);
}

Vector eigenvalues_descending(const Matrix& k) {
  check_finite(k);
  if (k.rows() != k.cols()) throw DomainError("eigenvalues_descending: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: solver did not converge");
  return sort_and_clamp(es.eigenvalues(), nullptr).values;
}

KernelMatrix::KernelMatrix(Matrix k) : k_(std::move(k)) {
  if (k_.rows() != k_.cols()) throw DomainError("KernelMatrix: matrix must be square");
}

const EigenPairs& KernelMatrix::decompose() const {
  if (!eigen_) eigen_ = eigendecompose(k_);
  return *eigen_;
}

KernelMatrix build_kernel_matrix(const KernelSpec& spec, const DesignPoints& pts) {
  const Eigen::Index n = pts.size();
  if (n < 1) throw DomainError("build_kernel_matrix: need at least one design point");
  if (spec.kind() == KernelKind::kSobolev1) {
    const bool outside = std::any_of(pts.x.begin(), pts.x.end(),
                                     [](double x) { return x < 0.0 || x > 1.0; });
    if (outside) std::clog << "warning: sobolev1 kernel used with covariates outside [0,1]\n";
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj = pts.x[static_cast<std::size_t>(j)];
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = kernel_eval(spec, pts.x[static_cast<std::size_t>(i)], xj) * inv_n;
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return KernelMatrix(std::move(k));
}

Matrix cross_kernel(const KernelSpec& spec, const std::vector<double>& query,
                    const DesignPoints& train) {
  const auto q = static_cast<Eigen::Index>(query.size());
  Matrix out(q, train.size());
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < train.size(); ++j) {
      out(i, j) = kernel_eval(spec, query[static_cast<std::size_t>(i)],
                              train.x[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace sketchkrr
