#include "sketchkrr/solver.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "sketchkrr/errors.hpp"

namespace sketchkrr {

namespace {

void check_lambda(double lambda_n) {
  if (!(lambda_n > 0.0) || !std::isfinite(lambda_n)) {
    throw DomainError("regularization lambda_n must be positive and finite");
  }
}

void check_length(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": length " << got << " does not match n=" << want;
    throw DomainError(os.str());
  }
}

double root_n(const KernelMatrix& k) { return std::sqrt(static_cast<double>(k.n())); }

// Columns VΛ^{-1/2} over the eigenpairs of SKSᵀ = VΛVᵀ above the cutoff.
Matrix whitening(const Matrix& sks) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sks);
  const Vector& lam = es.eigenvalues();
  const double cutoff = kPinvRelTol * lam.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff && lam(i) > 0.0) kept.push_back(i);
  }
  Matrix w(sks.rows(), static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const Eigen::Index i = kept[static_cast<std::size_t>(j)];
    w.col(j) = es.eigenvectors().col(i) / std::sqrt(lam(i));
  }
  return w;
}

Matrix sketched_gram(const SketchOperator& s, const Matrix& sk) {
  Matrix sks = s.apply(Matrix(sk.transpose()));
  return 0.5 * (sks + sks.transpose());
}

}  // namespace

Vector FitResult::expansion_weights() const {
  if (sketch) return sketch->apply_transpose(coefficients);
  return coefficients;
}

FitResult solve_krr(const KernelMatrix& k, const Vector& y, double lambda_n) {
  check_lambda(lambda_n);
  check_length(y.size(), k.n(), "solve_krr");
  const Eigen::Index n = k.n();
  Matrix shifted = k.matrix();
  shifted.diagonal().array() += 2.0 * lambda_n;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_krr: K + 2λI is not positive definite");

  FitResult fit;
  fit.variant = FitVariant::kExact;
  fit.lambda_n = lambda_n;
  fit.coefficients = llt.solve(y / root_n(k));
  fit.fitted = root_n(k) * (k.matrix() * fit.coefficients);
  fit.effective_rank = n;
  return fit;
}

FitResult solve_sketched_krr(const KernelMatrix& k, const Vector& y, const SketchOperator& s,
                             double lambda_n) {
  check_lambda(lambda_n);
  check_length(y.size(), k.n(), "solve_sketched_krr");
  check_length(s.n(), k.n(), "solve_sketched_krr (sketch)");

  const Matrix sk = s.apply(k.matrix());  // m×n

  // Substituting α = VΛ^{-1/2}γ with SKSᵀ = VΛVᵀ turns the program into plain
  // ridge regression on G = (SK)ᵀVΛ^{-1/2}, which is solved through the SVD of
  // G rather than the normal matrix SK²Sᵀ + 2λSKSᵀ (whose condition number is
  // roughly the square of K's).
  const Matrix whiten = whitening(sketched_gram(s, sk));
  const Eigen::Index rank = whiten.cols();

  Vector gamma = Vector::Zero(rank);
  if (rank > 0) {
    const Matrix g = sk.transpose() * whiten;  // n×r
    Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const Vector uty = svd.matrixU().transpose() * (y / root_n(k));
    const Vector shrink = sv.array() / (sv.array().square() + 2.0 * lambda_n);
    gamma = svd.matrixV() * shrink.cwiseProduct(uty);
  }

  FitResult fit;
  fit.variant = FitVariant::kSketched;
  fit.lambda_n = lambda_n;
  fit.coefficients = whiten * gamma;
  fit.sketch = s;
  fit.effective_rank = rank;
  fit.rank_deficient = rank < s.m();
  // sqrt(n)·K·Sᵀα = sqrt(n)·(SK)ᵀα since K is symmetric.
  fit.fitted = root_n(k) * (sk.transpose() * fit.coefficients);
  return fit;
}

FitResult solve_zero_noise(const KernelMatrix& k, const Vector& z_star, const SketchOperator& s,
                           double lambda_n) {
  return solve_sketched_krr(k, z_star, s, lambda_n);
}

ErrorDecomposition error_decomposition(const KernelMatrix& k, const Vector& z_star, const Vector& y,
                                       const SketchOperator& s, double lambda_n) {
  check_length(z_star.size(), k.n(), "error_decomposition");
  const FitResult noisy = solve_sketched_krr(k, y, s, lambda_n);
  const FitResult clean = solve_zero_noise(k, z_star, s, lambda_n);
  ErrorDecomposition out;
  out.approx_err = empirical_error(clean.fitted, z_star);
  out.est_err = empirical_error(clean.fitted, noisy.fitted);
  out.total_err = empirical_error(noisy.fitted, z_star);
  return out;
}

Vector predict(const FitResult& fit, const KernelSpec& spec, const DesignPoints& train,
               const std::vector<double>& query) {
  const Vector w = fit.expansion_weights();
  check_length(w.size(), train.size(), "predict");
  const double scale = 1.0 / std::sqrt(static_cast<double>(train.size()));
  return scale * (cross_kernel(spec, query, train) * w);
}

double empirical_error(const Vector& fhat_vals, const Vector& fstar_vals) {
  if (fhat_vals.size() != fstar_vals.size()) {
    throw DomainError("empirical_error: vectors have different lengths");
  }
  if (fhat_vals.size() == 0) throw DomainError("empirical_error: empty vectors");
  return (fhat_vals - fstar_vals).squaredNorm() / static_cast<double>(fhat_vals.size());
}

DualSolution solve_dual_krr(const KernelMatrix& k, const Vector& y, double lambda_n) {
  check_lambda(lambda_n);
  check_length(y.size(), k.n(), "solve_dual_krr");
  const auto n = static_cast<double>(k.n());
  Matrix system = (n / (2.0 * lambda_n)) * k.matrix();
  system.diagonal().array() += n;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_dual_krr: dual system is not positive definite");
  DualSolution out;
  out.xi = llt.solve(y);
  out.omega = (std::sqrt(n) / (2.0 * lambda_n)) * out.xi;
  return out;
}

FitResult solve_nystrom_dual(const KernelMatrix& k, const Vector& y, const SketchOperator& s,
                             double lambda_n) {
  check_lambda(lambda_n);
  check_length(y.size(), k.n(), "solve_nystrom_dual");
  check_length(s.n(), k.n(), "solve_nystrom_dual (sketch)");
  const auto n = static_cast<double>(k.n());

  const Matrix sk = s.apply(k.matrix());
  const Matrix whiten = whitening(sketched_gram(s, sk));
  const Eigen::Index rank = whiten.cols();
  // K̃ = KSᵀ(SKSᵀ)⁺SK = GGᵀ.
  const Matrix g = sk.transpose() * whiten;

  Matrix system = (n / (2.0 * lambda_n)) * (g * g.transpose());
  system.diagonal().array() += n;
  Eigen::LDLT<Matrix> ldlt(system);
  if (ldlt.info() != Eigen::Success) throw NumericalError("solve_nystrom_dual: dual system factorization failed");
  const Vector xi = ldlt.solve(y);
  const Vector gt_xi = g.transpose() * xi;

  FitResult fit;
  fit.variant = FitVariant::kNystromDual;
  fit.lambda_n = lambda_n;
  fit.coefficients = (std::sqrt(n) / (2.0 * lambda_n)) * (whiten * gt_xi);
  fit.sketch = s;
  fit.effective_rank = rank;
  fit.rank_deficient = rank < s.m();
  fit.fitted = (n / (2.0 * lambda_n)) * (g * gt_xi);
  return fit;
}

double krr_objective(const KernelMatrix& k, const Vector& y, const Vector& omega, double lambda_n) {
  const Vector k_omega = k.matrix() * omega;
  return 0.5 * k_omega.squaredNorm() - k_omega.dot(y) / root_n(k) + lambda_n * omega.dot(k_omega);
}

double sketched_objective(const KernelMatrix& k, const Vector& y, const SketchOperator& s,
                          const Vector& alpha, double lambda_n) {
  return krr_objective(k, y, s.apply_transpose(alpha), lambda_n);
}

double zero_noise_objective(const KernelMatrix& k, const Vector& z_star, const SketchOperator& s,
                            const Vector& alpha, double lambda_n) {
  const Vector w = s.apply_transpose(alpha);
  const Vector kw = k.matrix() * w;
  const auto n = static_cast<double>(k.n());
  const Vector resid = z_star - std::sqrt(n) * kw;
  return resid.squaredNorm() / (2.0 * n) + lambda_n * w.dot(kw);
}

}  // namespace sketchkrr
