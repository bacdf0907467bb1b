#include "sketchkrr/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sketchkrr/errors.hpp"

namespace sketchkrr {

double kernel_complexity(const Vector& mu_hat, Eigen::Index n, double delta) {
  if (!(delta >= 0.0)) throw DomainError("kernel_complexity: delta must be nonnegative");
  if (n < 1) throw DomainError("kernel_complexity: n must be >= 1");
  const double d2 = delta * delta;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < mu_hat.size(); ++j) sum += std::min(d2, mu_hat(j));
  return std::sqrt(sum / static_cast<double>(n));
}

namespace {

constexpr int kMaxBisection = 200;
constexpr double kRelTol = 1e-10;

}  // namespace

double critical_radius(const Vector& mu_hat, Eigen::Index n, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("critical_radius: sigma must be positive");
  if (n < 1) throw DomainError("critical_radius: n must be >= 1");
  if ((mu_hat.array() < 0.0).any()) throw DomainError("critical_radius: negative eigenvalue");
  if ((mu_hat.array() == 0.0).all()) return 0.0;

  auto gap = [&](double delta) { return kernel_complexity(mu_hat, n, delta) / delta - delta / sigma; };

  // [lo, hi] with gap(lo) > 0 >= gap(hi).
  double hi = std::min(sigma, 1e-3);
  double lo = 0.0;
  if (gap(hi) > 0.0) {
    while (gap(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw NumericalError("critical_radius: bracket diverged");
    }
  } else {
    lo = hi;
    while (gap(lo) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < std::numeric_limits<double>::min()) return hi;
    }
  }

  for (int it = 0; it < kMaxBisection; ++it) {
    if (hi - lo <= kRelTol * hi) return hi;
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::ostringstream os;
  os << "critical_radius: bisection did not converge within " << kMaxBisection << " steps";
  throw NumericalError(os.str());
}

Eigen::Index statistical_dimension(const Vector& mu_hat, double delta_n) {
  const double d2 = delta_n * delta_n;
  return static_cast<Eigen::Index>((mu_hat.array() > d2).count());
}

ComplexityProfile make_profile(const Vector& mu_hat, double sigma) {
  ComplexityProfile p;
  p.sigma = sigma;
  p.n = mu_hat.size();
  p.delta_n = critical_radius(mu_hat, p.n, sigma);
  p.delta_n_sq = p.delta_n * p.delta_n;
  p.d_n = statistical_dimension(mu_hat, p.delta_n);
  return p;
}

Vector population_eigenvalues(const PopulationSpectrum& spec, Eigen::Index j_max) {
  if (j_max < 1) throw DomainError("population_eigenvalues: j_max must be >= 1");
  Vector mu(j_max);
  for (Eigen::Index i = 0; i < j_max; ++i) {
    const double j = static_cast<double>(i + 1);
    switch (spec.kind) {
      case SpectrumKind::kPolynomial:
        mu(i) = (i + 1 <= spec.degree + 1) ? 1.0 : 0.0;
        break;
      case SpectrumKind::kGaussian:
        mu(i) = std::exp(-std::numbers::pi * spec.bandwidth * spec.bandwidth * j * j);
        break;
      case SpectrumKind::kSobolev1: {
        const double r = 2.0 / ((2.0 * j - 1.0) * std::numbers::pi);
        mu(i) = r * r;
        break;
      }
    }
  }
  return mu;
}

double rate_exponent_check(const PopulationSpectrum& spec, const std::vector<Eigen::Index>& n_grid,
                           double sigma) {
  if (n_grid.size() < 4) throw DomainError("rate_exponent_check: need at least 4 sample sizes");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
    throw DomainError("rate_exponent_check: n_grid must be strictly increasing");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (Eigen::Index n : n_grid) {
    const double delta = critical_radius(population_eigenvalues(spec, n), n, sigma);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(delta * delta));
  }
  const double k = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace sketchkrr
