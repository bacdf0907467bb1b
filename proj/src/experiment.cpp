#include "sketchkrr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "sketchkrr/errors.hpp"
#include "sketchkrr/satisfiability.hpp"

namespace sketchkrr {

double fstar_value(FStar f, double x) {
  switch (f) {
    case FStar::kAbsShift:
      return std::abs(x + 0.5) - 0.5;
    case FStar::kQuad:
      return -1.0 + 2.0 * x * x;
  }
  return 0.0;
}

double rate_factor(const KernelSpec& kernel, Eigen::Index n) {
  const auto nn = static_cast<double>(n);
  switch (kernel.kind()) {
    case KernelKind::kSobolev1:
      return std::pow(nn, 2.0 / 3.0);
    case KernelKind::kGaussian:
      return nn / std::sqrt(std::log(nn));
    case KernelKind::kPolynomial:
      return nn;
  }
  return 1.0;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer; a bijection on 64-bit words.
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, Eigen::Index n, unsigned stream, int trial) {
  if (n < 0 || static_cast<std::uint64_t>(n) >= (1ULL << 32) || stream >= 16U || trial < 0 ||
      trial >= (1 << 28)) {
    throw DomainError("derive_seed: (n, stream, trial) outside the injective range");
  }
  const std::uint64_t packed = (static_cast<std::uint64_t>(n) << 32) |
                               (static_cast<std::uint64_t>(stream) << 28) |
                               static_cast<std::uint64_t>(trial);
  return mix64(packed ^ mix64(base));
}

RegressionSample generate_data(const ExperimentConfig& config, Eigen::Index n, std::uint64_t seed) {
  if (n < 2) throw DomainError("generate_data: n must be >= 2");
  std::mt19937_64 rng(seed);
  RegressionSample s;
  s.sigma = config.sigma;
  s.pts.x.resize(static_cast<std::size_t>(n));
  auto& x = s.pts.x;
  switch (config.design) {
    case Design::kUniformGrid:
      for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) / static_cast<double>(n);
      break;
    case Design::kIidUniform: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (double& xi : x) xi = unif(rng);
      break;
    }
    case Design::kIrregular: {
      // n − k points spread over [0, 1/2], k = ceil(sqrt(n)) clustered at 1.
      const auto k = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n))));
      std::uniform_real_distribution<double> unif(0.0, 0.5);
      std::normal_distribution<double> jitter(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
      for (Eigen::Index i = 0; i < n - k; ++i) x[static_cast<std::size_t>(i)] = unif(rng);
      for (Eigen::Index i = n - k; i < n; ++i) x[static_cast<std::size_t>(i)] = 1.0 + jitter(rng);
      break;
    }
  }
  Vector fstar(n);
  for (Eigen::Index i = 0; i < n; ++i) fstar(i) = fstar_value(config.fstar, x[static_cast<std::size_t>(i)]);
  std::normal_distribution<double> noise(0.0, 1.0);
  s.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.y(i) = fstar(i) + config.sigma * noise(rng);
  s.fstar = std::move(fstar);
  return s;
}

Eigen::Index sketch_dimension(const ExperimentConfig& config, Arm arm, Eigen::Index n,
                              Eigen::Index d_n) {
  const auto nn = static_cast<double>(n);
  double m = 0.0;
  switch (config.m_rule) {
    case MRule::kCubeRoot:
      m = std::ceil(std::cbrt(nn));
      break;
    case MRule::kLogGauss:
      m = std::ceil(1.25 * std::sqrt(std::log(nn)));
      break;
    case MRule::kLogFour:
      m = std::ceil(4.0 * std::sqrt(std::log(nn)));
      break;
    case MRule::kFixed:
      m = static_cast<double>(config.m_fixed);
      break;
    case MRule::kStatDim: {
      const SketchKind kind = arm == Arm::kRos ? SketchKind::kRos : SketchKind::kGaussian;
      return recommended_sketch_dim(kind, std::max<Eigen::Index>(d_n, 1), n, config.c_statdim);
    }
  }
  return static_cast<Eigen::Index>(std::clamp(m, 1.0, nn));
}

bool TrialRecord::failed() const { return std::isnan(error); }

bool operator==(const TrialRecord& a, const TrialRecord& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.n == b.n && a.m == b.m && a.sketch == b.sketch && a.trial == b.trial && a.seed == b.seed &&
         same(a.lambda, b.lambda) && same(a.delta_n_sq, b.delta_n_sq) && a.d_n == b.d_n &&
         same(a.error, b.error) && same(a.rescaled_error, b.rescaled_error) &&
         same(a.wall_time_ms, b.wall_time_ms);
}

namespace {

SketchKind to_sketch_kind(Arm arm) {
  switch (arm) {
    case Arm::kGaussian:
      return SketchKind::kGaussian;
    case Arm::kRos:
      return SketchKind::kRos;
    default:
      return SketchKind::kSubSample;
  }
}

unsigned arm_stream(Arm arm) { return static_cast<unsigned>(arm); }

// All arms of one (n, trial) cell share the design, the noise and the profile.
std::vector<TrialRecord> run_cell(const ExperimentConfig& config, const RunOptions& options,
                                  Eigen::Index n, int trial,
                                  const std::optional<ComplexityProfile>& cached_profile) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<TrialRecord> out;
  out.reserve(config.arms.size());
  auto marker = [&](Arm arm) {
    TrialRecord r;
    r.n = n;
    r.sketch = arm;
    r.trial = trial;
    r.seed = derive_seed(config.seed, n, arm_stream(arm), trial);
    r.lambda = nan;
    r.delta_n_sq = nan;
    r.error = nan;
    r.rescaled_error = nan;
    return r;
  };

  std::optional<KernelMatrix> k;
  RegressionSample sample;
  ComplexityProfile profile;
  double lambda = 0.0;
  try {
    sample = generate_data(config, n, derive_seed(config.seed, n, kDataStream, trial));
    k.emplace(build_kernel_matrix(config.kernel, sample.pts));
    profile = cached_profile ? *cached_profile
                             : make_profile(eigenvalues_descending(k->matrix()), std::max(config.sigma, 1e-12));
    lambda = config.lambda_rule == LambdaRule::kTwoDeltaSq ? 2.0 * profile.delta_n_sq : config.lambda_fixed;
  } catch (const std::exception&) {
    for (Arm arm : config.arms) out.push_back(marker(arm));
    return out;
  }

  const double factor = rate_factor(config.kernel, n);
  for (Arm arm : config.arms) {
    TrialRecord r = marker(arm);
    r.lambda = lambda;
    r.delta_n_sq = profile.delta_n_sq;
    r.d_n = profile.d_n;
    try {
      const auto start = std::chrono::steady_clock::now();
      FitResult fit;
      if (arm == Arm::kExact) {
        r.m = n;
        fit = solve_krr(*k, sample.y, lambda);
      } else {
        r.m = sketch_dimension(config, arm, n, profile.d_n);
        const SketchOperator s = draw_sketch(to_sketch_kind(arm), r.m, n, r.seed);
        fit = solve_sketched_krr(*k, sample.y, s, lambda);
      }
      const auto stop = std::chrono::steady_clock::now();
      if (!fit.fitted.allFinite()) throw NumericalError("non-finite fitted values");
      r.error = empirical_error(fit.fitted, *sample.fstar);
      r.rescaled_error = r.error * factor;
      if (options.record_timing) {
        r.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      }
    } catch (const std::exception&) {
      r.error = nan;
      r.rescaled_error = nan;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<TrialRecord> run_error_vs_n(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentConfig cfg = config;
  std::sort(cfg.arms.begin(), cfg.arms.end());
  cfg.arms.erase(std::unique(cfg.arms.begin(), cfg.arms.end()), cfg.arms.end());

  // A grid design gives the same kernel matrix on every trial.
  std::map<Eigen::Index, std::optional<ComplexityProfile>> profiles;
  for (Eigen::Index n : cfg.n_grid) {
    std::optional<ComplexityProfile> p;
    if (cfg.design == Design::kUniformGrid) {
      try {
        const RegressionSample s = generate_data(cfg, n, 0);
        p = make_profile(eigenvalues_descending(build_kernel_matrix(cfg.kernel, s.pts).matrix()),
                         std::max(cfg.sigma, 1e-12));
      } catch (const std::exception&) {
        p.reset();
      }
    }
    profiles[n] = p;
  }

  struct Job {
    Eigen::Index n;
    int trial;
  };
  std::vector<Job> jobs;
  for (Eigen::Index n : cfg.n_grid) {
    for (int t = 0; t < cfg.trials; ++t) jobs.push_back({n, t});
  }
  std::vector<std::vector<TrialRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      results[j] = run_cell(cfg, options, jobs[j].n, jobs[j].trial, profiles.at(jobs[j].n));
    }
  };
  unsigned threads = options.threads != 0 ? options.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::vector<TrialRecord> records;
  for (auto& cell : results) records.insert(records.end(), cell.begin(), cell.end());
  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.sketch != b.sketch) return a.sketch < b.sketch;
    return a.trial < b.trial;
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  std::map<std::pair<Eigen::Index, Arm>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) groups[{r.n, r.sketch}].push_back(&r);
  std::vector<SummaryRow> out;
  for (const auto& [key, rows] : groups) {
    SummaryRow s;
    s.n = key.first;
    s.sketch = key.second;
    std::vector<double> err;
    std::vector<double> res;
    for (const TrialRecord* r : rows) {
      if (r->failed()) {
        ++s.failures;
        continue;
      }
      err.push_back(r->error);
      res.push_back(r->rescaled_error);
    }
    s.count = static_cast<int>(err.size());
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
      mean = 0.0;
      se = 0.0;
      if (v.empty()) {
        mean = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      if (v.size() < 2) return;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    };
    mean_se(err, s.mean_error, s.stderr_error);
    mean_se(res, s.mean_rescaled, s.stderr_rescaled);
    out.push_back(s);
  }
  return out;
}

double rescaled_flatness(const std::vector<SummaryRow>& summary, Arm arm,
                         const std::vector<Eigen::Index>& ns) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index n : ns) {
    const auto it = std::find_if(summary.begin(), summary.end(),
                                 [&](const SummaryRow& s) { return s.n == n && s.sketch == arm; });
    if (it == summary.end() || it->count == 0) {
      throw DomainError("rescaled_flatness: no data for n=" + std::to_string(n) + " arm " + to_string(arm));
    }
    lo = std::min(lo, it->mean_rescaled);
    hi = std::max(hi, it->mean_rescaled);
  }
  return hi / lo;
}

KernelMatrix block_diagonal_kernel(Eigen::Index n, Eigen::Index k) {
  if (k < 1 || k >= n) throw DomainError("block_diagonal_kernel: need 1 <= k < n");
  const KernelSpec spec = KernelSpec::gaussian(0.25);
  const Eigen::Index n1 = n - k;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n1; ++i) x[static_cast<std::size_t>(i)] = 0.5 * static_cast<double>(i + 1) / static_cast<double>(n1);
  for (Eigen::Index i = 0; i < k; ++i) x[static_cast<std::size_t>(n1 + i)] = 1.0 + 0.05 * static_cast<double>(i) / static_cast<double>(k);
  Matrix full = build_kernel_matrix(spec, DesignPoints(x)).matrix();
  full.topRightCorner(n1, k).setZero();
  full.bottomLeftCorner(k, n1).setZero();
  return KernelMatrix(std::move(full));
}

NystromFailureReport run_nystrom_failure_demo(Eigen::Index n, Eigen::Index m, Eigen::Index k,
                                              std::uint64_t seed) {
  if (m < 1 || m > n) throw DomainError("nystrom demo: need 1 <= m <= n");
  if (k < 1 || k >= n) throw DomainError("nystrom demo: need 1 <= k < n");
  const auto k_max = static_cast<Eigen::Index>(
      std::ceil(static_cast<double>(n) / static_cast<double>(m) * std::log(2.0)));
  if (k > k_max) {
    throw DomainError("nystrom demo: k must be <= ceil((n/m) ln 2) = " + std::to_string(k_max));
  }

  const KernelMatrix kernel = block_diagonal_kernel(n, k);
  const Eigen::Index n1 = n - k;
  Vector z(n);
  for (Eigen::Index i = 0; i < n1; ++i) z(i) = fstar_value(FStar::kQuad, 0.5 * static_cast<double>(i + 1) / static_cast<double>(n1));
  z.tail(k).setOnes();

  std::mt19937_64 rng(derive_seed(seed, n, kDataStream, 0));
  std::normal_distribution<double> noise(0.0, 1.0);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = z(i) + noise(rng);
  Vector y_shift = y;
  y_shift.tail(k).array() += 1.0;

  const ComplexityProfile profile = make_profile(kernel.eigenvalues(), 1.0);
  NystromFailureReport rep;
  rep.n = n;
  rep.m = m;
  rep.k = k;
  rep.seed = seed;
  rep.lambda = 2.0 * profile.delta_n_sq;

  const SketchOperator sub =
      draw_sketch(SketchKind::kSubSample, m, n, derive_seed(seed, n, static_cast<unsigned>(Arm::kSubSample), 0));
  const SketchOperator gauss =
      draw_sketch(SketchKind::kGaussian, m, n, derive_seed(seed, n, static_cast<unsigned>(Arm::kGaussian), 0));
  rep.subsample_missed_block = std::none_of(sub.indices().begin(), sub.indices().end(),
                                            [&](Eigen::Index i) { return i >= n1; });

  rep.exact_error = empirical_error(solve_krr(kernel, y, rep.lambda).fitted, z);
  auto probe = [&](const SketchOperator& s, double& err, double& sensitivity) {
    const FitResult base = solve_sketched_krr(kernel, y, s, rep.lambda);
    const FitResult shifted = solve_sketched_krr(kernel, y_shift, s, rep.lambda);
    err = empirical_error(base.fitted, z);
    sensitivity = (shifted.fitted.tail(k) - base.fitted.tail(k)).cwiseAbs().maxCoeff();
  };
  probe(sub, rep.subsample_error, rep.subsample_block2_sensitivity);
  probe(gauss, rep.gaussian_error, rep.gaussian_block2_sensitivity);
  return rep;
}

}  // namespace sketchkrr
