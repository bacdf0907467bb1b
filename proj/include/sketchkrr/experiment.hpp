#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchkrr/config.hpp"
#include "sketchkrr/complexity.hpp"
#include "sketchkrr/solver.hpp"

namespace sketchkrr {

double fstar_value(FStar f, double x);

/// Sample-size-dependent factor r(n) with err·r(n) ≍ const at the minimax
/// rate: n^{2/3} (sobolev1), n/sqrt(ln n) (gaussian), n (polynomial).
double rate_factor(const KernelSpec& kernel, Eigen::Index n);

/// Seed for one (n, stream, trial) cell. Streams 0..3 are the arms, 4 is the
/// data stream. Injective in (n, stream, trial) for fixed base while
/// n < 2^32, stream < 16, trial < 2^28.
std::uint64_t derive_seed(std::uint64_t base, Eigen::Index n, unsigned stream, int trial);
inline constexpr unsigned kDataStream = 4;

/// Design points and responses y_i = f*(x_i) + σ w_i, deterministic in seed.
RegressionSample generate_data(const ExperimentConfig& config, Eigen::Index n, std::uint64_t seed);

/// Sketch dimension chosen by the config's m rule, clamped to [1, n].
Eigen::Index sketch_dimension(const ExperimentConfig& config, Arm arm, Eigen::Index n,
                              Eigen::Index d_n);

struct TrialRecord {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Arm sketch = Arm::kExact;
  int trial = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double delta_n_sq = 0.0;
  Eigen::Index d_n = 0;
  double error = 0.0;           // NaN marks a failed trial
  double rescaled_error = 0.0;
  double wall_time_ms = 0.0;

  bool failed() const;
  friend bool operator==(const TrialRecord&, const TrialRecord&);
};

struct RunOptions {
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Wall-clock timings make output non-reproducible, so they are opt-in;
  /// otherwise wall_time_ms is written as 0.
  bool record_timing = false;
};

/// Full sweep over n_grid × arms × trials. Records come back sorted by
/// (n, arm, trial) and a failing trial yields a marker row, never a gap.
std::vector<TrialRecord> run_error_vs_n(const ExperimentConfig& config, const RunOptions& options = {});

struct SummaryRow {
  Eigen::Index n = 0;
  Arm sketch = Arm::kExact;
  int count = 0;
  int failures = 0;
  double mean_error = 0.0;
  double stderr_error = 0.0;
  double mean_rescaled = 0.0;
  double stderr_rescaled = 0.0;
};

/// Mean and standard error over trials per (n, arm), failures excluded.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// max/min of the trial-mean rescaled error over the given sample sizes.
double rescaled_flatness(const std::vector<SummaryRow>& summary, Arm arm,
                         const std::vector<Eigen::Index>& ns);

/// Block-diagonal kernel instance on which uniform sub-sampling can miss a
/// whole block.
struct NystromFailureReport {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index k = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  bool subsample_missed_block = false;
  double exact_error = 0.0;
  double subsample_error = 0.0;
  double gaussian_error = 0.0;
  /// max |Δ fitted| on block-2 coordinates after shifting block-2 responses by 1.
  double subsample_block2_sensitivity = 0.0;
  double gaussian_block2_sensitivity = 0.0;
};

/// Requires 1 ≤ k < n, 1 ≤ m ≤ n and k ≤ ceil((n/m)·ln 2).
NystromFailureReport run_nystrom_failure_demo(Eigen::Index n, Eigen::Index m, Eigen::Index k,
                                              std::uint64_t seed);

/// Block-diagonal Gaussian-kernel matrix diag(K₁, K₂) with K₂ of size k.
KernelMatrix block_diagonal_kernel(Eigen::Index n, Eigen::Index k);

}  // namespace sketchkrr
