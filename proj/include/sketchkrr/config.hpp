#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchkrr/kernel.hpp"

namespace sketchkrr {

enum class FStar { kAbsShift, kQuad };
enum class Design { kUniformGrid, kIrregular, kIidUniform };
/// One arm of a sweep: exact KRR or one of the three sketch families.
enum class Arm { kExact, kGaussian, kRos, kSubSample };
enum class MRule { kCubeRoot, kLogGauss, kLogFour, kFixed, kStatDim };
enum class LambdaRule { kTwoDeltaSq, kFixed };

std::string to_string(FStar f);
std::string to_string(Design d);
std::string to_string(Arm a);
std::string to_string(MRule r);
std::string to_string(LambdaRule r);

/// Parsers accept '-' and '_' interchangeably and throw DomainError.
FStar parse_fstar(const std::string& text);
Design parse_design(const std::string& text);
Arm parse_arm(const std::string& text);
MRule parse_m_rule(const std::string& text);
LambdaRule parse_lambda_rule(const std::string& text);

struct ExperimentConfig {
  KernelSpec kernel = KernelSpec::sobolev1();
  FStar fstar = FStar::kAbsShift;
  Design design = Design::kUniformGrid;
  double sigma = 1.0;
  std::vector<Eigen::Index> n_grid{32, 64, 128, 256, 512, 1024};
  std::vector<Arm> arms{Arm::kExact, Arm::kGaussian, Arm::kRos};
  MRule m_rule = MRule::kCubeRoot;
  Eigen::Index m_fixed = 10;
  double c_statdim = 6.0;
  LambdaRule lambda_rule = LambdaRule::kTwoDeltaSq;
  double lambda_fixed = 0.01;
  int trials = 100;
  std::uint64_t seed = 0;

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Flat `key = value` text; `#` starts a comment, lists are comma-separated.
/// Keys: kernel, degree, bandwidth, fstar, design, sigma, n_grid, sketches,
/// m_rule, m_fixed, c_statdim, lambda_rule, lambda_fixed, trials, seed.
/// Errors name the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

KernelSpec make_kernel(const std::string& name, int degree, double bandwidth);

}  // namespace sketchkrr
