#include "sketchkrr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "sketchkrr/errors.hpp"

namespace sketchkrr {

namespace {

std::string normalize(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("invalid value '" + text + "' for key '" + key + "'");
  }
  return value;
}

}  // namespace

std::string to_string(FStar f) { return f == FStar::kAbsShift ? "abs_shift" : "quad"; }

std::string to_string(Design d) {
  switch (d) {
    case Design::kUniformGrid:
      return "uniform_grid";
    case Design::kIrregular:
      return "irregular";
    case Design::kIidUniform:
      return "iid_uniform";
  }
  return "unknown";
}

std::string to_string(Arm a) {
  switch (a) {
    case Arm::kExact:
      return "exact";
    case Arm::kGaussian:
      return "gaussian";
    case Arm::kRos:
      return "ros";
    case Arm::kSubSample:
      return "subsample";
  }
  return "unknown";
}

std::string to_string(MRule r) {
  switch (r) {
    case MRule::kCubeRoot:
      return "cuberoot";
    case MRule::kLogGauss:
      return "loggauss";
    case MRule::kLogFour:
      return "logfour";
    case MRule::kFixed:
      return "fixed";
    case MRule::kStatDim:
      return "statdim";
  }
  return "unknown";
}

std::string to_string(LambdaRule r) { return r == LambdaRule::kTwoDeltaSq ? "two_delta_sq" : "fixed"; }

FStar parse_fstar(const std::string& text) {
  const std::string t = normalize(text);
  if (t == "abs_shift") return FStar::kAbsShift;
  if (t == "quad") return FStar::kQuad;
  throw DomainError("unknown fstar '" + text + "' (expected abs_shift or quad)");
}

Design parse_design(const std::string& text) {
  const std::string t = normalize(text);
  if (t == "uniform_grid") return Design::kUniformGrid;
  if (t == "irregular") return Design::kIrregular;
  if (t == "iid_uniform") return Design::kIidUniform;
  throw DomainError("unknown design '" + text + "' (expected uniform_grid, irregular or iid_uniform)");
}

Arm parse_arm(const std::string& text) {
  const std::string t = normalize(text);
  if (t == "exact") return Arm::kExact;
  if (t == "gaussian") return Arm::kGaussian;
  if (t == "ros") return Arm::kRos;
  if (t == "subsample" || t == "nystrom") return Arm::kSubSample;
  throw DomainError("unknown sketch '" + text + "' (expected exact, gaussian, ros or subsample)");
}

MRule parse_m_rule(const std::string& text) {
  const std::string t = normalize(text);
  if (t == "cuberoot") return MRule::kCubeRoot;
  if (t == "loggauss") return MRule::kLogGauss;
  if (t == "logfour") return MRule::kLogFour;
  if (t == "fixed") return MRule::kFixed;
  if (t == "statdim") return MRule::kStatDim;
  throw DomainError("unknown m_rule '" + text + "'");
}

LambdaRule parse_lambda_rule(const std::string& text) {
  const std::string t = normalize(text);
  if (t == "two_delta_sq") return LambdaRule::kTwoDeltaSq;
  if (t == "fixed") return LambdaRule::kFixed;
  throw DomainError("unknown lambda_rule '" + text + "'");
}

KernelSpec make_kernel(const std::string& name, int degree, double bandwidth) {
  const std::string t = normalize(name);
  if (t == "sobolev1" || t == "sobolev") return KernelSpec::sobolev1();
  if (t == "gaussian") return KernelSpec::gaussian(bandwidth);
  if (t == "polynomial") return KernelSpec::polynomial(degree);
  throw DomainError("unknown kernel '" + name + "' (expected sobolev1, gaussian or polynomial)");
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw DomainError("config: n_grid is empty");
  for (Eigen::Index n : n_grid) {
    if (n < 2) throw DomainError("config: n_grid entries must be >= 2");
  }
  if (arms.empty()) throw DomainError("config: no sketches selected");
  if (trials < 1) throw DomainError("config: trials must be >= 1");
  if (!(sigma >= 0.0)) throw DomainError("config: sigma must be nonnegative");
  if (m_rule == MRule::kFixed && m_fixed < 1) throw DomainError("config: m_fixed must be >= 1");
  if (m_rule == MRule::kStatDim && !(c_statdim > 0.0)) throw DomainError("config: c_statdim must be positive");
  if (lambda_rule == LambdaRule::kFixed && !(lambda_fixed > 0.0)) {
    throw DomainError("config: lambda_fixed must be positive");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (entries.count(key) != 0) {
      throw DomainError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    entries[key] = {value, lineno};
  }

  ExperimentConfig cfg;
  std::string kernel_name = "sobolev1";
  int degree = 2;
  double bandwidth = 0.25;

  for (const auto& [key, entry] : entries) {
    const auto& [value, lno] = entry;
    try {
      if (key == "kernel") {
        kernel_name = value;
      } else if (key == "degree") {
        degree = parse_number<int>(value, key);
      } else if (key == "bandwidth") {
        bandwidth = parse_number<double>(value, key);
      } else if (key == "fstar") {
        cfg.fstar = parse_fstar(value);
      } else if (key == "design") {
        cfg.design = parse_design(value);
      } else if (key == "sigma") {
        cfg.sigma = parse_number<double>(value, key);
      } else if (key == "n_grid") {
        cfg.n_grid.clear();
        for (const auto& item : split_list(value)) cfg.n_grid.push_back(parse_number<Eigen::Index>(item, key));
      } else if (key == "sketches") {
        cfg.arms.clear();
        for (const auto& item : split_list(value)) cfg.arms.push_back(parse_arm(item));
      } else if (key == "m_rule") {
        cfg.m_rule = parse_m_rule(value);
      } else if (key == "m_fixed") {
        cfg.m_fixed = parse_number<Eigen::Index>(value, key);
      } else if (key == "c_statdim") {
        cfg.c_statdim = parse_number<double>(value, key);
      } else if (key == "lambda_rule") {
        cfg.lambda_rule = parse_lambda_rule(value);
      } else if (key == "lambda_fixed") {
        cfg.lambda_fixed = parse_number<double>(value, key);
      } else if (key == "trials") {
        cfg.trials = parse_number<int>(value, key);
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value, key);
      } else {
        throw DomainError("unknown key '" + key + "'");
      }
    } catch (const DomainError& e) {
      throw DomainError("config line " + std::to_string(lno) + ": " + e.what());
    }
  }
  try {
    cfg.kernel = make_kernel(kernel_name, degree, bandwidth);
  } catch (const DomainError& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  std::sort(cfg.arms.begin(), cfg.arms.end());
  cfg.arms.erase(std::unique(cfg.arms.begin(), cfg.arms.end()), cfg.arms.end());
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace sketchkrr
