#include "sketchkrr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "sketchkrr/config.hpp"
#include "sketchkrr/csv.hpp"
#include "sketchkrr/errors.hpp"
#include "sketchkrr/experiment.hpp"
#include "sketchkrr/satisfiability.hpp"

namespace sketchkrr {

namespace {

using nlohmann::json;

struct ProblemOptions {
  std::string kernel = "sobolev1";
  int degree = 2;
  double bandwidth = 0.25;
  Eigen::Index n = 128;
  double sigma = 1.0;
  std::string design = "uniform_grid";
  std::uint64_t seed = 0;
  std::string format = "text";
};

void add_problem_options(CLI::App* cmd, ProblemOptions& p) {
  cmd->add_option("--kernel", p.kernel, "sobolev1 | gaussian | polynomial")->capture_default_str();
  cmd->add_option("--degree", p.degree, "polynomial degree D")->capture_default_str();
  cmd->add_option("--bandwidth", p.bandwidth, "gaussian bandwidth h")->capture_default_str();
  cmd->add_option("--n", p.n, "sample size")->capture_default_str();
  cmd->add_option("--sigma", p.sigma, "noise standard deviation")->capture_default_str();
  cmd->add_option("--design", p.design, "uniform-grid | irregular | iid-uniform")->capture_default_str();
  cmd->add_option("--seed", p.seed, "64-bit seed")->capture_default_str();
  cmd->add_option("--format", p.format, "text | json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

ExperimentConfig base_config(const ProblemOptions& p) {
  ExperimentConfig cfg;
  cfg.kernel = make_kernel(p.kernel, p.degree, p.bandwidth);
  cfg.fstar = cfg.kernel.kind() == KernelKind::kSobolev1 ? FStar::kAbsShift : FStar::kQuad;
  cfg.design = parse_design(p.design);
  cfg.sigma = p.sigma;
  cfg.n_grid = {p.n};
  cfg.trials = 1;
  cfg.seed = p.seed;
  return cfg;
}

struct Problem {
  ExperimentConfig config;
  RegressionSample sample;
  KernelMatrix kernel;
  ComplexityProfile profile;
};

Problem make_problem(const ExperimentConfig& cfg, Eigen::Index n) {
  RegressionSample sample = generate_data(cfg, n, derive_seed(cfg.seed, n, kDataStream, 0));
  KernelMatrix k = build_kernel_matrix(cfg.kernel, sample.pts);
  if (!(cfg.sigma > 0.0)) throw DomainError("sigma must be positive");
  ComplexityProfile profile = make_profile(k.eigenvalues(), cfg.sigma);
  return {cfg, std::move(sample), std::move(k), profile};
}

int run_critical_radius(const ProblemOptions& p, std::ostream& out) {
  const Problem prob = make_problem(base_config(p), p.n);
  if (p.format == "json") {
    json j{{"kernel", prob.config.kernel.name()}, {"design", to_string(prob.config.design)},
           {"n", p.n},
           {"sigma", p.sigma},
           {"delta_n", prob.profile.delta_n},
           {"delta_n_sq", prob.profile.delta_n_sq},
           {"d_n", prob.profile.d_n}};
    out << j.dump(2) << '\n';
  } else {
    out << "kernel=" << prob.config.kernel.name() << " design=" << to_string(prob.config.design)
        << " n=" << p.n << " sigma=" << format_double(p.sigma) << '\n'
        << "delta_n=" << format_double(prob.profile.delta_n) << '\n'
        << "delta_n_sq=" << format_double(prob.profile.delta_n_sq) << '\n'
        << "d_n=" << prob.profile.d_n << '\n';
  }
  return 0;
}

struct FitOptions {
  std::string fstar;
  std::string sketch = "gaussian";
  std::string m_rule = "cuberoot";
  Eigen::Index m_fixed = 10;
  double c_statdim = 6.0;
  std::string lambda_rule = "two_delta_sq";
  double lambda_fixed = 0.01;
};

void add_fit_options(CLI::App* cmd, FitOptions& f) {
  cmd->add_option("--fstar", f.fstar, "abs_shift | quad (default depends on kernel)");
  cmd->add_option("--sketch", f.sketch, "exact | gaussian | ros | subsample")->capture_default_str();
  cmd->add_option("--m-rule", f.m_rule, "cuberoot | loggauss | logfour | fixed | statdim")->capture_default_str();
  cmd->add_option("--m-fixed", f.m_fixed, "sketch size for --m-rule fixed")->capture_default_str();
  cmd->add_option("--c-statdim", f.c_statdim, "constant for --m-rule statdim")->capture_default_str();
  cmd->add_option("--lambda-rule", f.lambda_rule, "two_delta_sq | fixed")->capture_default_str();
  cmd->add_option("--lambda-fixed", f.lambda_fixed, "lambda for --lambda-rule fixed")->capture_default_str();
}

void apply_fit_options(const FitOptions& f, ExperimentConfig& cfg) {
  if (!f.fstar.empty()) cfg.fstar = parse_fstar(f.fstar);
  cfg.arms = {parse_arm(f.sketch)};
  cfg.m_rule = parse_m_rule(f.m_rule);
  cfg.m_fixed = f.m_fixed;
  cfg.c_statdim = f.c_statdim;
  cfg.lambda_rule = parse_lambda_rule(f.lambda_rule);
  cfg.lambda_fixed = f.lambda_fixed;
}

int run_fit(const ProblemOptions& p, const FitOptions& f, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = base_config(p);
  apply_fit_options(f, cfg);
  cfg.validate();
  RunOptions opts;
  opts.threads = 1;
  const auto records = run_error_vs_n(cfg, opts);
  const TrialRecord& r = records.front();
  if (r.failed()) {
    err << "fit failed for n=" << r.n << " sketch=" << to_string(r.sketch) << '\n';
    return 1;
  }
  if (p.format == "json") {
    json j{{"kernel", cfg.kernel.name()}, {"design", to_string(cfg.design)}, {"fstar", to_string(cfg.fstar)},
           {"n", r.n}, {"m", r.m}, {"sketch", to_string(r.sketch)}, {"seed", r.seed},
           {"lambda", r.lambda}, {"delta_n_sq", r.delta_n_sq}, {"d_n", r.d_n},
           {"error", r.error}, {"rescaled_error", r.rescaled_error}};
    out << j.dump(2) << '\n';
  } else {
    out << "kernel=" << cfg.kernel.name() << " n=" << r.n << " sketch=" << to_string(r.sketch)
        << " m=" << r.m << " lambda=" << format_double(r.lambda)
        << " delta_n_sq=" << format_double(r.delta_n_sq) << " d_n=" << r.d_n
        << " error=" << format_double(r.error) << " rescaled_error=" << format_double(r.rescaled_error)
        << '\n';
  }
  return 0;
}

struct CheckOptions {
  std::string sketch = "gaussian";
  Eigen::Index m = 0;
  double c_sketch = 6.0;
  double c_threshold = kDefaultSatisfiabilityC;
};

int run_check_sketch(const ProblemOptions& p, const CheckOptions& c, std::ostream& out) {
  const Problem prob = make_problem(base_config(p), p.n);
  const SketchKind kind = parse_sketch_kind(c.sketch);
  Eigen::Index m = c.m;
  if (m == 0) {
    m = static_cast<Eigen::Index>(std::ceil(c.c_sketch * static_cast<double>(std::max<Eigen::Index>(prob.profile.d_n, 1))));
    m = std::clamp<Eigen::Index>(m, 1, p.n);
  }
  const SketchOperator s = draw_sketch(kind, m, p.n, derive_seed(p.seed, p.n, 0, 0));
  const SatisfiabilityReport rep = check_k_satisfiable(s, prob.kernel, prob.profile, c.c_threshold);
  if (p.format == "json") {
    json j{{"kernel", prob.config.kernel.name()}, {"n", p.n}, {"sketch", to_string(kind)}, {"m", m},
           {"d_n", rep.d_n}, {"delta_n", rep.delta_n}, {"lhs_isometry", rep.lhs_isometry},
           {"lhs_tail", rep.lhs_tail}, {"c_threshold", rep.c_threshold}, {"pass", rep.pass}};
    out << j.dump(2) << '\n';
  } else {
    out << "sketch=" << to_string(kind) << " m=" << m << " n=" << p.n << " d_n=" << rep.d_n << '\n'
        << "lhs_isometry=" << format_double(rep.lhs_isometry) << " (threshold 0.5)\n"
        << "lhs_tail=" << format_double(rep.lhs_tail) << " (threshold "
        << format_double(rep.c_threshold * rep.delta_n) << " = c*delta_n)\n"
        << "pass=" << (rep.pass ? "true" : "false") << '\n';
  }
  return 0;
}

void write_plot_script(const std::string& path, const std::string& csv_path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "# Plots mean error and rescaled error per sketch against n.\n"
     << "import pandas as pd\nimport matplotlib.pyplot as plt\n\n"
     << "df = pd.read_csv(" << std::quoted(csv_path) << ").dropna(subset=['error'])\n"
     << "g = df.groupby(['sketch', 'n'])\n"
     << "stats = g[['error', 'rescaled_error']].agg(['mean', 'sem']).reset_index()\n"
     << "fig, axes = plt.subplots(1, 2, figsize=(10, 4))\n"
     << "for col, ax in zip(['error', 'rescaled_error'], axes):\n"
     << "    for kind, sub in stats.groupby('sketch'):\n"
     << "        ax.errorbar(sub['n'], sub[(col, 'mean')], yerr=sub[(col, 'sem')], label=kind, marker='o')\n"
     << "    ax.set_xscale('log', base=2)\n    ax.set_xlabel('n')\n    ax.set_ylabel(col)\n    ax.legend()\n"
     << "fig.tight_layout()\nfig.savefig(" << std::quoted(csv_path + ".png") << ")\n";
}

int run_bench(const std::string& config_path, const std::string& out_path, unsigned threads, bool timing,
              bool summary, const std::string& plot_script, std::ostream& out) {
  const ExperimentConfig cfg = load_config(config_path);
  RunOptions opts;
  opts.threads = threads;
  opts.record_timing = timing;
  const auto records = run_error_vs_n(cfg, opts);
  write_csv(records, out_path);
  std::size_t failures = 0;
  for (const auto& r : records) failures += r.failed() ? 1 : 0;
  out << "wrote " << records.size() << " records to " << out_path;
  if (failures != 0) out << " (" << failures << " failed trials)";
  out << '\n';
  if (summary) {
    out << std::left << std::setw(7) << "n" << std::setw(11) << "sketch" << std::setw(24) << "mean_error"
        << std::setw(24) << "stderr" << "mean_rescaled\n";
    for (const auto& s : summarize(records)) {
      out << std::left << std::setw(7) << s.n << std::setw(11) << to_string(s.sketch) << std::setw(24)
          << format_double(s.mean_error) << std::setw(24) << format_double(s.stderr_error)
          << format_double(s.mean_rescaled) << '\n';
    }
  }
  if (!plot_script.empty()) write_plot_script(plot_script, out_path);
  return 0;
}

int run_demo(Eigen::Index n, Eigen::Index m, Eigen::Index k, std::uint64_t seed, const std::string& format,
             std::ostream& out) {
  const NystromFailureReport r = run_nystrom_failure_demo(n, m, k, seed);
  if (format == "json") {
    json j{{"n", r.n}, {"m", r.m}, {"k", r.k}, {"seed", r.seed}, {"lambda", r.lambda},
           {"subsample_missed_block", r.subsample_missed_block}, {"exact_error", r.exact_error},
           {"subsample_error", r.subsample_error}, {"gaussian_error", r.gaussian_error},
           {"subsample_block2_sensitivity", r.subsample_block2_sensitivity},
           {"gaussian_block2_sensitivity", r.gaussian_block2_sensitivity}};
    out << j.dump(2) << '\n';
  } else {
    out << "n=" << r.n << " m=" << r.m << " k=" << r.k << " lambda=" << format_double(r.lambda) << '\n'
        << "subsample missed block 2: " << (r.subsample_missed_block ? "yes" : "no") << '\n'
        << "error exact=" << format_double(r.exact_error) << " subsample=" << format_double(r.subsample_error)
        << " gaussian=" << format_double(r.gaussian_error) << '\n'
        << "block-2 sensitivity subsample=" << format_double(r.subsample_block2_sensitivity)
        << " gaussian=" << format_double(r.gaussian_block2_sensitivity) << '\n';
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel ridge regression with randomized sketches"};
  app.name("sketchkrr");
  app.require_subcommand(1);

  ProblemOptions cr_opts;
  auto* cr = app.add_subcommand("critical-radius", "critical radius and statistical dimension of a design");
  add_problem_options(cr, cr_opts);

  ProblemOptions fit_problem;
  FitOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "fit one simulated dataset and report its error");
  add_problem_options(fit, fit_problem);
  add_fit_options(fit, fit_opts);

  ProblemOptions check_problem;
  CheckOptions check_opts;
  auto* check = app.add_subcommand("check-sketch", "K-satisfiability report for one drawn sketch");
  add_problem_options(check, check_problem);
  check->add_option("--sketch", check_opts.sketch, "gaussian | ros | subsample")->capture_default_str();
  check->add_option("--m", check_opts.m, "sketch size (default ceil(c-sketch * d_n))");
  check->add_option("--c-sketch", check_opts.c_sketch, "multiplier of d_n when --m is absent")->capture_default_str();
  check->add_option("--c-threshold", check_opts.c_threshold, "constant c of the tail condition")->capture_default_str();

  std::string config_path;
  std::string out_path = "results.csv";
  std::string plot_script;
  unsigned threads = 0;
  bool timing = false;
  bool summary = false;
  auto* bench = app.add_subcommand("bench", "run an error-versus-n sweep from a config file");
  bench->add_option("--config", config_path, "config file")->required();
  bench->add_option("--out", out_path, "CSV output path")->capture_default_str();
  bench->add_option("--threads", threads, "worker threads (0 = all cores)");
  bench->add_flag("--timing", timing, "record wall-clock times (output no longer reproducible)");
  bench->add_flag("--summary", summary, "print per-(n, sketch) means");
  bench->add_option("--plot-script", plot_script, "also write a matplotlib script for the CSV");

  Eigen::Index demo_n = 256;
  Eigen::Index demo_m = 8;
  Eigen::Index demo_k = 0;
  std::uint64_t demo_seed = 0;
  std::string demo_format = "text";
  auto* demo = app.add_subcommand("demo-nystrom-failure", "block-diagonal kernel where sub-sampling can miss a block");
  demo->add_option("--n", demo_n, "sample size")->capture_default_str();
  demo->add_option("--m", demo_m, "sketch size")->capture_default_str();
  demo->add_option("--k", demo_k, "size of the second block (default: largest allowed)");
  demo->add_option("--seed", demo_seed, "64-bit seed")->capture_default_str();
  demo->add_option("--format", demo_format, "text | json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*cr) return run_critical_radius(cr_opts, out);
    if (*fit) return run_fit(fit_problem, fit_opts, out, err);
    if (*check) return run_check_sketch(check_problem, check_opts, out);
    if (*bench) return run_bench(config_path, out_path, threads, timing, summary, plot_script, out);
    if (*demo) {
      if (demo_k == 0) {
        demo_k = static_cast<Eigen::Index>(std::ceil(static_cast<double>(demo_n) / static_cast<double>(demo_m) * std::log(2.0)));
      }
      return run_demo(demo_n, demo_m, demo_k, demo_seed, demo_format, out);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sketchkrr
