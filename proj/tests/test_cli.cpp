#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchkrr/cli.hpp"
#include "sketchkrr/csv.hpp"

namespace fs = std::filesystem;
using namespace sketchkrr;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sketchkrr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "sketchkrr_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("critical-radius") {
  const std::vector<std::string> args{"critical-radius", "--kernel", "sobolev1", "--n", "64", "--sigma", "1",
                                      "--design", "uniform-grid"};
  const Run a = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out.find("delta_n_sq=") != std::string::npos);
  CHECK(a.out.find("d_n=") != std::string::npos);
  CHECK(run(args).out == a.out);

  std::vector<double> x;
  for (int i = 1; i <= 64; ++i) x.push_back(i / 64.0);
  const ComplexityProfile p = make_profile(build_kernel_matrix(KernelSpec::sobolev1(), DesignPoints(x)).eigenvalues(), 1.0);

  std::vector<std::string> json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  const Run j = run(json_args);
  REQUIRE(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("delta_n_sq").get<double>() == p.delta_n_sq);
  CHECK(parsed.at("d_n").get<long>() == p.d_n);
  CHECK(a.out.find("d_n=" + std::to_string(p.d_n)) != std::string::npos);
}

TEST_CASE("fit smoke test") {
  const Run r = run({"fit", "--kernel", "gaussian", "--bandwidth", "0.25", "--n", "128", "--sketch", "ros",
                     "--m-rule", "loggauss", "--seed", "7"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  CHECK(r.out.find("sketch=ros") != std::string::npos);
  CHECK(r.out.find("m=3") != std::string::npos);

  const Run j = run({"fit", "--n", "64", "--sketch", "exact", "--format", "json"});
  REQUIRE(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).at("m").get<long>() == 64);
}

TEST_CASE("check-sketch") {
  const Run r = run({"check-sketch", "--n", "128", "--sketch", "gaussian", "--m", "40", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("lhs_isometry").get<double>() >= 0.0);
  CHECK(j.at("lhs_tail").get<double>() >= 0.0);
  CHECK(j.contains("pass"));
  CHECK(run({"check-sketch", "--n", "16", "--m", "17"}).code == 2);
}

TEST_CASE("bench writes identical CSV on repeated runs") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "bench.cfg";
  {
    std::ofstream f(cfg);
    f << "kernel = sobolev1\nn_grid = 16, 32\nsketches = exact, gaussian, ros, subsample\ntrials = 2\nseed = 5\n";
  }
  const fs::path out1 = dir / "a.csv";
  const fs::path out2 = dir / "b.csv";
  REQUIRE(run({"bench", "--config", cfg.string(), "--out", out1.string()}).code == 0);
  REQUIRE(run({"bench", "--config", cfg.string(), "--out", out2.string(), "--threads", "2"}).code == 0);
  const std::string a = slurp(out1);
  CHECK(a == slurp(out2));
  CHECK(read_csv(out1.string()).size() == 2 * 4 * 2);
  CHECK(a.rfind(kCsvHeader, 0) == 0);

  const fs::path plot = dir / "plot.py";
  const Run s = run({"bench", "--config", cfg.string(), "--out", out1.string(), "--summary", "--plot-script",
                     plot.string()});
  CHECK(s.code == 0);
  CHECK(s.out.find("mean_error") != std::string::npos);
  CHECK(fs::exists(plot));

  const fs::path bad = dir / "bad.cfg";
  {
    std::ofstream f(bad);
    f << "trials = 2\nflavour = mint\n";
  }
  const Run b = run({"bench", "--config", bad.string(), "--out", out1.string()});
  CHECK(b.code == 2);
  CHECK(b.err.find("line 2") != std::string::npos);
  CHECK(run({"bench", "--config", (dir / "missing.cfg").string()}).code == 1);
}

TEST_CASE("demo-nystrom-failure") {
  const Run r = run({"demo-nystrom-failure", "--n", "64", "--m", "8", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("k").get<long>() == 6);
  CHECK(j.contains("subsample_missed_block"));
  CHECK(run({"demo-nystrom-failure", "--n", "64", "--m", "8", "--k", "7"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run({"critical-radius", "--bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"critical-radius", "--kernel", "cubic"}).code == 2);
  CHECK(run({"critical-radius", "--n", "1"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
