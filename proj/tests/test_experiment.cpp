#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "sketchkrr/csv.hpp"
#include "sketchkrr/errors.hpp"
#include "sketchkrr/experiment.hpp"

using namespace sketchkrr;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_grid = {16, 32};
  c.arms = {Arm::kExact, Arm::kGaussian, Arm::kRos, Arm::kSubSample};
  c.trials = 3;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("target functions") {
  CHECK(fstar_value(FStar::kAbsShift, 0.5) == 0.5);
  CHECK(fstar_value(FStar::kAbsShift, -0.5) == -0.5);
  CHECK(fstar_value(FStar::kQuad, 0.5) == -0.5);
  CHECK(fstar_value(FStar::kQuad, 0.0) == -1.0);
}

TEST_CASE("generate_data") {
  ExperimentConfig c;
  SUBCASE("uniform grid with sigma = 0 is noiseless") {
    c.sigma = 0.0;
    const RegressionSample s = generate_data(c, 8, 3);
    for (Eigen::Index i = 0; i < 8; ++i) {
      CHECK(s.pts.x[static_cast<std::size_t>(i)] == double(i + 1) / 8.0);
      CHECK(s.y(i) == (*s.fstar)(i));
    }
  }
  SUBCASE("deterministic in the seed") {
    c.design = Design::kIidUniform;
    const RegressionSample a = generate_data(c, 50, 9);
    const RegressionSample b = generate_data(c, 50, 9);
    const RegressionSample d = generate_data(c, 50, 10);
    CHECK(a.pts.x == b.pts.x);
    CHECK(a.y == b.y);
    CHECK(a.y != d.y);
  }
  SUBCASE("irregular design") {
    c.design = Design::kIrregular;
    const Eigen::Index n = 400;
    const RegressionSample s = generate_data(c, n, 1);
    const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(double(n))));
    for (std::size_t i = 0; i + k < std::size_t(n); ++i) {
      CHECK(s.pts.x[i] >= 0.0);
      CHECK(s.pts.x[i] <= 0.5);
    }
    double mean = 0.0;
    for (std::size_t i = std::size_t(n) - k; i < std::size_t(n); ++i) mean += s.pts.x[i];
    mean /= double(k);
    // Cluster mean 1 with standard error (1/sqrt n)/sqrt k = 0.0025.
    CHECK(std::abs(mean - 1.0) < 0.0125);
  }
  CHECK_THROWS_AS(generate_data(c, 1, 0), DomainError);
}

TEST_CASE("rate factors") {
  CHECK(rate_factor(KernelSpec::sobolev1(), 1000) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rate_factor(KernelSpec::gaussian(0.25), 100) == doctest::Approx(100.0 / std::sqrt(std::log(100.0))).epsilon(1e-14));
  CHECK(rate_factor(KernelSpec::polynomial(2), 64) == 64.0);
}

TEST_CASE("sketch dimension rules") {
  ExperimentConfig c;
  c.m_rule = MRule::kCubeRoot;
  CHECK(sketch_dimension(c, Arm::kGaussian, 1000, 3) == 10);
  CHECK(sketch_dimension(c, Arm::kGaussian, 1001, 3) == 11);
  c.m_rule = MRule::kLogGauss;
  CHECK(sketch_dimension(c, Arm::kGaussian, 1024, 3) == static_cast<Eigen::Index>(std::ceil(1.25 * std::sqrt(std::log(1024.0)))));
  c.m_rule = MRule::kLogFour;
  CHECK(sketch_dimension(c, Arm::kRos, 1024, 3) == 11);
  c.m_rule = MRule::kFixed;
  c.m_fixed = 40;
  CHECK(sketch_dimension(c, Arm::kRos, 32, 3) == 32);
  c.m_rule = MRule::kStatDim;
  c.c_statdim = 6.0;
  CHECK(sketch_dimension(c, Arm::kGaussian, 256, 2) == 12);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# gaussian sweep\n"
      "kernel = gaussian\n"
      "bandwidth = 0.25   # h\n"
      "fstar = quad\n"
      "design = uniform-grid\n"
      "n_grid = 64, 128\n"
      "sketches = ros, exact, gaussian, ros\n"
      "m_rule = loggauss\n"
      "lambda_rule = two_delta_sq\n"
      "trials = 5\n"
      "seed = 42\n");
  CHECK(c.kernel.kind() == KernelKind::kGaussian);
  CHECK(c.kernel.bandwidth() == 0.25);
  CHECK(c.fstar == FStar::kQuad);
  CHECK(c.design == Design::kUniformGrid);
  CHECK(c.n_grid == std::vector<Eigen::Index>{64, 128});
  CHECK(c.arms == std::vector<Arm>{Arm::kExact, Arm::kGaussian, Arm::kRos});
  CHECK(c.m_rule == MRule::kLogGauss);
  CHECK(c.trials == 5);
  CHECK(c.seed == 42);

  const ExperimentConfig d = parse_config("kernel = polynomial\ndegree = 3\nsketches = nystrom\n");
  CHECK(d.kernel.degree() == 3);
  CHECK(d.arms == std::vector<Arm>{Arm::kSubSample});

  auto fails_on_line = [](const std::string& text, const std::string& fragment) {
    try {
      parse_config(text);
    } catch (const DomainError& e) {
      return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_on_line("trials = 3\ncolour = red\n", "line 2"));
  CHECK(fails_on_line("seed = 1\nseed = 2\n", "line 2"));
  CHECK(fails_on_line("\n\nn_grid = 4, x\n", "line 3"));
  CHECK(fails_on_line("trials = 0\n", "trials"));
  CHECK(fails_on_line("n_grid = 1, 8\n", "n_grid"));
  CHECK(fails_on_line("just words\n", "line 1"));
  CHECK(fails_on_line("m_rule = sometimes\n", "line 1"));
}

TEST_CASE("derived seeds never collide") {
  const ExperimentConfig c = small_config();
  std::set<std::uint64_t> seen;
  std::size_t count = 0;
  for (Eigen::Index n : {16, 32, 64, 128, 256, 512, 1024, 2048}) {
    for (unsigned stream = 0; stream <= kDataStream; ++stream) {
      for (int t = 0; t < 200; ++t) {
        seen.insert(derive_seed(c.seed, n, stream, t));
        ++count;
      }
    }
  }
  CHECK(seen.size() == count);
  CHECK(derive_seed(0, 16, 1, 0) != derive_seed(1, 16, 1, 0));
  CHECK_THROWS_AS(derive_seed(0, 16, 16, 0), DomainError);
  CHECK_THROWS_AS(derive_seed(0, 16, 0, -1), DomainError);
}

TEST_CASE("run_error_vs_n") {
  const ExperimentConfig c = small_config();
  const auto records = run_error_vs_n(c, RunOptions{1, false});
  REQUIRE(records.size() == c.n_grid.size() * c.arms.size() * std::size_t(c.trials));

  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TrialRecord& r = records[i];
    CHECK_FALSE(r.failed());
    CHECK(r.error >= 0.0);
    CHECK(std::abs(r.rescaled_error - r.error * rate_factor(c.kernel, r.n)) <= 1e-12 * std::max(1.0, r.rescaled_error));
    CHECK(r.lambda == doctest::Approx(2.0 * r.delta_n_sq).epsilon(1e-15));
    CHECK(r.wall_time_ms == 0.0);
    CHECK(r.m == (r.sketch == Arm::kExact ? r.n : static_cast<Eigen::Index>(std::ceil(std::cbrt(double(r.n))))));
    seeds.insert(r.seed);
    if (i > 0) {
      const TrialRecord& p = records[i - 1];
      CHECK(std::tie(p.n, p.sketch, p.trial) < std::tie(r.n, r.sketch, r.trial));
    }
  }
  CHECK(seeds.size() == records.size());

  SUBCASE("thread count does not change the output") {
    CHECK(run_error_vs_n(c, RunOptions{3, false}) == records);
  }
  SUBCASE("summaries") {
    const auto summary = summarize(records);
    CHECK(summary.size() == c.n_grid.size() * c.arms.size());
    for (const auto& s : summary) {
      CHECK(s.count == c.trials);
      CHECK(s.failures == 0);
      CHECK(s.stderr_error >= 0.0);
    }
    CHECK(rescaled_flatness(summary, Arm::kExact, {16, 32}) >= 1.0);
    CHECK_THROWS_AS(rescaled_flatness(summary, Arm::kExact, {64}), DomainError);
  }
}

TEST_CASE("failed trials leave marker rows") {
  ExperimentConfig c;
  // (1 + uv)^2000 overflows near u = v = 1, so every cell fails.
  c.kernel = KernelSpec::polynomial(2000);
  c.n_grid = {8};
  c.arms = {Arm::kExact, Arm::kGaussian};
  c.trials = 2;
  const auto records = run_error_vs_n(c, RunOptions{1, false});
  REQUIRE(records.size() == 4);
  for (const auto& r : records) {
    CHECK(r.failed());
    CHECK(std::isnan(r.rescaled_error));
  }
  const auto summary = summarize(records);
  CHECK(summary.front().failures == 2);
  CHECK(summary.front().count == 0);
}

TEST_CASE("CSV persistence") {
  const auto records = run_error_vs_n(small_config(), RunOptions{1, false});
  SUBCASE("round trip is exact") {
    std::stringstream buf;
    write_csv(records, buf);
    CHECK(read_csv(buf) == records);
  }
  SUBCASE("NaN marker rows round trip") {
    std::vector<TrialRecord> rs(1);
    rs[0].error = std::nan("");
    rs[0].rescaled_error = std::nan("");
    std::stringstream buf;
    write_csv(rs, buf);
    CHECK(buf.str().find(",nan,") != std::string::npos);
    CHECK(read_csv(buf) == rs);
  }
  SUBCASE("empty list is header only") {
    std::stringstream buf;
    write_csv({}, buf);
    CHECK(buf.str() == std::string(kCsvHeader) + "\n");
    CHECK(read_csv(buf).empty());
  }
  SUBCASE("malformed rows are reported by line") {
    std::stringstream buf;
    write_csv(std::vector<TrialRecord>(records.begin(), records.begin() + 2), buf);
    buf << "16,3,gaussian,oops\n";
    try {
      read_csv(buf);
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }
  SUBCASE("path errors name the path") {
    try {
      read_csv(std::string("/nonexistent/dir/x.csv"));
      FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("/nonexistent/dir/x.csv") != std::string::npos);
    }
  }
}

TEST_CASE("Nyström failure demo") {
  const Eigen::Index n = 64;
  const Eigen::Index m = 8;
  const Eigen::Index k = 5;  // ceil(8 ln 2) = 6
  bool found_miss = false;
  bool found_hit = false;
  for (std::uint64_t seed = 0; seed < 40 && !(found_miss && found_hit); ++seed) {
    const NystromFailureReport r = run_nystrom_failure_demo(n, m, k, seed);
    CHECK(r.gaussian_block2_sensitivity > 1e-3);
    if (r.subsample_missed_block) {
      found_miss = true;
      CHECK(r.subsample_block2_sensitivity <= 1e-12);
      CHECK(r.subsample_error > r.exact_error);
    } else {
      found_hit = true;
      CHECK(r.subsample_block2_sensitivity > 1e-3);
    }
  }
  CHECK(found_miss);
  CHECK(found_hit);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK_FALSE(run_nystrom_failure_demo(16, 16, 1, seed).subsample_missed_block);
  }
  CHECK_THROWS_AS(run_nystrom_failure_demo(64, 8, 7, 0), DomainError);
  CHECK_THROWS_AS(run_nystrom_failure_demo(64, 0, 1, 0), DomainError);

  const KernelMatrix bd = block_diagonal_kernel(10, 3);
  CHECK(bd.matrix().topRightCorner(7, 3).isZero(0.0));
  CHECK(bd.matrix().bottomLeftCorner(3, 7).isZero(0.0));
}
