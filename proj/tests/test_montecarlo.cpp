#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparsereg/error.hpp"
#include "sparsereg/montecarlo.hpp"

using namespace sparsereg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Small certified setting: 28 pairwise correlations with sd 1/32.
ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 1024;
  c.m = 8;
  c.design_reseed_attempts = 20;
  c.trials = 12;
  c.base_seed = 5;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("Wilson intervals (reference values from statsmodels)") {
  const auto a = wilson_interval(195, 200);
  CHECK_THAT(a.lower, WithinAbs(0.942821659593358, 1e-14));
  CHECK_THAT(a.upper, WithinAbs(0.9892752803482386, 1e-14));
  CHECK_THAT(a.half_width, WithinAbs(0.023226810377440368, 1e-14));
  const auto b = wilson_interval(200, 200);
  CHECK_THAT(b.lower, WithinAbs(0.9811546736227335, 1e-14));
  CHECK(b.upper == 1.0);
  const auto c = wilson_interval(0, 10);
  CHECK(c.lower == 0.0);
  CHECK_THAT(c.upper, WithinAbs(0.2775327998628892, 1e-14));
}

TEST_CASE("coherence gate precedes any work") {
  ExperimentConfig c = small_config();
  c.n = 64;
  c.m = 32;
  c.s = 4;
  try {
    prepare_experiment(c);
    FAIL("expected the coherence gate");
  } catch (const GateFailure& e) {
    CHECK(e.gate() == Gate::coherence);
    CHECK(static_cast<int>(e.gate()) == 2);
  }
}

TEST_CASE("signal-strength gate in the sign suite") {
  ExperimentConfig c = small_config();
  c.suite = Suite::thm2;
  c.rho = 0.01;
  try {
    prepare_experiment(c);
    FAIL("expected the signal gate");
  } catch (const GateFailure& e) {
    CHECK(e.gate() == Gate::signal_strength);
  }
  c.rho = 0.0;  // default rho = 2.5 c2 r clears c1 r = 2.2 c2 r
  CHECK_NOTHROW(prepare_experiment(c));
}

TEST_CASE("row-energy gate in the general-noise suite") {
  ExperimentConfig c = small_config();
  c.suite = Suite::thm3;
  c.generator = "gaussian";
  c.c_prime_cap = 1.0;  // max_j X_ij^2 of a gaussian row exceeds 1 on average
  try {
    prepare_experiment(c);
    FAIL("expected the row-energy gate");
  } catch (const GateFailure& e) {
    CHECK(e.gate() == Gate::row_energy);
  }
  c.generator = "rademacher";
  CHECK_NOTHROW(prepare_experiment(c));
}

TEST_CASE("setup derives r, constants and theta*") {
  const ExperimentSetup st = prepare_experiment(small_config());
  CHECK(st.design.coherence() <= 1.0 / (1.2 * 7.0));
  CHECK_THAT(st.r, WithinRel(4.0 * std::sqrt(std::log(8.0) / 1024.0), 1e-14));
  REQUIRE(st.estimators.size() == 2);
  const double c2max = st.estimators[0].constants.c2;  // the Lasso's is the larger
  CHECK_THAT(st.requested_rho, WithinRel(2.5 * c2max * st.r, 1e-14));
  CHECK(st.target.rho >= st.requested_rho);
  const auto d = st.derived();
  CHECK(d.contains("r"));
  CHECK(d.at("constants").at("lasso").contains("c2"));
  CHECK(d.at("constants").at("dantzig").at("c0") == 1.0);
}

TEST_CASE("experiment outputs: row counts, implications, determinism across workers") {
  const auto dir = std::filesystem::temp_directory_path() / "sparsereg_mc_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  ExperimentConfig c = small_config();
  c.suite = Suite::thm2;
  c.out_csv = (dir / "a.csv").string();
  c.out_summary = (dir / "a.jsonl").string();
  const ExperimentResult one = run_experiment(c);
  CHECK(one.records.size() == 12);
  CHECK(one.summary.implication_violations == 0);
  CHECK(one.summary.dominance_violations == 0);
  CHECK(one.summary.failed_trials == 0);
  for (std::size_t t = 0; t < one.records.size(); ++t) {
    CHECK(one.records[t].trial == t);
    CHECK(one.records[t].seed == 5 + t);
  }

  c.workers = 3;
  c.out_csv = (dir / "b.csv").string();
  c.out_summary = (dir / "b.jsonl").string();
  run_experiment(c);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));

  std::ifstream csv(dir / "a.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == kTrialCsvHeader);
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 24);

  const auto summary = nlohmann::json::parse(slurp(dir / "a.jsonl"));
  CHECK(summary.at("trials") == 12);
  CHECK(summary.at("config").at("suite") == "thm2");
  CHECK(summary.contains("tool"));
  CHECK(summary.at("estimators").contains("lasso"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("more than 5% failed trials is a solver failure") {
  ExperimentConfig c = small_config();
  c.lasso_max_iter = 1;
  c.lasso_tol = 1e-300;
  CHECK_THROWS_AS(run_experiment(c), SolverError);
}

TEST_CASE("general-noise suite sweeps delta on the same theta*") {
  ExperimentConfig c = small_config();
  c.suite = Suite::thm3;
  c.noise.family = NoiseFamily::student_t;
  c.delta_grid = {2.0, 0.5};
  c.trials = 10;
  const GeneralNoiseResult res = general_noise_suite(c);
  REQUIRE(res.grid.size() == 3);
  CHECK(res.grid[0].delta == 0.5);
  CHECK(res.grid[1].delta == 1.0);
  CHECK(res.grid[2].delta == 2.0);
  CHECK(res.grid[0].r < res.grid[1].r);
  CHECK(res.grid[1].r < res.grid[2].r);
  for (const auto& pt : res.grid) CHECK(pt.summary.derived.at("support") == res.main.summary.derived.at("support"));
  CHECK(res.grid[1].freq_event_a == res.main.summary.freq_event_a);
  CHECK_THROWS_AS(general_noise_suite(small_config()), InvalidParameter);
}

TEST_CASE("moment diagnostic") {
  const DesignMatrix d = gen_rademacher(128, 16, 1);
  const NoiseModel nm;
  const auto a = moment_diagnostic(d, nm, 500, 3);
  const auto b = moment_diagnostic(d, nm, 500, 3);
  CHECK(a.ratio == b.ratio);
  // Rademacher rows: sum_i max_j X_ij^2 = n
  CHECK_THAT(a.structural_bound, WithinRel(std::log(16.0) / 128.0, 1e-14));
  CHECK(a.ratio > 0.1);
  CHECK(a.ratio < 10.0);
  CHECK_THROWS_AS(moment_diagnostic(d, nm, 99, 3), InvalidParameter);
  CHECK_THROWS_AS(moment_diagnostic(gen_rademacher(8, 2, 1), nm, 100, 3), InvalidParameter);
}
