// Acceptance run: prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sparsereg/dantzig.hpp"
#include "sparsereg/datagen.hpp"
#include "sparsereg/design.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/montecarlo.hpp"
#include "sparsereg/rng.hpp"

using namespace sparsereg;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

DenseVector random_response(const DesignMatrix& d, Rng& rng, double scale) {
  DenseVector theta = DenseVector::Zero(static_cast<Eigen::Index>(d.cols()));
  for (std::size_t j : rng.subset(d.cols(), std::min<std::size_t>(3, d.cols())))
    theta[static_cast<Eigen::Index>(j)] = rng.sign() * rng.uniform(0.5, 2.0);
  DenseVector y = d.x() * theta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += scale * rng.normal();
  return y;
}

Verdict orthogonal_oracle() {
  const auto t0 = Clock::now();
  const DesignMatrix d = gen_hadamard(32);
  Rng rng(101);
  double lasso_err = 0.0, dantzig_err = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const DenseVector y = random_response(d, rng, 1.0);
    const DenseVector g = d.x().transpose() * y / 32.0;
    for (double r : {0.01, 0.05, 0.1, 0.3, 1.0}) {
      DenseVector ref(32);
      for (Eigen::Index j = 0; j < 32; ++j) ref[j] = oracle::soft(g[j], r);
      lasso_err = std::max(lasso_err, (lasso_fit(d, y, r).theta - ref).cwiseAbs().maxCoeff());
      const DantzigSolution ds = dantzig_fit(d, y, r);
      dantzig_err = std::max(dantzig_err, ds.optimal() ? (ds.theta - ref).cwiseAbs().maxCoeff() : 1e300);
    }
  }
  const double t = seconds_since(t0);
  return {lasso_err <= 1e-8 && dantzig_err <= 1e-6 && t < 5.0,
          "lasso max err " + fmt("%.2e", lasso_err) + ", dantzig max err " + fmt("%.2e", dantzig_err) +
              ", " + fmt("%.2f", t) + " s"};
}

Verdict brute_force() {
  const auto t0 = Clock::now();
  Rng rng(202);
  double lasso_gap = 0.0, dantzig_gap = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t m = 2 + static_cast<std::size_t>(inst % 5);
    const DesignMatrix d = gen_normalized_gaussian(8, m, 1000 + static_cast<std::uint64_t>(inst));
    const DenseVector y = random_response(d, rng, 0.5);
    const double gmax = (d.x().transpose() * y / 8.0).cwiseAbs().maxCoeff();
    const double r = rng.uniform(0.02, 0.8) * gmax;
    lasso_gap = std::max(lasso_gap, std::abs(lasso_fit(d, y, r).objective - oracle::lasso_enumeration(d.x(), y, r)));
    const DantzigSolution ds = dantzig_fit(d, y, r);
    dantzig_gap = std::max(dantzig_gap, ds.optimal() ? std::abs(ds.l1_norm - oracle::dantzig_enumeration(d.x(), y, r))
                                                     : 1e300);
  }
  const double t = seconds_since(t0);
  return {lasso_gap <= 1e-6 && dantzig_gap <= 1e-6 && t < 30.0,
          "max objective gap lasso " + fmt("%.2e", lasso_gap) + ", dantzig " + fmt("%.2e", dantzig_gap) + ", " +
              fmt("%.2f", t) + " s"};
}

Verdict dominance() {
  std::size_t violations = 0, solves = 0, skipped = 0;
  double worst_slack = 1e300, worst_excess = -1e300;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 40 + 20 * static_cast<std::size_t>(k % 4);
    const std::size_t m = 20 + 30 * static_cast<std::size_t>(k % 5);
    const auto seed = static_cast<std::uint64_t>(k + 1);
    const DesignMatrix d = k % 2 ? gen_rademacher(n, m, seed) : gen_normalized_gaussian(n, m, seed);
    const NoiseFamily fam = k % 3 == 0 ? NoiseFamily::student_t : NoiseFamily::gaussian;
    const Instance inst = synthesize(d, gen_target(m, 1 + k % 4, 1.0, seed), {fam, 0.5 + 0.25 * (k % 3), 3}, seed);
    const double r = (0.05 + 0.1 * (k % 5)) * std::sqrt(std::log(static_cast<double>(m)) / static_cast<double>(n)) * 4.0;
    LassoSolution ls;
    try {
      ls = lasso_fit(d, inst.y, r);
    } catch (const NonConvergence&) {
      ++skipped;  // only converged Lasso solutions are in scope
      continue;
    }
    const DantzigSolution ds = dantzig_fit(d, inst.y, r);
    ++solves;
    const auto feas = dantzig_feasibility(d, inst.y, ls.theta, r);
    const double excess = ds.l1_norm - ls.theta.lpNorm<1>();
    worst_slack = std::min(worst_slack, feas.slack / (1.0 + r));
    worst_excess = std::max(worst_excess, excess);
    if (!ds.optimal() || !feas.feasible || excess > 1e-7) ++violations;
  }
  return {violations == 0 && solves == 200,
          std::to_string(solves) + " paired solves (" + std::to_string(skipped) + " unconverged), " +
              std::to_string(violations) + " violations, min slack/(1+r) " + fmt("%.2e", worst_slack) +
              ", max |D|_1 - |L|_1 " + fmt("%.2e", worst_excess)};
}

Verdict kappa_certification() {
  const auto t0 = Clock::now();
  const double alpha = 2.0, floor = std::sqrt(1.0 - 1.0 / alpha) - 1e-9;
  double worst = 1e300;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DesignMatrix d = gen_rademacher_certified(256, 16, 1.0 / (alpha * (1.0 + 2.0 * kLassoCone)), seed);
    for (double c0 : {kDantzigCone, kLassoCone}) {
      KappaProbeOptions opt;
      opt.samples = 10000;
      opt.seed = seed;
      worst = std::min(worst, kappa_probe(d, 1, c0, alpha, opt).min_ratio_found);
    }
  }
  const double t = seconds_since(t0);
  return {worst >= floor && t < 20.0,
          "min ratio " + fmt("%.6f", worst) + " vs sqrt(1 - 1/alpha) = " + fmt("%.6f", floor + 1e-9) + ", " +
              fmt("%.2f", t) + " s"};
}

ExperimentConfig full_scale() {
  ExperimentConfig c;
  c.n = 4096;
  c.m = 512;
  c.a = 4.0;
  c.alpha = 1.2;
  c.s = 1;
  c.design_reseed_attempts = 50;
  c.trials = 200;
  c.base_seed = 1;
  return c;
}

std::string ci_text(const EstimatorSummary& e, double freq, const WilsonInterval& ci) {
  return to_string(e.kind) + " " + fmt("%.3f", freq) + " [" + fmt("%.3f", ci.lower) + ", " + fmt("%.3f", ci.upper) + "]";
}

Verdict general_noise_check() {
  const auto t0 = Clock::now();
  ExperimentConfig c = full_scale();
  c.suite = Suite::thm3;
  c.noise = {NoiseFamily::student_t, 1.0, 3};
  c.delta = 1.0;
  c.delta_grid = {0.5, 1.0, 2.0};
  const GeneralNoiseResult res = general_noise_suite(c);
  bool ok = res.monotone_in_delta && res.main.summary.failed_trials == 0;
  std::string detail;
  for (const auto& e : res.main.summary.estimators) {
    ok = ok && e.freq_within_bound >= 0.9;
    detail += ci_text(e, e.freq_within_bound, e.within_ci) + "; ";
  }
  detail += "within-bound by delta:";
  for (const auto& pt : res.grid) {
    detail += " " + fmt("%.1f", pt.delta) + "->";
    for (const auto& [k, f] : pt.freq_within_bound) detail += fmt("%.3f", f) + "/";
    detail.pop_back();
  }
  const double t = seconds_since(t0);
  ok = ok && t < 1200.0;
  return {ok, detail + (res.monotone_in_delta ? " (monotone)" : " (NOT monotone)") + ", " + fmt("%.0f", t) + " s"};
}

Verdict moment_check() {
  constexpr double kCeiling = 2.0;  // frozen after a pilot run (ratio ~1.6)
  const auto t0 = Clock::now();
  const MomentDiagnostic res = moment_diagnostic(gen_rademacher(256, 64, 1), {NoiseFamily::gaussian, 1.0, 3}, 10000, 1);
  const double t = seconds_since(t0);
  return {res.ratio <= kCeiling && t < 10.0,
          "ratio " + fmt("%.4f", res.ratio) + " <= ceiling " + fmt("%.1f", kCeiling) + ", " + fmt("%.2f", t) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "sparsereg_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentConfig c;
  c.suite = Suite::thm2;
  c.n = 1024;
  c.m = 32;
  c.design_reseed_attempts = 50;
  c.trials = 40;
  c.base_seed = 17;
  std::vector<std::string> csv, summary;
  for (std::size_t workers : {1, 1, 2}) {
    c.workers = workers;
    const std::string tag = std::to_string(csv.size());
    c.out_csv = (dir / ("t" + tag + ".csv")).string();
    c.out_summary = (dir / ("t" + tag + ".jsonl")).string();
    run_experiment(c);
    csv.push_back(slurp(c.out_csv));
    summary.push_back(slurp(c.out_summary));
  }
  fs::remove_all(dir);
  const bool ok = !csv[0].empty() && csv[0] == csv[1] && csv[0] == csv[2] && summary[0] == summary[1] &&
                  summary[0] == summary[2];
  return {ok, "3 runs (workers 1, 1, 2): CSV " + std::to_string(csv[0].size()) + " bytes, summary " +
                  std::to_string(summary[0].size()) + " bytes, " + (ok ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Verdict()>& f) {
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "orthogonal-design oracle", orthogonal_oracle);
  report(2, "small-instance brute force", brute_force);
  report(3, "Lasso feasibility and l1 dominance", dominance);
  report(4, "restricted eigenvalue lower bound", kappa_certification);

  // Criteria 5, 6 and 8 share one run of the sign suite at full scale.
  std::optional<ExperimentResult> run;
  double run_seconds = 0.0;
  std::string run_error;
  try {
    ExperimentConfig c = full_scale();
    c.suite = Suite::thm2;
    const auto t0 = Clock::now();
    run = run_experiment(c);
    run_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto with_run = [&](const std::function<Verdict(const ExperimentResult&)>& f) {
    return [&, f] {
      if (!run) return Verdict{false, "full-scale run failed: " + run_error};
      return f(*run);
    };
  };

  report(5, "sup-norm bound under gaussian noise", with_run([&](const ExperimentResult& r) {
    const auto& s = r.summary;
    bool ok = s.failed_trials == 0 && s.implication_violations == 0 && run_seconds < 1200.0 &&
              r.setup.coherence.s_adm_lasso.admits(1) && r.setup.coherence.s_adm_dantzig.admits(1);
    std::string detail = "mu " + fmt("%.4f", r.setup.design.coherence()) + ", r " + fmt("%.4f", s.r) + "; ";
    for (const auto& e : s.estimators) {
      ok = ok && e.within_ci.lower >= 0.97;
      detail += ci_text(e, e.freq_within_bound, e.within_ci) + "; ";
    }
    return Verdict{ok, detail + std::to_string(s.implication_violations) + " implication violations, " +
                           fmt("%.0f", run_seconds) + " s"};
  }));

  report(6, "sign recovery after thresholding", with_run([&](const ExperimentResult& r) {
    const auto& s = r.summary;
    bool ok = s.implication_violations == 0;
    std::string detail;
    for (const auto& e : s.estimators) {
      ok = ok && e.sign_gate && e.sign_ci.lower >= 0.97;
      detail += ci_text(e, e.freq_sign_ok, e.sign_ci) + (e.sign_gate ? "" : " (gate failed)") + "; ";
    }
    std::size_t sign_violations = 0;
    for (const auto& rec : r.records)
      for (const auto& o : rec.outcomes) sign_violations += o.within_bound && o.sign_gate && !o.sign_ok;
    ok = ok && sign_violations == 0;
    return Verdict{ok, detail + std::to_string(sign_violations) + " sign implication violations"};
  }));

  report(7, "sup-norm bound under Student-t noise", general_noise_check);

  report(8, "good-event frequency", with_run([&](const ExperimentResult& r) {
    const auto& s = r.summary;
    const double floor = s.probability_floor.value_or(1.0);
    return Verdict{s.freq_event_a >= floor - 0.02,
                   "freq " + fmt("%.3f", s.freq_event_a) + " vs floor " + fmt("%.4f", floor) + " - 0.02"};
  }));

  report(9, "noise moment diagnostic", moment_check);
  report(10, "determinism", determinism);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
