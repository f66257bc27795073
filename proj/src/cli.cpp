#include "sparsereg/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparsereg/dantzig.hpp"
#include "sparsereg/datagen.hpp"
#include "sparsereg/design.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/montecarlo.hpp"
#include "sparsereg/rates.hpp"
#include "sparsereg/version.hpp"

namespace sparsereg::cli {
namespace {

using nlohmann::json;

std::vector<double> to_std(const DenseVector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::size_t> nonzeros(const DenseVector& v) {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (v[j] != 0.0) out.push_back(static_cast<std::size_t>(j));
  return out;
}

json with_header(json body) {
  json j{{"tool", kToolName}, {"version", kToolVersion}};
  j.update(body);
  return j;
}

DesignMatrix load_design(const std::string& path) { return DesignMatrix::from_matrix(read_matrix_file(path)); }

struct GenDesignArgs {
  std::string gen = "rademacher";
  std::size_t n = 0, m = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int gen_design(const GenDesignArgs& a, std::ostream& out) {
  if (a.n == 0 || a.m == 0) throw InvalidParameter("--n and --M must be positive");
  const DesignMatrix d = a.gen == "gaussian" ? gen_normalized_gaussian(a.n, a.m, a.seed)
                                             : gen_rademacher(a.n, a.m, a.seed);
  if (a.out.empty()) write_matrix(out, d.x());
  else write_matrix_file(a.out, d.x());
  return kOk;
}

struct GenInstanceArgs {
  std::string design;
  std::string gen = "rademacher";
  std::size_t n = 0, m = 0;
  std::uint64_t design_seed = 1;
  std::size_t s = 1;
  double rho = 1.0;
  std::uint64_t target_seed = 1;
  std::string noise = "gaussian";
  double sigma = 1.0;
  int df = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int gen_instance(const GenInstanceArgs& a) {
  DesignMatrix d = !a.design.empty() ? load_design(a.design)
                   : a.gen == "gaussian" ? gen_normalized_gaussian(a.n, a.m, a.design_seed)
                                         : gen_rademacher(a.n, a.m, a.design_seed);
  NoiseModel noise{parse_noise_family(a.noise), a.sigma, a.df};
  noise.validate();
  const SparseTarget target = gen_target(d.cols(), a.s, a.rho, a.target_seed);
  write_bundle(a.out, synthesize(d, target, noise, a.seed));
  return kOk;
}

int certify(const std::string& in, std::vector<double> alphas, std::ostream& out) {
  const DesignMatrix d = load_design(in);
  json grid = json::array();
  for (double alpha : alphas) {
    if (!(alpha > 1.0)) throw InvalidParameter("alpha must exceed 1");
    grid.push_back(coherence_json(coherence(d, alpha)));
  }
  out << with_header({{"n", d.rows()},
                      {"M", d.cols()},
                      {"coherence", d.coherence()},
                      {"row_energy", d.row_energy()},
                      {"reports", grid}})
             .dump()
      << '\n';
  return kOk;
}

struct SolveArgs {
  std::string estimator = "lasso";
  std::string in;
  double r = 0.0;
  double a = 4.0;
};

int solve(const SolveArgs& a, std::ostream& out) {
  const Instance inst = read_bundle(a.in);
  const DesignMatrix& d = inst.design;
  double r = a.r;
  if (r <= 0.0) {
    RateSpec spec;
    spec.a = a.a;
    spec.sigma = inst.noise.sigma;
    spec.n = d.rows();
    spec.m = d.cols();
    r = compute_r(spec);
  }
  json j{{"estimator", a.estimator}, {"r", r}, {"n", d.rows()}, {"M", d.cols()}};
  DenseVector theta;
  if (a.estimator == "lasso") {
    const LassoSolution sol = lasso_fit(d, inst.y, r);
    theta = sol.theta;
    j["objective"] = sol.objective;
    j["kkt_residual"] = sol.kkt_residual;
    j["iterations"] = sol.iterations;
  } else if (a.estimator == "dantzig") {
    const DantzigSolution sol = dantzig_fit(d, inst.y, r);
    j["lp_status"] = to_string(sol.lp_status);
    if (!sol.optimal()) {
      out << with_header(j).dump() << '\n';
      throw SolverError("dantzig LP returned status " + to_string(sol.lp_status));
    }
    theta = sol.theta;
    j["duality_gap"] = sol.duality_gap;
    j["pivots"] = sol.pivots;
  } else {
    throw InvalidParameter("--estimator must be lasso or dantzig");
  }
  const FeasibilityResult feas = dantzig_feasibility(d, inst.y, theta, r);
  j["l1_norm"] = theta.lpNorm<1>();
  j["constraint_slack"] = feas.slack;
  j["feasible"] = feas.feasible;
  j["support"] = nonzeros(theta);
  j["theta"] = to_std(theta);
  out << with_header(j).dump() << '\n';
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::string suite;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::string out_csv, out_summary;
  std::size_t workers = 0;
  bool has_base_seed = false;
};

int experiment(const ExperimentArgs& a, std::ostream& out) {
  ExperimentConfig c;
  if (!a.config.empty()) c = parse_config_file(a.config);
  json overrides = json::object();
  if (!a.suite.empty()) overrides["suite"] = a.suite;
  if (a.trials) overrides["trials"] = a.trials;
  if (a.has_base_seed) overrides["base_seed"] = a.base_seed;
  if (!a.out_csv.empty()) overrides["out_csv"] = a.out_csv;
  if (!a.out_summary.empty()) overrides["out_summary"] = a.out_summary;
  if (a.workers) overrides["workers"] = a.workers;
  c = apply_config(overrides, c);
  c.validate();

  if (c.suite == Suite::thm3) {
    const GeneralNoiseResult res = general_noise_suite(c);
    json j = res.main.summary.to_json();
    json grid = json::array();
    for (const auto& pt : res.grid) {
      json g{{"delta", pt.delta}, {"r", pt.r}, {"freq_event_A", pt.freq_event_a}};
      for (const auto& [kind, f] : pt.freq_within_bound) g["freq_within_bound"][to_string(kind)] = f;
      grid.push_back(g);
    }
    j["delta_grid"] = grid;
    j["monotone_in_delta"] = res.monotone_in_delta;
    out << j.dump() << '\n';
  } else {
    out << run_experiment(c).summary.to_json().dump() << '\n';
  }
  return kOk;
}

struct KappaArgs {
  std::string in;
  std::size_t s = 1;
  double c0 = 1.0;
  double alpha = 2.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};

int kappa(const KappaArgs& a, std::ostream& out) {
  const DesignMatrix d = load_design(a.in);
  KappaProbeOptions opt;
  opt.samples = a.samples;
  opt.seed = a.seed;
  const KappaProbeResult res = kappa_probe(d, a.s, a.c0, a.alpha, opt);
  out << with_header({{"s", a.s},
                      {"c0", res.c0},
                      {"alpha", a.alpha},
                      {"samples", res.samples},
                      {"min_ratio_sampled", res.min_ratio_sampled},
                      {"min_ratio_found", res.min_ratio_found},
                      {"analytic_bound", res.analytic_bound},
                      {"bound_holds", res.min_ratio_found >= res.analytic_bound - 1e-9},
                      {"support", res.support},
                      {"lambda", to_std(res.lambda)}})
             .dump()
      << '\n';
  return kOk;
}

struct MomentArgs {
  std::string in;
  std::string noise = "gaussian";
  double sigma = 1.0;
  int df = 3;
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
};

int moment(const MomentArgs& a, std::ostream& out) {
  const DesignMatrix d = load_design(a.in);
  const NoiseModel noise{parse_noise_family(a.noise), a.sigma, a.df};
  const MomentDiagnostic res = moment_diagnostic(d, noise, a.reps, a.seed);
  out << with_header({{"n", d.rows()},
                      {"M", d.cols()},
                      {"noise", to_string(noise.family)},
                      {"sigma", noise.sigma},
                      {"reps", res.reps},
                      {"empirical_moment", res.empirical_moment},
                      {"structural_bound", res.structural_bound},
                      {"ratio", res.ratio}})
             .dump()
      << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse regression estimators and finite-sample bound checks", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  GenDesignArgs gd;
  auto* c_gd = app.add_subcommand("gen-design", "Generate a column-normalised random design");
  c_gd->add_option("--gen", gd.gen)->check(CLI::IsMember({"rademacher", "gaussian"}));
  c_gd->add_option("--n", gd.n)->required();
  c_gd->add_option("--M", gd.m)->required();
  c_gd->add_option("--seed", gd.seed);
  c_gd->add_option("--out", gd.out, "Output matrix file (stdout when omitted)");

  GenInstanceArgs gi;
  auto* c_gi = app.add_subcommand("gen-instance", "Write an instance bundle (design.txt + instance.json)");
  c_gi->add_option("--design", gi.design, "Matrix file; otherwise generated from --gen/--n/--M");
  c_gi->add_option("--gen", gi.gen)->check(CLI::IsMember({"rademacher", "gaussian"}));
  c_gi->add_option("--n", gi.n);
  c_gi->add_option("--M", gi.m);
  c_gi->add_option("--design-seed", gi.design_seed);
  c_gi->add_option("--s", gi.s);
  c_gi->add_option("--rho", gi.rho);
  c_gi->add_option("--target-seed", gi.target_seed);
  c_gi->add_option("--noise", gi.noise);
  c_gi->add_option("--sigma", gi.sigma);
  c_gi->add_option("--df", gi.df);
  c_gi->add_option("--seed", gi.seed, "Noise seed");
  c_gi->add_option("--out", gi.out, "Bundle directory")->required();

  std::string cert_in;
  std::vector<double> alphas{1.1, 1.2, 1.5, 2.0, 3.0};
  auto* c_cert = app.add_subcommand("certify", "Coherence report and admissible sparsity over an alpha grid");
  c_cert->add_option("--in", cert_in)->required();
  c_cert->add_option("--alpha", alphas, "Repeatable");

  SolveArgs sv;
  auto* c_solve = app.add_subcommand("solve", "Solve one instance bundle");
  c_solve->add_option("--estimator", sv.estimator)->check(CLI::IsMember({"lasso", "dantzig"}));
  c_solve->add_option("--in", sv.in, "Bundle directory")->required();
  c_solve->add_option("--r", sv.r, "Regularisation level (default A sigma sqrt(ln M / n))");
  c_solve->add_option("--A", sv.a);

  ExperimentArgs ex;
  auto* c_ex = app.add_subcommand("experiment", "Monte Carlo suite");
  c_ex->add_option("--config", ex.config, "JSON config file");
  c_ex->add_option("--suite", ex.suite)->check(CLI::IsMember({"thm1", "thm2", "thm3"}));
  c_ex->add_option("--trials", ex.trials);
  auto* base_seed_opt = c_ex->add_option("--base-seed", ex.base_seed);
  c_ex->add_option("--out-csv", ex.out_csv);
  c_ex->add_option("--out-summary", ex.out_summary);
  c_ex->add_option("--workers", ex.workers);

  KappaArgs kp;
  auto* c_kp = app.add_subcommand("kappa-probe", "Randomised lower-bound check of the restricted eigenvalue");
  c_kp->add_option("--in", kp.in)->required();
  c_kp->add_option("--s", kp.s);
  c_kp->add_option("--c0", kp.c0);
  c_kp->add_option("--alpha", kp.alpha);
  c_kp->add_option("--samples", kp.samples);
  c_kp->add_option("--seed", kp.seed);

  MomentArgs lm;
  auto* c_lm = app.add_subcommand("lemma3", "Moment diagnostic for max_j |X^T W / n|_j^2");
  c_lm->add_option("--in", lm.in)->required();
  c_lm->add_option("--noise", lm.noise);
  c_lm->add_option("--sigma", lm.sigma);
  c_lm->add_option("--df", lm.df);
  c_lm->add_option("--reps", lm.reps);
  c_lm->add_option("--seed", lm.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*c_gd) return gen_design(gd, out);
    if (*c_gi) return gen_instance(gi);
    if (*c_cert) return certify(cert_in, alphas, out);
    if (*c_solve) return solve(sv, out);
    if (*c_ex) {
      ex.has_base_seed = base_seed_opt->count() > 0;
      return experiment(ex, out);
    }
    if (*c_kp) return kappa(kp, out);
    if (*c_lm) return moment(lm, out);
  } catch (const GateFailure& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.gate());
  } catch (const CertificationError& e) {
    err << "error: " << e.what() << '\n';
    return kCoherenceGate;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace sparsereg::cli
