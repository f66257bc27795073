#include "sparsereg/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "sparsereg/dantzig.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/rng.hpp"
#include "sparsereg/version.hpp"

namespace sparsereg {

std::string to_string(Gate g) {
  switch (g) {
    case Gate::coherence: return "coherence";
    case Gate::signal_strength: return "signal-strength";
    case Gate::row_energy: return "row-energy";
  }
  return "unknown";
}

std::string to_string(EstimatorKind k) { return k == EstimatorKind::lasso ? "lasso" : "dantzig"; }

namespace {

constexpr double kDominanceSlack = 1e-7;

double cone_of(EstimatorKind k) { return k == EstimatorKind::lasso ? kLassoCone : kDantzigCone; }

nlohmann::json adm_json(const AdmissibleSparsity& a) {
  if (a.unconstrained) return "unconstrained";
  return a.value;
}

std::vector<EstimatorKind> kinds_of(EstimatorSet set) {
  switch (set) {
    case EstimatorSet::lasso: return {EstimatorKind::lasso};
    case EstimatorSet::dantzig: return {EstimatorKind::dantzig};
    case EstimatorSet::both: break;
  }
  return {EstimatorKind::lasso, EstimatorKind::dantzig};
}

bool certified_all(const DesignMatrix& d, const ExperimentConfig& c) {
  for (auto k : kinds_of(c.estimators))
    if (!certified_for(d, c.s, c.alpha, cone_of(k))) return false;
  return true;
}

DesignMatrix generate(const ExperimentConfig& c, std::uint64_t seed) {
  if (c.generator == "gaussian") return gen_normalized_gaussian(c.n, c.m, seed);
  return gen_rademacher(c.n, c.m, seed);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json coherence_json(const CoherenceReport& report) {
  return {{"coherence", report.coherence},
          {"alpha", report.alpha},
          {"s_adm_lasso", adm_json(report.s_adm_lasso)},
          {"s_adm_dantzig", adm_json(report.s_adm_dantzig)},
          {"row_energy", report.row_energy}};
}

nlohmann::json ExperimentSetup::derived() const {
  nlohmann::json j;
  j["design_seed_used"] = design_seed_used;
  j["coherence"] = coherence.coherence;
  j["s_adm_lasso"] = adm_json(coherence.s_adm_lasso);
  j["s_adm_dantzig"] = adm_json(coherence.s_adm_dantzig);
  j["row_energy"] = coherence.row_energy;
  j["r"] = r;
  j["rho"] = target.rho;
  j["requested_rho"] = requested_rho;
  j["support"] = target.support;
  j["probability_floor"] =
      probability_floor(rate).has_value() ? nlohmann::json(*probability_floor(rate)) : nlohmann::json();
  for (const auto& e : estimators) {
    j["constants"][to_string(e.kind)] = {{"c0", e.constants.c0},
                                         {"c1", e.constants.c1},
                                         {"c2", e.constants.c2},
                                         {"threshold", e.constants.threshold},
                                         {"sign_gate", e.sign_gate}};
  }
  return j;
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  if (!config.design_file.empty())
    return prepare_experiment(config, DesignMatrix::from_matrix(read_matrix_file(config.design_file)));
  std::uint64_t seed = config.design_seed;
  DesignMatrix d = generate(config, seed);
  for (std::size_t k = 1; k < config.design_reseed_attempts && !certified_all(d, config); ++k) {
    seed = config.design_seed + k;
    d = generate(config, seed);
  }
  ExperimentSetup setup = prepare_experiment(config, d);
  setup.design_seed_used = seed;
  setup.config.design_seed = config.design_seed;
  return setup;
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config, const DesignMatrix& design) {
  ExperimentSetup st{config, design, config.design_seed, {}, {}, 0.0, 0.0, {}, {}};
  st.config.n = design.rows();
  st.config.m = design.cols();
  st.config.validate();
  st.design_seed_used = config.design_seed;
  st.coherence = coherence(design, config.alpha);

  const auto kinds = kinds_of(config.estimators);
  for (auto k : kinds) {
    if (!certified_for(design, config.s, config.alpha, cone_of(k))) {
      const auto adm = admissible_sparsity(design.coherence(), config.alpha, cone_of(k));
      std::ostringstream msg;
      msg << "coherence gate failed for the " << to_string(k) << " (c0 = " << cone_of(k)
          << ", alpha = " << config.alpha << "): coherence " << design.coherence()
          << " certifies s <= " << adm.value << " but s = " << config.s;
      throw GateFailure(Gate::coherence, msg.str());
    }
  }

  st.rate = st.config.rate_spec();
  st.r = compute_r(st.rate);
  double max_c2 = 0.0;
  for (auto k : kinds) {
    EstimatorSetup e;
    e.kind = k;
    e.constants = make_constants(st.rate, config.alpha, cone_of(k), config.c1_multiplier);
    max_c2 = std::max(max_c2, e.constants.c2);
    st.estimators.push_back(e);
  }
  st.requested_rho = config.rho > 0.0 ? config.rho : config.rho_multiple * max_c2 * st.r;
  TargetOptions topt;
  topt.sign_pattern = config.sign_pattern;
  st.target = gen_target(st.config.m, config.s, st.requested_rho, config.target_seed, topt);

  for (auto& e : st.estimators)
    e.sign_gate = e.constants.c1 > 2.0 * e.constants.c2 &&
                  signal_gate(st.target, e.constants.c1, st.r);
  if (config.suite == Suite::thm2) {
    for (const auto& e : st.estimators) {
      if (!e.sign_gate) {
        std::ostringstream msg;
        msg << "signal-strength gate failed for the " << to_string(e.kind) << ": rho = " << st.target.rho
            << " must exceed c1 r = " << e.constants.c1 * st.r << " with c1 > 2 c2";
        throw GateFailure(Gate::signal_strength, msg.str());
      }
    }
  }
  if (config.suite == Suite::thm3 && !(design.row_energy() <= config.c_prime_cap)) {
    std::ostringstream msg;
    msg << "row-energy gate failed: (1/n) sum_i max_j X_ij^2 = " << design.row_energy()
        << " exceeds c_prime_cap = " << config.c_prime_cap;
    throw GateFailure(Gate::row_energy, msg.str());
  }
  return st;
}

bool TrialRecord::failed() const {
  return std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.failed; });
}

std::size_t TrialRecord::implication_violations() const {
  std::size_t v = 0;
  for (const auto& o : outcomes) v += o.implication_violations;
  return v;
}

TrialRecord run_trial(const ExperimentSetup& setup, std::size_t trial) {
  const auto& cfg = setup.config;
  const DesignMatrix& d = setup.design;
  const double r = setup.r;
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = cfg.base_seed + trial;

  const Instance inst = synthesize(d, setup.target, cfg.noise, rec.seed);
  const double inv_n = 1.0 / static_cast<double>(d.rows());
  rec.z_inf = (d.x().transpose() * inst.w * inv_n).cwiseAbs().maxCoeff();
  rec.event_a = rec.z_inf <= r / 2.0;

  // Probe family: natural order, reversed order, then random orders.
  const std::size_t m = d.cols();
  std::vector<std::vector<std::size_t>> orders;
  Rng prng(rec.seed, StreamRole::probe);
  for (std::size_t k = 0; k < cfg.probe_size; ++k) {
    std::vector<std::size_t> o(m);
    for (std::size_t i = 0; i < m; ++i) o[i] = k == 1 ? m - 1 - i : i;
    if (k >= 2) o = prng.permutation(m);
    orders.push_back(std::move(o));
  }
  const DenseVector g = d.x().transpose() * inst.y * inv_n;
  DenseVector soft_start(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < g.size(); ++j) soft_start[j] = soft_threshold(g[j], r);

  const DenseVector& theta_star = setup.target.theta;
  std::vector<char> on_support(m, 0);
  for (std::size_t j : setup.target.support) on_support[j] = 1;
  const double cone_slack = 1e-9 * (1.0 + theta_star.lpNorm<1>());
  const auto star_signs = setup.target.signs;
  const double s = static_cast<double>(setup.target.sparsity());

  double lasso_min_l1 = std::numeric_limits<double>::infinity();
  double dantzig_max_l1 = -1.0;

  for (const auto& est : setup.estimators) {
    EstimatorOutcome out;
    out.kind = est.kind;
    out.bound_c2r = est.constants.threshold;
    out.sign_gate = est.sign_gate;
    const double c0 = est.constants.c0;
    const double alpha = cfg.alpha;
    out.l1_bound = 1.5 * r * (1.0 + c0) * (1.0 + c0) * alpha / (alpha - 1.0) * s;

    std::vector<DenseVector> sols;
    std::vector<double> values;
    try {
      for (std::size_t k = 0; k < orders.size(); ++k) {
        if (est.kind == EstimatorKind::lasso) {
          LassoOptions lo;
          lo.tol = cfg.lasso_tol;
          lo.max_iter = cfg.lasso_max_iter;
          lo.coordinate_order = orders[k];
          if (k >= 2) lo.initial = soft_start;
          auto sol = lasso_fit(d, inst.y, r, lo);
          values.push_back(sol.objective);
          sols.push_back(std::move(sol.theta));
        } else {
          DantzigOptions dopt;
          dopt.variable_order = orders[k];
          dopt.max_pivots = cfg.max_pivots;
          auto sol = dantzig_fit(d, inst.y, r, dopt);
          if (!sol.optimal()) throw SolverError("dantzig LP returned status " + to_string(sol.lp_status));
          values.push_back(sol.l1_norm);
          sols.push_back(std::move(sol.theta));
        }
      }
    } catch (const SolverError& e) {
      out.failed = true;
      out.failure = e.what();
      rec.outcomes.push_back(std::move(out));
      continue;
    }

    out.cone_ok = true;
    out.l1_bound_ok = true;
    out.sign_ok = true;
    out.min_l1 = std::numeric_limits<double>::infinity();
    for (const auto& th : sols) {
      const DenseVector delta = th - theta_star;
      double on_j = 0.0, off_j = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        (on_support[j] ? on_j : off_j) += std::abs(delta[static_cast<Eigen::Index>(j)]);
      out.supnorm_err = std::max(out.supnorm_err, delta.cwiseAbs().maxCoeff());
      out.l1_err = std::max(out.l1_err, on_j + off_j);
      out.cone_ok = out.cone_ok && off_j <= c0 * on_j + cone_slack;
      out.l1_bound_ok = out.l1_bound_ok && on_j + off_j <= out.l1_bound;
      out.sign_ok = out.sign_ok && sign_vector(apply_threshold(th, est.constants.threshold)) == star_signs;
      out.feasible_all = out.feasible_all && dantzig_feasibility(d, inst.y, th, r).feasible;
      const double l1 = th.lpNorm<1>();
      out.min_l1 = std::min(out.min_l1, l1);
      out.max_l1 = std::max(out.max_l1, l1);
    }
    for (std::size_t a = 0; a < sols.size(); ++a)
      for (std::size_t b = a + 1; b < sols.size(); ++b)
        out.probe_spread = std::max(out.probe_spread, (sols[a] - sols[b]).cwiseAbs().maxCoeff());
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.objective_spread = *hi - *lo;
    out.within_bound = out.supnorm_err <= out.bound_c2r;

    if (rec.event_a && !(out.within_bound && out.cone_ok && out.l1_bound_ok)) ++out.implication_violations;
    if (out.within_bound && out.sign_gate && !out.sign_ok) ++out.implication_violations;
    if (!out.feasible_all) ++out.implication_violations;

    if (est.kind == EstimatorKind::lasso) lasso_min_l1 = out.min_l1;
    else dantzig_max_l1 = out.max_l1;
    rec.outcomes.push_back(std::move(out));
  }
  if (dantzig_max_l1 >= 0.0 && std::isfinite(lasso_min_l1))
    rec.l1_dominance_ok = dantzig_max_l1 <= lasso_min_l1 + kDominanceSlack;
  return rec;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t n) {
  if (n == 0) return {};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half), half};
}

const EstimatorSummary* ExperimentSummary::find(EstimatorKind k) const {
  for (const auto& e : estimators)
    if (e.kind == k) return &e;
  return nullptr;
}

ExperimentSummary summarize(const ExperimentSetup& setup, const std::vector<TrialRecord>& records) {
  ExperimentSummary sum;
  sum.trials = records.size();
  sum.r = setup.r;
  sum.probability_floor = probability_floor(setup.rate);
  sum.config_echo = setup.config.echo();
  sum.derived = setup.derived();
  std::size_t event_a = 0;
  for (const auto& rec : records) {
    if (rec.failed()) ++sum.failed_trials;
    if (rec.event_a) ++event_a;
    sum.implication_violations += rec.implication_violations();
    if (!rec.l1_dominance_ok) ++sum.dominance_violations;
  }
  sum.freq_event_a = sum.trials ? static_cast<double>(event_a) / static_cast<double>(sum.trials) : 0.0;
  sum.event_a_ci = wilson_interval(event_a, sum.trials);

  for (std::size_t e = 0; e < setup.estimators.size(); ++e) {
    EstimatorSummary es;
    es.kind = setup.estimators[e].kind;
    es.constants = setup.estimators[e].constants;
    es.sign_gate = setup.estimators[e].sign_gate;
    std::size_t within = 0, sign = 0, cone = 0;
    double total_err = 0.0;
    for (const auto& rec : records) {
      const auto& o = rec.outcomes[e];
      if (o.failed) {
        ++es.failed;
        continue;
      }
      ++es.completed;
      within += o.within_bound;
      sign += o.sign_ok;
      cone += o.cone_ok;
      total_err += o.supnorm_err;
      es.max_supnorm_err = std::max(es.max_supnorm_err, o.supnorm_err);
      es.max_probe_spread = std::max(es.max_probe_spread, o.probe_spread);
      es.max_objective_spread = std::max(es.max_objective_spread, o.objective_spread);
      es.infeasible_probes += !o.feasible_all;
    }
    if (es.completed) {
      const double c = static_cast<double>(es.completed);
      es.freq_within_bound = static_cast<double>(within) / c;
      es.freq_sign_ok = static_cast<double>(sign) / c;
      es.freq_cone_ok = static_cast<double>(cone) / c;
      es.mean_supnorm_err = total_err / c;
    }
    es.within_ci = wilson_interval(within, es.completed);
    es.sign_ci = wilson_interval(sign, es.completed);
    if (sum.probability_floor) es.consistent_with_floor = es.within_ci.upper >= *sum.probability_floor;
    sum.estimators.push_back(es);
  }
  return sum;
}

nlohmann::json ExperimentSummary::to_json() const {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config"] = config_echo;
  j["config_digest"] = digest(config_echo.dump());
  j["derived"] = derived;
  j["trials"] = trials;
  j["failed_trials"] = failed_trials;
  j["r"] = r;
  j["freq_event_A"] = freq_event_a;
  j["event_A_ci"] = {event_a_ci.lower, event_a_ci.upper};
  j["event_A_half_width"] = event_a_ci.half_width;
  j["probability_floor"] = probability_floor ? nlohmann::json(*probability_floor) : nlohmann::json();
  j["implication_violations"] = implication_violations;
  j["dominance_violations"] = dominance_violations;
  for (const auto& e : estimators) {
    nlohmann::json k;
    k["c0"] = e.constants.c0;
    k["c1"] = e.constants.c1;
    k["c2"] = e.constants.c2;
    k["bound_c2r"] = e.constants.threshold;
    k["sign_gate"] = e.sign_gate;
    k["completed"] = e.completed;
    k["failed"] = e.failed;
    k["freq_within_bound"] = e.freq_within_bound;
    k["within_ci"] = {e.within_ci.lower, e.within_ci.upper};
    k["within_half_width"] = e.within_ci.half_width;
    k["freq_sign_ok"] = e.freq_sign_ok;
    k["sign_ci"] = {e.sign_ci.lower, e.sign_ci.upper};
    k["sign_half_width"] = e.sign_ci.half_width;
    k["freq_cone_ok"] = e.freq_cone_ok;
    k["max_supnorm_err"] = e.max_supnorm_err;
    k["mean_supnorm_err"] = e.mean_supnorm_err;
    k["max_probe_spread"] = e.max_probe_spread;
    k["max_objective_spread"] = e.max_objective_spread;
    k["infeasible_probes"] = e.infeasible_probes;
    k["consistent_with_floor"] =
        e.consistent_with_floor ? nlohmann::json(*e.consistent_with_floor) : nlohmann::json();
    j["estimators"][to_string(e.kind)] = k;
  }
  return j;
}

void write_trial_csv(std::ostream& out, const ExperimentSetup& setup,
                     const std::vector<TrialRecord>& records) {
  const std::string dig = digest(setup.config.echo().dump());
  out << kTrialCsvHeader << '\n';
  for (const auto& rec : records) {
    for (std::size_t e = 0; e < rec.outcomes.size(); ++e) {
      const auto& o = rec.outcomes[e];
      const auto& k = setup.estimators[e].constants;
      out << rec.trial << ',' << rec.seed << ',' << to_string(o.kind) << ',' << int(rec.event_a) << ','
          << fmt(rec.z_inf) << ',' << fmt(setup.r) << ',' << fmt(k.c2) << ',' << fmt(o.bound_c2r) << ','
          << fmt(o.supnorm_err) << ',' << fmt(o.l1_err) << ',' << fmt(o.l1_bound) << ','
          << int(o.within_bound) << ',' << int(o.cone_ok) << ',' << int(o.l1_bound_ok) << ','
          << int(o.sign_gate) << ',' << int(o.sign_ok) << ',' << fmt(o.probe_spread) << ','
          << fmt(o.objective_spread) << ',' << int(o.failed) << ',' << kToolVersion << ',' << dig
          << '\n';
    }
  }
}

namespace {

std::vector<TrialRecord> run_trials(const ExperimentSetup& setup) {
  const std::size_t trials = setup.config.trials;
  std::vector<TrialRecord> records(trials);
  const std::size_t workers = std::max<std::size_t>(1, std::min(setup.config.workers, trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        records[t] = run_trial(setup, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return records;
}

void write_outputs(const ExperimentSetup& setup, const std::vector<TrialRecord>& records,
                   const std::vector<nlohmann::json>& summary_lines) {
  if (!setup.config.out_csv.empty()) {
    std::ofstream out(setup.config.out_csv, std::ios::binary);
    if (!out) throw FormatError("cannot write " + setup.config.out_csv);
    write_trial_csv(out, setup, records);
  }
  if (!setup.config.out_summary.empty()) {
    std::ofstream out(setup.config.out_summary, std::ios::binary);
    if (!out) throw FormatError("cannot write " + setup.config.out_summary);
    for (const auto& line : summary_lines) out << line.dump() << '\n';
  }
}

ExperimentResult execute(const ExperimentSetup& setup) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res{setup, run_trials(setup), {}};
  res.summary = summarize(setup, res.records);
  res.summary.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.summary.failed_trials * 20 > res.summary.trials) {
    std::ostringstream msg;
    msg << res.summary.failed_trials << " of " << res.summary.trials
        << " trials failed to solve (more than 5%)";
    throw SolverError(msg.str());
  }
  return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSetup& setup) {
  ExperimentResult res = execute(setup);
  write_outputs(setup, res.records, {res.summary.to_json()});
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(prepare_experiment(config));
}

GeneralNoiseResult general_noise_suite(const ExperimentConfig& config) {
  if (config.suite != Suite::thm3) throw InvalidParameter("general_noise_suite needs suite = thm3");
  const ExperimentSetup setup = prepare_experiment(config);
  GeneralNoiseResult out{execute(setup), {}, true};

  std::vector<double> deltas = config.delta_grid;
  deltas.push_back(config.delta);
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());

  std::vector<nlohmann::json> lines{out.main.summary.to_json()};
  for (double delta : deltas) {
    DeltaPoint pt;
    pt.delta = delta;
    if (delta == config.delta) {
      pt.summary = out.main.summary;
    } else {
      ExperimentConfig c = setup.config;
      c.delta = delta;
      c.rho = setup.requested_rho;  // same theta* across the sweep
      c.out_csv.clear();
      c.out_summary.clear();
      ExperimentSetup s = prepare_experiment(c, setup.design);
      s.design_seed_used = setup.design_seed_used;
      pt.summary = execute(s).summary;
      auto line = pt.summary.to_json();
      line["delta_sweep"] = true;
      lines.push_back(std::move(line));
    }
    pt.r = pt.summary.r;
    pt.freq_event_a = pt.summary.freq_event_a;
    for (const auto& e : pt.summary.estimators) pt.freq_within_bound.emplace_back(e.kind, e.freq_within_bound);
    out.grid.push_back(std::move(pt));
  }
  for (std::size_t i = 1; i < out.grid.size(); ++i)
    for (std::size_t e = 0; e < out.grid[i].freq_within_bound.size(); ++e)
      if (out.grid[i].freq_within_bound[e].second < out.grid[i - 1].freq_within_bound[e].second)
        out.monotone_in_delta = false;

  write_outputs(setup, out.main.records, lines);
  return out;
}

MomentDiagnostic moment_diagnostic(const DesignMatrix& d, const NoiseModel& noise, std::size_t reps,
                               std::uint64_t seed) {
  if (d.cols() < 3) throw InvalidParameter("moment diagnostic requires M >= 3");
  if (reps < 100) throw InvalidParameter("moment diagnostic requires reps >= 100");
  if (noise.family == NoiseFamily::noiseless)
    throw InvalidParameter("moment diagnostic needs a noise model with positive variance");
  noise.validate();
  const double n = static_cast<double>(d.rows());
  double acc = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    const DenseVector w = draw_noise(noise, d.rows(), splitmix64(seed) + k);
    const double zmax = (d.x().transpose() * w / n).cwiseAbs().maxCoeff();
    acc += zmax * zmax;
  }
  MomentDiagnostic out;
  out.reps = reps;
  out.empirical_moment = acc / static_cast<double>(reps);
  out.structural_bound = std::log(static_cast<double>(d.cols())) * noise.sigma * noise.sigma *
                         d.row_energy() * n / (n * n);
  out.ratio = out.empirical_moment / out.structural_bound;
  return out;
}

}  // namespace sparsereg
