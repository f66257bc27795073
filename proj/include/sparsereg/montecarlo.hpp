#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsereg/config.hpp"
#include "sparsereg/datagen.hpp"
#include "sparsereg/design.hpp"
#include "sparsereg/error.hpp"
#include "sparsereg/rates.hpp"

namespace sparsereg {

/// Preconditions checked before any trial runs. The numeric values double as
/// CLI exit codes.
enum class Gate { coherence = 2, signal_strength = 3, row_energy = 4 };

std::string to_string(Gate g);

class GateFailure : public Error {
 public:
  GateFailure(Gate gate, const std::string& what) : Error(what), gate_(gate) {}
  Gate gate() const { return gate_; }

 private:
  Gate gate_;
};

enum class EstimatorKind { lasso, dantzig };

std::string to_string(EstimatorKind k);

struct EstimatorSetup {
  EstimatorKind kind = EstimatorKind::lasso;
  ConstantsBundle constants;
  /// rho > c1 r and c1 > 2 c2: thresholded signs are then guaranteed on the good event.
  bool sign_gate = false;
};

/// Everything fixed across trials: the certified design, theta*, and constants.
struct ExperimentSetup {
  ExperimentConfig config;
  DesignMatrix design;
  std::uint64_t design_seed_used = 0;
  CoherenceReport coherence;
  RateSpec rate;
  double r = 0.0;
  double requested_rho = 0.0;
  SparseTarget target;
  std::vector<EstimatorSetup> estimators;

  nlohmann::json derived() const;
};

/// Builds the design (re-seeding up to design_reseed_attempts times until it
/// is certified for s) and checks the gates required by the suite. Throws
/// GateFailure when a gate fails.
ExperimentSetup prepare_experiment(const ExperimentConfig& config);
/// Same, with an externally supplied design.
ExperimentSetup prepare_experiment(const ExperimentConfig& config, const DesignMatrix& design);

nlohmann::json coherence_json(const CoherenceReport& report);

struct EstimatorOutcome {
  EstimatorKind kind = EstimatorKind::lasso;
  bool failed = false;
  std::string failure;
  double supnorm_err = 0.0;  // max over the probe family
  double l1_err = 0.0;       // max over the probe family
  double bound_c2r = 0.0;
  double l1_bound = 0.0;
  bool within_bound = false;
  bool cone_ok = false;      // every probe
  bool l1_bound_ok = false;  // every probe
  bool sign_gate = false;
  bool sign_ok = false;      // every thresholded probe
  double probe_spread = 0.0;      // max pairwise l_inf distance between probes
  double objective_spread = 0.0;  // Lasso objective / Dantzig l1 value range over probes
  double min_l1 = 0.0;
  double max_l1 = 0.0;
  bool feasible_all = true;  // every probe meets the Dantzig constraint
  std::size_t implication_violations = 0;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool event_a = false;
  double z_inf = 0.0;  // |(1/n) X^T W|_inf
  std::vector<EstimatorOutcome> outcomes;
  bool l1_dominance_ok = true;  // max_D |theta_D|_1 <= min_L |theta_L|_1 + 1e-7

  bool failed() const;
  std::size_t implication_violations() const;
};

/// Solves every estimator over the probe family for seed base_seed + trial.
TrialRecord run_trial(const ExperimentSetup& setup, std::size_t trial);

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
  double half_width = 0.5;
};

/// 95% Wilson score interval for successes / n.
WilsonInterval wilson_interval(std::size_t successes, std::size_t n);

struct EstimatorSummary {
  EstimatorKind kind = EstimatorKind::lasso;
  ConstantsBundle constants;
  bool sign_gate = false;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double freq_within_bound = 0.0;
  WilsonInterval within_ci;
  double freq_sign_ok = 0.0;
  WilsonInterval sign_ci;
  double freq_cone_ok = 0.0;
  double max_supnorm_err = 0.0;
  double mean_supnorm_err = 0.0;
  double max_probe_spread = 0.0;
  double max_objective_spread = 0.0;
  std::size_t infeasible_probes = 0;
  /// Whether the Wilson upper bound reaches the probability floor.
  std::optional<bool> consistent_with_floor;
};

struct ExperimentSummary {
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  double freq_event_a = 0.0;
  WilsonInterval event_a_ci;
  std::optional<double> probability_floor;
  double r = 0.0;
  std::vector<EstimatorSummary> estimators;
  std::size_t implication_violations = 0;
  std::size_t dominance_violations = 0;
  double wall_clock_seconds = 0.0;  // not serialised: files must be reproducible
  nlohmann::json config_echo;
  nlohmann::json derived;

  const EstimatorSummary* find(EstimatorKind k) const;
  nlohmann::json to_json() const;
};

ExperimentSummary summarize(const ExperimentSetup& setup, const std::vector<TrialRecord>& records);

struct ExperimentResult {
  ExperimentSetup setup;
  std::vector<TrialRecord> records;  // sorted by trial index
  ExperimentSummary summary;
};

/// Runs config.trials independent trials on config.workers threads. Throws
/// SolverError when more than 5% of trials fail. Writes the CSV and the
/// JSON-lines summary when the corresponding paths are set.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentSetup& setup);

inline constexpr const char* kTrialCsvHeader =
    "trial,seed,estimator,event_A,z_inf,r,c2,bound_c2r,supnorm_err,l1_err,l1_bound,"
    "within_bound,cone_ok,l1_bound_ok,sign_gate,sign_ok,probe_spread,objective_spread,failed,"
    "tool_version,config_digest";

void write_trial_csv(std::ostream& out, const ExperimentSetup& setup,
                     const std::vector<TrialRecord>& records);

struct DeltaPoint {
  double delta = 0.0;
  double r = 0.0;
  double freq_event_a = 0.0;
  std::vector<std::pair<EstimatorKind, double>> freq_within_bound;
  ExperimentSummary summary;
};

struct GeneralNoiseResult {
  ExperimentResult main;
  std::vector<DeltaPoint> grid;  // sorted by delta, shared trial seeds
  /// freq_within_bound nondecreasing in delta for every estimator.
  bool monotone_in_delta = true;
};

/// General-noise suite: main run at config.delta plus a sweep over delta_grid
/// on the same seeds. Checks the row-energy gate c'-hat <= c_prime_cap.
GeneralNoiseResult general_noise_suite(const ExperimentConfig& config);

struct MomentDiagnostic {
  double empirical_moment = 0.0;  // mean of max_j Z_j^2
  double structural_bound = 0.0;  // ln M sigma^2 sum_i max_j X_ij^2 / n^2
  double ratio = 0.0;
  std::size_t reps = 0;
};

/// Monte Carlo estimate of E[max_j Z_j^2], Z = X^T W / n, against the
/// moment bound without its absolute constant.
MomentDiagnostic moment_diagnostic(const DesignMatrix& d, const NoiseModel& noise, std::size_t reps,
                               std::uint64_t seed);

}  // namespace sparsereg
