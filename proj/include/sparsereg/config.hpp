#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsereg/datagen.hpp"
#include "sparsereg/rates.hpp"

namespace sparsereg {

enum class Suite { thm1, thm2, thm3 };
enum class EstimatorSet { both, lasso, dantzig };

std::string to_string(Suite s);
std::string to_string(EstimatorSet e);

/// Everything an experiment needs. Populated from a flat JSON object whose
/// keys are listed in config_keys(); see README for the schema.
struct ExperimentConfig {
  Suite suite = Suite::thm1;

  // design
  std::string generator = "rademacher";  // rademacher | gaussian
  std::string design_file;               // overrides the generator when set
  std::size_t n = 4096;
  std::size_t m = 512;
  std::uint64_t design_seed = 1;
  std::size_t design_reseed_attempts = 1;

  // target
  std::size_t s = 1;
  double rho = 0.0;           // absolute minimum magnitude; 0 selects rho_multiple
  double rho_multiple = 2.5;  // rho = rho_multiple * max_estimators(c2) * r
  std::vector<int> sign_pattern;
  std::uint64_t target_seed = 1;

  NoiseModel noise;

  // rates and constants
  double a = 4.0;
  double delta = 1.0;
  std::vector<double> delta_grid;
  double alpha = 1.2;
  EstimatorSet estimators = EstimatorSet::both;
  double c1_multiplier = 2.2;
  double c_prime_cap = 1.0;

  // runner
  std::size_t trials = 200;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  std::string out_csv;
  std::string out_summary;

  // solvers
  double lasso_tol = 0.0;  // 0 selects the scale-aware default
  std::size_t lasso_max_iter = 100000;
  std::size_t max_pivots = 0;
  std::size_t probe_size = 3;

  Regime regime() const { return suite == Suite::thm3 ? Regime::general_noise : Regime::gaussian; }
  RateSpec rate_spec() const;

  /// Throws InvalidParameter naming the offending parameter.
  void validate() const;
  /// Canonical JSON echo of every field.
  nlohmann::json echo() const;
};

const std::vector<std::string>& config_keys();

/// Applies the keys of a flat JSON object on top of `base`. Unknown keys are
/// rejected with a suggestion of the closest known key.
ExperimentConfig apply_config(const nlohmann::json& doc, ExperimentConfig base = {});
ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base = {});

std::size_t edit_distance(const std::string& a, const std::string& b);

/// 64-bit FNV-1a of a string, hex encoded.
std::string digest(const std::string& text);

}  // namespace sparsereg
