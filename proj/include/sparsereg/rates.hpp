#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/linalg.hpp"

namespace sparsereg {

enum class Regime { gaussian, general_noise };

std::string to_string(Regime r);

/// Parameters of the regularisation level.
///   gaussian:       r = A sigma sqrt(ln M / n),          A > 2 sqrt(2)
///   general_noise:  r = sigma sqrt((ln M)^(1+delta) / n), delta > 0
/// Natural logarithms throughout; M >= 3.
struct RateSpec {
  Regime regime = Regime::gaussian;
  double a = 4.0;
  double delta = 1.0;
  double sigma = 1.0;
  std::size_t n = 1;
  std::size_t m = 3;
};

/// 2 sqrt(2): the rate constant A must exceed this.
inline constexpr double kMinRateConstant = 2.8284271247461903;

double compute_r(const RateSpec& spec);

/// (3/2) (1 + (1 + c0)^2 / ((1 + 2 c0)(alpha - 1))).
double compute_c2(double alpha, double c0);

/// 1 - M^(1 - A^2/8) for the gaussian regime; empty for general noise, whose
/// constant is not available in closed form.
std::optional<double> probability_floor(const RateSpec& spec);

struct ConstantsBundle {
  double c0 = 0.0;
  double alpha = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double r = 0.0;
  double threshold = 0.0;  // c2 r
  std::optional<double> probability_floor;
};

/// c1 = c1_multiplier * c2.
ConstantsBundle make_constants(const RateSpec& spec, double alpha, double c0,
                               double c1_multiplier = 2.2);

/// Keeps coordinates with |theta_j| > threshold (strictly); zeroes the rest.
DenseVector apply_threshold(const DenseVector& theta, double threshold);

std::vector<int> sign_vector(const DenseVector& theta);

/// rho > c1 r, vacuously true for an empty support.
bool signal_gate(const SparseTarget& target, double c1, double r);

}  // namespace sparsereg
