#include "sparsereg/rates.hpp"

#include <cmath>
#include <sstream>

#include "sparsereg/error.hpp"

namespace sparsereg {

std::string to_string(Regime r) { return r == Regime::gaussian ? "gaussian" : "general"; }

double compute_r(const RateSpec& spec) {
  if (spec.m < 3) throw InvalidParameter("rate: M >= 3 is required so that ln M > 1");
  if (spec.n < 1) throw InvalidParameter("rate: n must be positive");
  if (!(spec.sigma > 0.0 && std::isfinite(spec.sigma)))
    throw InvalidParameter("rate: sigma must be positive");
  const double log_m = std::log(static_cast<double>(spec.m));
  const double n = static_cast<double>(spec.n);
  if (spec.regime == Regime::gaussian) {
    if (!(spec.a > kMinRateConstant)) {
      std::ostringstream msg;
      msg << "rate constant A = " << spec.a
          << " is too small: the gaussian sup-norm rate requires A > 2*sqrt(2)";
      throw InvalidParameter(msg.str());
    }
    return spec.a * spec.sigma * std::sqrt(log_m / n);
  }
  if (!(spec.delta > 0.0 && std::isfinite(spec.delta)))
    throw InvalidParameter("rate: the general-noise rate requires delta > 0");
  return spec.sigma * std::sqrt(std::pow(log_m, 1.0 + spec.delta) / n);
}

double compute_c2(double alpha, double c0) {
  if (!(alpha > 1.0)) throw InvalidParameter("c2 requires alpha > 1");
  if (!(c0 > 0.0)) throw InvalidParameter("c2 requires c0 > 0");
  return 1.5 * (1.0 + (1.0 + c0) * (1.0 + c0) / ((1.0 + 2.0 * c0) * (alpha - 1.0)));
}

std::optional<double> probability_floor(const RateSpec& spec) {
  if (spec.regime != Regime::gaussian) return std::nullopt;
  return 1.0 - std::pow(static_cast<double>(spec.m), 1.0 - spec.a * spec.a / 8.0);
}

ConstantsBundle make_constants(const RateSpec& spec, double alpha, double c0,
                               double c1_multiplier) {
  ConstantsBundle k;
  k.c0 = c0;
  k.alpha = alpha;
  k.c2 = compute_c2(alpha, c0);
  k.c1 = c1_multiplier * k.c2;
  k.r = compute_r(spec);
  k.threshold = k.c2 * k.r;
  k.probability_floor = probability_floor(spec);
  return k;
}

DenseVector apply_threshold(const DenseVector& theta, double threshold) {
  if (!(threshold > 0.0)) throw InvalidParameter("threshold must be positive");
  DenseVector out = theta;
  for (Eigen::Index j = 0; j < out.size(); ++j)
    if (!(std::abs(out[j]) > threshold)) out[j] = 0.0;
  return out;
}

std::vector<int> sign_vector(const DenseVector& theta) {
  std::vector<int> s(static_cast<std::size_t>(theta.size()));
  for (Eigen::Index j = 0; j < theta.size(); ++j) s[static_cast<std::size_t>(j)] = sign_of(theta[j]);
  return s;
}

bool signal_gate(const SparseTarget& target, double c1, double r) {
  if (!(c1 > 0.0)) throw InvalidParameter("signal gate requires c1 > 0");
  if (target.support.empty()) return true;
  return target.rho > c1 * r;
}

}  // namespace sparsereg
