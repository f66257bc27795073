#include "sparsereg/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sparsereg/error.hpp"

namespace sparsereg {

std::string to_string(Suite s) {
  switch (s) {
    case Suite::thm1: return "thm1";
    case Suite::thm2: return "thm2";
    case Suite::thm3: return "thm3";
  }
  return "unknown";
}

std::string to_string(EstimatorSet e) {
  switch (e) {
    case EstimatorSet::both: return "both";
    case EstimatorSet::lasso: return "lasso";
    case EstimatorSet::dantzig: return "dantzig";
  }
  return "unknown";
}

namespace {

Suite parse_suite(const std::string& s) {
  if (s == "thm1") return Suite::thm1;
  if (s == "thm2") return Suite::thm2;
  if (s == "thm3") return Suite::thm3;
  throw InvalidParameter("suite must be one of thm1, thm2, thm3 (got '" + s + "')");
}

EstimatorSet parse_estimators(const std::string& s) {
  if (s == "both") return EstimatorSet::both;
  if (s == "lasso") return EstimatorSet::lasso;
  if (s == "dantzig") return EstimatorSet::dantzig;
  throw InvalidParameter("estimators must be one of both, lasso, dantzig (got '" + s + "')");
}

std::vector<int> parse_signs(const nlohmann::json& v) {
  std::vector<int> out;
  if (v.is_string()) {
    for (char ch : v.get<std::string>()) {
      if (ch == '+') out.push_back(1);
      else if (ch == '-') out.push_back(-1);
      else throw InvalidParameter("sign_pattern string may only contain '+' and '-'");
    }
  } else {
    out = v.get<std::vector<int>>();
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const nlohmann::json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"suite", [](auto& c, const auto& v) { c.suite = parse_suite(v.template get<std::string>()); }},
      {"regime",
       [](auto& c, const auto& v) {
         const auto s = v.template get<std::string>();
         if (s != "gaussian" && s != "general")
           throw InvalidParameter("regime must be gaussian or general");
         // The regime follows from the suite; an explicit value must agree.
         if (s != to_string(c.regime()))
           throw InvalidParameter("regime '" + s + "' is inconsistent with suite " + to_string(c.suite) +
                                  " (thm3 uses the general regime, thm1/thm2 the gaussian one)");
       }},
      {"generator", [](auto& c, const auto& v) { c.generator = v.template get<std::string>(); }},
      {"design_file", [](auto& c, const auto& v) { c.design_file = v.template get<std::string>(); }},
      {"n", [](auto& c, const auto& v) { c.n = v.template get<std::size_t>(); }},
      {"M", [](auto& c, const auto& v) { c.m = v.template get<std::size_t>(); }},
      {"design_seed", [](auto& c, const auto& v) { c.design_seed = v.template get<std::uint64_t>(); }},
      {"design_reseed_attempts",
       [](auto& c, const auto& v) { c.design_reseed_attempts = v.template get<std::size_t>(); }},
      {"s", [](auto& c, const auto& v) { c.s = v.template get<std::size_t>(); }},
      {"rho", [](auto& c, const auto& v) { c.rho = v.template get<double>(); }},
      {"rho_multiple", [](auto& c, const auto& v) { c.rho_multiple = v.template get<double>(); }},
      {"sign_pattern", [](auto& c, const auto& v) { c.sign_pattern = parse_signs(v); }},
      {"target_seed", [](auto& c, const auto& v) { c.target_seed = v.template get<std::uint64_t>(); }},
      {"noise", [](auto& c, const auto& v) { c.noise.family = parse_noise_family(v.template get<std::string>()); }},
      {"sigma", [](auto& c, const auto& v) { c.noise.sigma = v.template get<double>(); }},
      {"df", [](auto& c, const auto& v) { c.noise.df = v.template get<int>(); }},
      {"A", [](auto& c, const auto& v) { c.a = v.template get<double>(); }},
      {"delta", [](auto& c, const auto& v) { c.delta = v.template get<double>(); }},
      {"delta_grid", [](auto& c, const auto& v) { c.delta_grid = v.template get<std::vector<double>>(); }},
      {"alpha", [](auto& c, const auto& v) { c.alpha = v.template get<double>(); }},
      {"estimators", [](auto& c, const auto& v) { c.estimators = parse_estimators(v.template get<std::string>()); }},
      {"c1_multiplier", [](auto& c, const auto& v) { c.c1_multiplier = v.template get<double>(); }},
      {"c_prime_cap", [](auto& c, const auto& v) { c.c_prime_cap = v.template get<double>(); }},
      {"trials", [](auto& c, const auto& v) { c.trials = v.template get<std::size_t>(); }},
      {"base_seed", [](auto& c, const auto& v) { c.base_seed = v.template get<std::uint64_t>(); }},
      {"workers", [](auto& c, const auto& v) { c.workers = v.template get<std::size_t>(); }},
      {"out_csv", [](auto& c, const auto& v) { c.out_csv = v.template get<std::string>(); }},
      {"out_summary", [](auto& c, const auto& v) { c.out_summary = v.template get<std::string>(); }},
      {"lasso_tol", [](auto& c, const auto& v) { c.lasso_tol = v.template get<double>(); }},
      {"lasso_max_iter", [](auto& c, const auto& v) { c.lasso_max_iter = v.template get<std::size_t>(); }},
      {"max_pivots", [](auto& c, const auto& v) { c.max_pivots = v.template get<std::size_t>(); }},
      {"probe_size", [](auto& c, const auto& v) { c.probe_size = v.template get<std::size_t>(); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

ExperimentConfig apply_config(const nlohmann::json& doc, ExperimentConfig base) {
  if (!doc.is_object()) throw InvalidParameter("config must be a flat JSON object");
  // suite first: the regime check depends on it.
  std::vector<std::string> order;
  if (doc.contains("suite")) order.push_back("suite");
  for (const auto& [key, _] : doc.items())
    if (key != "suite") order.push_back(key);
  for (const auto& key : order) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
      std::string best;
      std::size_t best_d = std::string::npos;
      for (const auto& k : config_keys()) {
        const auto dist = edit_distance(key, k);
        if (dist < best_d) {
          best_d = dist;
          best = k;
        }
      }
      std::string msg = "unknown config key '" + key + "'";
      if (best_d <= 3) msg += "; did you mean '" + best + "'?";
      throw InvalidParameter(msg);
    }
    try {
      it->second(base, doc.at(key));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidParameter("config key '" + key + "' has the wrong type: " + e.what());
    }
  }
  return base;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter("config file " + path + " is not valid JSON: " + e.what());
  }
  return apply_config(doc, std::move(base));
}

RateSpec ExperimentConfig::rate_spec() const {
  RateSpec spec;
  spec.regime = regime();
  spec.a = a;
  spec.delta = delta;
  spec.sigma = noise.sigma;
  spec.n = n;
  spec.m = m;
  return spec;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidParameter(m); };
  if (design_file.empty() && generator != "rademacher" && generator != "gaussian")
    fail("generator must be rademacher or gaussian");
  if (design_file.empty()) {
    if (n < 1) fail("n must be positive");
    if (generator == "gaussian" && n < 2) fail("the gaussian generator needs n >= 2");
    if (m < 3) fail("M must be at least 3 so that ln M > 1");
  }
  if (design_reseed_attempts < 1) fail("design_reseed_attempts must be >= 1");
  if (s > m) fail("sparsity s must not exceed M");
  if (!(rho >= 0.0) || !std::isfinite(rho)) fail("rho must be nonnegative");
  if (rho == 0.0 && s > 0 && !(rho_multiple > 0.0)) fail("rho_multiple must be positive");
  if (!sign_pattern.empty() && sign_pattern.size() != s) fail("sign_pattern must have s entries");
  if (noise.family == NoiseFamily::noiseless) {
    if (!(noise.sigma > 0.0)) fail("sigma must be positive (it sets r even for noiseless runs)");
  } else {
    noise.validate();
  }
  if (suite == Suite::thm3) {
    if (!(delta > 0.0)) fail("delta must be positive: the general-noise rate requires delta > 0");
    for (double d : delta_grid)
      if (!(d > 0.0)) fail("every delta_grid entry must be positive");
  } else if (!(a > kMinRateConstant)) {
    std::ostringstream msg;
    msg << "A = " << a << " is too small: the gaussian-noise sup-norm rate requires A > 2*sqrt(2)";
    fail(msg.str());
  }
  if (!(alpha > 1.0)) fail("alpha must exceed 1: the coherence bound requires alpha > 1");
  if (!(c1_multiplier > 0.0)) fail("c1_multiplier must be positive");
  if (suite == Suite::thm2 && !(c1_multiplier > 2.0))
    fail("c1_multiplier must exceed 2: sign recovery requires c1 > 2 c2");
  if (!(c_prime_cap > 0.0)) fail("c_prime_cap must be positive");
  if (trials < 1) fail("trials must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  if (probe_size < 1) fail("probe_size must be >= 1");
  if (lasso_max_iter < 1) fail("lasso_max_iter must be >= 1");
  if (lasso_tol < 0.0) fail("lasso_tol must be nonnegative");
}

nlohmann::json ExperimentConfig::echo() const {
  nlohmann::json j;
  j["suite"] = to_string(suite);
  j["regime"] = to_string(regime());
  j["generator"] = generator;
  j["design_file"] = design_file;
  j["n"] = n;
  j["M"] = m;
  j["design_seed"] = design_seed;
  j["design_reseed_attempts"] = design_reseed_attempts;
  j["s"] = s;
  j["rho"] = rho;
  j["rho_multiple"] = rho_multiple;
  j["sign_pattern"] = sign_pattern;
  j["target_seed"] = target_seed;
  j["noise"] = to_string(noise.family);
  j["sigma"] = noise.sigma;
  j["df"] = noise.df;
  j["A"] = a;
  j["delta"] = delta;
  j["delta_grid"] = delta_grid;
  j["alpha"] = alpha;
  j["estimators"] = to_string(estimators);
  j["c1_multiplier"] = c1_multiplier;
  j["c_prime_cap"] = c_prime_cap;
  j["trials"] = trials;
  j["base_seed"] = base_seed;
  j["lasso_tol"] = lasso_tol;
  j["lasso_max_iter"] = lasso_max_iter;
  j["max_pivots"] = max_pivots;
  j["probe_size"] = probe_size;
  return j;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sparsereg
