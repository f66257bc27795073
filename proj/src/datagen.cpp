#include "sparsereg/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sparsereg/error.hpp"
#include "sparsereg/rng.hpp"

namespace sparsereg {

int sign_of(double t) {
  if (t > 0.0) return 1;
  if (t < 0.0) return -1;
  return 0;
}

SparseTarget make_target(DenseVector theta) {
  require_finite(theta, "theta*");
  SparseTarget t;
  t.signs.resize(static_cast<std::size_t>(theta.size()));
  double rho = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    t.signs[static_cast<std::size_t>(j)] = sign_of(theta[j]);
    if (theta[j] != 0.0) {
      t.support.push_back(static_cast<std::size_t>(j));
      rho = std::min(rho, std::abs(theta[j]));
    }
  }
  t.rho = t.support.empty() ? 0.0 : rho;
  t.theta = std::move(theta);
  return t;
}

SparseTarget gen_target(std::size_t m, std::size_t s, double rho, std::uint64_t seed,
                        const TargetOptions& options) {
  if (m < 1) throw InvalidParameter("gen_target: M must be positive");
  if (s > m) throw InvalidParameter("gen_target: sparsity s exceeds M");
  if (s > 0 && !(rho > 0.0 && std::isfinite(rho)))
    throw InvalidParameter("gen_target: rho must be positive and finite");
  if (!options.sign_pattern.empty() && options.sign_pattern.size() != s)
    throw InvalidParameter("gen_target: sign pattern length must equal s");
  for (int sg : options.sign_pattern)
    if (sg != 1 && sg != -1) throw InvalidParameter("gen_target: sign pattern entries must be +1 or -1");

  std::vector<std::size_t> support = options.support;
  if (support.empty()) {
    Rng rng(seed, StreamRole::support);
    support = rng.subset(m, s);
  } else {
    std::sort(support.begin(), support.end());
    if (support.size() != s || std::adjacent_find(support.begin(), support.end()) != support.end() ||
        support.back() >= m)
      throw InvalidParameter("gen_target: explicit support must list s distinct indices below M");
  }

  Rng mags(seed, StreamRole::magnitudes);
  Rng signs(seed, StreamRole::signs);
  DenseVector theta = DenseVector::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < s; ++k) {
    const double magnitude = rho + rho * mags.uniform();
    const double sg = options.sign_pattern.empty() ? signs.sign() : options.sign_pattern[k];
    theta[static_cast<Eigen::Index>(support[k])] = sg * magnitude;
  }
  return make_target(std::move(theta));
}

void NoiseModel::validate() const {
  if (family == NoiseFamily::noiseless) return;
  if (!(sigma > 0.0 && std::isfinite(sigma)))
    throw InvalidParameter("noise sigma must be positive and finite");
  if (family == NoiseFamily::student_t && df < 3)
    throw InvalidParameter("Student-t noise requires df >= 3 for a finite, rescalable variance");
}

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::student_t: return "student_t";
    case NoiseFamily::rademacher: return "rademacher";
    case NoiseFamily::noiseless: return "noiseless";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "student_t") return NoiseFamily::student_t;
  if (name == "rademacher") return NoiseFamily::rademacher;
  if (name == "noiseless") return NoiseFamily::noiseless;
  throw InvalidParameter("unknown noise family '" + name +
                         "' (expected gaussian, student_t, rademacher or noiseless)");
}

DenseVector draw_noise(const NoiseModel& model, std::size_t n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw InvalidParameter("draw_noise: n must be positive");
  DenseVector w(static_cast<Eigen::Index>(n));
  Rng rng(seed, StreamRole::noise);
  switch (model.family) {
    case NoiseFamily::noiseless:
      w.setZero();
      break;
    case NoiseFamily::gaussian:
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = model.sigma * rng.normal();
      break;
    case NoiseFamily::rademacher:
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = model.sigma * rng.sign();
      break;
    case NoiseFamily::student_t: {
      const double df = model.df;
      const double scale = model.sigma * std::sqrt((df - 2.0) / df);
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double z = rng.normal();
        double chi2 = 0.0;
        for (int k = 0; k < model.df; ++k) {
          const double g = rng.normal();
          chi2 += g * g;
        }
        w[i] = scale * z / std::sqrt(chi2 / df);
      }
      break;
    }
  }
  return w;
}

Instance synthesize(const DesignMatrix& d, const SparseTarget& target, const NoiseModel& noise,
                    std::uint64_t seed) {
  if (static_cast<std::size_t>(target.theta.size()) != d.cols())
    throw DimensionMismatch("synthesize: theta* length differs from the number of columns");
  Instance inst{d, target, noise, draw_noise(noise, d.rows(), seed), DenseVector(), seed};
  inst.y = d.x() * target.theta + inst.w;
  return inst;
}

namespace {

std::vector<double> to_std(const DenseVector& v) { return {v.data(), v.data() + v.size()}; }

DenseVector from_json(const nlohmann::json& j, const char* key, std::size_t expected) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw FormatError(std::string("instance.json: missing array '") + key + "'");
  auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != expected)
    throw FormatError(std::string("instance.json: array '") + key + "' has the wrong length");
  return Eigen::Map<DenseVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_bundle(const std::string& dir, const Instance& inst) {
  std::filesystem::create_directories(dir);
  write_matrix_file(dir + "/design.txt", inst.design.x());
  nlohmann::json j;
  j["n"] = inst.design.rows();
  j["M"] = inst.design.cols();
  j["seed"] = inst.seed;
  j["noise"] = {{"family", to_string(inst.noise.family)},
                {"sigma", inst.noise.sigma},
                {"df", inst.noise.df}};
  j["theta_star"] = to_std(inst.target.theta);
  j["support"] = inst.target.support;
  j["y"] = to_std(inst.y);
  j["w"] = to_std(inst.w);
  std::ofstream out(dir + "/instance.json");
  if (!out) throw FormatError("cannot write " + dir + "/instance.json");
  out << j.dump(2) << '\n';
}

Instance read_bundle(const std::string& dir) {
  auto design = DesignMatrix::from_matrix(read_matrix_file(dir + "/design.txt"));
  std::ifstream in(dir + "/instance.json");
  if (!in) throw FormatError("cannot open " + dir + "/instance.json");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("instance.json: ") + e.what());
  }
  const std::size_t n = design.rows(), m = design.cols();
  Instance inst{design, make_target(from_json(j, "theta_star", m)), NoiseModel{},
                from_json(j, "w", n), from_json(j, "y", n), j.value("seed", std::uint64_t{0})};
  if (j.contains("noise")) {
    const auto& nz = j.at("noise");
    inst.noise.family = parse_noise_family(nz.value("family", std::string("gaussian")));
    inst.noise.sigma = nz.value("sigma", 1.0);
    inst.noise.df = nz.value("df", 3);
  }
  require_finite(inst.y, "y");
  return inst;
}

}  // namespace sparsereg
