#include "sparsereg/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sparsereg/error.hpp"
#include "sparsereg/rng.hpp"

namespace sparsereg {

namespace {

constexpr double kUnitDiagonalTolerance = 1e-12;

double max_off_diagonal(const GramMatrix& g) {
  double mu = 0.0;
  const std::size_t m = g.dim();
  for (std::size_t j = 1; j < m; ++j)
    for (std::size_t i = 0; i < j; ++i) mu = std::max(mu, std::abs(g(i, j)));
  return std::min(mu, 1.0);
}

double row_energy_of(const DenseMatrix& x) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) acc += x.row(i).cwiseAbs2().maxCoeff();
  return acc / static_cast<double>(x.rows());
}

void require_alpha(double alpha) {
  if (!(alpha > 1.0)) throw InvalidParameter("alpha must satisfy alpha > 1");
}

}  // namespace

DesignMatrix DesignMatrix::from_matrix(DenseMatrix x) {
  if (x.rows() < 1 || x.cols() < 1) throw DimensionMismatch("design must be non-empty");
  require_finite(x, "design");
  auto d = std::make_shared<Data>();
  d->gram = sparsereg::gram(x);
  for (std::size_t j = 0; j < d->gram.dim(); ++j) {
    if (std::abs(d->gram(j, j) - 1.0) > kUnitDiagonalTolerance) {
      std::ostringstream msg;
      msg << "design column " << j << " has Gram diagonal " << d->gram(j, j)
          << "; every column must have squared norm n (unit Gram diagonal)";
      throw InvalidParameter(msg.str());
    }
  }
  d->coherence = max_off_diagonal(d->gram);
  d->row_energy = row_energy_of(x);
  d->x = std::move(x);
  return DesignMatrix(std::move(d));
}

DesignMatrix DesignMatrix::normalized(DenseMatrix x) {
  const double sqrt_n = std::sqrt(static_cast<double>(x.rows()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0.0) throw InvalidParameter("cannot normalise an all-zero column");
    x.col(j) *= sqrt_n / norm;
  }
  return from_matrix(std::move(x));
}

AdmissibleSparsity admissible_sparsity(double coherence, double alpha, double c0) {
  require_alpha(alpha);
  if (coherence <= 0.0) return {true, 0};
  const double scale = alpha * (1.0 + 2.0 * c0);
  const double raw = 1.0 / (scale * coherence);
  if (!std::isfinite(raw) || raw > 1e15) return {true, 0};
  auto v = static_cast<std::size_t>(std::floor(raw));
  // Align with the direct comparison mu <= 1 / (scale s) used by certified_for.
  while (v > 0 && coherence > 1.0 / (scale * static_cast<double>(v))) --v;
  while (coherence <= 1.0 / (scale * static_cast<double>(v + 1))) ++v;
  return {false, v};
}

bool certified_for(const DesignMatrix& d, std::size_t s, double alpha, double c0) {
  require_alpha(alpha);
  if (s == 0) return true;
  return d.coherence() <= 1.0 / (alpha * (1.0 + 2.0 * c0) * static_cast<double>(s));
}

DesignMatrix gen_rademacher(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw InvalidParameter("gen_rademacher: n and M must be positive");
  Rng rng(seed, StreamRole::design);
  DenseMatrix x(n, m);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.sign();
  return DesignMatrix::from_matrix(std::move(x));
}

DesignMatrix gen_normalized_gaussian(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 2 || m < 1) throw InvalidParameter("gen_normalized_gaussian: requires n >= 2, M >= 1");
  Rng rng(seed, StreamRole::design);
  DenseMatrix x(n, m);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double norm = 0.0;
    while (norm == 0.0) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.normal();
      norm = x.col(j).norm();
    }
    x.col(j) *= sqrt_n / norm;
  }
  return DesignMatrix::from_matrix(std::move(x));
}

DesignMatrix gen_rademacher_certified(std::size_t n, std::size_t m, double max_coherence,
                                      std::uint64_t seed, std::size_t attempts_per_column) {
  if (n < 1 || m < 1) throw InvalidParameter("gen_rademacher_certified: n and M must be positive");
  if (!(max_coherence >= 0.0)) throw InvalidParameter("max_coherence must be nonnegative");
  Rng rng(seed, StreamRole::design);
  DenseMatrix x(n, m);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < attempts_per_column && !accepted; ++attempt) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.sign();
      accepted = true;
      for (Eigen::Index k = 0; k < j && accepted; ++k)
        accepted = std::abs(x.col(k).dot(x.col(j)) * inv_n) <= max_coherence;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "could not draw column " << j << " with coherence <= " << max_coherence
          << " after " << attempts_per_column << " attempts";
      throw CertificationError(msg.str());
    }
  }
  return DesignMatrix::from_matrix(std::move(x));
}

DesignMatrix gen_hadamard(std::size_t n) {
  if (n < 1 || (n & (n - 1)) != 0) throw InvalidParameter("gen_hadamard: n must be a power of two");
  DenseMatrix h = DenseMatrix::Ones(1, 1);
  while (static_cast<std::size_t>(h.rows()) < n) {
    const Eigen::Index k = h.rows();
    DenseMatrix next(2 * k, 2 * k);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return DesignMatrix::from_matrix(std::move(h));
}

CoherenceReport coherence(const DesignMatrix& d, double alpha) {
  require_alpha(alpha);
  CoherenceReport rep;
  rep.coherence = d.coherence();
  rep.alpha = alpha;
  rep.s_adm_lasso = admissible_sparsity(rep.coherence, alpha, kLassoCone);
  rep.s_adm_dantzig = admissible_sparsity(rep.coherence, alpha, kDantzigCone);
  rep.row_energy = d.row_energy();
  return rep;
}

namespace {

struct ConeState {
  DenseVector lambda;
  DenseVector psi_lambda;
  std::vector<char> in_support;
  double quad = 0.0;     // lambda^T Psi lambda
  double j_sq = 0.0;     // |lambda_J|_2^2
  double j_l1 = 0.0;     // |lambda_J|_1
  double jc_l1 = 0.0;    // |lambda_{J^c}|_1

  double ratio() const {
    if (j_sq <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(quad, 0.0) / j_sq);
  }
};

ConeState make_state(const GramMatrix& g, DenseVector lambda, const std::vector<std::size_t>& j) {
  ConeState st;
  st.in_support.assign(static_cast<std::size_t>(lambda.size()), 0);
  for (std::size_t idx : j) st.in_support[idx] = 1;
  st.psi_lambda = g.matrix() * lambda;
  st.quad = lambda.dot(st.psi_lambda);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double a = std::abs(lambda[i]);
    if (st.in_support[static_cast<std::size_t>(i)]) {
      st.j_sq += a * a;
      st.j_l1 += a;
    } else {
      st.jc_l1 += a;
    }
  }
  st.lambda = std::move(lambda);
  return st;
}

// Coordinate pattern search on the ratio, staying inside the cone.
void refine(const GramMatrix& g, ConeState& st, double c0, bool support_only, std::size_t sweeps) {
  const Eigen::Index m = st.lambda.size();
  double step = 0.1 * st.lambda.cwiseAbs().maxCoeff();
  double best = st.ratio();
  for (std::size_t sweep = 0; sweep < sweeps && step > 1e-9; ++sweep) {
    bool improved = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      const bool on_j = st.in_support[static_cast<std::size_t>(i)] != 0;
      if (support_only && !on_j) continue;
      for (double delta : {step, -step}) {
        const double old = st.lambda[i];
        const double neu = old + delta;
        const double quad = st.quad + 2.0 * delta * st.psi_lambda[i] + delta * delta * g(i, i);
        double j_sq = st.j_sq, j_l1 = st.j_l1, jc_l1 = st.jc_l1;
        if (on_j) {
          j_sq += neu * neu - old * old;
          j_l1 += std::abs(neu) - std::abs(old);
        } else {
          jc_l1 += std::abs(neu) - std::abs(old);
        }
        if (j_sq <= 1e-300 || jc_l1 > c0 * j_l1) continue;
        const double r = std::sqrt(std::max(quad, 0.0) / j_sq);
        if (r < best) {
          best = r;
          st.lambda[i] = neu;
          st.psi_lambda += delta * g.matrix().col(i);
          st.quad = quad;
          st.j_sq = j_sq;
          st.j_l1 = j_l1;
          st.jc_l1 = jc_l1;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  // Re-evaluate from scratch to shed accumulated rounding.
  std::vector<std::size_t> j;
  for (std::size_t i = 0; i < st.in_support.size(); ++i)
    if (st.in_support[i]) j.push_back(i);
  st = make_state(g, st.lambda, j);
}

}  // namespace

KappaProbeResult kappa_probe(const DesignMatrix& d, std::size_t s, double c0, double alpha,
                             const KappaProbeOptions& options) {
  require_alpha(alpha);
  const std::size_t m = d.cols();
  if (s < 1 || s > m) throw InvalidParameter("kappa_probe: requires 1 <= s <= M");
  if (!(c0 >= 0.0)) throw InvalidParameter("kappa_probe: c0 must be nonnegative");
  if (options.samples < 1) throw InvalidParameter("kappa_probe: needs at least one sample");
  if (!certified_for(d, s, alpha, c0)) {
    const auto adm = admissible_sparsity(d.coherence(), alpha, c0);
    std::ostringstream msg;
    msg << "design is not certified for s = " << s << " (alpha = " << alpha << ", c0 = " << c0
        << "): coherence " << d.coherence() << " admits s <= " << adm.value;
    throw CertificationError(msg.str());
  }

  const GramMatrix& g = d.gram();
  Rng rng(options.seed, StreamRole::kappa);
  KappaProbeResult out;
  out.c0 = c0;
  out.samples = options.samples;
  out.analytic_bound = std::sqrt(1.0 - 1.0 / alpha);

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_j;
  DenseVector best_lambda;
  DenseVector lambda(static_cast<Eigen::Index>(m));
  std::vector<char> on_j(m);
  for (std::size_t t = 0; t < options.samples; ++t) {
    const std::size_t k = 1 + rng.below(s);
    auto j = rng.subset(m, k);
    lambda.setZero();
    std::fill(on_j.begin(), on_j.end(), 0);
    double norm_sq = 0.0;
    for (std::size_t idx : j) {
      on_j[idx] = 1;
      lambda[static_cast<Eigen::Index>(idx)] = rng.normal();
      norm_sq += lambda[static_cast<Eigen::Index>(idx)] * lambda[static_cast<Eigen::Index>(idx)];
    }
    if (norm_sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm_sq);
    double j_l1 = 0.0;
    for (std::size_t idx : j) {
      lambda[static_cast<Eigen::Index>(idx)] *= inv;
      j_l1 += std::abs(lambda[static_cast<Eigen::Index>(idx)]);
    }
    if (!options.support_only && k < m) {
      // Dirichlet(1, ..., 1) magnitudes on the l1 face of radius u c0 |lambda_J|_1.
      const double radius = rng.uniform() * c0 * j_l1;
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (on_j[i]) continue;
        const double e = rng.exponential();
        lambda[static_cast<Eigen::Index>(i)] = e;
        total += e;
      }
      if (total > 0.0) {
        for (std::size_t i = 0; i < m; ++i)
          if (!on_j[i]) lambda[static_cast<Eigen::Index>(i)] *= rng.sign() * radius / total;
      }
    }
    const double quad = lambda.dot(g.matrix() * lambda);
    const double ratio = std::sqrt(std::max(quad, 0.0));  // |lambda_J|_2 = 1
    if (ratio < best) {
      best = ratio;
      best_j = std::move(j);
      best_lambda = lambda;
    }
  }
  out.min_ratio_sampled = best;
  ConeState st = make_state(g, best_lambda, best_j);
  refine(g, st, c0, options.support_only, options.refine_sweeps);
  out.min_ratio_found = std::min(best, st.ratio());
  out.support = std::move(best_j);
  out.lambda = st.ratio() < best ? st.lambda : best_lambda;
  return out;
}

}  // namespace sparsereg
