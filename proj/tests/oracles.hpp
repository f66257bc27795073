// Independent reference computations used to check the library. Nothing here
// calls into the solvers under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Psi = X^T X / n by explicit triple loop.
inline Mat naive_gram(const Mat& x) {
  const auto n = x.rows(), m = x.cols();
  Mat g(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) acc += x(i, a) * x(i, b);
      g(a, b) = acc / static_cast<double>(n);
    }
  return g;
}

inline double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

inline double lasso_objective(const Mat& x, const Vec& y, const Vec& theta, double r) {
  return (y - x * theta).squaredNorm() / static_cast<double>(x.rows()) + 2.0 * r * theta.lpNorm<1>();
}

inline std::vector<Eigen::Index> members(unsigned mask, Eigen::Index m) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < m; ++j)
    if (mask >> j & 1u) out.push_back(j);
  return out;
}

// Exact Lasso optimum for small M: every sign pattern sigma in {-1,0,1}^M
// gives the candidate Psi_AA theta_A = g_A - r sigma_A; the minimiser is the
// best sign-consistent candidate. Requires Psi_AA nonsingular.
inline double lasso_enumeration(const Mat& x, const Vec& y, double r) {
  const Eigen::Index m = x.cols();
  const double n = static_cast<double>(x.rows());
  const Mat psi = x.transpose() * x / n;
  const Vec g = x.transpose() * y / n;
  double best = y.squaredNorm() / n;
  std::size_t patterns = 1;
  for (Eigen::Index j = 0; j < m; ++j) patterns *= 3;
  for (std::size_t code = 1; code < patterns; ++code) {
    std::vector<Eigen::Index> act;
    std::vector<double> sg;
    std::size_t c = code;
    for (Eigen::Index j = 0; j < m; ++j, c /= 3) {
      if (c % 3 == 0) continue;
      act.push_back(j);
      sg.push_back(c % 3 == 1 ? 1.0 : -1.0);
    }
    const auto k = static_cast<Eigen::Index>(act.size());
    Mat a(k, k);
    Vec rhs(k);
    for (Eigen::Index p = 0; p < k; ++p) {
      rhs[p] = g[act[p]] - r * sg[p];
      for (Eigen::Index q = 0; q < k; ++q) a(p, q) = psi(act[p], act[q]);
    }
    const Vec sol = a.fullPivLu().solve(rhs);
    bool consistent = true;
    for (Eigen::Index p = 0; p < k; ++p) consistent = consistent && sol[p] * sg[p] > 0.0;
    if (!consistent) continue;
    Vec theta = Vec::Zero(m);
    for (Eigen::Index p = 0; p < k; ++p) theta[act[p]] = sol[p];
    best = std::min(best, lasso_objective(x, y, theta, r));
  }
  return best;
}

// Exact Dantzig optimum min |theta|_1 s.t. |Psi theta - g|_inf <= r for small M,
// by enumerating vertices: for each support A pick |A| constraint rows R and a
// side for each, solve Psi_RA theta_A = g_R +- r, keep feasible points.
inline double dantzig_enumeration(const Mat& x, const Vec& y, double r, double feas_tol = 1e-9) {
  const Eigen::Index m = x.cols();
  const double n = static_cast<double>(x.rows());
  const Mat psi = x.transpose() * x / n;
  const Vec g = x.transpose() * y / n;
  auto feasible = [&](const Vec& th) { return ((psi * th - g).cwiseAbs().maxCoeff()) <= r + feas_tol; };
  double best = std::numeric_limits<double>::infinity();
  if (feasible(Vec::Zero(m))) best = 0.0;
  const unsigned full = 1u << m;
  for (unsigned amask = 1; amask < full; ++amask) {
    const auto cols = members(amask, m);
    const auto k = static_cast<Eigen::Index>(cols.size());
    for (unsigned rmask = 1; rmask < full; ++rmask) {
      const auto rows = members(rmask, m);
      if (static_cast<Eigen::Index>(rows.size()) != k) continue;
      Mat a(k, k);
      for (Eigen::Index p = 0; p < k; ++p)
        for (Eigen::Index q = 0; q < k; ++q) a(p, q) = psi(rows[p], cols[q]);
      Eigen::FullPivLU<Mat> lu(a);
      if (!lu.isInvertible()) continue;
      for (unsigned sides = 0; sides < (1u << k); ++sides) {
        Vec rhs(k);
        for (Eigen::Index p = 0; p < k; ++p) rhs[p] = g[rows[p]] + ((sides >> p & 1u) ? r : -r);
        const Vec sol = lu.solve(rhs);
        Vec theta = Vec::Zero(m);
        for (Eigen::Index p = 0; p < k; ++p) theta[cols[p]] = sol[p];
        if (feasible(theta)) best = std::min(best, theta.lpNorm<1>());
      }
    }
  }
  return best;
}

// LP min c^T x, A x = b, x >= 0 with a known optimum: pick x* >= 0, a dual y
// and reduced costs d >= 0 vanishing on supp(x*); then b = A x*, c = A^T y + d.
struct PlantedLp {
  Mat a;
  Vec b, c, x_star, y_star;
  double optimum = 0.0;
};

template <class Rng>
PlantedLp planted_lp(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  PlantedLp p;
  p.a = Mat(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) p.a(i, j) = rng.uniform(-1.0, 1.0);
  p.x_star = Vec::Zero(cols);
  Vec d = Vec::Zero(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (j < rows) p.x_star[j] = rng.uniform(0.5, 2.0);
    else d[j] = rng.uniform(0.1, 1.0);
  }
  p.y_star = Vec(rows);
  for (Eigen::Index i = 0; i < rows; ++i) p.y_star[i] = rng.uniform(-1.0, 1.0);
  p.b = p.a * p.x_star;
  p.c = p.a.transpose() * p.y_star + d;
  p.optimum = p.c.dot(p.x_star);
  return p;
}

}  // namespace oracle
