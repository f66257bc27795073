#include "sparsereg/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sparsereg/datagen.hpp"

namespace sparsereg {

namespace {

constexpr std::size_t kResidualRefreshSweeps = 100;

double kkt_residual_of(const DenseVector& g, const DenseVector& theta, double r) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double v = theta[j] != 0.0 ? std::abs(g[j] - sign_of(theta[j]) * r)
                                     : std::max(std::abs(g[j]) - r, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

void check_dims(const DesignMatrix& d, const DenseVector& y, const DenseVector& theta) {
  if (static_cast<std::size_t>(y.size()) != d.rows() ||
      static_cast<std::size_t>(theta.size()) != d.cols())
    throw DimensionMismatch("dimensions of y / theta do not conform with the design");
}

}  // namespace

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double default_lasso_tolerance(const DesignMatrix& d, const DenseVector& y, double r) {
  const DenseVector g = d.x().transpose() * y / static_cast<double>(d.rows());
  return std::min(1e-8 * (1.0 + g.cwiseAbs().maxCoeff()), 1e-9 * (1.0 + r));
}

double lasso_objective(const DesignMatrix& d, const DenseVector& y, const DenseVector& theta,
                       double r) {
  check_dims(d, y, theta);
  return (y - d.x() * theta).squaredNorm() / static_cast<double>(d.rows()) +
         2.0 * r * theta.lpNorm<1>();
}

LassoSolution lasso_fit(const DesignMatrix& d, const DenseVector& y, double r,
                        const LassoOptions& options) {
  if (!(r > 0.0 && std::isfinite(r))) throw InvalidParameter("lasso_fit: r must be positive");
  if (static_cast<std::size_t>(y.size()) != d.rows())
    throw DimensionMismatch("lasso_fit: y length differs from the number of rows");
  require_finite(y, "y");
  const std::size_t m = d.cols();
  const double inv_n = 1.0 / static_cast<double>(d.rows());
  const DenseMatrix& x = d.x();

  LassoSolution sol;
  sol.r = r;
  sol.coordinate_order = options.coordinate_order;
  if (sol.coordinate_order.empty()) {
    sol.coordinate_order.resize(m);
    std::iota(sol.coordinate_order.begin(), sol.coordinate_order.end(), std::size_t{0});
  } else {
    std::vector<std::size_t> sorted = sol.coordinate_order;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.size() == m;
    for (std::size_t i = 0; ok && i < m; ++i) ok = sorted[i] == i;
    if (!ok)
      throw InvalidParameter("lasso_fit: coordinate_order must be a permutation of 0..M-1");
  }
  const double tol = options.tol > 0.0 ? options.tol : default_lasso_tolerance(d, y, r);

  DenseVector theta = DenseVector::Zero(static_cast<Eigen::Index>(m));
  if (options.initial.size() != 0) {
    check_dims(d, y, options.initial);
    theta = options.initial;
  }
  DenseVector res = y - x * theta;
  auto objective = [&] { return res.squaredNorm() * inv_n + 2.0 * r * theta.lpNorm<1>(); };
  sol.objective_history.push_back(objective());

  DenseVector g = x.transpose() * res * inv_n;
  double kkt = kkt_residual_of(g, theta, r);
  std::size_t sweep = 0;
  while (kkt > tol && sweep < options.max_iter) {
    ++sweep;
    for (std::size_t jj : sol.coordinate_order) {
      const auto j = static_cast<Eigen::Index>(jj);
      const double old = theta[j];
      const double updated = soft_threshold(old + x.col(j).dot(res) * inv_n, r);
      if (updated != old) {
        res.noalias() -= (updated - old) * x.col(j);
        theta[j] = updated;
      }
    }
    if (sweep % kResidualRefreshSweeps == 0) res = y - x * theta;
    sol.objective_history.push_back(objective());
    g.noalias() = x.transpose() * res * inv_n;
    kkt = kkt_residual_of(g, theta, r);
    if (kkt <= tol) {
      // Certify against a freshly computed residual before accepting.
      res = y - x * theta;
      g.noalias() = x.transpose() * res * inv_n;
      kkt = kkt_residual_of(g, theta, r);
    }
  }

  sol.objective = objective();
  sol.theta = std::move(theta);
  sol.iterations = sweep;
  sol.kkt_residual = kkt;
  if (kkt > tol) {
    std::ostringstream msg;
    msg << "lasso_fit did not converge in " << options.max_iter << " sweeps (KKT residual " << kkt
        << " > tol " << tol << ")";
    throw NonConvergence(msg.str(), std::move(sol));
  }
  return sol;
}

KktResult kkt_check(const DesignMatrix& d, const DenseVector& y, const DenseVector& theta, double r,
                    double tol) {
  check_dims(d, y, theta);
  const DenseVector g = residual_correlations(d.x(), y, theta);
  const double res = kkt_residual_of(g, theta, r);
  return {res <= tol, res};
}

FeasibilityResult dantzig_feasibility(const DesignMatrix& d, const DenseVector& y,
                                      const DenseVector& theta, double r) {
  check_dims(d, y, theta);
  const DenseVector g = residual_correlations(d.x(), y, theta);
  const double slack = r - g.cwiseAbs().maxCoeff();
  return {slack >= -dantzig_feasibility_tolerance(r), slack};
}

}  // namespace sparsereg
