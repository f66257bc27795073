#pragma once

#include <cstddef>
#include <vector>

#include "sparsereg/design.hpp"
#include "sparsereg/error.hpp"
#include "sparsereg/linalg.hpp"

namespace sparsereg {

/// sign(z) max(|z| - t, 0).
double soft_threshold(double z, double t);

struct LassoOptions {
  /// Stopping tolerance on the KKT residual; <= 0 selects default_lasso_tolerance.
  double tol = 0.0;
  std::size_t max_iter = 100000;
  /// Coordinate visiting order; natural order when empty.
  std::vector<std::size_t> coordinate_order;
  /// Starting point; zero when empty.
  DenseVector initial;
};

struct LassoSolution {
  DenseVector theta;
  double r = 0.0;
  std::size_t iterations = 0;  // full sweeps
  double kkt_residual = 0.0;
  double objective = 0.0;  // (1/n)|y - X theta|_2^2 + 2 r |theta|_1
  std::vector<std::size_t> coordinate_order;
  /// Objective after each sweep, starting with the initial point.
  std::vector<double> objective_history;
};

/// Raised when max_iter sweeps pass without the KKT residual reaching tol.
class NonConvergence : public SolverError {
 public:
  NonConvergence(const std::string& what, LassoSolution incumbent)
      : SolverError(what), incumbent_(std::move(incumbent)) {}
  const LassoSolution& incumbent() const { return incumbent_; }
  double residual() const { return incumbent_.kkt_residual; }

 private:
  LassoSolution incumbent_;
};

/// min(1e-8 (1 + |X^T y / n|_inf), 1e-9 (1 + r)). The second term keeps every
/// converged solution inside the Dantzig constraint set with room to spare.
double default_lasso_tolerance(const DesignMatrix& d, const DenseVector& y, double r);

double lasso_objective(const DesignMatrix& d, const DenseVector& y, const DenseVector& theta,
                       double r);

/// Cyclic coordinate descent on (1/n)|y - X theta|_2^2 + 2 r |theta|_1.
/// Relies on the unit Gram diagonal of DesignMatrix for the closed-form update.
LassoSolution lasso_fit(const DesignMatrix& d, const DenseVector& y, double r,
                        const LassoOptions& options = {});

struct KktResult {
  bool passes = false;
  double residual = 0.0;
};

/// Largest violation of the subdifferential optimality conditions.
KktResult kkt_check(const DesignMatrix& d, const DenseVector& y, const DenseVector& theta, double r,
                    double tol);

struct FeasibilityResult {
  bool feasible = false;
  double slack = 0.0;  // r - |(1/n) X^T (y - X theta)|_inf
};

/// Membership in {theta : |(1/n) X^T (y - X theta)|_inf <= r}, up to 1e-7 (1 + r).
FeasibilityResult dantzig_feasibility(const DesignMatrix& d, const DenseVector& y,
                                      const DenseVector& theta, double r);

inline double dantzig_feasibility_tolerance(double r) { return 1e-7 * (1.0 + r); }

}  // namespace sparsereg
