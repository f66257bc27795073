#pragma once

#include <cstddef>
#include <string>

#include "sparsereg/error.hpp"
#include "sparsereg/linalg.hpp"

namespace sparsereg {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// min c^T x  subject to  A x = b,  x >= 0.
struct StandardFormLP {
  DenseVector c;
  RowMajorMatrix a;
  DenseVector b;

  std::size_t variables() const { return static_cast<std::size_t>(a.cols()); }
  std::size_t constraints() const { return static_cast<std::size_t>(a.rows()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  DenseVector x;
  DenseVector dual;  // y with c - A^T y >= 0 at optimality
  double objective = 0.0;
  double phase_one_objective = 0.0;
  double min_reduced_cost = 0.0;
  double duality_gap = 0.0;  // |c^T x - b^T y|
  std::size_t pivots = 0;
  std::size_t bland_pivots = 0;
};

struct SimplexOptions {
  std::size_t max_pivots = 0;  // 0 selects 50 (rows + columns)
  double reduced_cost_tol = 1e-9;
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t refactor_interval = 100;
};

class IterationLimit : public SolverError {
 public:
  IterationLimit(const std::string& what, LpSolution incumbent)
      : SolverError(what), incumbent_(std::move(incumbent)) {}
  const LpSolution& incumbent() const { return incumbent_; }

 private:
  LpSolution incumbent_;
};

/// Basis matrix became singular and stayed singular after refactorisation.
class NumericalError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Two-phase revised simplex with a product-form basis inverse. Pricing is
/// Dantzig's most-negative rule; after 3 * rows consecutive degenerate pivots
/// it falls back to Bland's rule until the objective moves again.
/// Returns optimal, infeasible or unbounded; throws IterationLimit carrying the
/// incumbent basic solution when the pivot budget runs out.
LpSolution simplex_solve(const StandardFormLP& lp, const SimplexOptions& options = {});
LpSolution simplex_solve(const StandardFormLP& lp, std::size_t max_pivots);

}  // namespace sparsereg
