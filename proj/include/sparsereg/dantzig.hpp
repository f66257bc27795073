#pragma once

#include <cstddef>
#include <vector>

#include "sparsereg/design.hpp"
#include "sparsereg/simplex.hpp"

namespace sparsereg {

/// Standard-form image of
///   min |theta|_1  s.t.  |(1/n) X^T (y - X theta)|_inf <= r.
///
/// Column layout: [theta+ (M) | theta- (M) | slacks (2M)], where column k of
/// each theta block belongs to coordinate order[k]. Rows 0..M-1 encode
/// Psi theta <= g + r and rows M..2M-1 encode -Psi theta <= r - g, with
/// g = X^T y / n. theta_{order[k]} = x[k] - x[M + k].
struct DantzigLP {
  StandardFormLP lp;
  std::vector<std::size_t> order;

  std::size_t coordinates() const { return order.size(); }
  DenseVector recover(const DenseVector& x) const;
  /// (max(theta, 0), max(-theta, 0)) with slacks filled in; feasible iff theta is.
  DenseVector embed(const DenseVector& theta) const;
};

DantzigLP dantzig_to_lp(const DesignMatrix& d, const DenseVector& y, double r,
                        const std::vector<std::size_t>& variable_order = {});

struct DantzigOptions {
  /// Column order of the LP (perturbs simplex tie-breaking); natural when empty.
  std::vector<std::size_t> variable_order;
  std::size_t max_pivots = 0;
};

struct DantzigSolution {
  DenseVector theta;
  double r = 0.0;
  LpStatus lp_status = LpStatus::iteration_limit;
  double constraint_slack = 0.0;  // r - |(1/n) X^T (y - X theta)|_inf
  double l1_norm = 0.0;
  double duality_gap = 0.0;
  std::size_t pivots = 0;

  bool optimal() const { return lp_status == LpStatus::optimal; }
};

/// Dantzig selector by revised simplex. Simplex exceptions propagate.
DantzigSolution dantzig_fit(const DesignMatrix& d, const DenseVector& y, double r,
                            const DantzigOptions& options = {});

}  // namespace sparsereg
