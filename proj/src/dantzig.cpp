#include "sparsereg/dantzig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsereg/lasso.hpp"

namespace sparsereg {

DenseVector DantzigLP::recover(const DenseVector& x) const {
  const std::size_t m = order.size();
  DenseVector theta = DenseVector::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k)
    theta[static_cast<Eigen::Index>(order[k])] =
        x[static_cast<Eigen::Index>(k)] - x[static_cast<Eigen::Index>(m + k)];
  return theta;
}

DenseVector DantzigLP::embed(const DenseVector& theta) const {
  const auto m = static_cast<Eigen::Index>(order.size());
  DenseVector x = DenseVector::Zero(4 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double t = theta[static_cast<Eigen::Index>(order[static_cast<std::size_t>(k)])];
    x[k] = std::max(t, 0.0);
    x[m + k] = std::max(-t, 0.0);
  }
  x.tail(2 * m) = lp.b - lp.a.leftCols(2 * m) * x.head(2 * m);
  return x;
}

DantzigLP dantzig_to_lp(const DesignMatrix& d, const DenseVector& y, double r,
                        const std::vector<std::size_t>& variable_order) {
  if (!(r > 0.0 && std::isfinite(r))) throw InvalidParameter("dantzig: r must be positive");
  if (static_cast<std::size_t>(y.size()) != d.rows())
    throw DimensionMismatch("dantzig: y length differs from the number of rows");
  const std::size_t m = d.cols();
  DantzigLP out;
  out.order = variable_order;
  if (out.order.empty()) {
    out.order.resize(m);
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  }
  {
    std::vector<std::size_t> sorted = out.order;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.size() == m;
    for (std::size_t i = 0; ok && i < m; ++i) ok = sorted[i] == i;
    if (!ok) throw InvalidParameter("dantzig: variable order must be a permutation of 0..M-1");
  }

  const auto mm = static_cast<Eigen::Index>(m);
  const DenseVector g = d.x().transpose() * y / static_cast<double>(d.rows());
  const DenseMatrix& psi = d.gram().matrix();
  StandardFormLP& lp = out.lp;
  lp.a = RowMajorMatrix::Zero(2 * mm, 4 * mm);
  for (Eigen::Index k = 0; k < mm; ++k) {
    const auto col = static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(k)]);
    lp.a.block(0, k, mm, 1) = psi.col(col);
    lp.a.block(0, mm + k, mm, 1) = -psi.col(col);
    lp.a.block(mm, k, mm, 1) = -psi.col(col);
    lp.a.block(mm, mm + k, mm, 1) = psi.col(col);
  }
  lp.a.rightCols(2 * mm).setIdentity();
  lp.b.resize(2 * mm);
  lp.b.head(mm) = g.array() + r;
  lp.b.tail(mm) = r - g.array();
  lp.c = DenseVector::Zero(4 * mm);
  lp.c.head(2 * mm).setOnes();
  return out;
}

DantzigSolution dantzig_fit(const DesignMatrix& d, const DenseVector& y, double r,
                            const DantzigOptions& options) {
  const DantzigLP form = dantzig_to_lp(d, y, r, options.variable_order);
  SimplexOptions sopt;
  sopt.max_pivots = options.max_pivots;
  const LpSolution lps = simplex_solve(form.lp, sopt);

  DantzigSolution sol;
  sol.r = r;
  sol.lp_status = lps.status;
  sol.pivots = lps.pivots;
  sol.duality_gap = lps.duality_gap;
  sol.theta = form.recover(lps.x);
  sol.l1_norm = sol.theta.lpNorm<1>();
  sol.constraint_slack = dantzig_feasibility(d, y, sol.theta, r).slack;
  return sol;
}

}  // namespace sparsereg
