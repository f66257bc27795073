#include "sparsereg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

namespace sparsereg {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// One elementary column transformation of the product-form inverse.
struct Eta {
  std::size_t pivot = 0;
  double pivot_value = 0.0;
  std::vector<std::pair<std::size_t, double>> entries;  // off-pivot, nonzero
};

class RevisedSimplex {
 public:
  RevisedSimplex(const StandardFormLP& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.constraints()), nv_(lp.variables()) {
    if (static_cast<std::size_t>(lp.c.size()) != nv_ || static_cast<std::size_t>(lp.b.size()) != m_)
      throw DimensionMismatch("simplex: c, A and b do not conform");
    require_finite(lp.c, "LP cost");
    require_finite(lp.b, "LP right-hand side");
    if (!lp.a.allFinite()) throw InvalidParameter("LP matrix contains a non-finite entry");
    max_pivots_ = opt.max_pivots ? opt.max_pivots : 50 * (m_ + nv_);
    flip_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) flip_[i] = lp.b[static_cast<Eigen::Index>(i)] < 0 ? -1.0 : 1.0;
    b_ = lp.b;
    for (std::size_t i = 0; i < m_; ++i) b_[static_cast<Eigen::Index>(i)] *= flip_[i];
    b_scale_ = 1.0 + (m_ ? b_.cwiseAbs().maxCoeff() : 0.0);
    find_unit_columns();
    crash_basis();
  }

  LpSolution solve() {
    LpSolution out;
    reinvert();
    if (!art_row_.empty()) {
      const bool done = run_phase(true);
      if (!done) return finish(LpStatus::unbounded);  // cannot happen: phase one is bounded
      double infeas = 0.0;
      for (std::size_t p = 0; p < m_; ++p)
        if (is_artificial(basis_[p])) infeas += std::max(xb_[p], 0.0);
      phase_one_objective_ = infeas;
      if (infeas > opt_.feasibility_tol * b_scale_) return finish(LpStatus::infeasible);
      drive_out_artificials();
    }
    if (!run_phase(false)) return finish(LpStatus::unbounded);
    return finish(LpStatus::optimal);
  }

 private:
  bool is_artificial(std::size_t var) const { return var >= nv_; }

  double cost(std::size_t var, bool phase_one) const {
    if (phase_one) return is_artificial(var) ? 1.0 : 0.0;
    return is_artificial(var) ? 0.0 : lp_.c[static_cast<Eigen::Index>(var)];
  }

  void find_unit_columns() {
    unit_row_.assign(nv_, kNone);
    for (std::size_t j = 0; j < nv_; ++j) {
      std::size_t row = kNone;
      bool ok = true;
      for (std::size_t i = 0; i < m_ && ok; ++i) {
        const double v = lp_.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * flip_[i];
        if (v == 0.0) continue;
        if (v == 1.0 && row == kNone) row = i;
        else ok = false;
      }
      if (ok) unit_row_[j] = row;
    }
  }

  void crash_basis() {
    basis_.assign(m_, kNone);
    for (std::size_t j = 0; j < nv_; ++j)
      if (unit_row_[j] != kNone && basis_[unit_row_[j]] == kNone) basis_[unit_row_[j]] = j;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] == kNone) {
        basis_[i] = nv_ + art_row_.size();
        art_row_.push_back(i);
      }
    }
    is_basic_.assign(nv_ + art_row_.size(), 0);
    for (std::size_t v : basis_) is_basic_[v] = 1;
  }

  // Column of the (row-flipped) constraint matrix in row space.
  DenseVector column(std::size_t var) const {
    DenseVector col = DenseVector::Zero(static_cast<Eigen::Index>(m_));
    if (is_artificial(var)) {
      col[static_cast<Eigen::Index>(art_row_[var - nv_])] = 1.0;
    } else {
      for (std::size_t i = 0; i < m_; ++i)
        col[static_cast<Eigen::Index>(i)] =
            lp_.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(var)) * flip_[i];
    }
    return col;
  }

  std::size_t unit_row(std::size_t var) const {
    return is_artificial(var) ? art_row_[var - nv_] : unit_row_[var];
  }

  void ftran(DenseVector& a) const {
    for (const Eta& e : etas_) {
      const double ap = a[static_cast<Eigen::Index>(e.pivot)];
      if (ap == 0.0) continue;
      a[static_cast<Eigen::Index>(e.pivot)] = e.pivot_value * ap;
      for (const auto& [i, v] : e.entries) a[static_cast<Eigen::Index>(i)] += v * ap;
    }
  }

  void btran(DenseVector& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = it->pivot_value * v[static_cast<Eigen::Index>(it->pivot)];
      for (const auto& [i, val] : it->entries) acc += val * v[static_cast<Eigen::Index>(i)];
      v[static_cast<Eigen::Index>(it->pivot)] = acc;
    }
  }

  void push_eta(const DenseVector& alpha, std::size_t p) {
    Eta e;
    e.pivot = p;
    const double ap = alpha[static_cast<Eigen::Index>(p)];
    e.pivot_value = 1.0 / ap;
    for (std::size_t i = 0; i < m_; ++i) {
      const double v = alpha[static_cast<Eigen::Index>(i)];
      if (i != p && v != 0.0) e.entries.emplace_back(i, -v / ap);
    }
    etas_.push_back(std::move(e));
  }

  // Rebuilds the eta file from scratch for the current basis.
  void reinvert() {
    for (int attempt = 0; attempt < 2; ++attempt) {
      etas_.clear();
      std::vector<std::size_t> placed(m_, kNone);
      std::vector<std::size_t> rest;
      for (std::size_t v : basis_) {
        const std::size_t row = unit_row(v);
        if (row != kNone && placed[row] == kNone) placed[row] = v;
        else rest.push_back(v);
      }
      bool singular = false;
      for (std::size_t v : rest) {
        DenseVector alpha = column(v);
        ftran(alpha);
        std::size_t best = kNone;
        double best_abs = 0.0;
        for (std::size_t p = 0; p < m_; ++p) {
          if (placed[p] != kNone) continue;
          const double a = std::abs(alpha[static_cast<Eigen::Index>(p)]);
          if (a > best_abs) {
            best_abs = a;
            best = p;
          }
        }
        if (best == kNone || best_abs < 1e-11) {
          singular = true;
          break;
        }
        push_eta(alpha, best);
        placed[best] = v;
      }
      if (!singular) {
        basis_ = std::move(placed);
        xb_ = b_;
        ftran(xb_);
        since_refactor_ = 0;
        return;
      }
    }
    throw NumericalError("simplex: basis matrix is numerically singular");
  }

  // Reduced costs of all non-artificial variables for the given row prices.
  DenseVector reduced_costs(const DenseVector& y, bool phase_one) const {
    DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(nv_));
    for (std::size_t i = 0; i < m_; ++i) {
      const double yi = y[static_cast<Eigen::Index>(i)] * flip_[i];
      if (yi != 0.0) w.noalias() += yi * lp_.a.row(static_cast<Eigen::Index>(i)).transpose();
    }
    DenseVector d(static_cast<Eigen::Index>(nv_));
    for (std::size_t j = 0; j < nv_; ++j) d[static_cast<Eigen::Index>(j)] = cost(j, phase_one) - w[static_cast<Eigen::Index>(j)];
    return d;
  }

  DenseVector prices(bool phase_one) const {
    DenseVector y(static_cast<Eigen::Index>(m_));
    for (std::size_t p = 0; p < m_; ++p) y[static_cast<Eigen::Index>(p)] = cost(basis_[p], phase_one);
    btran(y);
    return y;
  }

  void pivot(std::size_t entering, const DenseVector& alpha, std::size_t p) {
    const double t = xb_[static_cast<Eigen::Index>(p)] / alpha[static_cast<Eigen::Index>(p)];
    xb_.noalias() -= t * alpha;
    xb_[static_cast<Eigen::Index>(p)] = t;
    is_basic_[basis_[p]] = 0;
    basis_[p] = entering;
    is_basic_[entering] = 1;
    push_eta(alpha, p);
    ++pivots_;
    if (bland_) ++bland_pivots_;
    if (++since_refactor_ >= opt_.refactor_interval) reinvert();
  }

  void check_budget() {
    if (pivots_ >= max_pivots_) {
      LpSolution inc = finish(LpStatus::iteration_limit);
      std::ostringstream msg;
      msg << "simplex: pivot limit " << max_pivots_ << " reached";
      throw IterationLimit(msg.str(), std::move(inc));
    }
  }

  // Returns false when the phase objective is unbounded below.
  bool run_phase(bool phase_one) {
    std::size_t degenerate_run = 0;
    bland_ = false;
    for (;;) {
      const DenseVector y = prices(phase_one);
      const DenseVector d = reduced_costs(y, phase_one);
      std::size_t q = kNone;
      double best = -opt_.reduced_cost_tol;
      for (std::size_t j = 0; j < nv_; ++j) {
        if (is_basic_[j]) continue;
        const double dj = d[static_cast<Eigen::Index>(j)];
        if (dj < best) {
          q = j;
          if (bland_) break;
          best = dj;
        }
      }
      if (q == kNone) {
        last_prices_ = y;
        return true;
      }
      check_budget();

      DenseVector alpha = column(q);
      ftran(alpha);
      std::size_t leave = kNone;
      double tmin = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < m_; ++p) {
        const double a = alpha[static_cast<Eigen::Index>(p)];
        if (a <= opt_.pivot_tol) continue;
        const double t = std::max(xb_[static_cast<Eigen::Index>(p)], 0.0) / a;
        if (t < tmin - 1e-12 * (1.0 + tmin)) {
          tmin = t;
          leave = p;
        } else if (t <= tmin + 1e-12 * (1.0 + tmin)) {
          const bool better = bland_ ? basis_[p] < basis_[leave]
                                     : a > alpha[static_cast<Eigen::Index>(leave)];
          if (better) {
            leave = p;
            tmin = std::min(tmin, t);
          }
        }
      }
      if (leave == kNone) return false;

      if (tmin <= 1e-12) {
        if (++degenerate_run > 3 * m_) bland_ = true;
      } else {
        degenerate_run = 0;
        bland_ = false;
      }
      pivot(q, alpha, leave);
    }
  }

  // Degenerate pivots that replace zero-level artificials by real columns. An
  // artificial that cannot leave sits on a redundant row and stays at zero.
  void drive_out_artificials() {
    for (std::size_t p = 0; p < m_; ++p) {
      if (!is_artificial(basis_[p])) continue;
      DenseVector row = DenseVector::Zero(static_cast<Eigen::Index>(m_));
      row[static_cast<Eigen::Index>(p)] = 1.0;
      btran(row);
      DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(nv_));
      for (std::size_t i = 0; i < m_; ++i) {
        const double yi = row[static_cast<Eigen::Index>(i)] * flip_[i];
        if (yi != 0.0) w.noalias() += yi * lp_.a.row(static_cast<Eigen::Index>(i)).transpose();
      }
      std::size_t q = kNone;
      double best = 1e-9;
      for (std::size_t j = 0; j < nv_; ++j) {
        if (is_basic_[j]) continue;
        if (std::abs(w[static_cast<Eigen::Index>(j)]) > best) {
          best = std::abs(w[static_cast<Eigen::Index>(j)]);
          q = j;
        }
      }
      if (q == kNone) continue;
      check_budget();
      DenseVector alpha = column(q);
      ftran(alpha);
      pivot(q, alpha, p);
    }
  }

  LpSolution finish(LpStatus status) {
    LpSolution out;
    out.status = status;
    out.pivots = pivots_;
    out.bland_pivots = bland_pivots_;
    out.phase_one_objective = phase_one_objective_;
    out.x = DenseVector::Zero(static_cast<Eigen::Index>(nv_));
    for (std::size_t p = 0; p < m_; ++p)
      if (!is_artificial(basis_[p]))
        out.x[static_cast<Eigen::Index>(basis_[p])] = std::max(xb_[static_cast<Eigen::Index>(p)], 0.0);
    out.objective = lp_.c.dot(out.x);
    if (status == LpStatus::optimal) {
      const DenseVector& y = last_prices_;
      const DenseVector d = reduced_costs(y, false);
      double dmin = 0.0;
      for (std::size_t j = 0; j < nv_; ++j) dmin = std::min(dmin, d[static_cast<Eigen::Index>(j)]);
      out.min_reduced_cost = dmin;
      out.dual = y;
      for (std::size_t i = 0; i < m_; ++i) out.dual[static_cast<Eigen::Index>(i)] *= flip_[i];
      out.duality_gap = std::abs(out.objective - lp_.b.dot(out.dual));
    }
    return out;
  }

  const StandardFormLP& lp_;
  SimplexOptions opt_;
  std::size_t m_, nv_;
  std::size_t max_pivots_ = 0;
  std::vector<double> flip_;
  DenseVector b_;
  double b_scale_ = 1.0;
  std::vector<std::size_t> unit_row_;
  std::vector<std::size_t> art_row_;
  std::vector<std::size_t> basis_;
  std::vector<char> is_basic_;
  std::vector<Eta> etas_;
  DenseVector xb_;
  DenseVector last_prices_;
  std::size_t pivots_ = 0;
  std::size_t bland_pivots_ = 0;
  std::size_t since_refactor_ = 0;
  double phase_one_objective_ = 0.0;
  bool bland_ = false;
};

}  // namespace

LpSolution simplex_solve(const StandardFormLP& lp, const SimplexOptions& options) {
  RevisedSimplex solver(lp, options);
  return solver.solve();
}

LpSolution simplex_solve(const StandardFormLP& lp, std::size_t max_pivots) {
  SimplexOptions opt;
  opt.max_pivots = max_pivots;
  return simplex_solve(lp, opt);
}

}  // namespace sparsereg
