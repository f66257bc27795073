#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "sparsereg/linalg.hpp"

namespace sparsereg {

/// Cone constants: the Dantzig selector works in the cone with c0 = 1, the
/// Lasso in the wider cone with c0 = 3.
inline constexpr double kDantzigCone = 1.0;
inline constexpr double kLassoCone = 3.0;

/// Deterministic n x M design whose Gram matrix has unit diagonal.
///
/// Immutable; copies share the underlying storage, so a design can be handed
/// to any number of concurrent trials without duplication.
class DesignMatrix {
 public:
  /// Adopts `x` as is. Throws InvalidParameter when some column does not have
  /// squared norm n (to 1e-12 on the Gram diagonal).
  static DesignMatrix from_matrix(DenseMatrix x);
  /// Rescales every column to squared norm n first.
  static DesignMatrix normalized(DenseMatrix x);

  std::size_t rows() const { return static_cast<std::size_t>(data_->x.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(data_->x.cols()); }
  const DenseMatrix& x() const { return data_->x; }
  const GramMatrix& gram() const { return data_->gram; }
  /// max_{i != j} |Psi_ij|; 0 for a single column.
  double coherence() const { return data_->coherence; }
  /// (1/n) sum_i max_j X_ij^2.
  double row_energy() const { return data_->row_energy; }

 private:
  struct Data {
    DenseMatrix x;
    GramMatrix gram;
    double coherence = 0.0;
    double row_energy = 0.0;
  };
  explicit DesignMatrix(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

/// Largest sparsity certified by the coherence bound, or "unconstrained" when
/// the design is orthogonal.
struct AdmissibleSparsity {
  bool unconstrained = false;
  std::size_t value = 0;

  bool admits(std::size_t s) const { return unconstrained || s <= value; }
};

struct CoherenceReport {
  double coherence = 0.0;  // mu-hat
  double alpha = 0.0;
  AdmissibleSparsity s_adm_lasso;
  AdmissibleSparsity s_adm_dantzig;
  double row_energy = 0.0;  // c'-hat
};

/// floor(1 / (alpha (1 + 2 c0) mu)), with the unconstrained sentinel at mu = 0.
AdmissibleSparsity admissible_sparsity(double coherence, double alpha, double c0);

/// True when mu <= 1 / (alpha (1 + 2 c0) s).
bool certified_for(const DesignMatrix& d, std::size_t s, double alpha, double c0);

DesignMatrix gen_rademacher(std::size_t n, std::size_t m, std::uint64_t seed);
DesignMatrix gen_normalized_gaussian(std::size_t n, std::size_t m, std::uint64_t seed);

/// Rademacher design built column by column: a candidate column is redrawn
/// until its correlation with every accepted column is at most
/// `max_coherence`. Throws CertificationError after `attempts_per_column`
/// rejections of the same column.
DesignMatrix gen_rademacher_certified(std::size_t n, std::size_t m, double max_coherence,
                                      std::uint64_t seed,
                                      std::size_t attempts_per_column = 100000);

/// n x n Sylvester-Hadamard design (n a power of two); Psi = I exactly.
DesignMatrix gen_hadamard(std::size_t n);

CoherenceReport coherence(const DesignMatrix& d, double alpha);

struct KappaProbeOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  /// Force lambda to vanish off J (probes the restricted ratio only).
  bool support_only = false;
  std::size_t refine_sweeps = 200;
};

struct KappaProbeResult {
  std::vector<std::size_t> support;  // J attaining the minimum
  DenseVector lambda;                // minimising direction
  double c0 = 0.0;
  double min_ratio_found = 0.0;
  double min_ratio_sampled = 0.0;  // before refinement
  std::size_t samples = 0;
  double analytic_bound = 0.0;  // sqrt(1 - 1/alpha)
};

/// Randomised one-sided check of the restricted eigenvalue constant
///   min |X lambda|_2 / (sqrt(n) |lambda_J|_2)
/// over |J| <= s and |lambda_{J^c}|_1 <= c0 |lambda_J|_1, followed by a
/// coordinate pattern search from the best sample. Requires the design to be
/// certified for (s, alpha, c0).
KappaProbeResult kappa_probe(const DesignMatrix& d, std::size_t s, double c0, double alpha,
                             const KappaProbeOptions& options = {});

}  // namespace sparsereg
