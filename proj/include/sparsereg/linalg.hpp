#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace sparsereg {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// Throws InvalidParameter if any entry is NaN or infinite. `what` names the
/// offending object in the message.
void require_finite(const DenseVector& v, const std::string& what);
void require_finite(const DenseMatrix& m, const std::string& what);

/// l_p norm for p in [1, inf]; pass kInfinityNorm for the max norm.
double norm_lp(const DenseVector& v, double p);

/// Symmetric Psi = X^T X / n. Only the upper triangle is accumulated and then
/// mirrored, so (i, j) and (j, i) are bitwise equal.
class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(DenseMatrix symmetric);

  std::size_t dim() const { return static_cast<std::size_t>(psi_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return psi_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const DenseMatrix& matrix() const { return psi_; }

 private:
  DenseMatrix psi_;
};

GramMatrix gram(const DenseMatrix& x);

/// (1/n) X^T (y - X theta).
DenseVector residual_correlations(const DenseMatrix& x, const DenseVector& y,
                                  const DenseVector& theta);

// Plain-text matrix format: a header line "n M" followed by n rows of M
// whitespace-separated decimals.
DenseMatrix read_matrix(std::istream& in);
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const DenseMatrix& m);
void write_matrix_file(const std::string& path, const DenseMatrix& m);

}  // namespace sparsereg
