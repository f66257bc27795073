#include "sparsereg/linalg.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sparsereg/error.hpp"

namespace sparsereg {

void require_finite(const DenseVector& v, const std::string& what) {
  if (!v.allFinite()) throw InvalidParameter(what + " contains a non-finite entry");
}

void require_finite(const DenseMatrix& m, const std::string& what) {
  if (!m.allFinite()) throw InvalidParameter(what + " contains a non-finite entry");
}

double norm_lp(const DenseVector& v, double p) {
  if (v.size() == 0) throw InvalidParameter("norm of an empty vector");
  if (std::isnan(p) || p < 1.0) throw InvalidParameter("l_p norm requires p >= 1");
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) acc += std::pow(std::abs(v[j]), p);
  return std::pow(acc, 1.0 / p);
}

GramMatrix::GramMatrix(DenseMatrix symmetric) : psi_(std::move(symmetric)) {
  if (psi_.rows() != psi_.cols()) throw DimensionMismatch("Gram matrix must be square");
}

GramMatrix gram(const DenseMatrix& x) {
  if (x.rows() < 1 || x.cols() < 1) throw DimensionMismatch("gram: empty matrix");
  const Eigen::Index m = x.cols();
  DenseMatrix psi = DenseMatrix::Zero(m, m);
  psi.selfadjointView<Eigen::Upper>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < j; ++i) psi(j, i) = psi(i, j);
  return GramMatrix(std::move(psi));
}

DenseVector residual_correlations(const DenseMatrix& x, const DenseVector& y,
                                  const DenseVector& theta) {
  if (y.size() != x.rows() || theta.size() != x.cols())
    throw DimensionMismatch("residual_correlations: dimensions do not conform");
  DenseVector res = y - x * theta;
  return x.transpose() * res / static_cast<double>(x.rows());
}

DenseMatrix read_matrix(std::istream& in) {
  long long n = 0, m = 0;
  if (!(in >> n >> m) || n < 1 || m < 1)
    throw FormatError("matrix file: expected header 'n M' with positive sizes");
  DenseMatrix out(n, m);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < m; ++j) {
      if (!(in >> out(i, j))) {
        std::ostringstream msg;
        msg << "matrix file: missing or malformed entry at row " << i + 1 << ", column " << j + 1;
        throw FormatError(msg.str());
      }
    }
  }
  std::string trailing;
  if (in >> trailing) throw FormatError("matrix file: unexpected trailing data");
  require_finite(out, "matrix file");
  return out;
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open matrix file: " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write matrix file: " + path);
  write_matrix(out, m);
}

}  // namespace sparsereg
