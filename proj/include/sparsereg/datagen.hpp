#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsereg/design.hpp"
#include "sparsereg/linalg.hpp"

namespace sparsereg {

/// sign(t) in {-1, 0, +1}; -0.0 maps to 0.
int sign_of(double t);

struct SparseTarget {
  DenseVector theta;                 // theta*
  std::vector<std::size_t> support;  // J, sorted
  double rho = 0.0;                  // min_{j in J} |theta*_j|, 0 when J is empty
  std::vector<int> signs;            // sign(theta*_j) for every j

  std::size_t sparsity() const { return support.size(); }
};

/// Builds a SparseTarget (support, rho, signs) from an explicit vector.
SparseTarget make_target(DenseVector theta);

struct TargetOptions {
  /// Signs for the sorted support, one per nonzero; random when empty.
  std::vector<int> sign_pattern;
  /// Explicit support; uniform random size-s subset when empty.
  std::vector<std::size_t> support;
};

/// s-sparse theta* with magnitudes uniform on [rho, 2 rho].
SparseTarget gen_target(std::size_t m, std::size_t s, double rho, std::uint64_t seed,
                        const TargetOptions& options = {});

enum class NoiseFamily { gaussian, student_t, rademacher, noiseless };

struct NoiseModel {
  NoiseFamily family = NoiseFamily::gaussian;
  double sigma = 1.0;
  /// Degrees of freedom for student_t (>= 3); the draw is rescaled to variance sigma^2.
  int df = 3;

  /// Throws InvalidParameter on sigma <= 0 or df < 3.
  void validate() const;
};

std::string to_string(NoiseFamily f);
NoiseFamily parse_noise_family(const std::string& name);

DenseVector draw_noise(const NoiseModel& model, std::size_t n, std::uint64_t seed);

struct Instance {
  DesignMatrix design;
  SparseTarget target;
  NoiseModel noise;
  DenseVector w;
  DenseVector y;
  std::uint64_t seed = 0;
};

/// y = X theta* + W with W drawn from `noise` on the noise sub-stream of `seed`.
Instance synthesize(const DesignMatrix& d, const SparseTarget& target, const NoiseModel& noise,
                    std::uint64_t seed);

/// Instance bundle: <dir>/design.txt in the matrix format plus <dir>/instance.json
/// carrying theta*, J, y, W, seed and the noise model.
void write_bundle(const std::string& dir, const Instance& inst);
Instance read_bundle(const std::string& dir);

}  // namespace sparsereg
