#include <catch_amalgamated.hpp>

#include <cmath>

#include "sparsereg/datagen.hpp"
#include "sparsereg/error.hpp"
#include "sparsereg/rates.hpp"

using namespace sparsereg;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RateSpec spec(Regime regime, double a, double delta, std::size_t n, std::size_t m) {
  RateSpec s;
  s.regime = regime;
  s.a = a;
  s.delta = delta;
  s.n = n;
  s.m = m;
  return s;
}

}  // namespace

TEST_CASE("gaussian rate at n = 4096, M = 512, A = 4") {
  // 4 * sqrt(ln 512 / 4096) = 4 * sqrt(6.238324625 / 4096)
  CHECK_THAT(compute_r(spec(Regime::gaussian, 4.0, 1.0, 4096, 512)), WithinRel(0.15610398959206834, 1e-14));
  RateSpec s = spec(Regime::gaussian, 4.0, 1.0, 4096, 512);
  s.sigma = 2.5;
  CHECK_THAT(compute_r(s), WithinRel(2.5 * 0.15610398959206834, 1e-14));
}

TEST_CASE("general-noise rate") {
  // sqrt((ln 512)^2 / 4096) = ln 512 / 64
  CHECK_THAT(compute_r(spec(Regime::general_noise, 4.0, 1.0, 4096, 512)),
             WithinRel(6.238324625039508 / 64.0, 1e-14));
  // delta = 0.5: sqrt((ln 512)^1.5 / 4096)
  CHECK_THAT(compute_r(spec(Regime::general_noise, 4.0, 0.5, 4096, 512)),
             WithinRel(0.061676682256239686, 1e-12));
  CHECK_THROWS_AS(compute_r(spec(Regime::general_noise, 4.0, 0.0, 4096, 512)), InvalidParameter);
}

TEST_CASE("rate constant must exceed 2 sqrt 2") {
  CHECK_THROWS_WITH(compute_r(spec(Regime::gaussian, 2.0, 1.0, 100, 10)), ContainsSubstring("A > 2*sqrt(2)"));
  CHECK_THROWS_AS(compute_r(spec(Regime::gaussian, 2.8284271247461903, 1.0, 100, 10)), InvalidParameter);
  CHECK_NOTHROW(compute_r(spec(Regime::gaussian, 2.83, 1.0, 100, 10)));
  CHECK_THROWS_AS(compute_r(spec(Regime::gaussian, 4.0, 1.0, 100, 2)), InvalidParameter);
}

TEST_CASE("c2 values") {
  // 1.5 (1 + 16 / (7 * 0.2)) and 1.5 (1 + 4 / (3 * 0.2))
  CHECK_THAT(compute_c2(1.2, 3.0), WithinRel(18.642857142857142, 1e-14));
  CHECK_THAT(compute_c2(1.2, 1.0), WithinRel(11.5, 1e-14));
  // alpha = 2, c0 = 1: 1.5 (1 + 4 / 3) = 3.5
  CHECK_THAT(compute_c2(2.0, 1.0), WithinRel(3.5, 1e-15));
  CHECK_THROWS_AS(compute_c2(1.0, 1.0), InvalidParameter);
}

TEST_CASE("probability floor uses M^(1 - A^2 / 8)") {
  const auto p = probability_floor(spec(Regime::gaussian, 4.0, 1.0, 4096, 512));
  REQUIRE(p.has_value());
  CHECK(*p == 1.0 - 1.0 / 512.0);
  const auto q = probability_floor(spec(Regime::gaussian, 3.0, 1.0, 100, 64));
  CHECK_THAT(*q, WithinAbs(1.0 - std::pow(64.0, 1.0 - 9.0 / 8.0), 1e-15));
  CHECK_FALSE(probability_floor(spec(Regime::general_noise, 4.0, 1.0, 100, 64)).has_value());
}

TEST_CASE("constants bundle") {
  const auto k = make_constants(spec(Regime::gaussian, 4.0, 1.0, 4096, 512), 1.2, 3.0, 2.2);
  CHECK(k.c0 == 3.0);
  CHECK_THAT(k.c1, WithinRel(2.2 * 18.642857142857142, 1e-14));
  CHECK_THAT(k.threshold, WithinRel(18.642857142857142 * 0.15610398959206834, 1e-13));
  CHECK(k.probability_floor.has_value());
}

TEST_CASE("thresholding keeps strictly larger magnitudes") {
  DenseVector t(5);
  t << 1.0, -1.0, 1.0000001, -2.0, 0.3;
  const DenseVector out = apply_threshold(t, 1.0);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 1.0000001);
  CHECK(out[3] == -2.0);
  CHECK(out[4] == 0.0);
  CHECK(sign_vector(out) == std::vector<int>{0, 0, 1, -1, 0});
}

TEST_CASE("signal gate") {
  DenseVector th = DenseVector::Zero(4);
  th[2] = -3.0;
  const SparseTarget t = make_target(th);
  CHECK(signal_gate(t, 2.0, 1.49));
  CHECK_FALSE(signal_gate(t, 2.0, 1.5));
}
