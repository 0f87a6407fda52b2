#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "oamnet/mode_algebra.hpp"
#include "oamnet/rng.hpp"

using namespace oamnet;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Independent oracle for the polynomial term of the expansion coefficients:
// the t^k coefficient of (1-t)^n (1+t)^m by direct binomial expansion,
//   sum over i+j=k of (-1)^i C(n,i) C(m,j),
// kept separate from the convolution the implementation uses.
long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

long long poly_coeff_oracle(int n, int m, int k) {
  long long sum = 0;
  for (int i = 0; i <= k; ++i) {
    const long long sign = (i % 2 == 0) ? 1 : -1;
    sum += sign * binomial(n, i) * binomial(m, k - i);
  }
  return sum;
}

double max_component_diff(const ModeVector& a, const ModeVector& b) {
  REQUIRE(a.amplitudes.size() == b.amplitudes.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
    worst = std::max(worst, std::abs(a.amplitudes[i] - b.amplitudes[i]));
  }
  return worst;
}

ModeVector make_mode(int order, std::vector<Complex> amplitudes) {
  return ModeVector{order, std::move(amplitudes)};
}

}  // namespace

TEST_CASE("index maps between (n,m) and (ell,p)") {
  SUBCASE("paper order-2 mode") {
    const ModeIndices idx = indices_from_lp(2, 0);
    CHECK(idx.n == 2);
    CHECK(idx.m == 0);
  }
  SUBCASE("symmetric case") {
    const ModeIndices idx = indices_from_lp(0, 1);
    CHECK(idx.n == 1);
    CHECK(idx.m == 1);
  }
  SUBCASE("negative ell, solved independently by enumeration") {
    int found_n = -1, found_m = -1;
    for (int n = 0; n <= 10 && found_n < 0; ++n) {
      for (int m = 0; m <= 10; ++m) {
        if (n - m == -3 && std::min(n, m) == 1) {
          found_n = n;
          found_m = m;
          break;
        }
      }
    }
    REQUIRE(found_n == 1);
    REQUIRE(found_m == 4);
    const ModeIndices idx = indices_from_lp(-3, 1);
    CHECK(idx.n == found_n);
    CHECK(idx.m == found_m);
  }
  SUBCASE("round trip for all small indices") {
    for (int ell = -6; ell <= 6; ++ell) {
      for (int p = 0; p <= 4; ++p) {
        const ModeIndices idx = indices_from_lp(ell, p);
        CHECK(idx.ell == idx.n - idx.m);
        CHECK(idx.p == std::min(idx.n, idx.m));
        CHECK(idx.n + idx.m == 2 * p + std::abs(ell));
      }
    }
  }
  SUBCASE("negative p rejected") {
    CHECK_THROWS_AS(indices_from_lp(2, -1), std::invalid_argument);
  }
}

TEST_CASE("expansion polynomial equals the binomial oracle exactly") {
  for (int n = 0; n <= 10; ++n) {
    for (int m = 0; m + n <= 10; ++m) {
      const auto poly = expansion_polynomial(n, m);
      REQUIRE(poly.size() == static_cast<std::size_t>(n + m) + 1);
      for (int k = 0; k <= n + m; ++k) {
        CHECK(poly[static_cast<std::size_t>(k)] == poly_coeff_oracle(n, m, k));
      }
    }
  }
}

TEST_CASE("lg coefficient examples") {
  SUBCASE("(n=2, m=0): the printed order-2 vector") {
    const ModeVector v = lg_coefficients(2, 0);
    REQUIRE(v.order == 2);
    const ModeVector expected =
        make_mode(2, {{0.5, 0.0}, {0.0, -kInvSqrt2}, {-0.5, 0.0}});
    CHECK(max_component_diff(v, expected) < 1e-12);
  }
  SUBCASE("(n=0, m=0): order zero") {
    const ModeVector v = lg_coefficients(0, 0);
    REQUIRE(v.amplitudes.size() == 1);
    CHECK(std::abs(v.amplitudes[0] - Complex{1.0, 0.0}) < 1e-12);
  }
  SUBCASE("(n=1, m=1): from (1-t)(1+t) = 1 - t^2") {
    const ModeVector v = lg_coefficients(1, 1);
    const ModeVector expected =
        make_mode(2, {{kInvSqrt2, 0.0}, {0.0, 0.0}, {kInvSqrt2, 0.0}});
    CHECK(max_component_diff(v, expected) < 1e-12);
  }
  SUBCASE("(n=0, m=2): from (1+t)^2 term by term") {
    const ModeVector v = lg_coefficients(0, 2);
    const ModeVector expected =
        make_mode(2, {{0.5, 0.0}, {0.0, kInvSqrt2}, {-0.5, 0.0}});
    CHECK(max_component_diff(v, expected) < 1e-12);
  }
}

TEST_CASE("lg vectors are unit norm and orthonormal within each order") {
  for (int order = 0; order <= 6; ++order) {
    std::vector<ModeVector> vectors;
    for (const int ell : admissible_ells(order)) {
      vectors.push_back(lg_mode(ell, (order - std::abs(ell)) / 2));
    }
    REQUIRE(vectors.size() == static_cast<std::size_t>(order) + 1);
    for (std::size_t a = 0; a < vectors.size(); ++a) {
      CHECK(std::abs(norm(vectors[a]) - 1.0) < 1e-12);
      for (std::size_t b = a + 1; b < vectors.size(); ++b) {
        CHECK(std::abs(inner(vectors[a], vectors[b])) < 1e-12);
      }
    }
  }
}

TEST_CASE("order cap is enforced") {
  CHECK_THROWS_AS(lg_coefficients(16, 15), std::out_of_range);
  CHECK_THROWS_AS(rotation_matrix(31, 0.1), std::out_of_range);
  CHECK_THROWS_AS(lg_coefficients(3, 3, 5), std::out_of_range);
  CHECK_NOTHROW(lg_coefficients(15, 15));
}

TEST_CASE("rotation matrix reproduces the order-2 closed form") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = (rng.uniform01() * 4.0 - 2.0) * kPi;
    const UnitaryMatrix u = rotation_matrix(2, alpha);
    UnitaryMatrix expected(3);
    expected.at(0, 0) = std::cos(alpha) * std::cos(alpha);
    expected.at(0, 1) = std::sin(2.0 * alpha) * kInvSqrt2;
    expected.at(0, 2) = std::sin(alpha) * std::sin(alpha);
    expected.at(1, 0) = -std::sin(2.0 * alpha) * kInvSqrt2;
    expected.at(1, 1) = std::cos(2.0 * alpha);
    expected.at(1, 2) = std::sin(2.0 * alpha) * kInvSqrt2;
    expected.at(2, 0) = std::sin(alpha) * std::sin(alpha);
    expected.at(2, 1) = -std::sin(2.0 * alpha) * kInvSqrt2;
    expected.at(2, 2) = std::cos(alpha) * std::cos(alpha);
    CHECK(u.max_abs_diff(expected) < 1e-12);
  }
}

TEST_CASE("rotation matrix special values") {
  SUBCASE("zero angle is the identity") {
    CHECK(rotation_matrix(3, 0.0).max_abs_diff(UnitaryMatrix::identity(4)) < 1e-12);
  }
  SUBCASE("order 1 quarter turn") {
    // spectral sum over ell = +-1 with v_{+-1} = (1, -+i)/sqrt(2)
    const UnitaryMatrix u = rotation_matrix(1, kPi / 2.0);
    UnitaryMatrix expected(2);
    expected.at(0, 1) = Complex{1.0, 0.0};
    expected.at(1, 0) = Complex{-1.0, 0.0};
    CHECK(u.max_abs_diff(expected) < 1e-12);
  }
  SUBCASE("full turn is the identity") {
    for (int order = 0; order <= 6; ++order) {
      CHECK(rotation_matrix(order, 2.0 * kPi)
                .max_abs_diff(UnitaryMatrix::identity(order + 1)) < 1e-10);
    }
  }
}

TEST_CASE("rotation matrices are unitary and satisfy the group law") {
  Rng rng(777);
  for (int trial = 0; trial < 40; ++trial) {
    const int order = static_cast<int>(rng.below(7));
    const double alpha = (rng.uniform01() * 4.0 - 2.0) * kPi;
    const double beta = (rng.uniform01() * 4.0 - 2.0) * kPi;
    const UnitaryMatrix ua = rotation_matrix(order, alpha);
    CHECK(ua.unitarity_defect() < 1e-10);
    const UnitaryMatrix ub = rotation_matrix(order, beta);
    const UnitaryMatrix uab = rotation_matrix(order, alpha + beta);
    CHECK((ua * ub).max_abs_diff(uab) < 1e-10);
  }
}

TEST_CASE("eigenphase law: lg modes pick up exp(-i ell alpha)") {
  Rng rng(31337);
  for (int order = 0; order <= 6; ++order) {
    for (const int ell : admissible_ells(order)) {
      const ModeVector mode = lg_mode(ell, (order - std::abs(ell)) / 2);
      for (int trial = 0; trial < 20; ++trial) {
        const double alpha = (rng.uniform01() * 4.0 - 2.0) * kPi;
        const ModeVector rotated = apply_rotation(mode, alpha);
        const Complex phase = std::exp(Complex{0.0, -ell * alpha});
        ModeVector expected = mode;
        for (Complex& c : expected.amplitudes) c *= phase;
        CHECK(max_component_diff(rotated, expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("apply_rotation examples") {
  SUBCASE("pure lg mode, phase only") {
    const ModeVector mode = lg_mode(2, 0);
    const double alpha = 0.37;
    const ModeVector rotated = apply_rotation(mode, alpha);
    const Complex phase = std::exp(Complex{0.0, -2.0 * alpha});
    ModeVector expected = mode;
    for (Complex& c : expected.amplitudes) c *= phase;
    CHECK(max_component_diff(rotated, expected) < 1e-12);
  }
  SUBCASE("zero angle is the identity on any mode") {
    const ModeVector mode = lg_mode(-3, 1);
    CHECK(max_component_diff(apply_rotation(mode, 0.0), mode) < 1e-12);
  }
  SUBCASE("superposition rotates linearly") {
    const ModeVector plus = lg_mode(2, 0);
    const ModeVector minus = lg_mode(-2, 0);
    ModeVector input = plus;
    for (std::size_t k = 0; k < input.amplitudes.size(); ++k) {
      input.amplitudes[k] = (plus.amplitudes[k] + minus.amplitudes[k]) * kInvSqrt2;
    }
    // at alpha = pi/2 both branches pick up exp(-+i pi) = -1
    const ModeVector rotated = apply_rotation(input, kPi / 2.0);
    ModeVector expected = input;
    for (Complex& c : expected.amplitudes) c *= -1.0;
    CHECK(max_component_diff(rotated, expected) < 1e-10);
  }
}
