// Copyright 2026 The gtopt developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "gtopt/matrix.hpp"

using namespace gtopt;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("mul2 matches a hand-multiplied product") {
  // sigma_x * sigma_z worked out by hand: rows ((0,-1),(1,0)).
  const Mat2 p = mul2(sigma_x(), sigma_z());
  CHECK(std::abs(p.m00 - cxd(0.0)) < 1e-15);
  CHECK(std::abs(p.m01 - cxd(-1.0)) < 1e-15);
  CHECK(std::abs(p.m10 - cxd(1.0)) < 1e-15);
  CHECK(std::abs(p.m11 - cxd(0.0)) < 1e-15);
  // ... which equals -i * sigma_y.
  CHECK(approx_equal2(p, scale2(cxd(0, -1), sigma_y()), 1e-15));
}

TEST_CASE("dagger2 is an involution and reverses products") {
  GaussianSource gauss(11);
  for (int i = 0; i < 100; ++i) {
    const Mat2 a = random_mat2(gauss);
    const Mat2 b = random_mat2(gauss);
    CHECK(approx_equal2(dagger2(dagger2(a)), a, 1e-15));
    CHECK(approx_equal2(dagger2(mul2(a, b)), mul2(dagger2(b), dagger2(a)),
                        1e-14));
    CHECK(approx_equal2(mul2(a, dagger2(a)), identity2(), 1e-12));
  }
}

TEST_CASE("shape predicates") {
  CHECK(is_diagonal(sigma_z()));
  CHECK(!is_diagonal(sigma_x()));
  CHECK(is_antidiagonal(sigma_x()));
  CHECK(is_antidiagonal(sigma_y()));
  CHECK(!is_antidiagonal(sigma_z()));
  const double s = 1.0 / std::sqrt(2.0);
  const Mat2 hadamard{s, s, s, -s};
  CHECK(!is_diagonal(hadamard));
  CHECK(!is_antidiagonal(hadamard));
  CHECK(is_scalar2(scale2(std::polar(1.0, 0.7), identity2())));
  CHECK(!is_scalar2(sigma_z()));
  CHECK(is_identity2(identity2()));
  CHECK(is_unitary2(hadamard));
  CHECK(!is_unitary2(Mat2{1.0, 0.0, 0.0, 2.0}));
}

TEST_CASE("matrix_sqrt2 fixed points") {
  // Hand-derived: sqrt(sigma_x) = 1/2 ((1+i, 1-i), (1-i, 1+i)).
  const Mat2 sx = matrix_sqrt2(sigma_x());
  CHECK(approx_equal2(
      sx,
      Mat2{cxd(0.5, 0.5), cxd(0.5, -0.5), cxd(0.5, -0.5), cxd(0.5, 0.5)},
      1e-12));
  // arg(-1) is taken as +pi, so sqrt(sigma_z) = diag(1, i).
  const Mat2 sz = matrix_sqrt2(sigma_z());
  CHECK(approx_equal2(sz, Mat2{1.0, 0.0, 0.0, cxd(0, 1)}, 1e-12));
  CHECK(approx_equal2(matrix_sqrt2(identity2()), identity2(), 1e-12));
  // Phase gates halve their angle.
  const Mat2 p = matrix_sqrt2(Mat2{1.0, 0.0, 0.0, std::polar(1.0, kPi / 2)});
  CHECK(approx_equal2(p, Mat2{1.0, 0.0, 0.0, std::polar(1.0, kPi / 4)},
                      1e-12));
}

TEST_CASE("matrix_sqrt2 squares back and stays on the principal branch") {
  GaussianSource gauss(202608);
  for (int i = 0; i < 10000; ++i) {
    const Mat2 u = random_mat2(gauss);
    const Mat2 v = matrix_sqrt2(u);
    REQUIRE(approx_equal2(mul2(v, v), u, 1e-9));
    REQUIRE(is_unitary2(v, 1e-9));
    // Principal branch: both eigenvalues of v have argument in (-pi/2, pi/2],
    // i.e. non-negative real part (zero only at argument exactly pi/2).
    const cxd tr = v.m00 + v.m11;
    const cxd det = v.m00 * v.m11 - v.m01 * v.m10;
    const cxd disc = std::sqrt(tr * tr - 4.0 * det);
    for (const cxd& s : {0.5 * (tr + disc), 0.5 * (tr - disc)}) {
      const double a = std::arg(s);
      REQUIRE(a > -kPi / 2 - 1e-9);
      REQUIRE(a <= kPi / 2 + 1e-9);
    }
  }
}

TEST_CASE("matrix_sqrt2 near-degenerate eigenvalues stay accurate") {
  // diag(e^{i t}, e^{i (t+eps)}) exercises the difference-quotient limit.
  for (double eps : {0.0, 1e-14, 1e-11, 1e-9}) {
    const Mat2 u{std::polar(1.0, 1.1), 0.0, 0.0, std::polar(1.0, 1.1 + eps)};
    const Mat2 v = matrix_sqrt2(u);
    CHECK(approx_equal2(mul2(v, v), u, 1e-9));
  }
}

TEST_CASE("reunitarize2 restores drifted matrices and fixes clean ones") {
  GaussianSource gauss(41);
  std::mt19937_64& eng = gauss.engine();
  for (int i = 0; i < 10000; ++i) {
    const Mat2 u = random_mat2(gauss);
    // Already-unitary input moves by at most its own unitarity error.
    const Mat2 r = reunitarize2(u);
    REQUIRE(is_unitary2(r, 1e-14));
    REQUIRE(approx_equal2(r, u, 1e-13));
    // Entrywise relative noise at 1e-8 comes back unitary and nearby.
    Mat2 noisy = u;
    const auto jiggle = [&](cxd& v) {
      const double s1 = static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5;
      const double s2 = static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5;
      v += cxd(s1, s2) * 2e-8;
    };
    jiggle(noisy.m00);
    jiggle(noisy.m01);
    jiggle(noisy.m10);
    jiggle(noisy.m11);
    const Mat2 fixed = reunitarize2(noisy);
    REQUIRE(is_unitary2(fixed, 1e-13));
    REQUIRE(approx_equal2(fixed, u, 1e-6));
  }
  // Degenerate inputs pass through untouched instead of dividing by zero.
  const Mat2 zero{0.0, 0.0, 0.0, 0.0};
  CHECK(max_abs_diff2(reunitarize2(zero), zero) == 0.0);
  const Mat2 rank1{1.0, 1.0, 0.0, 0.0};
  CHECK(max_abs_diff2(reunitarize2(rank1), rank1) == 0.0);
}

TEST_CASE("equal_up_to_global_phase") {
  GaussianSource gauss(7);
  for (int trial = 0; trial < 25; ++trial) {
    UnitaryMatrix u = random_unitary(4, gauss);
    UnitaryMatrix v = u;
    const cxd c = std::polar(1.0, 2.5 - 0.2 * trial);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) v.at(i, j) *= c;
    CHECK(equal_up_to_global_phase(u, v, 1e-10));
    CHECK(equal_up_to_global_phase(v, u, 1e-10));
  }
  // Sparse reference matrix: the phase must be read off a nonzero entry.
  UnitaryMatrix perm(4);
  perm.at(0, 0) = perm.at(1, 1) = 1.0;
  perm.at(2, 3) = perm.at(3, 2) = 1.0;
  UnitaryMatrix scaled = perm;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) scaled.at(i, j) *= cxd(0, 1);
  CHECK(equal_up_to_global_phase(scaled, perm, 1e-12));
  // A relative phase between entries is not a global phase.
  UnitaryMatrix skew = UnitaryMatrix::identity(4);
  skew.at(3, 3) = std::polar(1.0, 1e-3);
  CHECK(!equal_up_to_global_phase(skew, UnitaryMatrix::identity(4), 1e-8));
}

TEST_CASE("random_unitary is unitary, seeded, and silly-stable") {
  for (std::size_t dim : {2u, 4u, 8u, 16u}) {
    const UnitaryMatrix u = random_unitary(dim, 42);
    REQUIRE(u.is_unitary(1e-12));
    REQUIRE(u.all_finite());
  }
  const UnitaryMatrix a = random_unitary(8, 9001);
  const UnitaryMatrix b = random_unitary(8, 9001);
  const UnitaryMatrix c = random_unitary(8, 9002);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, c) > 1e-3);
}

TEST_CASE("random_unitary first-moment sanity") {
  // |u00|^2 of a Haar unitary has mean 1/dim. With a fixed seed this is a
  // deterministic regression guard rather than a statistical test.
  GaussianSource gauss(1234);
  double acc = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i)
    acc += std::norm(random_unitary(2, gauss).at(0, 0));
  CHECK(acc / draws > 0.45);
  CHECK(acc / draws < 0.55);
}

TEST_CASE("unitary matrix product and adjoint") {
  const UnitaryMatrix u = random_unitary(8, 5);
  const UnitaryMatrix prod = u * u.adjoint();
  CHECK(max_abs_diff(prod, UnitaryMatrix::identity(8)) < 1e-12);
}

TEST_CASE("mix64 separates nearby seeds") {
  CHECK(mix64(1) != mix64(2));
  CHECK(mix64(0) != 0);
}
