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

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace gtopt {

using cxd = std::complex<double>;

// Tolerance ladder used across the library. Constructions (matrix factories,
// gate payload checks) are held to kUnitaryTol; rewrite-rule predicates and
// local replacement checks to kRuleTol; whole-circuit equivalence after long
// pipelines to kVerifyTol.
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kRuleTol = 1e-9;
inline constexpr double kVerifyTol = 1e-8;

/** A dense 2x2 complex matrix with rows (m00, m01), (m10, m11). */
struct Mat2 {
  cxd m00{0.0}, m01{0.0}, m10{0.0}, m11{0.0};
};

inline Mat2 identity2() { return Mat2{1.0, 0.0, 0.0, 1.0}; }
inline Mat2 sigma_x() { return Mat2{0.0, 1.0, 1.0, 0.0}; }
inline Mat2 sigma_y() { return Mat2{0.0, cxd(0, -1), cxd(0, 1), 0.0}; }
inline Mat2 sigma_z() { return Mat2{1.0, 0.0, 0.0, -1.0}; }

inline Mat2 mul2(const Mat2& a, const Mat2& b) {
  return Mat2{a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
              a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

inline Mat2 dagger2(const Mat2& a) {
  return Mat2{std::conj(a.m00), std::conj(a.m10), std::conj(a.m01),
              std::conj(a.m11)};
}

inline Mat2 scale2(const cxd& c, const Mat2& a) {
  return Mat2{c * a.m00, c * a.m01, c * a.m10, c * a.m11};
}

inline double max_abs_diff2(const Mat2& a, const Mat2& b) {
  double d = std::abs(a.m00 - b.m00);
  d = std::max(d, std::abs(a.m01 - b.m01));
  d = std::max(d, std::abs(a.m10 - b.m10));
  d = std::max(d, std::abs(a.m11 - b.m11));
  return d;
}

inline bool approx_equal2(const Mat2& a, const Mat2& b,
                          double tol = kRuleTol) {
  return max_abs_diff2(a, b) <= tol;
}

inline bool is_diagonal(const Mat2& a, double tol = kRuleTol) {
  return std::abs(a.m01) <= tol && std::abs(a.m10) <= tol;
}

inline bool is_antidiagonal(const Mat2& a, double tol = kRuleTol) {
  return std::abs(a.m00) <= tol && std::abs(a.m11) <= tol;
}

/** True when a is e^{i phi} * identity for some phase phi. */
inline bool is_scalar2(const Mat2& a, double tol = kRuleTol) {
  return is_diagonal(a, tol) && std::abs(a.m00 - a.m11) <= tol;
}

inline bool is_identity2(const Mat2& a, double tol = kUnitaryTol) {
  return approx_equal2(a, identity2(), tol);
}

inline bool is_unitary2(const Mat2& a, double tol = kUnitaryTol) {
  return approx_equal2(mul2(a, dagger2(a)), identity2(), tol) &&
         std::isfinite(a.m00.real()) && std::isfinite(a.m00.imag()) &&
         std::isfinite(a.m01.real()) && std::isfinite(a.m01.imag()) &&
         std::isfinite(a.m10.real()) && std::isfinite(a.m10.imag()) &&
         std::isfinite(a.m11.real()) && std::isfinite(a.m11.imag());
}

/**
 * Principal square root of a 2x2 unitary.
 *
 * Eigenvalues of a unitary lie on the unit circle; each argument is taken in
 * (-pi, pi] and halved, so the roots' arguments land in (-pi/2, pi/2].
 * Computed spectrally without forming eigenvectors:
 *   u = l1*P1 + l2*P2  =>  sqrt(u) = s1*I + (s2 - s1)/(l2 - l1) * (u - l1*I),
 * with the difference quotient replaced by its limit 1/(2*s1) when the
 * eigenvalues (nearly) coincide.
 */
inline Mat2 matrix_sqrt2(const Mat2& u) {
  const cxd tr = u.m00 + u.m11;
  const cxd det = u.m00 * u.m11 - u.m01 * u.m10;
  const cxd disc = std::sqrt(tr * tr - 4.0 * det);
  cxd l1 = 0.5 * (tr + disc);
  cxd l2 = 0.5 * (tr - disc);
  // Unitary input: clamp the eigenvalues onto the unit circle so the branch
  // choice depends only on the argument.
  const double a1 = std::abs(l1), a2 = std::abs(l2);
  if (a1 > 1e-300) l1 /= a1;
  if (a2 > 1e-300) l2 /= a2;
  const cxd s1 = std::polar(1.0, 0.5 * std::arg(l1));
  const cxd s2 = std::polar(1.0, 0.5 * std::arg(l2));
  cxd c;
  if (std::abs(l2 - l1) < 1e-12) {
    c = 1.0 / (2.0 * s1);
  } else {
    c = (s2 - s1) / (l2 - l1);
  }
  return Mat2{s1 + c * (u.m00 - l1), c * u.m01, c * u.m10,
              s1 + c * (u.m11 - l1)};
}

/**
 * Snaps a matrix that is unitary up to rounding error back onto the unitary
 * group by orthonormalizing its columns. Long chains of payload
 * compositions (conjugations, phase scalings) drift by about an ulp each;
 * this keeps the drift from ever reaching validation thresholds.
 */
inline Mat2 reunitarize2(const Mat2& a) {
  const double n0 = std::sqrt(std::norm(a.m00) + std::norm(a.m10));
  if (n0 < 1e-300) return a;  // not remotely unitary; leave it alone
  const cxd c00 = a.m00 / n0, c10 = a.m10 / n0;
  const cxd overlap = std::conj(c00) * a.m01 + std::conj(c10) * a.m11;
  cxd c01 = a.m01 - overlap * c00;
  cxd c11 = a.m11 - overlap * c10;
  const double n1 = std::sqrt(std::norm(c01) + std::norm(c11));
  if (n1 < 1e-300) return a;
  return Mat2{c00, c01 / n1, c10, c11 / n1};
}

inline Mat2 rz(double a) {
  return {std::polar(1.0, -0.5 * a), 0.0, 0.0, std::polar(1.0, 0.5 * a)};
}

inline Mat2 ry(double t) {
  const double c = std::cos(0.5 * t), s = std::sin(0.5 * t);
  return {c, -s, s, c};
}

struct ZyzAngles {
  double theta, phi, lambda, delta;
};

// u = e^{i delta} Rz(phi) Ry(theta) Rz(lambda) with
// Rz(a) = diag(e^{-ia/2}, e^{+ia/2}), so
//   m00 = cos(theta/2) e^{i(delta-(phi+lambda)/2)}
//   m01 = -sin(theta/2) e^{i(delta-(phi-lambda)/2)}
//   m10 =  sin(theta/2) e^{i(delta+(phi-lambda)/2)}
//   m11 = cos(theta/2) e^{i(delta+(phi+lambda)/2)}
inline ZyzAngles zyz_decompose(const Mat2& u) {
  constexpr double kPi = 3.14159265358979323846;
  ZyzAngles z{};
  const double c = std::abs(u.m00);
  const double s = std::abs(u.m10);
  z.theta = 2.0 * std::atan2(s, c);
  if (c >= s) {
    // Diagonal-dominant: read phases off m00 and m11.
    const double a00 = std::arg(u.m00), a11 = std::arg(u.m11);
    z.delta = 0.5 * (a00 + a11);
    if (s > 1e-14) {
      const double a10 = std::arg(u.m10);
      z.phi = a10 - a00;
      z.lambda = a11 - a10;
    } else {
      z.phi = a11 - a00;
      z.lambda = 0.0;
    }
  } else {
    // Antidiagonal-dominant: read phases off m10 and m01.
    const double a10 = std::arg(u.m10), a01 = std::arg(u.m01);
    z.delta = 0.5 * (a10 + a01 - kPi);
    const double diff = a10 - a01 + kPi;  // phi - lambda
    if (c > 1e-14) {
      const double sum = 2.0 * (z.delta - std::arg(u.m00));  // phi + lambda
      z.phi = 0.5 * (sum + diff);
      z.lambda = 0.5 * (sum - diff);
    } else {
      z.phi = diff;
      z.lambda = 0.0;
    }
  }
  return z;
}

inline Mat2 zyz_compose(const ZyzAngles& z) {
  const Mat2 m = mul2(rz(z.phi), mul2(ry(z.theta), rz(z.lambda)));
  return scale2(std::polar(1.0, z.delta), m);
}

/** Dense square complex matrix (row-major). Most call sites hold unitaries;
 * unitarity is asserted at the factory functions that promise it, not on
 * every operation. */
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(std::size_t dim)
      : dim_(dim), a_(dim * dim, cxd(0.0)) {}

  static UnitaryMatrix identity(std::size_t dim) {
    UnitaryMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return dim_; }

  cxd& at(std::size_t row, std::size_t col) { return a_[row * dim_ + col]; }
  const cxd& at(std::size_t row, std::size_t col) const {
    return a_[row * dim_ + col];
  }

  UnitaryMatrix adjoint() const {
    UnitaryMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m.at(i, j) = std::conj(at(j, i));
    return m;
  }

  friend UnitaryMatrix operator*(const UnitaryMatrix& a,
                                 const UnitaryMatrix& b) {
    if (a.dim_ != b.dim_)
      throw std::invalid_argument("matrix dimensions disagree");
    UnitaryMatrix r(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t k = 0; k < a.dim_; ++k) {
        const cxd aik = a.at(i, k);
        if (aik == cxd(0.0)) continue;
        for (std::size_t j = 0; j < a.dim_; ++j)
          r.at(i, j) += aik * b.at(k, j);
      }
    return r;
  }

  bool is_unitary(double tol = kUnitaryTol) const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        cxd s(0.0);
        for (std::size_t k = 0; k < dim_; ++k)
          s += at(i, k) * std::conj(at(j, k));
        if (std::abs(s - (i == j ? cxd(1.0) : cxd(0.0))) > tol) return false;
      }
    return true;
  }

  bool all_finite() const {
    for (const cxd& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<cxd> a_;
};

inline double max_abs_diff(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("matrix dimensions disagree");
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      d = std::max(d, std::abs(a.at(i, j) - b.at(i, j)));
  return d;
}

/**
 * True when u = c*v entrywise for a single unit-modulus scalar c.
 *
 * The reference phase is read off the largest-magnitude entry of v, so a
 * sparse v (say, a permutation) does not trip on its zero entries. A unitary
 * always has an entry of magnitude >= 1/sqrt(dim), far above the 1e-6 floor.
 */
inline bool equal_up_to_global_phase(const UnitaryMatrix& u,
                                     const UnitaryMatrix& v,
                                     double tol = kVerifyTol) {
  if (u.dim() != v.dim()) return false;
  std::size_t bi = 0, bj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.dim(); ++i)
    for (std::size_t j = 0; j < v.dim(); ++j)
      if (std::abs(v.at(i, j)) > best) {
        best = std::abs(v.at(i, j));
        bi = i;
        bj = j;
      }
  if (best < 1e-6) return false;
  cxd c = u.at(bi, bj) / v.at(bi, bj);
  const double cc = std::abs(c);
  c = (cc > 1e-300) ? c / cc : cxd(1.0);
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < u.dim(); ++j)
      if (std::abs(u.at(i, j) - c * v.at(i, j)) > tol) return false;
  return true;
}

/** Seeded standard-normal source. Box-Muller over mt19937_64 keeps the
 * stream identical across standard libraries, unlike normal_distribution. */
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}

  explicit GaussianSource(std::mt19937_64& eng) : eng_(eng()) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1]: never zero, so the log is finite.
    const double u1 =
        (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

namespace detail {

// One Givens step: left-multiplies m by the two-level rotation on rows
// (q, p) that zeroes m[p][col], and mirrors the same row operation onto acc
// so that acc accumulates the product of all rotations applied so far.
inline void givens_zero(UnitaryMatrix& m, UnitaryMatrix& acc, std::size_t p,
                        std::size_t q, std::size_t col) {
  const cxd a = m.at(q, col);
  const cxd b = m.at(p, col);
  const double r = std::sqrt(std::norm(a) + std::norm(b));
  if (r < 1e-300 || std::abs(b) == 0.0) return;
  const cxd g00 = std::conj(a) / r, g01 = std::conj(b) / r;
  const cxd g10 = -b / r, g11 = a / r;
  for (std::size_t j = 0; j < m.dim(); ++j) {
    const cxd mq = m.at(q, j), mp = m.at(p, j);
    m.at(q, j) = g00 * mq + g01 * mp;
    m.at(p, j) = g10 * mq + g11 * mp;
    const cxd aq = acc.at(q, j), ap = acc.at(p, j);
    acc.at(q, j) = g00 * aq + g01 * ap;
    acc.at(p, j) = g10 * aq + g11 * ap;
  }
}

}  // namespace detail

/**
 * Haar-distributed random unitary of the given dimension.
 *
 * QR of a complex Gaussian matrix via Givens rotations, with the R diagonal's
 * phases folded back into Q (the Mezzadri phase fix); without that fix the
 * distribution would be biased toward the QR algorithm's sign conventions.
 */
inline UnitaryMatrix random_unitary(std::size_t dim, GaussianSource& gauss) {
  UnitaryMatrix g(dim);
  const double inv_sqrt2 = 0.70710678118654752440;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      g.at(i, j) = cxd(gauss() * inv_sqrt2, gauss() * inv_sqrt2);
  UnitaryMatrix acc = UnitaryMatrix::identity(dim);
  for (std::size_t p = 1; p < dim; ++p)
    for (std::size_t q = 0; q < p; ++q) detail::givens_zero(g, acc, p, q, q);
  // g is now upper triangular with the Gaussian's randomness left only in
  // the diagonal phases; acc holds the rotation product, so Q = acc^dagger.
  UnitaryMatrix u(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const cxd rjj = g.at(j, j);
    const double m = std::abs(rjj);
    const cxd phase = (m > 1e-300) ? rjj / m : cxd(1.0);
    for (std::size_t i = 0; i < dim; ++i)
      u.at(i, j) = std::conj(acc.at(j, i)) * phase;
  }
  return u;
}

inline UnitaryMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  GaussianSource gauss(seed);
  return random_unitary(dim, gauss);
}

/** Haar-random 2x2 unitary, convenient for gate payloads in tests. */
inline Mat2 random_mat2(GaussianSource& gauss) {
  const UnitaryMatrix u = random_unitary(2, gauss);
  return Mat2{u.at(0, 0), u.at(0, 1), u.at(1, 0), u.at(1, 1)};
}

/** SplitMix64 step; used to derive independent sub-seeds from (seed, k). */
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace gtopt
