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

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "gtopt/circuit.hpp"
#include "gtopt/matrix.hpp"

namespace gtopt {

// Local rewrite rules on ordered adjacent gate pairs (b1, b2), b1 acting
// first. How two multi-controlled gates interact is fully determined by how
// each one's target relates to the other's controls (the M1..M5 cases of
// classify_pair) and by the shapes of the two payloads A = payload(b1),
// B = payload(b2). The rules below either swap the pair, swap it while
// adjusting one payload, fuse it into at most one gate, or rewrite it into
// three gates that expose new neighbours (helper_exchange).
//
// Throughout, t3/t4/t5 are the control role sets of classify_pair: shared
// controls, controls private to b1, controls private to b2.

namespace detail {

inline PairContext pair_shape(const Gate& b1, const Gate& b2) {
  int top = std::max(b1.target, b2.target);
  if (!b1.controls.empty()) top = std::max(top, b1.controls.back());
  if (!b2.controls.empty()) top = std::max(top, b2.controls.back());
  return classify_pair(b1, b2, top + 1);
}

inline bool payloads_commute(const Mat2& a, const Mat2& b, double tol) {
  return max_abs_diff2(mul2(a, b), mul2(b, a)) <= tol;
}

// sub \ {skip} is a subset of sup. Both inputs sorted. Allocation-free so
// the optimizer can probe pairs in a tight loop.
inline bool controls_subset(const std::vector<int>& sub,
                            const std::vector<int>& sup, int skip) {
  std::size_t j = 0;
  for (int w : sub) {
    if (w == skip) continue;
    while (j < sup.size() && sup[j] < w) ++j;
    if (j == sup.size() || sup[j] != w) return false;
    ++j;
  }
  return true;
}

// diag(e^{i alpha}, 1): the off-diagonal entries vanish and the bottom
// entry is exactly 1 (not merely unimodular).
inline bool is_upper_phase(const Mat2& a, double tol) {
  return std::abs(a.m01) <= tol && std::abs(a.m10) <= tol &&
         std::abs(a.m11 - 1.0) <= tol;
}

// diag(1, e^{i alpha}).
inline bool is_lower_phase(const Mat2& a, double tol) {
  return std::abs(a.m01) <= tol && std::abs(a.m10) <= tol &&
         std::abs(a.m00 - 1.0) <= tol;
}

}  // namespace detail

// Whether swapping (b1, b2) -> (b2, b1) preserves the circuit.
//   M1: the payloads must commute.
//   M2: always.
//   M3: b2 acts on one of b1's controls, so B must preserve the control
//       projector: B diagonal.
//   M4: mirror image, A diagonal.
//   M5: both diagonal, or one payload is diag(e^{i a}, 1). The latter works
//       because such a gate only phases states where its own target is 0
//       and the other gate's control demands a 1 there, so the two gates
//       touch disjoint basis states.
inline bool commutes(const Gate& b1, const Gate& b2, double tol = kRuleTol) {
  const Mat2 &a = b1.payload, &b = b2.payload;
  if (b1.target == b2.target) return detail::payloads_commute(a, b, tol);
  const bool t1_in_c2 = has_control(b2, b1.target);
  const bool t2_in_c1 = has_control(b1, b2.target);
  if (!t1_in_c2 && !t2_in_c1) return true;                // M2
  if (t2_in_c1 && !t1_in_c2) return is_diagonal(b, tol);  // M3
  if (t1_in_c2 && !t2_in_c1) return is_diagonal(a, tol);  // M4
  return (is_diagonal(a, tol) && is_diagonal(b, tol)) ||  // M5
         detail::is_upper_phase(a, tol) || detail::is_upper_phase(b, tol);
}

// Moves b2 one slot left: [b1, b2] -> [b2', b1] where b2' keeps b2's wires
// and carries payload C with U(b2') = U(b1)^dagger U(b2) U(b1). A closed
// form exists when the pair commutes (C = B) and, for non-commuting pairs
// with t4 empty, in the cases below. With t4 non-empty a non-commuting b1
// fires on only part of b2's firing subspace and no single gate of b2's
// shape can absorb it.
inline std::optional<Gate> exchange_left(const Gate& b1, const Gate& b2,
                                         double tol = kRuleTol) {
  const Mat2 &a = b1.payload, &b = b2.payload;
  if (commutes(b1, b2, tol)) return make_gate(b2.target, b2.controls, b);
  if (!detail::controls_subset(b1.controls, b2.controls, b2.target))
    return std::nullopt;  // t4 non-empty
  if (b1.target == b2.target)
    // Plain conjugation on the shared target.
    return make_gate(b2.target, b2.controls,
                     reunitarize2(mul2(dagger2(a), mul2(b, a))));
  // M2 always commutes; a non-commuting M4 cannot exchange left because A
  // moves the wire b2 conditions on. That leaves M3 and M5, where b1 fires
  // exactly when b2's target is 1 (its other controls are a subset of
  // b2's), so A contributes a phase to the |1><0| transition and its
  // inverse to |0><1|.
  if (!has_control(b1, b2.target)) return std::nullopt;
  cxd ph;
  if (has_control(b2, b1.target)) {
    // M5: b1's payload sits on a wire b2 controls, so only the A11 slot of
    // a diagonal A is ever exercised.
    if (!is_diagonal(a, tol)) return std::nullopt;
    ph = a.m11;
  } else {
    // M3: every firing state of b2 sees all of A, which must be scalar.
    if (!is_scalar2(a, tol)) return std::nullopt;
    ph = a.m00;
  }
  return make_gate(
      b2.target, b2.controls,
      reunitarize2(Mat2{b.m00, b.m01 * ph, b.m10 * std::conj(ph), b.m11}));
}

// Moves b1 one slot right: [b1, b2] -> [b2, b1'] where b1' keeps b1's wires
// and carries payload D with U(b1') = U(b2) U(b1) U(b2)^dagger. Mirror
// image of exchange_left; requires t5 empty for the non-commuting cases.
inline std::optional<Gate> exchange_right(const Gate& b1, const Gate& b2,
                                          double tol = kRuleTol) {
  const Mat2 &a = b1.payload, &b = b2.payload;
  if (commutes(b1, b2, tol)) return make_gate(b1.target, b1.controls, a);
  if (!detail::controls_subset(b2.controls, b1.controls, b1.target))
    return std::nullopt;  // t5 non-empty
  if (b1.target == b2.target)
    return make_gate(b1.target, b1.controls,
                     reunitarize2(mul2(b, mul2(a, dagger2(b)))));
  // Mirror of exchange_left: only M4 and M5 admit a non-commuting right
  // exchange, with B supplying the phase.
  if (!has_control(b2, b1.target)) return std::nullopt;
  cxd ph;
  if (has_control(b1, b2.target)) {
    if (!is_diagonal(b, tol)) return std::nullopt;  // M5
    ph = b.m11;
  } else {
    if (!is_scalar2(b, tol)) return std::nullopt;  // M4
    ph = b.m00;
  }
  return make_gate(
      b1.target, b1.controls,
      reunitarize2(Mat2{a.m00, a.m01 * std::conj(ph), a.m10 * ph, a.m11}));
}

// True when U(b2) U(b1) is the identity. Requires matching shapes
// (t4 = t5 = {}), then per case:
//   M1: B.A = I.
//   M2: both payloads scalar with inverse phases.
//   M3: A = e^{-i p} I against B = diag(1, e^{i p}).
//   M4: the mirror image.
//   M5: both diagonal with unit top entries and inverse bottom entries.
inline bool identity_pair(const Gate& b1, const Gate& b2,
                          double tol = kRuleTol) {
  if (!detail::controls_subset(b1.controls, b2.controls, b2.target) ||
      !detail::controls_subset(b2.controls, b1.controls, b1.target))
    return false;  // t4 or t5 non-empty
  const Mat2 &a = b1.payload, &b = b2.payload;
  if (b1.target == b2.target) return is_identity2(mul2(b, a), tol);  // M1
  const bool t1_in_c2 = has_control(b2, b1.target);
  const bool t2_in_c1 = has_control(b1, b2.target);
  if (!t1_in_c2 && !t2_in_c1)  // M2
    return is_scalar2(a, tol) && is_scalar2(b, tol) &&
           std::abs(a.m00 * b.m00 - 1.0) <= tol;
  if (t2_in_c1 && !t1_in_c2)  // M3
    return is_scalar2(a, tol) && is_diagonal(b, tol) &&
           std::abs(b.m00 - 1.0) <= tol &&
           std::abs(a.m00 * b.m11 - 1.0) <= tol;
  if (t1_in_c2 && !t2_in_c1)  // M4
    return is_scalar2(b, tol) && is_diagonal(a, tol) &&
           std::abs(a.m00 - 1.0) <= tol &&
           std::abs(a.m11 * b.m00 - 1.0) <= tol;
  return is_diagonal(a, tol) && is_diagonal(b, tol) &&  // M5
         std::abs(a.m00 - 1.0) <= tol && std::abs(b.m00 - 1.0) <= tol &&
         std::abs(a.m11 * b.m11 - 1.0) <= tol;
}

// Fuses an adjacent pair into at most one gate. Succeeds when the control
// sets match up (t4 = t5 = {}) and one of the payloads can be re-expressed
// on the other gate's wires:
//   M1: always, payload B.A.
//   M2: a scalar payload is a phase on the shared controls alone and can
//       ride on either target.
//   M3/M4: a scalar payload on the gate whose target is the other's
//       control, or a diag(1, e^{i p}) payload on the controlling side,
//       both equal a phase on the union of the involved wires.
//   M5: a diag(1, e^{i p}) payload on either side, same reasoning.
// Returns the empty vector when the fused gate is the identity. Every
// replacement is checked against the restricted brute-force unitary before
// being returned.
inline std::optional<std::vector<Gate>> merge_pair(const Gate& b1,
                                                   const Gate& b2,
                                                   double tol = kRuleTol) {
  if (!detail::controls_subset(b1.controls, b2.controls, b2.target) ||
      !detail::controls_subset(b2.controls, b1.controls, b1.target))
    return std::nullopt;  // t4 or t5 non-empty
  const Mat2 &a = b1.payload, &b = b2.payload;
  std::optional<Gate> fused;
  if (b1.target == b2.target) {  // M1
    fused = make_gate(b2.target, b2.controls, reunitarize2(mul2(b, a)));
  } else {
    const bool t1_in_c2 = has_control(b2, b1.target);
    const bool t2_in_c1 = has_control(b1, b2.target);
    if (!t1_in_c2 && !t2_in_c1) {  // M2
      if (is_scalar2(a, tol))
        fused = make_gate(b2.target, b2.controls,
                          reunitarize2(scale2(a.m00, b)));
      else if (is_scalar2(b, tol))
        fused = make_gate(b1.target, b1.controls,
                          reunitarize2(scale2(b.m00, a)));
    } else if (t2_in_c1 && !t1_in_c2) {  // M3
      if (is_scalar2(a, tol))
        fused = make_gate(b2.target, b2.controls,
                          reunitarize2(mul2(b, Mat2{1.0, 0.0, 0.0, a.m00})));
      else if (detail::is_lower_phase(b, tol))
        fused = make_gate(b1.target, b1.controls,
                          reunitarize2(scale2(b.m11, a)));
    } else if (t1_in_c2 && !t2_in_c1) {  // M4
      if (detail::is_lower_phase(a, tol))
        fused = make_gate(b2.target, b2.controls,
                          reunitarize2(scale2(a.m11, b)));
      else if (is_scalar2(b, tol))
        fused = make_gate(b1.target, b1.controls,
                          reunitarize2(mul2(Mat2{1.0, 0.0, 0.0, b.m00}, a)));
    } else {  // M5
      if (detail::is_lower_phase(a, tol))
        fused = make_gate(b2.target, b2.controls,
                          reunitarize2(mul2(b, Mat2{1.0, 0.0, 0.0, a.m11})));
      else if (detail::is_lower_phase(b, tol))
        fused = make_gate(b1.target, b1.controls,
                          reunitarize2(mul2(Mat2{1.0, 0.0, 0.0, b.m11}, a)));
    }
  }
  if (!fused) return std::nullopt;
  std::vector<Gate> replacement;
  if (!is_identity2(fused->payload, tol)) replacement.push_back(*fused);
  if (!locally_equivalent({b1, b2}, replacement, tol)) return std::nullopt;
  return replacement;
}

// Rewrites [b1, b2] as [extra, mid, b1] when b1's payload is antidiagonal
// and b1 targets one of b2's controls. Conjugating that control by b1 flips
// its projector, which splits b2 into a gate that ignores the flipped wire
// (extra, controlled on every other involved wire) and a compensating
// inverse copy of b2 (mid). The helper does not shrink the pair, but it
// moves b1 past b2 while creating neighbours that other rules can attack.
//
// When b1 has private controls (t4 non-empty) the split only balances if
// B is Hermitian, because the region where b1 does not fire sees mid's
// B^dagger where the original circuit had B.
inline std::optional<std::vector<Gate>> helper_exchange(
    const Gate& b1, const Gate& b2, double tol = kRuleTol) {
  if (!is_antidiagonal(b1.payload, tol)) return std::nullopt;
  if (!has_control(b2, b1.target)) return std::nullopt;
  if (has_control(b1, b2.target) || b1.target == b2.target)
    return std::nullopt;
  const Mat2& b = b2.payload;
  std::vector<int> t4;
  std::set_difference(b1.controls.begin(), b1.controls.end(),
                      b2.controls.begin(), b2.controls.end(),
                      std::back_inserter(t4));
  if (!t4.empty() && !approx_equal2(b, dagger2(b), tol)) return std::nullopt;

  std::vector<int> extra_controls;
  for (int w : b2.controls)
    if (w != b1.target) extra_controls.push_back(w);
  for (int w : b1.controls)
    if (!std::binary_search(extra_controls.begin(), extra_controls.end(), w))
      extra_controls.push_back(w);
  std::sort(extra_controls.begin(), extra_controls.end());

  std::vector<Gate> out;
  out.push_back(make_gate(b2.target, extra_controls, b));
  out.push_back(make_gate(b2.target, b2.controls, dagger2(b)));
  out.push_back(b1);
  if (!locally_equivalent({b1, b2}, out, tol)) return std::nullopt;
  return out;
}

// Mirror image of helper_exchange: rewrites [b1, b2] as [b2, extra, mid]
// when b2's payload is antidiagonal and b2 targets one of b1's controls.
// Conjugating U(b1) by U(b2) flips the projector on that control, which
// splits into the same two gates as helper_exchange, built from b1's
// payload: extra ignores the flipped wire and controls on everything else
// involved, mid is an inverse copy of b1. The same Hermitian condition
// applies when b2 has controls of its own that b1 lacks.
inline std::optional<std::vector<Gate>> helper_exchange_left(
    const Gate& b1, const Gate& b2, double tol = kRuleTol) {
  if (!is_antidiagonal(b2.payload, tol)) return std::nullopt;
  if (!has_control(b1, b2.target)) return std::nullopt;
  if (has_control(b2, b1.target) || b1.target == b2.target)
    return std::nullopt;
  const Mat2& a = b1.payload;
  std::vector<int> extra_private;
  std::set_difference(b2.controls.begin(), b2.controls.end(),
                      b1.controls.begin(), b1.controls.end(),
                      std::back_inserter(extra_private));
  if (!extra_private.empty() && !approx_equal2(a, dagger2(a), tol))
    return std::nullopt;

  std::vector<int> extra_controls;
  for (int w : b1.controls)
    if (w != b2.target) extra_controls.push_back(w);
  for (int w : b2.controls)
    if (!std::binary_search(extra_controls.begin(), extra_controls.end(), w))
      extra_controls.push_back(w);
  std::sort(extra_controls.begin(), extra_controls.end());

  std::vector<Gate> out;
  out.push_back(b2);
  out.push_back(make_gate(b1.target, extra_controls, a));
  out.push_back(make_gate(b1.target, b1.controls, dagger2(a)));
  if (!locally_equivalent({b1, b2}, out, tol)) return std::nullopt;
  return out;
}

// Least-squares fallback for the exchange rules: solves for the payload of
// the shape-constrained replacement gate directly, without case analysis.
// The pair is collapsed onto at most five wires (the two targets plus one
// representative per non-empty control role set; wires inside one role set
// enter every control set of the pair together, so one stands for all),
// the replacement payload enters the exchange equation linearly, and the
// 4-unknown normal equations are solved exactly. A solution is returned
// only if the residual is negligible and the payload is unitary.
enum class ExchangeSide { left, right };

inline std::optional<Mat2> solve_exchange(const Gate& b1, const Gate& b2,
                                          ExchangeSide side,
                                          double tol = kRuleTol) {
  const PairContext ctx = detail::pair_shape(b1, b2);

  // Collapsed wire layout: list the surviving original wires, sorted, then
  // remap. role reps: t1, t2, first of each of t3/t4/t5.
  std::vector<int> survivors{ctx.t1};
  if (ctx.t2 >= 0) survivors.push_back(ctx.t2);
  for (const std::vector<int>* role : {&ctx.t3, &ctx.t4, &ctx.t5})
    if (!role->empty()) survivors.push_back(role->front());
  std::sort(survivors.begin(), survivors.end());
  const auto idx = [&](int wire) {
    return static_cast<int>(std::lower_bound(survivors.begin(),
                                             survivors.end(), wire) -
                            survivors.begin());
  };
  const auto collapse = [&](const Gate& g) {
    std::vector<int> ctrls;
    for (int w : g.controls)
      if (std::binary_search(survivors.begin(), survivors.end(), w))
        ctrls.push_back(idx(w));
    return make_gate(idx(g.target), ctrls, g.payload);
  };
  const Gate r1 = collapse(b1), r2 = collapse(b2);
  const int k = static_cast<int>(survivors.size());
  const std::size_t dim = 1u << k;

  const UnitaryMatrix u1 = circuit_to_unitary(Circuit{k, {r1}});
  const UnitaryMatrix u2 = circuit_to_unitary(Circuit{k, {r2}});
  const UnitaryMatrix rhs_full = u2 * u1;

  // The unknown gate's shape: firing mask from the shape gate (r2 for a
  // left exchange, r1 for a right one).
  const Gate& shape = side == ExchangeSide::left ? r2 : r1;
  unsigned cmask = 0;
  for (int c : shape.controls) cmask |= 1u << (k - 1 - c);
  const unsigned tbit = 1u << (k - 1 - shape.target);

  // U(shape with payload P) = N + sum_{jk} P_jk S_jk where N is the
  // identity on non-firing states and S_jk couples the firing pairs.
  UnitaryMatrix n_part(dim);
  std::vector<std::array<std::size_t, 2>> firing;  // (index with t=0, t=1)
  for (std::size_t x = 0; x < dim; ++x) {
    if ((x & cmask) == cmask) {
      if (!(x & tbit)) firing.push_back({x, x | tbit});
    } else {
      n_part.at(x, x) = 1.0;
    }
  }

  // Columns of the least-squares system, one per payload entry.
  std::array<UnitaryMatrix, 4> cols{UnitaryMatrix(dim), UnitaryMatrix(dim),
                                    UnitaryMatrix(dim), UnitaryMatrix(dim)};
  for (const auto& pair : firing) {
    const std::size_t x0 = pair[0], x1 = pair[1];
    cols[0].at(x0, x0) = 1.0;  // P00: |x0><x0|
    cols[1].at(x0, x1) = 1.0;  // P01
    cols[2].at(x1, x0) = 1.0;  // P10
    cols[3].at(x1, x1) = 1.0;  // P11
  }
  UnitaryMatrix rhs(dim);
  if (side == ExchangeSide::left) {
    for (auto& c : cols) c = u1 * c;
    rhs = rhs_full;
    const UnitaryMatrix shift = u1 * n_part;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) rhs.at(i, j) -= shift.at(i, j);
  } else {
    for (auto& c : cols) c = c * u2;
    rhs = rhs_full;
    const UnitaryMatrix shift = n_part * u2;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) rhs.at(i, j) -= shift.at(i, j);
  }

  // Normal equations: (G x = y) with G_uv = <col_u, col_v>.
  cxd g[4][5];
  for (int u = 0; u < 4; ++u) {
    for (int v = 0; v < 4; ++v) {
      cxd s(0.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          s += std::conj(cols[u].at(i, j)) * cols[v].at(i, j);
      g[u][v] = s;
    }
    cxd s(0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        s += std::conj(cols[u].at(i, j)) * rhs.at(i, j);
    g[u][4] = s;
  }
  // Gaussian elimination with partial pivoting on the 4x5 tableau.
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    if (std::abs(g[piv][col]) < 1e-14) return std::nullopt;
    if (piv != col)
      for (int c = 0; c < 5; ++c) std::swap(g[piv][c], g[col][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const cxd f = g[r][col] / g[col][col];
      for (int c = col; c < 5; ++c) g[r][c] -= f * g[col][c];
    }
  }
  const Mat2 payload{g[0][4] / g[0][0], g[1][4] / g[1][1], g[2][4] / g[2][2],
                     g[3][4] / g[3][3]};
  if (!is_unitary2(payload, tol)) return std::nullopt;

  // Residual of the full (unprojected) system.
  double resid = 0.0;
  const cxd p[4] = {payload.m00, payload.m01, payload.m10, payload.m11};
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      cxd s = -rhs.at(i, j);
      for (int u = 0; u < 4; ++u) s += p[u] * cols[u].at(i, j);
      resid = std::max(resid, std::abs(s));
    }
  if (resid > tol) return std::nullopt;
  return payload;
}

}  // namespace gtopt
