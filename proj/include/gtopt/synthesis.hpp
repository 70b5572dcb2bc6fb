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

#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtopt/circuit.hpp"
#include "gtopt/matrix.hpp"

namespace gtopt {

// Synthesis pipeline. An n-qubit unitary is reduced in stages:
//
//   two_level   QR by Givens rotations into two-level factors + a diagonal
//   toffoli     each factor/diagonal entry as multi-controlled one-qubit
//               gates (plus NOT conjugation for 0-valued control bits)
//   controlled  multi-controlled gates expanded into singly-controlled
//               gates and CNOTs via a Gray-code parity network
//   basic       singly-controlled gates expanded into CNOTs and one-qubit
//               gates (ABC conjugation)
//
// The two_level and toffoli stages share a gate-level representation: a
// two-level factor has no more compact circuit form than its
// multi-controlled expansion, so requesting either stage yields the same
// circuit and the distinction only matters for where optimization hooks run.

enum class Stage { two_level, toffoli, controlled, basic };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::two_level:
      return "two-level";
    case Stage::toffoli:
      return "toffoli";
    case Stage::controlled:
      return "controlled";
    default:
      return "basic";
  }
}

// A unitary acting on the two computational basis states q < p only:
// rows/columns (q,p) hold [[m00, m01], [m10, m11]], all other basis states
// are fixed.
struct TwoLevelFactor {
  unsigned p, q;  // basis indices, p > q
  Mat2 block;
};

struct TwoLevelDecomposition {
  std::vector<TwoLevelFactor> factors;
  std::vector<cxd> diagonal;
};

// Order in which sub-diagonal entries are zeroed. Both orders produce the
// same set of (row, column) positions and identical total factor counts on
// dense inputs; they differ in how factors touching the same rows end up
// adjacent in the output sequence, which matters to the peephole optimizer
// downstream.
enum class EliminationOrder {
  row_major,     // (1,0), (2,0), (2,1), (3,0), ...
  column_major,  // (1,0), (2,0), (3,0), (2,1), ...
};

// Givens elimination below the diagonal. Each step zeroes entry (i,j)
// against pivot (j,j); a unitary reduced this way ends up diagonal.
// Factors satisfy
//
//   u = factors[0] * factors[1] * ... * factors[M-1] * diag(diagonal)
//
// with every diagonal entry clamped to unit modulus. Rotations whose target
// entry is already zero are skipped, so M <= dim*(dim-1)/2 always holds.
inline TwoLevelDecomposition qr_two_level(
    const UnitaryMatrix& u,
    EliminationOrder order = EliminationOrder::row_major) {
  if (!u.is_unitary(kVerifyTol))
    throw std::invalid_argument("input matrix is not unitary");
  const std::size_t dim = u.dim();
  UnitaryMatrix acc = u;
  TwoLevelDecomposition out;
  auto eliminate = [&](std::size_t i, std::size_t j) {
    const cxd a = acc.at(j, j), b = acc.at(i, j);
    if (std::abs(b) < 1e-14) return;
    const double r = std::sqrt(std::norm(a) + std::norm(b));
    for (std::size_t col = 0; col < dim; ++col) {
      const cxd x = acc.at(j, col), y = acc.at(i, col);
      acc.at(j, col) = (std::conj(a) * x + std::conj(b) * y) / r;
      acc.at(i, col) = (a * y - b * x) / r;
    }
    out.factors.push_back(TwoLevelFactor{
        static_cast<unsigned>(i), static_cast<unsigned>(j),
        Mat2{a / r, -std::conj(b) / r, b / r, std::conj(a) / r}});
  };
  if (order == EliminationOrder::row_major) {
    for (std::size_t i = 1; i < dim; ++i)
      for (std::size_t j = 0; j < i; ++j) eliminate(i, j);
  } else {
    for (std::size_t j = 0; j + 1 < dim; ++j)
      for (std::size_t i = j + 1; i < dim; ++i) eliminate(i, j);
  }
  out.diagonal.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const cxd d = acc.at(k, k);
    out.diagonal[k] = d / std::abs(d);
  }
  return out;
}

// Multiplies the decomposition back together; used to validate round trips.
inline UnitaryMatrix reconstruct(const TwoLevelDecomposition& dec) {
  const std::size_t dim = dec.diagonal.size();
  UnitaryMatrix m(dim);
  for (std::size_t k = 0; k < dim; ++k) m.at(k, k) = dec.diagonal[k];
  for (std::size_t f = dec.factors.size(); f-- > 0;) {
    const TwoLevelFactor& t = dec.factors[f];
    for (std::size_t col = 0; col < dim; ++col) {
      const cxd x = m.at(t.q, col), y = m.at(t.p, col);
      m.at(t.q, col) = t.block.m00 * x + t.block.m01 * y;
      m.at(t.p, col) = t.block.m10 * x + t.block.m11 * y;
    }
  }
  return m;
}

namespace detail {

inline int bit_of(unsigned index, int wire, int n_qubits) {
  return static_cast<int>(index >> (n_qubits - 1 - wire)) & 1;
}

// Multi-controlled gate with the control pattern drawn from the bits of
// `index`: wires whose bit is 0 get NOT-conjugated so only positive
// controls appear in the output.
inline void emit_pattern_gate(std::vector<Gate>& out, int target,
                              const std::vector<int>& control_wires,
                              unsigned index, int n_qubits,
                              const Mat2& payload) {
  std::vector<int> zeros;
  for (int w : control_wires)
    if (bit_of(index, w, n_qubits) == 0) zeros.push_back(w);
  for (int w : zeros) out.push_back(make_not(w));
  out.push_back(make_gate(target, control_wires, payload));
  for (int w : zeros) out.push_back(make_not(w));
}

}  // namespace detail

// Expands one two-level factor into multi-controlled gates. The basis pair
// (q,p) is walked into Gray distance one by NOT-flip gates, the block is
// applied as a (n-1)-controlled gate on the last differing wire, and the
// walk is undone.
inline std::vector<Gate> two_level_to_toffoli(const TwoLevelFactor& f,
                                              int n_qubits) {
  if (n_qubits < 1 || f.q >= f.p || f.p >= (1u << n_qubits))
    throw std::invalid_argument("two-level factor out of range");
  if (n_qubits == 1) return {make_gate(0, {}, f.block)};

  std::vector<int> diff_wires;
  for (int w = 0; w < n_qubits; ++w)
    if (detail::bit_of(f.p ^ f.q, w, n_qubits)) diff_wires.push_back(w);

  const auto others = [&](int skip) {
    std::vector<int> ws;
    for (int w = 0; w < n_qubits; ++w)
      if (w != skip) ws.push_back(w);
    return ws;
  };

  // Flip gates carry q along the Gray path; p is untouched because it
  // differs from the cursor on a later control wire at every step.
  std::vector<Gate> walk;
  unsigned cursor = f.q;
  for (std::size_t k = 0; k + 1 < diff_wires.size(); ++k) {
    const int w = diff_wires[k];
    detail::emit_pattern_gate(walk, w, others(w), cursor, n_qubits, sigma_x());
    cursor ^= 1u << (n_qubits - 1 - w);
  }

  const int target = diff_wires.back();
  // The cursor now plays the role of q. If its target bit is 1 the block
  // acts upside down on that wire.
  Mat2 payload = f.block;
  if (detail::bit_of(cursor, target, n_qubits) == 1)
    payload = mul2(sigma_x(), mul2(payload, sigma_x()));

  std::vector<Gate> out = walk;
  detail::emit_pattern_gate(out, target, others(target), cursor, n_qubits,
                            payload);
  out.insert(out.end(), walk.rbegin(), walk.rend());
  return out;
}

// One (n-1)-controlled diagonal gate per adjacent basis pair (2i, 2i+1):
// the pair shares its upper n-1 bits, which become the control pattern, and
// the bottom wire carries diag(d[2i], d[2i+1]). Pairs are emitted
// unconditionally so the output shape depends only on the width; dropping
// do-nothing gates is the optimizer's job.
inline std::vector<Gate> diagonal_to_toffoli(const std::vector<cxd>& d,
                                             int n_qubits) {
  if (d.size() != (1u << n_qubits))
    throw std::invalid_argument("diagonal length does not match qubit count");
  if (n_qubits == 1) return {make_gate(0, {}, Mat2{d[0], 0.0, 0.0, d[1]})};
  std::vector<int> controls;
  for (int w = 0; w + 1 < n_qubits; ++w) controls.push_back(w);
  std::vector<Gate> out;
  for (unsigned i = 0; i < (1u << (n_qubits - 1)); ++i)
    detail::emit_pattern_gate(out, n_qubits - 1, controls, 2 * i, n_qubits,
                              Mat2{d[2 * i], 0.0, 0.0, d[2 * i + 1]});
  return out;
}

// Gray-code parity network: a gate with m >= 2 controls becomes 2^m - 1
// singly-controlled gates carrying W or W^dagger (W = payload^(1/2^(m-1)))
// interleaved with 2^m - 2 CNOTs. Stepping through the Gray sequence, the
// wire holding the leading bit of the current code accumulates the parity
// of the wires in the code; each parity wire then controls W when the code
// has odd population and W^dagger when even. Summing over all codes, the
// target collects W^(2^(m-1)) exactly when every control is 1 and the
// powers cancel otherwise. The final code is the bare leading bit, so every
// control wire ends restored.
inline std::vector<Gate> reduce_multicontrol(const Gate& g) {
  const int m = static_cast<int>(g.controls.size());
  if (m <= 1) return {g};
  Mat2 w = g.payload;
  for (int i = 0; i + 1 < m; ++i) w = matrix_sqrt2(w);
  const Mat2 wdag = dagger2(w);

  std::vector<Gate> out;
  unsigned prev = 0;
  for (unsigned k = 1; k < (1u << m); ++k) {
    const unsigned cur = k ^ (k >> 1);
    const int lead = std::bit_width(cur) - 1;
    if (k > 1) {
      const int lead_prev = std::bit_width(prev) - 1;
      if (lead > lead_prev) {
        out.push_back(make_cnot(g.controls[lead_prev], g.controls[lead]));
      } else {
        const int changed = std::countr_zero(prev ^ cur);
        out.push_back(make_cnot(g.controls[changed], g.controls[lead]));
      }
    }
    out.push_back(make_gate(g.target, {g.controls[lead]},
                            (std::popcount(cur) & 1) ? w : wdag));
    prev = cur;
  }
  return out;
}

// ABC conjugation for a singly-controlled gate. With the payload written as
// e^{i delta} Rz(phi) Ry(theta) Rz(lambda), the pieces
//   A = Rz(phi) Ry(theta/2)
//   B = Ry(-theta/2) Rz(-(phi+lambda)/2)
//   C = Rz((lambda-phi)/2)
// satisfy A.B.C = I and A.X.B.X.C = payload / e^{i delta}, giving
//   [C on t, CNOT, B on t, CNOT, A on t, diag(1, e^{i delta}) on c].
// Identity pieces are dropped; the CNOT pair always stays so the output
// shape is uniform across payloads. A payload that is itself a NOT is kept
// as a CNOT.
inline std::vector<Gate> basic_from_controlled(const Gate& g) {
  if (g.controls.empty() || is_cnot(g)) return {g};
  if (g.controls.size() != 1)
    throw std::invalid_argument("gate has more than one control");
  const ZyzAngles z = zyz_decompose(g.payload);
  const Mat2 a = mul2(rz(z.phi), ry(0.5 * z.theta));
  const Mat2 b = mul2(ry(-0.5 * z.theta), rz(-0.5 * (z.phi + z.lambda)));
  const Mat2 c = rz(0.5 * (z.lambda - z.phi));
  const Mat2 p{1.0, 0.0, 0.0, std::polar(1.0, z.delta)};
  const int t = g.target, ctrl = g.controls[0];

  std::vector<Gate> out;
  if (!is_identity2(c, kRuleTol)) out.push_back(make_gate(t, {}, c));
  out.push_back(make_cnot(ctrl, t));
  if (!is_identity2(b, kRuleTol)) out.push_back(make_gate(t, {}, b));
  out.push_back(make_cnot(ctrl, t));
  if (!is_identity2(a, kRuleTol)) out.push_back(make_gate(t, {}, a));
  if (!is_identity2(p, kRuleTol)) out.push_back(make_gate(ctrl, {}, p));
  return out;
}

inline Circuit to_controlled_gates(const Circuit& c) {
  Circuit out{c.n_qubits, {}};
  for (const Gate& g : c.gates)
    for (Gate& r : reduce_multicontrol(g)) out.gates.push_back(std::move(r));
  return out;
}

inline Circuit to_basic_gates(const Circuit& c) {
  Circuit out{c.n_qubits, {}};
  for (const Gate& g : c.gates)
    for (const Gate& r : reduce_multicontrol(g))
      for (Gate& b : basic_from_controlled(r)) out.gates.push_back(std::move(b));
  return out;
}

// Full pipeline entry point.
inline Circuit barenco_decompose(
    const UnitaryMatrix& u, Stage stop_at,
    EliminationOrder order = EliminationOrder::row_major) {
  int n = 0;
  while ((1u << n) < u.dim()) ++n;
  if ((1u << n) != u.dim() || n < 1)
    throw std::invalid_argument("matrix dimension is not a power of two");
  if (!u.is_unitary(kVerifyTol))
    throw std::invalid_argument("input matrix is not unitary");
  if (n == 1) {
    return Circuit{
        1, {make_gate(0, {}, Mat2{u.at(0, 0), u.at(0, 1), u.at(1, 0),
                                  u.at(1, 1)})}};
  }

  const TwoLevelDecomposition dec = qr_two_level(u, order);
  // u = T_1 ... T_M D, so D acts first in circuit order, then the factors
  // from last to first.
  Circuit c{n, diagonal_to_toffoli(dec.diagonal, n)};
  for (std::size_t f = dec.factors.size(); f-- > 0;) {
    for (Gate& g : two_level_to_toffoli(dec.factors[f], n))
      c.gates.push_back(std::move(g));
  }
  if (stop_at == Stage::two_level || stop_at == Stage::toffoli) return c;
  if (stop_at == Stage::controlled) return to_controlled_gates(c);
  return to_basic_gates(c);
}

}  // namespace gtopt
