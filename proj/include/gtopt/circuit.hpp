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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtopt/matrix.hpp"

namespace gtopt {

// A gate applies its 2x2 payload to the target wire on every basis state
// whose control wires are all |1>. No controls means a plain one-qubit gate;
// control patterns with |0> legs are expressed by surrounding NOT gates.
//
// Wire convention: qubit 0 is the most significant bit of a basis index, so
// basis index b assigns qubit q the bit (b >> (n-1-q)) & 1, and the leftmost
// gate of a circuit acts first.
struct Gate {
  int target = 0;
  std::vector<int> controls;  // strictly ascending, never contains target
  Mat2 payload;
};

inline Gate make_gate(int target, std::vector<int> controls,
                      const Mat2& payload) {
  std::sort(controls.begin(), controls.end());
  for (std::size_t i = 0; i + 1 < controls.size(); ++i)
    if (controls[i] == controls[i + 1])
      throw std::invalid_argument("duplicate control wire");
  if (std::binary_search(controls.begin(), controls.end(), target))
    throw std::invalid_argument("gate target listed as control");
  if (target < 0 || (!controls.empty() && controls.front() < 0))
    throw std::invalid_argument("negative wire index");
  if (!is_unitary2(payload))
    throw std::invalid_argument("gate payload is not unitary");
  return Gate{target, std::move(controls), payload};
}

inline Gate make_not(int target) { return make_gate(target, {}, sigma_x()); }

inline Gate make_cnot(int control, int target) {
  return make_gate(target, {control}, sigma_x());
}

inline bool has_control(const Gate& g, int wire) {
  return std::binary_search(g.controls.begin(), g.controls.end(), wire);
}

inline bool is_cnot(const Gate& g, double tol = kUnitaryTol) {
  return g.controls.size() == 1 && approx_equal2(g.payload, sigma_x(), tol);
}

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
};

inline void append_gate(Circuit& c, Gate g) {
  if (g.target >= c.n_qubits ||
      (!g.controls.empty() && g.controls.back() >= c.n_qubits))
    throw std::invalid_argument("gate wire outside circuit width");
  c.gates.push_back(std::move(g));
}

/** Applies one gate to a 2^n amplitude vector in place. */
inline void apply_gate(std::vector<cxd>& state, const Gate& g, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (state.size() != dim)
    throw std::invalid_argument("state size does not match qubit count");
  std::size_t cmask = 0;
  for (int c : g.controls) cmask |= std::size_t{1} << (n_qubits - 1 - c);
  const std::size_t tbit = std::size_t{1} << (n_qubits - 1 - g.target);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & tbit) continue;                // visit each target pair once
    if ((i & cmask) != cmask) continue;    // controls all |1>
    const cxd a0 = state[i], a1 = state[i | tbit];
    state[i] = g.payload.m00 * a0 + g.payload.m01 * a1;
    state[i | tbit] = g.payload.m10 * a0 + g.payload.m11 * a1;
  }
}

// Brute-force simulation is the project's ground truth; it is deliberately
// simple and capped at 12 qubits (a 4096 x 4096 matrix) to stay honest about
// what it can check.
inline constexpr int kMaxOracleQubits = 12;

inline UnitaryMatrix circuit_to_unitary(const Circuit& c) {
  if (c.n_qubits < 1 || c.n_qubits > kMaxOracleQubits)
    throw std::invalid_argument("circuit width outside oracle range");
  const std::size_t dim = std::size_t{1} << c.n_qubits;
  UnitaryMatrix u(dim);
  std::vector<cxd> col(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::fill(col.begin(), col.end(), cxd(0.0));
    col[j] = 1.0;
    for (const Gate& g : c.gates) apply_gate(col, g, c.n_qubits);
    for (std::size_t i = 0; i < dim; ++i) u.at(i, j) = col[i];
  }
  return u;
}

struct GateCounts {
  std::size_t total = 0;
  std::size_t cnot = 0;       // exactly one control, payload sigma_x
  std::size_t one_qubit = 0;  // no controls
  std::vector<std::size_t> by_control_count;  // histogram, index = #controls
};

inline GateCounts count_gates(const Circuit& c) {
  GateCounts counts;
  counts.total = c.gates.size();
  for (const Gate& g : c.gates) {
    const std::size_t nc = g.controls.size();
    if (counts.by_control_count.size() <= nc)
      counts.by_control_count.resize(nc + 1, 0);
    ++counts.by_control_count[nc];
    if (nc == 0) ++counts.one_qubit;
    if (is_cnot(g)) ++counts.cnot;
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Pair classification.
//
// For an ordered pair of gates (b1, b2) each wire plays exactly one role:
//   t1  target of b1
//   t2  target of b2 (absent when the targets coincide)
//   t3  control of both gates
//   t4  control of b1 only (not a control of b2, not b2's target)
//   t5  control of b2 only (not a control of b1, not b1's target)
//   t0  touched by neither gate
// The case label records how the targets relate to the opposite control
// sets, which is what the rewrite rules key on:
//   M1  same target wire
//   M2  distinct targets, neither target controls the other gate
//   M3  b2's target is a control of b1 (only)
//   M4  b1's target is a control of b2 (only)
//   M5  each target is a control of the other gate
// ---------------------------------------------------------------------------

enum class PairCase { M1, M2, M3, M4, M5 };

enum class WireRole { t0, t1, t2, t3, t4, t5 };

struct PairContext {
  PairCase label = PairCase::M1;
  int n_qubits = 0;
  int t1 = -1;
  int t2 = -1;  // -1 when targets coincide
  std::vector<int> t3, t4, t5;  // each strictly ascending

  WireRole role_of(int wire) const {
    if (wire == t1) return WireRole::t1;
    if (wire == t2) return WireRole::t2;
    if (std::binary_search(t3.begin(), t3.end(), wire)) return WireRole::t3;
    if (std::binary_search(t4.begin(), t4.end(), wire)) return WireRole::t4;
    if (std::binary_search(t5.begin(), t5.end(), wire)) return WireRole::t5;
    return WireRole::t0;
  }
};

inline PairContext classify_pair(const Gate& b1, const Gate& b2,
                                 int n_qubits) {
  PairContext ctx;
  ctx.n_qubits = n_qubits;
  ctx.t1 = b1.target;
  ctx.t2 = (b2.target == b1.target) ? -1 : b2.target;
  std::set_intersection(b1.controls.begin(), b1.controls.end(),
                        b2.controls.begin(), b2.controls.end(),
                        std::back_inserter(ctx.t3));
  for (int c : b1.controls)
    if (!has_control(b2, c) && c != b2.target) ctx.t4.push_back(c);
  for (int c : b2.controls)
    if (!has_control(b1, c) && c != b1.target) ctx.t5.push_back(c);

  if (b2.target == b1.target) {
    ctx.label = PairCase::M1;
  } else {
    const bool t2_controls_b1 = has_control(b1, b2.target);
    const bool t1_controls_b2 = has_control(b2, b1.target);
    if (t2_controls_b1 && t1_controls_b2)
      ctx.label = PairCase::M5;
    else if (t2_controls_b1)
      ctx.label = PairCase::M3;
    else if (t1_controls_b2)
      ctx.label = PairCase::M4;
    else
      ctx.label = PairCase::M2;
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Local oracles. Rewrites touch a handful of wires; comparing the candidate
// replacement against the original on just those wires keeps verification
// cheap enough to run inside the rewrite rules themselves.
// ---------------------------------------------------------------------------

inline std::vector<int> touched_wires(const std::vector<Gate>& gates) {
  std::vector<int> w;
  for (const Gate& g : gates) {
    w.push_back(g.target);
    w.insert(w.end(), g.controls.begin(), g.controls.end());
  }
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

/** Rebuilds the gate list on compacted wire indices 0..wires.size()-1.
 * Every gate must live entirely on the given (sorted) wire set. */
inline Circuit restrict_to_wires(const std::vector<Gate>& gates,
                                 const std::vector<int>& wires) {
  Circuit c;
  c.n_qubits = static_cast<int>(wires.size());
  auto remap = [&wires](int w) {
    const auto it = std::lower_bound(wires.begin(), wires.end(), w);
    if (it == wires.end() || *it != w)
      throw std::invalid_argument("gate wire outside restriction set");
    return static_cast<int>(it - wires.begin());
  };
  for (const Gate& g : gates) {
    std::vector<int> ctrls;
    ctrls.reserve(g.controls.size());
    for (int cw : g.controls) ctrls.push_back(remap(cw));
    append_gate(c, make_gate(remap(g.target), std::move(ctrls), g.payload));
  }
  return c;
}

/** Exact-equality check of two gate lists on the union of their wires. */
inline bool locally_equivalent(const std::vector<Gate>& before,
                               const std::vector<Gate>& after,
                               double tol = kRuleTol) {
  std::vector<Gate> all = before;
  all.insert(all.end(), after.begin(), after.end());
  std::vector<int> wires = touched_wires(all);
  if (wires.empty()) return true;
  const UnitaryMatrix ub = circuit_to_unitary(restrict_to_wires(before, wires));
  const UnitaryMatrix ua = circuit_to_unitary(restrict_to_wires(after, wires));
  return max_abs_diff(ub, ua) <= tol;
}

// ---------------------------------------------------------------------------
// Seeded circuit generators (used by the CLI and the test suites).
// ---------------------------------------------------------------------------

/** Random circuit with exactly cnot_budget CNOTs at random wire pairs,
 * interleaved with Haar-random one-qubit gates on every wire. Useful for
 * producing unitaries with a known CNOT-count upper bound. */
inline Circuit random_budget_circuit(int n_qubits, int cnot_budget,
                                     std::uint64_t seed) {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  if (cnot_budget > 0 && n_qubits < 2)
    throw std::invalid_argument("CNOTs need at least two qubits");
  GaussianSource gauss(seed);
  std::mt19937_64& eng = gauss.engine();
  Circuit c;
  c.n_qubits = n_qubits;
  for (int layer = 0; layer <= cnot_budget; ++layer) {
    for (int q = 0; q < n_qubits; ++q)
      append_gate(c, make_gate(q, {}, random_mat2(gauss)));
    if (layer < cnot_budget) {
      const int ctrl = static_cast<int>(eng() % n_qubits);
      int tgt = static_cast<int>(eng() % (n_qubits - 1));
      if (tgt >= ctrl) ++tgt;
      append_gate(c, make_cnot(ctrl, tgt));
    }
  }
  return c;
}

}  // namespace gtopt
