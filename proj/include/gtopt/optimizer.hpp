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
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gtopt/circuit.hpp"
#include "gtopt/rewrite.hpp"
#include "gtopt/synthesis.hpp"

namespace gtopt {

// Peephole optimizer built on the adjacent-pair rewrite rules. Each sweep
// walks the gate list left to right and tries to drag the gate at every
// slot first leftwards, then rightwards, looking for a partner it can fuse
// with. A drag step applies the first rule that fits, in fixed priority
// order: merge, commute, exchange with payload modification, helper
// rewrite. Helpers grow the circuit by one gate and are rationed per drag
// and per sweep; by default they are left standing even when the dragged
// gate fails to merge, because their payoff often arrives through another
// gate's drag in a later sweep. The best circuit seen (by lowering cost,
// then gate count) is tracked across sweeps and returned, so speculative
// growth can never worsen the final result. Sweeps repeat until the best
// metric stops improving for `patience` consecutive sweeps.

struct OptimizerConfig {
  int max_sweeps = 0;  // 0: no cap, run until sweeps go stale
  // Helper applications allowed while dragging one slot's gate, shared
  // between its leftward and rightward drags. A per-sweep cap of
  // max(8, gates/8) applies on top.
  int helper_budget_per_drag = 1;
  // Extra non-improving sweeps to run before giving up. Helpers pay off
  // through other gates' later drags, so an immediately-unprofitable sweep
  // can still set up the next one.
  int patience = 2;
  // Undo a helper when the drag that applied it ends without a merge. This
  // keeps every single drag count-neutral but forfeits rewrites whose
  // payoff arrives through another gate; the default lets helpers stand and
  // relies on best-circuit tracking to discard unprofitable detours.
  bool transactional_helpers = false;
  bool checked = false;  // verify every rewrite, not a 1-in-64 sample
  // Reject rewrites whose output gates fall outside the tightest gate
  // family the input circuit fits in (CNOT + one-qubit gates, singly
  // controlled gates, or anything). Without this a merge of a CNOT with a
  // neighbouring phase gate produces a controlled-U, which deflates the
  // CNOT count while hiding entangling work inside a gate the basic set
  // cannot express.
  bool preserve_gate_set = true;
  double tol = kRuleTol;
};

struct OptimizerReport {
  std::size_t gates_before = 0;
  std::size_t gates_after = 0;
  std::size_t cnots_before = 0;
  std::size_t cnots_after = 0;
  int sweeps = 0;
  std::size_t merges = 0;
  std::size_t commutes = 0;
  std::size_t exchanges = 0;
  std::size_t helpers = 0;
  std::size_t helper_rollbacks = 0;
  std::size_t identity_drops = 0;
  std::size_t checks_run = 0;

  // Folds a later optimization pass into this one. The before counts keep
  // describing the first pass and the after counts the last, so they only
  // compare like with like when both passes ran at the same gate level.
  void absorb(const OptimizerReport& later) {
    gates_after = later.gates_after;
    cnots_after = later.cnots_after;
    sweeps += later.sweeps;
    merges += later.merges;
    commutes += later.commutes;
    exchanges += later.exchanges;
    helpers += later.helpers;
    helper_rollbacks += later.helper_rollbacks;
    identity_drops += later.identity_drops;
    checks_run += later.checks_run;
  }
};

namespace detail {

inline std::size_t count_cnots(const std::vector<Gate>& gates) {
  std::size_t n = 0;
  for (const Gate& g : gates)
    if (is_cnot(g)) ++n;
  return n;
}

// CNOTs the gate will cost once lowered all the way to the basic set: free
// for one-qubit gates, one for a CNOT, two for any other singly-controlled
// gate (its two-CNOT expansion), and the parity-network total for wider
// gates. On a basic-set circuit this is exactly the CNOT count, so one
// objective serves every gate level.
inline std::size_t lowering_cost(const Gate& g, double tol) {
  const std::size_t m = g.controls.size();
  if (m == 0) return 0;
  if (m == 1) return is_cnot(g, tol) ? 1 : 2;
  return 3u * (std::size_t{1} << m) - 4u;
}

inline std::size_t lowering_cost(const std::vector<Gate>& gates, double tol) {
  std::size_t total = 0;
  for (const Gate& g : gates) total += lowering_cost(g, tol);
  return total;
}

inline bool in_basic_set(const Gate& g, double tol) {
  return g.controls.empty() || is_cnot(g, tol);
}

// The tightest of the three gate families the whole list fits in: the basic
// set (CNOT plus one-qubit gates), singly-controlled gates, or anything.
enum class GateSet { basic, controlled, free };

inline GateSet detect_gate_set(const std::vector<Gate>& gates, double tol) {
  GateSet set = GateSet::basic;
  for (const Gate& g : gates) {
    if (g.controls.size() > 1) return GateSet::free;
    if (!in_basic_set(g, tol)) set = GateSet::controlled;
  }
  return set;
}

struct OptState {
  const OptimizerConfig& cfg;
  OptimizerReport& rep;
  GateSet level = GateSet::free;  // rewrites must keep gates inside this set
  std::size_t probe = 0;
  // Helpers grow the circuit by one gate each, so they are rationed twice
  // over: per dragged slot (both directions together) and per sweep. The
  // sweep allowance scales with the circuit so exploration stays a bounded
  // fraction of its size.
  int slot_helpers = 0;
  long sweep_helpers = 0;
  long sweep_helper_cap = 0;

  bool helper_allowed() const {
    return slot_helpers < cfg.helper_budget_per_drag &&
           sweep_helpers < sweep_helper_cap;
  }

  void note_helper() {
    ++slot_helpers;
    ++sweep_helpers;
    ++rep.helpers;
  }

  bool admits(const Gate& g) const {
    switch (level) {
      case GateSet::basic:
        return in_basic_set(g, cfg.tol);
      case GateSet::controlled:
        return g.controls.size() <= 1;
      default:
        return true;
    }
  }

  bool admits(const std::vector<Gate>& gs) const {
    if (level == GateSet::free) return true;
    for (const Gate& g : gs)
      if (!admits(g)) return false;
    return true;
  }

  double verify_tol() const {
    // Rules decide at cfg.tol, so a rewrite of a pair sitting exactly at
    // the decision boundary can be off by a small multiple of it.
    return 32.0 * cfg.tol;
  }

  bool should_check() { return cfg.checked || probe++ % 64 == 0; }

  void check_swap(const Gate& b1, const Gate& b2) {
    if (!should_check()) return;
    ++rep.checks_run;
    if (!locally_equivalent({b1, b2}, {b2, b1}, verify_tol()))
      throw std::runtime_error("optimizer: commute failed verification");
  }

  void check_pair(const Gate& b1, const Gate& b2, const Gate& r1,
                  const Gate& r2) {
    if (!should_check()) return;
    ++rep.checks_run;
    if (!locally_equivalent({b1, b2}, {r1, r2}, verify_tol()))
      throw std::runtime_error("optimizer: exchange failed verification");
  }
};

inline void splice_pair(std::vector<Gate>& g, std::size_t start,
                        const std::vector<Gate>& replacement) {
  g.erase(g.begin() + static_cast<std::ptrdiff_t>(start),
          g.begin() + static_cast<std::ptrdiff_t>(start + 2));
  g.insert(g.begin() + static_cast<std::ptrdiff_t>(start),
           replacement.begin(), replacement.end());
}

inline void strip_identities(std::vector<Gate>& g, double tol,
                             std::size_t& dropped) {
  const std::size_t before = g.size();
  std::erase_if(g,
                [&](const Gate& x) { return is_identity2(x.payload, tol); });
  dropped += before - g.size();
}

struct DragResult {
  bool merged = false;
  std::size_t pos = 0;  // merge slot, or where the dragged gate ended up
};

inline DragResult drag_left(std::vector<Gate>& g, std::size_t i,
                            OptState& st) {
  std::size_t pos = i;
  std::optional<std::vector<Gate>> snapshot;
  std::size_t snapshot_pos = 0;
  while (pos > 0) {
    if (auto fused = merge_pair(g[pos - 1], g[pos], st.cfg.tol);
        fused && st.admits(*fused)) {
      ++st.rep.merges;
      splice_pair(g, pos - 1, *fused);
      return {true, pos - 1};
    }
    if (commutes(g[pos - 1], g[pos], st.cfg.tol)) {
      st.check_swap(g[pos - 1], g[pos]);
      std::swap(g[pos - 1], g[pos]);
      ++st.rep.commutes;
      --pos;
      continue;
    }
    if (auto moved = exchange_left(g[pos - 1], g[pos], st.cfg.tol);
        moved && st.admits(*moved)) {
      st.check_pair(g[pos - 1], g[pos], *moved, g[pos - 1]);
      g[pos] = std::move(g[pos - 1]);
      g[pos - 1] = std::move(*moved);
      ++st.rep.exchanges;
      --pos;
      continue;
    }
    if (st.helper_allowed() &&
        controls_subset(g[pos].controls, g[pos - 1].controls, -1)) {
      if (auto expanded =
              helper_exchange_left(g[pos - 1], g[pos], st.cfg.tol);
          expanded && st.admits(*expanded)) {
        if (st.cfg.transactional_helpers && !snapshot) {
          snapshot = g;
          snapshot_pos = pos;
        }
        splice_pair(g, pos - 1, *expanded);
        st.note_helper();
        --pos;
        continue;
      }
    }
    break;
  }
  if (snapshot) {
    g = std::move(*snapshot);
    ++st.rep.helper_rollbacks;
    return {false, snapshot_pos};
  }
  return {false, pos};
}

inline DragResult drag_right(std::vector<Gate>& g, std::size_t i,
                             OptState& st) {
  std::size_t pos = i;
  std::optional<std::vector<Gate>> snapshot;
  std::size_t snapshot_pos = 0;
  while (pos + 1 < g.size()) {
    if (auto fused = merge_pair(g[pos], g[pos + 1], st.cfg.tol);
        fused && st.admits(*fused)) {
      ++st.rep.merges;
      splice_pair(g, pos, *fused);
      return {true, pos};
    }
    if (commutes(g[pos], g[pos + 1], st.cfg.tol)) {
      st.check_swap(g[pos], g[pos + 1]);
      std::swap(g[pos], g[pos + 1]);
      ++st.rep.commutes;
      ++pos;
      continue;
    }
    if (auto moved = exchange_right(g[pos], g[pos + 1], st.cfg.tol);
        moved && st.admits(*moved)) {
      st.check_pair(g[pos], g[pos + 1], g[pos + 1], *moved);
      g[pos] = std::move(g[pos + 1]);
      g[pos + 1] = std::move(*moved);
      ++st.rep.exchanges;
      ++pos;
      continue;
    }
    // The helper only fires when the dragged gate has no private controls;
    // the Hermitian-payload variant is valid but tends to manufacture
    // large control sets, so the default policy leaves it alone.
    if (st.helper_allowed() &&
        controls_subset(g[pos].controls, g[pos + 1].controls, -1)) {
      if (auto expanded = helper_exchange(g[pos], g[pos + 1], st.cfg.tol);
          expanded && st.admits(*expanded)) {
        if (st.cfg.transactional_helpers && !snapshot) {
          snapshot = g;
          snapshot_pos = pos;
        }
        splice_pair(g, pos, *expanded);
        st.note_helper();
        pos += 2;
        continue;
      }
    }
    break;
  }
  if (snapshot) {
    // The drag ended without a merge, so the helper only made the circuit
    // longer. Undo everything since the first helper fired.
    g = std::move(*snapshot);
    ++st.rep.helper_rollbacks;
    return {false, snapshot_pos};
  }
  return {false, pos};
}

}  // namespace detail

inline Circuit optimize(const Circuit& c, const OptimizerConfig& cfg = {},
                        OptimizerReport* report = nullptr) {
  OptimizerReport rep;
  std::vector<Gate> gates = c.gates;
  rep.gates_before = gates.size();
  rep.cnots_before = detail::count_cnots(gates);
  detail::OptState st{cfg, rep};
  if (cfg.preserve_gate_set)
    st.level = detail::detect_gate_set(gates, cfg.tol);

  // Sweeps are compared on (projected CNOT cost, total gates); the best
  // list seen is what gets returned, so an exploratory sweep that leaves
  // the circuit longer (helpers not yet paid off) can never worsen the
  // result.
  const auto metric = [&cfg](const std::vector<Gate>& g) {
    return std::make_pair(detail::lowering_cost(g, cfg.tol), g.size());
  };
  detail::strip_identities(gates, cfg.tol, rep.identity_drops);
  std::vector<Gate> best = gates;
  auto best_metric = metric(best);
  int stale_sweeps = 0;
  for (;;) {
    if (cfg.max_sweeps > 0 && rep.sweeps >= cfg.max_sweeps) break;
    ++rep.sweeps;
    st.sweep_helpers = 0;
    st.sweep_helper_cap = std::max<long>(
        8, static_cast<long>(gates.size()) / 8);
    for (std::size_t i = 0; i < gates.size();) {
      st.slot_helpers = 0;
      const detail::DragResult left = detail::drag_left(gates, i, st);
      if (left.merged) {
        i = left.pos;  // rescan from the fused gate
        continue;
      }
      const detail::DragResult right = detail::drag_right(gates, left.pos, st);
      if (right.merged) {
        i = right.pos;
        continue;
      }
      ++i;
    }
    detail::strip_identities(gates, cfg.tol, rep.identity_drops);
    const auto current = metric(gates);
    if (current < best_metric) {
      best = gates;
      best_metric = current;
      stale_sweeps = 0;
    } else if (++stale_sweeps > cfg.patience) {
      break;
    }
  }
  rep.gates_after = best.size();
  rep.cnots_after = detail::count_cnots(best);
  if (report) *report = rep;
  return Circuit{c.n_qubits, std::move(best)};
}

// Decomposition with optimization hooks. The circuit is built at the
// generalized-Toffoli level and optimized there, where whole heavy gates
// can cancel; each later stage is optimized again right after lowering, so
// cancellations that only become visible at the finer granularity are still
// found. two_level and toffoli share a gate list, so both return the
// toffoli-level optimization result.
//
// Synthesis uses column-major elimination by default: clearing whole
// columns keeps rotations that touch the same basis rows adjacent in the
// gate list, which leaves markedly more material within the optimizer's
// reach than the row-major order does.
inline Circuit decompose_optimized(
    const UnitaryMatrix& u, Stage stop_at, const OptimizerConfig& cfg = {},
    OptimizerReport* report = nullptr,
    EliminationOrder order = EliminationOrder::column_major) {
  Circuit c = barenco_decompose(u, Stage::toffoli, order);
  OptimizerReport total;
  c = optimize(c, cfg, &total);
  if (stop_at == Stage::controlled || stop_at == Stage::basic) {
    c = to_controlled_gates(c);
    OptimizerReport mid;
    c = optimize(c, cfg, &mid);
    total.absorb(mid);
  }
  if (stop_at == Stage::basic) {
    c = to_basic_gates(c);
    OptimizerReport second;
    c = optimize(c, cfg, &second);
    total.absorb(second);
  }
  if (report) *report = total;
  return c;
}

}  // namespace gtopt
