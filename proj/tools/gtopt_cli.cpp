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

// Command line front end.
//
// Exit codes: 0 success, 1 operational failure (unreadable or malformed
// input, failed verification), 2 usage errors.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gtopt/io.hpp"
#include "gtopt/optimizer.hpp"

namespace {

using namespace gtopt;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;

UnitaryMatrix load_unitary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_unitary(in);
}

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".qasm") == 0)
    return read_qasm(in);
  return read_circuit(in);
}

template <typename WriteFn>
void save(const std::string& path, WriteFn&& write) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  write(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void print_report(const OptimizerReport& rep) {
  std::cerr << "gates " << rep.gates_before << " -> " << rep.gates_after
            << ", CNOTs " << rep.cnots_before << " -> " << rep.cnots_after
            << " (sweeps " << rep.sweeps << ", merges " << rep.merges
            << ", commutes " << rep.commutes << ", exchanges "
            << rep.exchanges << ", helpers " << rep.helpers << ")\n";
}

const std::map<std::string, Stage> kStageNames{
    {"two-level", Stage::two_level},
    {"toffoli", Stage::toffoli},
    {"controlled", Stage::controlled},
    {"basic", Stage::basic}};

int run_decompose(const std::string& in, const std::string& out, Stage stage,
                  bool opt, bool stats) {
  const UnitaryMatrix u = load_unitary(in);
  OptimizerReport rep;
  const Circuit c = opt ? decompose_optimized(u, stage, {}, &rep)
                        : barenco_decompose(u, stage);
  if (opt && stats) {
    // The report's own before side describes the first (toffoli-level)
    // pass; for a user the unoptimized decomposition at the same stage is
    // the meaningful baseline.
    const GateCounts plain = count_gates(barenco_decompose(u, stage));
    rep.gates_before = plain.total;
    rep.cnots_before = plain.cnot;
    print_report(rep);
  }
  save(out, [&](std::ostream& os) { write_circuit(os, c); });
  const GateCounts counts = count_gates(c);
  std::cout << "qubits " << c.n_qubits << " gates " << counts.total
            << " cnots " << counts.cnot << "\n";
  return kExitOk;
}

int run_optimize(const std::string& in, const std::string& out, bool checked,
                 bool stats) {
  const Circuit c = load_circuit(in);
  OptimizerConfig cfg;
  cfg.checked = checked;
  OptimizerReport rep;
  const Circuit o = optimize(c, cfg, &rep);
  if (stats) print_report(rep);
  save(out, [&](std::ostream& os) { write_circuit(os, o); });
  const GateCounts counts = count_gates(o);
  std::cout << "qubits " << o.n_qubits << " gates " << counts.total
            << " cnots " << counts.cnot << "\n";
  return kExitOk;
}

int run_verify(const std::string& circuit_path, const std::string& unitary,
               double tol) {
  const Circuit c = load_circuit(circuit_path);
  const UnitaryMatrix u = load_unitary(unitary);
  if (u.dim() != (std::size_t{1} << c.n_qubits)) {
    std::cout << "MISMATCH dimension: circuit has " << c.n_qubits
              << " qubits, matrix is " << u.dim() << "x" << u.dim() << "\n";
    return kExitFailure;
  }
  if (!equal_up_to_global_phase(u, circuit_to_unitary(c), tol)) {
    std::cout << "MISMATCH within " << tol << "\n";
    return kExitFailure;
  }
  std::cout << "OK\n";
  return kExitOk;
}

int run_random_unitary(int n, std::uint64_t seed, int cnot_budget,
                       const std::string& out) {
  UnitaryMatrix u(0);
  if (cnot_budget >= 0)
    u = circuit_to_unitary(random_budget_circuit(n, cnot_budget, seed));
  else
    u = random_unitary(std::size_t{1} << n, seed);
  save(out, [&](std::ostream& os) { write_unitary(os, u); });
  std::cout << "n " << n << " dim " << u.dim() << "\n";
  return kExitOk;
}

int run_export_qasm(const std::string& in, const std::string& out) {
  const Circuit c = load_circuit(in);
  save(out, [&](std::ostream& os) { write_qasm(os, c); });
  std::cout << "qubits " << c.n_qubits << " gates " << c.gates.size() << "\n";
  return kExitOk;
}

// Deterministic count table on stdout; wall-clock timing goes to stderr so
// the stdout text can be diffed across runs and machines.
int run_bench(int max_n, int trials, std::uint64_t seed, bool include_5q) {
  int failures = 0;
  const int top = include_5q && max_n < 5 ? 5 : max_n;
  for (int n = 2; n <= top; ++n) {
    if (n == 5 && !include_5q) break;
    std::size_t plain0 = 0, opt0 = 0;
    bool stable = true;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < trials; ++trial) {
      const UnitaryMatrix u = random_unitary(
          std::size_t{1} << n, seed + 1000u * static_cast<unsigned>(n) +
                                   static_cast<unsigned>(trial));
      const Circuit plain = barenco_decompose(u, Stage::basic);
      const Circuit opt = decompose_optimized(u, Stage::basic);
      const std::size_t pc = count_gates(plain).cnot;
      const std::size_t oc = count_gates(opt).cnot;
      if (n <= 4 &&
          !equal_up_to_global_phase(u, circuit_to_unitary(opt), 1e-8)) {
        std::cout << "n=" << n << " trial=" << trial << " INEQUIVALENT\n";
        ++failures;
      }
      if (trial == 0) {
        plain0 = pc;
        opt0 = oc;
      } else if (pc != plain0 || oc != opt0) {
        stable = false;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::cout << "n=" << n << " trials=" << trials << " cnots=" << plain0
              << " optimized=" << opt0 << (stable ? "" : " UNSTABLE") << "\n";
    std::cerr << "n=" << n << ": "
              << std::chrono::duration<double>(t1 - t0).count() << " s\n";
    if (!stable) ++failures;
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitary-to-circuit synthesis and peephole optimization"};
  app.require_subcommand(1);

  std::string in, out, circuit_path, unitary_path;
  std::string stage_name = "basic";
  bool opt_flag = false, stats = false, checked = false, include_5q = false;
  double tol = 1e-8;
  int n = 2, cnot_budget = -1, max_n = 3, trials = 3;
  std::uint64_t seed = 1;

  CLI::App* dec = app.add_subcommand(
      "decompose", "Decompose a unitary from a .mat file into a circuit");
  dec->add_option("--in", in, "input unitary (.mat)")->required();
  dec->add_option("--out", out, "output circuit (.qc)")->required();
  dec->add_option("--stage", stage_name, "two-level|toffoli|controlled|basic")
      ->check(CLI::IsMember({"two-level", "toffoli", "controlled", "basic"}));
  dec->add_flag("--optimize", opt_flag, "run the peephole optimizer");
  dec->add_flag("--stats", stats, "print optimizer statistics to stderr");

  CLI::App* o = app.add_subcommand("optimize", "Optimize a circuit file");
  o->add_option("--in", in, "input circuit (.qc or .qasm)")->required();
  o->add_option("--out", out, "output circuit (.qc)")->required();
  o->add_flag("--checked", checked, "verify every rewrite as it is applied");
  o->add_flag("--stats", stats, "print optimizer statistics to stderr");

  CLI::App* v = app.add_subcommand(
      "verify", "Check a circuit against a unitary up to global phase");
  v->add_option("--circuit", circuit_path, "circuit file (.qc or .qasm)")
      ->required();
  v->add_option("--unitary", unitary_path, "unitary file (.mat)")->required();
  v->add_option("--tol", tol, "comparison tolerance");

  CLI::App* r = app.add_subcommand(
      "random-unitary", "Write a seeded random unitary to a .mat file");
  r->add_option("--n", n, "number of qubits")->required()
      ->check(CLI::Range(1, 12));
  r->add_option("--seed", seed, "RNG seed");
  r->add_option("--cnot-budget", cnot_budget,
                "draw from a random circuit with this many CNOTs instead of "
                "the rotation-invariant distribution");
  r->add_option("--out", out, "output unitary (.mat)")->required();

  CLI::App* b = app.add_subcommand(
      "bench", "CNOT count table for seeded random unitaries");
  b->add_option("--max-n", max_n, "largest qubit count")
      ->check(CLI::Range(2, 4));
  b->add_option("--trials", trials, "unitaries per size")
      ->check(CLI::Range(1, 1000));
  b->add_option("--seed", seed, "base RNG seed");
  b->add_flag("--include-5q", include_5q,
              "also run the 5-qubit row (slow, count checking only)");

  CLI::App* q = app.add_subcommand(
      "export-qasm", "Convert a basic-set circuit to OpenQASM 2.0");
  q->add_option("--in", in, "input circuit (.qc)")->required();
  q->add_option("--out", out, "output (.qasm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*dec)
      return run_decompose(in, out, kStageNames.at(stage_name), opt_flag,
                           stats);
    if (*o) return run_optimize(in, out, checked, stats);
    if (*v) return run_verify(circuit_path, unitary_path, tol);
    if (*r) return run_random_unitary(n, seed, cnot_budget, out);
    if (*b) return run_bench(max_n, trials, seed, include_5q);
    if (*q) return run_export_qasm(in, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
