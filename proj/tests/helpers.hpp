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

// Small shared generators for the test suites.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "gtopt/circuit.hpp"
#include "gtopt/matrix.hpp"

namespace gtopt_test {

using namespace gtopt;

inline double random_angle(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5) *
         2.0 * 3.14159265358979323846;
}

inline Mat2 random_diag2(std::mt19937_64& eng) {
  return Mat2{std::polar(1.0, random_angle(eng)), 0.0, 0.0,
              std::polar(1.0, random_angle(eng))};
}

inline Mat2 random_scalar2(std::mt19937_64& eng) {
  const cxd c = std::polar(1.0, random_angle(eng));
  return Mat2{c, 0.0, 0.0, c};
}

inline Mat2 random_antidiag2(std::mt19937_64& eng) {
  return Mat2{0.0, std::polar(1.0, random_angle(eng)),
              std::polar(1.0, random_angle(eng)), 0.0};
}

/** Pair of 2x2 unitaries sharing an eigenbasis (hence commuting). */
inline std::pair<Mat2, Mat2> commuting_pair(GaussianSource& gauss) {
  std::mt19937_64& eng = gauss.engine();
  const Mat2 w = random_mat2(gauss);
  const Mat2 da = random_diag2(eng);
  const Mat2 db = random_diag2(eng);
  return {mul2(mul2(w, da), dagger2(w)), mul2(mul2(w, db), dagger2(w))};
}

/** Wire layout for an ordered gate pair with the requested role-set sizes.
 * Targets are wires 0 (b1) and, when distinct, 1 (b2). */
struct PairLayout {
  int n_qubits = 0;
  int t1 = 0;
  int t2 = -1;
  std::vector<int> t3, t4, t5;
  std::vector<int> b1_controls, b2_controls;
};

inline PairLayout make_pair_layout(PairCase label, std::size_t n3,
                                   std::size_t n4, std::size_t n5,
                                   bool spare_wire = false) {
  PairLayout lay;
  lay.t1 = 0;
  int next = 1;
  if (label != PairCase::M1) lay.t2 = next++;
  for (std::size_t i = 0; i < n3; ++i) lay.t3.push_back(next++);
  for (std::size_t i = 0; i < n4; ++i) lay.t4.push_back(next++);
  for (std::size_t i = 0; i < n5; ++i) lay.t5.push_back(next++);
  lay.n_qubits = next + (spare_wire ? 1 : 0);

  lay.b1_controls = lay.t3;
  lay.b1_controls.insert(lay.b1_controls.end(), lay.t4.begin(), lay.t4.end());
  if (label == PairCase::M3 || label == PairCase::M5)
    lay.b1_controls.push_back(lay.t2);
  lay.b2_controls = lay.t3;
  lay.b2_controls.insert(lay.b2_controls.end(), lay.t5.begin(), lay.t5.end());
  if (label == PairCase::M4 || label == PairCase::M5)
    lay.b2_controls.push_back(lay.t1);
  return lay;
}

inline std::pair<Gate, Gate> gates_for_layout(const PairLayout& lay,
                                              const Mat2& a, const Mat2& b) {
  const int b2_target = (lay.t2 < 0) ? lay.t1 : lay.t2;
  return {make_gate(lay.t1, lay.b1_controls, a),
          make_gate(b2_target, lay.b2_controls, b)};
}

/** Oracle: do the two gates commute as operators on n qubits? */
inline bool oracle_commute(const Gate& b1, const Gate& b2, int n_qubits,
                           double tol = kRuleTol) {
  Circuit fwd{n_qubits, {b1, b2}};
  Circuit rev{n_qubits, {b2, b1}};
  return max_abs_diff(circuit_to_unitary(fwd), circuit_to_unitary(rev)) <= tol;
}

}  // namespace gtopt_test
