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
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtopt/circuit.hpp"
#include "gtopt/matrix.hpp"

namespace gtopt {

// Text formats.
//
// Circuit (.qc):
//   qubits <n>
//   x <target>
//   cnot <control> <target>
//   gate <target> [<controls...>] <m00.re> <m00.im> <m01.re> <m01.im>
//                                 <m10.re> <m10.im> <m11.re> <m11.im>
//   # comment lines and blank lines are ignored
//
// Unitary (.mat):
//   n <qubits>
//   followed by 2^n rows of 2^n entries written as re+imj / re-imj
//   (no space between the real part and the signed imaginary part).

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream iss(s);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(line, "trailing characters in number '" + tok + "'");
  return v;
}

inline int parse_int(const std::string& tok, int line) {
  std::size_t pos = 0;
  long v;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(line, "trailing characters in integer '" + tok + "'");
  return static_cast<int>(v);
}

// Complex scalar in glued re+imj form, e.g. 0.5-0.25j.
inline std::string format_cxd(cxd v) {
  const std::string re = format_double(v.real());
  std::string im = format_double(v.imag());
  if (!im.empty() && im[0] != '-') im = "+" + im;
  return re + im + "j";
}

inline cxd parse_cxd(const std::string& tok, int line) {
  if (tok.empty() || tok.back() != 'j')
    throw ParseError(line, "expected re+imj entry, got '" + tok + "'");
  const std::string body = tok.substr(0, tok.size() - 1);
  // The imaginary part starts at the last sign that is not an exponent sign
  // and not the leading sign of the real part.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') &&
        body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos)
    throw ParseError(line, "malformed complex entry '" + tok + "'");
  const double re = parse_double(body.substr(0, split), line);
  const double im = parse_double(body.substr(split), line);
  return {re, im};
}

}  // namespace detail

inline void write_circuit(std::ostream& os, const Circuit& c) {
  os << "qubits " << c.n_qubits << "\n";
  for (const Gate& g : c.gates) {
    if (g.controls.empty() && approx_equal2(g.payload, sigma_x(), kRuleTol)) {
      os << "x " << g.target << "\n";
      continue;
    }
    if (is_cnot(g)) {
      os << "cnot " << g.controls[0] << " " << g.target << "\n";
      continue;
    }
    os << "gate " << g.target;
    for (int ctrl : g.controls) os << " " << ctrl;
    for (cxd v : {g.payload.m00, g.payload.m01, g.payload.m10, g.payload.m11})
      os << " " << detail::format_double(v.real()) << " "
         << detail::format_double(v.imag());
    os << "\n";
  }
}

inline Circuit read_circuit(std::istream& is) {
  Circuit c{0, {}};
  bool have_header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok[0] != "qubits" || tok.size() != 2)
        throw ParseError(lineno, "expected 'qubits <n>' header");
      c.n_qubits = detail::parse_int(tok[1], lineno);
      if (c.n_qubits < 1) throw ParseError(lineno, "qubit count must be >= 1");
      have_header = true;
      continue;
    }
    try {
      if (tok[0] == "x") {
        if (tok.size() != 2) throw ParseError(lineno, "x takes one target");
        append_gate(c, make_not(detail::parse_int(tok[1], lineno)));
      } else if (tok[0] == "cnot") {
        if (tok.size() != 3)
          throw ParseError(lineno, "cnot takes control and target");
        append_gate(c, make_cnot(detail::parse_int(tok[1], lineno),
                                 detail::parse_int(tok[2], lineno)));
      } else if (tok[0] == "gate") {
        if (tok.size() < 10)
          throw ParseError(lineno, "gate needs a target and 8 matrix values");
        const int target = detail::parse_int(tok[1], lineno);
        std::vector<int> controls;
        for (std::size_t i = 2; i + 8 < tok.size(); ++i)
          controls.push_back(detail::parse_int(tok[i], lineno));
        double v[8];
        for (int i = 0; i < 8; ++i)
          v[i] = detail::parse_double(tok[tok.size() - 8 + i], lineno);
        const Mat2 payload{{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]},
                           {v[6], v[7]}};
        append_gate(c, make_gate(target, controls, payload));
      } else {
        throw ParseError(lineno, "unknown directive '" + tok[0] + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError(lineno, "missing 'qubits <n>' header");
  return c;
}

inline void write_unitary(std::ostream& os, const UnitaryMatrix& u) {
  int n = 0;
  while ((1u << n) < u.dim()) ++n;
  if ((1u << n) != u.dim())
    throw std::invalid_argument("matrix dimension is not a power of two");
  os << "n " << n << "\n";
  for (unsigned r = 0; r < u.dim(); ++r) {
    for (unsigned col = 0; col < u.dim(); ++col) {
      if (col) os << " ";
      os << detail::format_cxd(u.at(r, col));
    }
    os << "\n";
  }
}

inline UnitaryMatrix read_unitary(std::istream& is) {
  std::string line;
  int lineno = 0;
  int n = -1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] != "n" || tok.size() != 2)
      throw ParseError(lineno, "expected 'n <qubits>' header");
    n = detail::parse_int(tok[1], lineno);
    break;
  }
  if (n < 1 || n > kMaxOracleQubits)
    throw ParseError(lineno, "qubit count out of range");
  const unsigned dim = 1u << n;
  UnitaryMatrix u(dim);
  unsigned row = 0;
  while (row < dim && std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != dim)
      throw ParseError(lineno, "expected " + std::to_string(dim) +
                                   " entries in row " + std::to_string(row));
    for (unsigned col = 0; col < dim; ++col)
      u.at(row, col) = detail::parse_cxd(tok[col], lineno);
    ++row;
  }
  if (row != dim) throw ParseError(lineno, "unexpected end of matrix");
  return u;
}

// QASM-ish export for circuits that are already in the basic gate set:
// uncontrolled one-qubit gates and CNOTs. Each one-qubit gate is written as
// u(theta,phi,lambda) q[t]; the global phase delta that u() cannot carry is
// preserved in a trailing comment so the file round-trips exactly.
inline void write_qasm(std::ostream& os, const Circuit& c) {
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  os << "qreg q[" << c.n_qubits << "];\n";
  for (const Gate& g : c.gates) {
    if (is_cnot(g)) {
      os << "cx q[" << g.controls[0] << "],q[" << g.target << "];\n";
      continue;
    }
    if (!g.controls.empty())
      throw std::invalid_argument(
          "circuit is not in the basic gate set (controlled non-CNOT gate)");
    const ZyzAngles z = zyz_decompose(g.payload);
    os << "u(" << detail::format_double(z.theta) << ","
       << detail::format_double(z.phi) << ","
       << detail::format_double(z.lambda) << ") q[" << g.target << "];";
    os << " // phase " << detail::format_double(z.delta) << "\n";
  }
}

inline Circuit read_qasm(std::istream& is) {
  std::string line;
  int lineno = 0;
  Circuit c{0, {}};
  bool have_qreg = false;
  while (std::getline(is, line)) {
    ++lineno;
    double phase = 0.0;
    const std::size_t slash = line.find("//");
    if (slash != std::string::npos) {
      const std::vector<std::string> ctok =
          detail::split_ws(line.substr(slash + 2));
      if (ctok.size() == 2 && ctok[0] == "phase")
        phase = detail::parse_double(ctok[1], lineno);
      line.resize(slash);
    }
    // Strip statement punctuation so plain token splits work.
    for (char& ch : line)
      if (ch == ';' || ch == ',' || ch == '(' || ch == ')' || ch == '[' ||
          ch == ']')
        ch = ' ';
    std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "OPENQASM" || tok[0] == "include") continue;
    if (tok[0] == "qreg") {
      if (tok.size() != 3 || tok[1] != "q")
        throw ParseError(lineno, "expected 'qreg q[<n>];'");
      c.n_qubits = detail::parse_int(tok[2], lineno);
      have_qreg = true;
      continue;
    }
    if (!have_qreg) throw ParseError(lineno, "statement before qreg");
    if (tok[0] == "cx") {
      if (tok.size() != 5 || tok[1] != "q" || tok[3] != "q")
        throw ParseError(lineno, "expected 'cx q[a],q[b];'");
      append_gate(c, make_cnot(detail::parse_int(tok[2], lineno),
                               detail::parse_int(tok[4], lineno)));
      continue;
    }
    if (tok[0] == "u") {
      if (tok.size() != 6 || tok[4] != "q")
        throw ParseError(lineno, "expected 'u(t,p,l) q[i];'");
      ZyzAngles z{};
      z.theta = detail::parse_double(tok[1], lineno);
      z.phi = detail::parse_double(tok[2], lineno);
      z.lambda = detail::parse_double(tok[3], lineno);
      z.delta = phase;
      append_gate(c, make_gate(detail::parse_int(tok[5], lineno), {},
                               zyz_compose(z)));
      continue;
    }
    throw ParseError(lineno, "unsupported statement '" + tok[0] + "'");
  }
  if (!have_qreg) throw ParseError(lineno, "missing qreg declaration");
  return c;
}

}  // namespace gtopt
