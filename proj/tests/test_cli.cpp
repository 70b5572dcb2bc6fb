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

// End-to-end checks of the command line binary. Every test shells out to
// the real executable (path injected as GTOPT_CLI_PATH at compile time) and
// inspects exit codes and captured output.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "gtopt/io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/** Runs the CLI with the given arguments, capturing stdout (stderr is left
 * alone so failures stay visible in the test log). */
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_file =
      fs::temp_directory_path() /
      ("gtopt_cli_out_" + std::to_string(::getpid()) + "_" +
       std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string(GTOPT_CLI_PATH) + " " + args + " > " + out_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  fs::remove(out_file);
  return r;
}

/** Scratch directory, fresh per test run, removed on destruction. */
struct ScratchDir {
  fs::path path;
  ScratchDir() {
    path = fs::temp_directory_path() /
           ("gtopt_cli_scratch_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::size_t parse_field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == key) {
      std::size_t v = 0;
      in >> v;
      return v;
    }
  }
  FAIL("field '" << key << "' not found in: " << text);
  return 0;
}

}  // namespace

TEST_CASE("decompose then verify round-trips") {
  ScratchDir dir;
  const std::string mat = dir.file("u.mat");
  const std::string qc = dir.file("c.qc");

  REQUIRE(run_cli("random-unitary --n 2 --seed 11 --out " + mat).exit_code ==
          0);
  const RunResult dec =
      run_cli("decompose --in " + mat + " --out " + qc + " --stage basic");
  REQUIRE(dec.exit_code == 0);
  CHECK(parse_field(dec.out, "cnots") == 20);

  const RunResult ver =
      run_cli("verify --circuit " + qc + " --unitary " + mat);
  REQUIRE(ver.exit_code == 0);
  CHECK(ver.out.find("OK") != std::string::npos);
}

TEST_CASE("decompose --optimize lowers the CNOT count") {
  ScratchDir dir;
  const std::string mat = dir.file("u.mat");
  const std::string qc = dir.file("c.qc");

  REQUIRE(run_cli("random-unitary --n 2 --seed 12 --out " + mat).exit_code ==
          0);
  const RunResult dec = run_cli("decompose --in " + mat + " --out " + qc +
                                " --stage basic --optimize");
  REQUIRE(dec.exit_code == 0);
  CHECK(parse_field(dec.out, "cnots") == 10);
  REQUIRE(run_cli("verify --circuit " + qc + " --unitary " + mat).exit_code ==
          0);
}

TEST_CASE("optimize subcommand shrinks a circuit file") {
  ScratchDir dir;
  const std::string mat = dir.file("u.mat");
  const std::string qc = dir.file("c.qc");
  const std::string opt = dir.file("c_opt.qc");

  REQUIRE(run_cli("random-unitary --n 2 --seed 13 --out " + mat).exit_code ==
          0);
  const RunResult dec =
      run_cli("decompose --in " + mat + " --out " + qc + " --stage basic");
  REQUIRE(dec.exit_code == 0);
  const RunResult o =
      run_cli("optimize --in " + qc + " --out " + opt + " --checked");
  REQUIRE(o.exit_code == 0);
  CHECK(parse_field(o.out, "cnots") < parse_field(dec.out, "cnots"));
  REQUIRE(run_cli("verify --circuit " + opt + " --unitary " + mat)
              .exit_code == 0);
}

TEST_CASE("verify rejects the wrong unitary") {
  ScratchDir dir;
  const std::string mat_a = dir.file("a.mat");
  const std::string mat_b = dir.file("b.mat");
  const std::string qc = dir.file("c.qc");

  REQUIRE(run_cli("random-unitary --n 2 --seed 14 --out " + mat_a)
              .exit_code == 0);
  REQUIRE(run_cli("random-unitary --n 2 --seed 15 --out " + mat_b)
              .exit_code == 0);
  REQUIRE(run_cli("decompose --in " + mat_a + " --out " + qc).exit_code == 0);
  const RunResult ver =
      run_cli("verify --circuit " + qc + " --unitary " + mat_b);
  CHECK(ver.exit_code == 1);
  CHECK(ver.out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("export-qasm output still verifies against the source unitary") {
  ScratchDir dir;
  const std::string mat = dir.file("u.mat");
  const std::string qc = dir.file("c.qc");
  const std::string qasm = dir.file("c.qasm");

  REQUIRE(run_cli("random-unitary --n 3 --seed 16 --cnot-budget 4 --out " +
                  mat)
              .exit_code == 0);
  REQUIRE(run_cli("decompose --in " + mat + " --out " + qc +
                  " --stage basic --optimize")
              .exit_code == 0);
  REQUIRE(run_cli("export-qasm --in " + qc + " --out " + qasm).exit_code ==
          0);
  const std::string text = slurp(qasm);
  CHECK(text.find("OPENQASM 2.0;") != std::string::npos);
  CHECK(text.find("qreg q[3];") != std::string::npos);
  REQUIRE(run_cli("verify --circuit " + qasm + " --unitary " + mat)
              .exit_code == 0);
}

TEST_CASE("bench output is deterministic") {
  const std::string args = "bench --max-n 2 --trials 3 --seed 5 2>/dev/null";
  const RunResult first = run_cli(args);
  const RunResult second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(first.out.find("cnots=20") != std::string::npos);
  CHECK(first.out.find("UNSTABLE") == std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("frobnicate 2>/dev/null").exit_code == 2);
  CHECK(run_cli("decompose --out only.qc 2>/dev/null").exit_code == 2);
}

TEST_CASE("missing input files exit with code 1") {
  ScratchDir dir;
  CHECK(run_cli("decompose --in " + dir.file("nope.mat") + " --out " +
                dir.file("c.qc") + " 2>/dev/null")
            .exit_code == 1);
}
