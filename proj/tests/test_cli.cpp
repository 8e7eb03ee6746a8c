// SPDX-License-Identifier: Apache-2.0
// End-to-end tests for the phsg command-line tool: exit codes, artifact
// naming, file formats, and cross-run determinism.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "phsg/io.hpp"
#include "phsg/ph_system.hpp"

#ifndef PHSG_CLI_PATH
#error "PHSG_CLI_PATH must point at the phsg executable"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("phsg_cli_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string sub(const std::string& name) const {
    return (dir / name).string();
  }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

// Runs the CLI through the shell, returns the exit code, and captures the
// streams into the given directory.
int run_cli(const TempDir& t, const std::string& args,
            const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + "\"" + PHSG_CLI_PATH + "\" " + args +
                          " > \"" + t.file("stdout.txt") + "\" 2> \"" +
                          t.file("stderr.txt") + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

struct Csv {
  std::string provenance;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const std::string& path) {
  Csv csv;
  std::istringstream in(slurp(path));
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line.rfind("# ", 0) == 0);
  csv.provenance = line.substr(2);
  REQUIRE(std::getline(in, line));
  csv.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    csv.rows.push_back(split(line));
  }
  return csv;
}

double cell_num(const Csv& csv, std::size_t row, const std::string& col) {
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (csv.header[c] == col) return std::stod(csv.rows[row][c]);
  }
  FAIL("missing column ", col);
  return 0.0;
}

std::string cell_text(const Csv& csv, std::size_t row, const std::string& col) {
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (csv.header[c] == col) return csv.rows[row][c];
  }
  FAIL("missing column ", col);
  return {};
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ",";
    out += cells[i];
  }
  return out;
}

}  // namespace

TEST_CASE("cli reports usage and rejects malformed invocations") {
  TempDir t;
  CHECK(run_cli(t, "--help") == 0);
  const std::string help = slurp(t.file("stdout.txt"));
  CHECK(help.find("sg-build") != std::string::npos);
  CHECK(help.find("simulate") != std::string::npos);

  CHECK(run_cli(t, "") == 2);                       // missing subcommand
  CHECK(run_cli(t, "frobnicate") == 2);             // unknown subcommand
  CHECK(run_cli(t, "sg-build --no-such-flag") == 2);
  CHECK(run_cli(t, "sg-build --degree 21") == 2);   // out of accepted range

  const std::string out = " --out-dir " + t.sub("o");
  CHECK(run_cli(t, "sg-build --model rc" + out) == 2);
  CHECK(run_cli(t, "sg-build --model ladder:k=0" + out) == 2);
  CHECK(run_cli(t, "simulate --io-mode siso --degree 1" + out) == 2);
  CHECK(run_cli(t, "simulate --t-end 0 --degree 1" + out) == 2);
  CHECK(run_cli(t, "mor --method guess --degree 1" + out) == 2);
  CHECK(run_cli(t, "mor --method bt --r-min 5 --r-max 2 --degree 1" + out) ==
        2);
  CHECK(run_cli(t,
                "mor --method irka --io-mode simo --r-min 2 --r-max 2 "
                "--degree 0" +
                    out) == 2);
  const std::string err = slurp(t.file("stderr.txt"));
  CHECK(err.find("config error") != std::string::npos);
}

TEST_CASE("cli enforces the dense-dimension cap from the environment") {
  TempDir t;
  const std::string args = "mor --model motor --degree 1 --method bt "
                           "--r-min 1 --r-max 2 --io-mode simo --out-dir " +
                           t.sub("o");
  CHECK(run_cli(t, args, "PHSG_MAX_DIM=8 ") == 2);
  const std::string err = slurp(t.file("stderr.txt"));
  CHECK(err.find("PHSG_MAX_DIM") != std::string::npos);
  CHECK(run_cli(t, args) == 0);
}

TEST_CASE("sg-build writes the transformed block family with sidecar") {
  TempDir t;
  const std::string out = t.sub("nested/dirs/made");
  REQUIRE(run_cli(t, "sg-build --model motor --degree 1 --out-dir " + out) ==
          0);

  const std::string stem = out + "/sg-build_motor_1_10";
  for (const char* s : {"E", "J", "R", "B", "P", "S", "N"}) {
    CAPTURE(s);
    CHECK(fs::exists(stem + "_" + s + ".mtx"));
  }
  CHECK(fs::exists(stem + "_sidecar.json"));
  CHECK(fs::exists(stem + "_report.txt"));

  // Mass block: orthonormal-chaos Gram matrix of the normalized realization.
  const phsg::SparseMatrix e = phsg::io::read_matrix_market(stem + "_E.mtx");
  REQUIRE(e.rows() == 12);
  REQUIRE(e.cols() == 12);
  CHECK((phsg::Matrix(e) - phsg::Matrix::Identity(12, 12)).cwiseAbs().maxCoeff()
        <= 1e-12);

  const json sidecar = json::parse(slurp(stem + "_sidecar.json"));
  CHECK(sidecar.at("s") == 6);
  CHECK(sidecar.at("d") == 1);
  CHECK(sidecar.at("q") == 5);
  CHECK(sidecar.at("n") == 2);
  CHECK(sidecar.at("m") == 1);
  CHECK(sidecar.at("ns") == 12);
  CHECK(sidecar.at("ms") == 6);
  CHECK(sidecar.at("droptol").get<double>() == 1e-14);
  CHECK(sidecar.at("provenance").at("command") == "sg-build");
  CHECK(sidecar.at("provenance").at("model") == "motor");

  const std::string report = slurp(stem + "_report.txt");
  CHECK(report.find("model: motor") != std::string::npos);
  CHECK(report.find("modes s = 6") != std::string::npos);
  CHECK(report.find("structure: port-Hamiltonian") != std::string::npos);

  const std::string stdout_text = slurp(t.file("stdout.txt"));
  CHECK(stdout_text.find("artifacts:") != std::string::npos);
}

TEST_CASE("sg-build without a transformation writes a general realization") {
  TempDir t;
  const std::string out = t.sub("o");
  REQUIRE(run_cli(t,
                  "sg-build --model motor --degree 1 --transform none "
                  "--out-dir " +
                      out) == 0);
  const std::string stem = out + "/sg-build_motor_1_10";
  for (const char* s : {"E", "A", "B", "C", "D"}) {
    CAPTURE(s);
    CHECK(fs::exists(stem + "_" + s + ".mtx"));
  }
  CHECK_FALSE(fs::exists(stem + "_J.mtx"));

  const phsg::SparseMatrix a = phsg::io::read_matrix_market(stem + "_A.mtx");
  CHECK(a.rows() == 12);
  CHECK(a.cols() == 12);

  const json sidecar = json::parse(slurp(stem + "_sidecar.json"));
  CHECK(sidecar.at("ns") == 12);
  CHECK_FALSE(sidecar.contains("ms"));

  const std::string report = slurp(stem + "_report.txt");
  CHECK(report.find("not claimed") != std::string::npos);
}

TEST_CASE("sg-build artifacts are byte-identical across reruns") {
  TempDir t;
  const std::string out = t.sub("o");
  const std::string args =
      "sg-build --model ladder:k=2 --degree 1 --transform image --out-dir " +
      out;
  REQUIRE(run_cli(t, args) == 0);
  const std::string stem = out + "/sg-build_ladder2_1_10";
  const std::string j1 = slurp(stem + "_J.mtx");
  const std::string e1 = slurp(stem + "_E.mtx");
  const std::string s1 = slurp(stem + "_sidecar.json");
  fs::remove_all(out);
  REQUIRE(run_cli(t, args) == 0);
  CHECK(slurp(stem + "_J.mtx") == j1);
  CHECK(slurp(stem + "_E.mtx") == e1);
  CHECK(slurp(stem + "_sidecar.json") == s1);
}

TEST_CASE("simulate writes outputs, statistics, and energy columns") {
  TempDir t;
  const std::string out = t.sub("o");
  REQUIRE(run_cli(t,
                  "simulate --model motor --degree 1 --t-end 0.2 "
                  "--oracle-nodes 2 --out-dir " +
                      out) == 0);
  const Csv csv = read_csv(out + "/simulate_motor_1_10.csv");

  const std::vector<std::string> expected = {
      "t",     "y1",   "y2",   "y3",          "y4",
      "y5",    "y6",   "mean1", "std1",        "hamiltonian",
      "oracle_hamiltonian", "hamiltonian_difference"};
  CHECK(csv.header == expected);
  CHECK(csv.rows.size() == 2001);
  CHECK(json::parse(csv.provenance).at("command") == "simulate");

  // Quiescent start: every column is exactly zero at t = 0.
  CHECK(join(csv.rows.front()) == "0,0,0,0,0,0,0,0,0,0,0,0");
  CHECK(cell_num(csv, csv.rows.size() - 1, "t") == doctest::Approx(0.2));

  for (std::size_t r : {std::size_t{400}, std::size_t{1200},
                        csv.rows.size() - 1}) {
    // The mean output is the leading chaos mode verbatim.
    CHECK(cell_text(csv, r, "mean1") == cell_text(csv, r, "y1"));
    CHECK(cell_num(csv, r, "std1") >= 0.0);
    // The shortest round-trip format keeps the difference column exact.
    CHECK(cell_num(csv, r, "hamiltonian_difference") ==
          cell_num(csv, r, "hamiltonian") -
              cell_num(csv, r, "oracle_hamiltonian"));
  }
}

TEST_CASE("simulate omits oracle columns when disabled") {
  TempDir t;
  const std::string out = t.sub("o");
  REQUIRE(run_cli(t,
                  "simulate --model motor --degree 1 --t-end 0.05 --out-dir " +
                      out) == 0);
  const Csv csv = read_csv(out + "/simulate_motor_1_10.csv");
  CHECK(csv.header.back() == "hamiltonian");
  for (const std::string& h : csv.header) {
    CHECK(h.find("oracle") == std::string::npos);
  }
}

TEST_CASE("mor balanced-truncation sweep writes errors and singular values") {
  TempDir t;
  const std::string out = t.sub("o");
  REQUIRE(run_cli(t,
                  "mor --model ladder:k=2 --degree 1 --method bt --r-min 1 "
                  "--r-max 6 --io-mode simo --out-dir " +
                      out) == 0);
  const std::string stem = out + "/mor_ladder2_1_10";
  const Csv csv = read_csv(stem + ".csv");
  CHECK(csv.header == std::vector<std::string>{"r", "rel_error", "stable",
                                               "ph_structure"});
  REQUIRE(!csv.rows.empty());
  CHECK(cell_num(csv, 0, "r") == 1.0);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    CHECK(cell_num(csv, r, "rel_error") >= 0.0);
    CHECK(cell_num(csv, r, "rel_error") <= 1.5);
    CHECK(cell_text(csv, r, "stable") == "true");
    CHECK(cell_text(csv, r, "ph_structure") == "false");
  }
  // Truncated realizations cannot beat larger ones in this nested family.
  CHECK(cell_num(csv, csv.rows.size() - 1, "rel_error") <=
        cell_num(csv, 0, "rel_error") + 1e-12);

  const Csv hankel = read_csv(stem + "_hankel.csv");
  CHECK(hankel.header == std::vector<std::string>{"index", "sigma"});
  REQUIRE(hankel.rows.size() >= csv.rows.size());
  for (std::size_t r = 0; r < hankel.rows.size(); ++r) {
    CHECK(cell_num(hankel, r, "sigma") >= 0.0);
    if (r > 0) {
      CHECK(cell_num(hankel, r, "sigma") <=
            cell_num(hankel, r - 1, "sigma") * (1 + 1e-12));
    }
  }
  CHECK_FALSE(fs::exists(stem + "_rom.json"));
}

TEST_CASE("mor interpolatory sweeps export a structured reduced model") {
  TempDir t;
  const std::string out = t.sub("a");
  REQUIRE(run_cli(t,
                  "mor --model ladder:k=2 --degree 1 --method arnoldi "
                  "--r-min 2 --r-max 4 --io-mode simo --out-dir " +
                      out) == 0);
  const std::string stem = out + "/mor_ladder2_1_10";
  const Csv csv = read_csv(stem + ".csv");
  REQUIRE(csv.rows.size() == 3);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    CHECK(cell_text(csv, r, "ph_structure") == "true");
    CHECK(cell_text(csv, r, "stable") == "true");
  }
  const phsg::PHSystem rom =
      phsg::io::read_model_json(stem + "_rom.json");
  CHECK(rom.n == 4);
  CHECK(phsg::validate_ph(rom).passed());

  const std::string out2 = t.sub("i");
  REQUIRE(run_cli(t,
                  "mor --model motor --degree 1 --method irka --r-min 2 "
                  "--r-max 3 --io-mode siso --out-dir " +
                      out2) == 0);
  const Csv irka = read_csv(out2 + "/mor_motor_1_10.csv");
  CHECK(irka.header == std::vector<std::string>{"r", "rel_error", "stable",
                                                "ph_structure", "converged"});
  REQUIRE(irka.rows.size() == 2);
  for (std::size_t r = 0; r < irka.rows.size(); ++r) {
    CHECK(cell_num(irka, r, "rel_error") < 1.0);
    CHECK(cell_text(irka, r, "ph_structure") == "true");
  }
  CHECK(fs::exists(out2 + "/mor_motor_1_10_rom.json"));
}

TEST_CASE("bode magnitudes are invariant under the state transformations") {
  TempDir t;
  const std::string out_a = t.sub("a");
  const std::string out_b = t.sub("b");
  REQUIRE(run_cli(t, "bode --model motor --transform none --out-dir " +
                         out_a) == 0);
  REQUIRE(run_cli(t, "bode --model motor --transform image --out-dir " +
                         out_b) == 0);
  const Csv plain = read_csv(out_a + "/bode_motor_2_10.csv");
  const Csv image = read_csv(out_b + "/bode_motor_2_10.csv");

  CHECK(plain.header ==
        std::vector<std::string>{"omega", "mag_dB_y1u1", "phase_deg_y1u1"});
  REQUIRE(plain.rows.size() == image.rows.size());
  REQUIRE(plain.rows.size() >= 100);
  for (std::size_t r = 1; r < plain.rows.size(); ++r) {
    CHECK(cell_num(plain, r, "omega") > cell_num(plain, r - 1, "omega"));
  }
  for (std::size_t r = 0; r < plain.rows.size(); r += 13) {
    CHECK(cell_num(plain, r, "omega") ==
          doctest::Approx(cell_num(image, r, "omega")).epsilon(1e-12));
    CHECK(cell_num(plain, r, "mag_dB_y1u1") ==
          doctest::Approx(cell_num(image, r, "mag_dB_y1u1")).epsilon(1e-8));
  }
}

TEST_CASE("convergence tabulates transform accuracy per io mode") {
  TempDir t;
  const std::string out = t.sub("o");
  REQUIRE(run_cli(t,
                  "convergence --model motor --degree 2 --out-dir " + out) ==
          0);
  const Csv csv = read_csv(out + "/convergence_motor_2_10.csv");
  CHECK(csv.header ==
        std::vector<std::string>{"degree", "SISO", "SIMO", "MIMO"});
  REQUIRE(csv.rows.size() == 2);
  CHECK(cell_num(csv, 0, "degree") == 1.0);
  CHECK(cell_num(csv, 1, "degree") == 2.0);
  for (std::size_t r = 0; r < 2; ++r) {
    for (const char* col : {"SISO", "SIMO", "MIMO"}) {
      const double v = cell_num(csv, r, col);
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }
  // Richer chaos bases shrink the discrepancy in every io mode.
  CHECK(cell_num(csv, 1, "MIMO") <= cell_num(csv, 0, "MIMO"));

  // Requesting no transformation sweeps both and prefixes the columns.
  const std::string out2 = t.sub("both");
  REQUIRE(run_cli(t,
                  "convergence --model motor --degree 1 --transform none "
                  "--out-dir " +
                      out2) == 0);
  const Csv both = read_csv(out2 + "/convergence_motor_1_10.csv");
  CHECK(both.header ==
        std::vector<std::string>{"degree", "basis-sqrt_SISO", "basis-sqrt_SIMO",
                                 "basis-sqrt_MIMO", "image_SISO", "image_SIMO",
                                 "image_MIMO"});
  REQUIRE(both.rows.size() == 1);
}
