// SPDX-License-Identifier: Apache-2.0

#include "phsg/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace phsg::io {

using nlohmann::json;

std::string tool_version() { return "phsg 1.0.0"; }

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// JSON model description
// ---------------------------------------------------------------------------

namespace {

Matrix matrix_from_json(const json& j, Index rows, Index cols,
                        const std::string& key) {
  if (!j.is_array()) {
    throw ConfigError("model JSON: \"" + key + "\" must be an array of rows");
  }
  if (static_cast<Index>(j.size()) != rows) {
    throw ConfigError("model JSON: \"" + key + "\" has " +
                      std::to_string(j.size()) + " rows, expected " +
                      std::to_string(rows));
  }
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError("model JSON: \"" + key + "\" row " +
                        std::to_string(r) + " must have " +
                        std::to_string(cols) + " entries");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number()) {
        throw ConfigError("model JSON: \"" + key + "\" entry (" +
                          std::to_string(r) + "," + std::to_string(c) +
                          ") is not a number");
      }
      out(r, c) = cell.get<double>();
    }
  }
  return out;
}

Matrix slot_or(const json& j, const std::string& key, Index rows, Index cols,
               const Matrix& fallback) {
  if (!j.contains(key)) return fallback;
  return matrix_from_json(j.at(key), rows, cols, key);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Index dimension_field(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ConfigError("model JSON: missing integer field \"" + key + "\"");
  }
  const auto v = j.at(key).get<long long>();
  if (v < 0) {
    throw ConfigError("model JSON: \"" + key + "\" must be nonnegative");
  }
  return static_cast<Index>(v);
}

}  // namespace

PHSystem parse_model_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model JSON: parse failure: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("model JSON: top level must be an object");
  }
  const Index n = dimension_field(j, "n");
  const Index m = dimension_field(j, "m");

  PHSystem sys;
  sys.n = n;
  sys.m = m;
  const Matrix zero_nn = Matrix::Zero(n, n);
  const Matrix id_nn = Matrix::Identity(n, n);
  sys.E = slot_or(j, "E", n, n, id_nn);
  sys.J = slot_or(j, "J", n, n, zero_nn);
  sys.R = slot_or(j, "R", n, n, zero_nn);
  sys.Q = slot_or(j, "Q", n, n, id_nn);
  sys.B = slot_or(j, "B", n, m, Matrix::Zero(n, m));
  sys.P = slot_or(j, "P", n, m, Matrix::Zero(n, m));
  sys.S = slot_or(j, "S", m, m, Matrix::Zero(m, m));
  sys.N = slot_or(j, "N", m, m, Matrix::Zero(m, m));
  return sys;
}

PHSystem read_model_json(const std::string& path) {
  return parse_model_json(read_text(path));
}

std::string model_to_json(const PHSystem& sys,
                          const std::string& provenance_json) {
  json j;
  j["n"] = static_cast<long long>(sys.n);
  j["m"] = static_cast<long long>(sys.m);
  j["E"] = matrix_to_json(sys.E);
  j["J"] = matrix_to_json(sys.J);
  j["R"] = matrix_to_json(sys.R);
  j["Q"] = matrix_to_json(sys.Q);
  j["B"] = matrix_to_json(sys.B);
  j["P"] = matrix_to_json(sys.P);
  j["S"] = matrix_to_json(sys.S);
  j["N"] = matrix_to_json(sys.N);
  if (!provenance_json.empty()) {
    j["provenance"] = json::parse(provenance_json);
  }
  return j.dump(2) + "\n";
}

void write_model_json(const std::string& path, const PHSystem& sys,
                      const std::string& provenance_json) {
  write_text(path, model_to_json(sys, provenance_json));
}

// ---------------------------------------------------------------------------
// Matrix Market
// ---------------------------------------------------------------------------

void write_matrix_market(const std::string& path, const SparseMatrix& mat,
                         const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string line;
    while (std::getline(lines, line)) {
      out << "% " << line << "\n";
    }
  }
  SparseMatrix m = mat;
  m.makeCompressed();
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  // Column-major iteration: deterministic and sorted within each column.
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      out << (it.row() + 1) << " " << (it.col() + 1) << " "
          << format_number(it.value()) << "\n";
    }
  }
  if (!out) {
    throw ConfigError("write failure on '" + path + "'");
  }
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open '" + path + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("'" + path + "': empty file");
  }
  if (line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
    throw ConfigError("'" + path +
                      "': unsupported Matrix Market header (expected "
                      "'matrix coordinate real general')");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  Index rows = 0, cols = 0;
  std::size_t nnz = 0;
  if (!(sizes >> rows >> cols >> nnz)) {
    throw ConfigError("'" + path + "': malformed size line");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    Index r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) {
      throw ConfigError("'" + path + "': truncated entry list");
    }
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw ConfigError("'" + path + "': entry index out of range");
    }
    triplets.emplace_back(r - 1, c - 1, v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(const std::string& path,
                     const std::string& provenance_json,
                     const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  if (!provenance_json.empty()) {
    out_ << "# " << provenance_json << "\n";
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ",";
    out_ << header[i];
  }
  out_ << "\n";
}

CsvWriter::~CsvWriter() {
  if (out_.is_open()) out_.close();
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  text_row(cells);
}

void CsvWriter::text_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw ConfigError("CSV row width " + std::to_string(cells.size()) +
                      " does not match header width " +
                      std::to_string(columns_) + " in '" + path_ + "'");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
}

void CsvWriter::close() {
  if (!out_.is_open()) return;
  out_.flush();
  if (!out_) {
    throw ConfigError("write failure on '" + path_ + "'");
  }
  out_.close();
}

// ---------------------------------------------------------------------------
// SG sidecar and chaos caching
// ---------------------------------------------------------------------------

std::string sg_sidecar_json(const SGSystem& sg, double droptol,
                            const std::string& provenance_json) {
  json j;
  j["s"] = sg.s();
  j["d"] = sg.basis.d;
  j["q"] = sg.basis.q;
  j["n"] = static_cast<long long>(sg.n);
  j["m"] = static_cast<long long>(sg.m);
  j["ns"] = static_cast<long long>(sg.ns());
  j["ms"] = static_cast<long long>(sg.ms());
  j["droptol"] = droptol;
  if (!provenance_json.empty()) {
    j["provenance"] = json::parse(provenance_json);
  }
  return j.dump(2) + "\n";
}

std::string basis_to_json(const ChaosBasis& basis) {
  json j;
  j["q"] = basis.q;
  j["d"] = basis.d;
  j["size"] = basis.size();
  return j.dump() + "\n";
}

ChaosBasis basis_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("basis JSON: parse failure: ") + e.what());
  }
  if (!j.contains("q") || !j.contains("d")) {
    throw ConfigError("basis JSON: missing \"q\" or \"d\"");
  }
  ChaosBasis basis = ChaosBasis::make(j.at("q").get<int>(),
                                      j.at("d").get<int>());
  if (j.contains("size") && j.at("size").get<int>() != basis.size()) {
    throw ConfigError("basis JSON: stored size does not match (q, d)");
  }
  return basis;
}

std::string rule_to_json(const QuadratureRule& rule) {
  json j;
  j["lo"] = std::vector<double>(rule.box.lo.data(),
                                rule.box.lo.data() + rule.box.lo.size());
  j["hi"] = std::vector<double>(rule.box.hi.data(),
                                rule.box.hi.data() + rule.box.hi.size());
  j["nodes_1d"] = rule.nodes_1d;
  j["weights_1d"] = rule.weights_1d;
  return j.dump() + "\n";
}

QuadratureRule rule_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("rule JSON: parse failure: ") + e.what());
  }
  for (const char* key : {"lo", "hi", "nodes_1d", "weights_1d"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("rule JSON: missing \"") + key + "\"");
    }
  }
  auto lo = j.at("lo").get<std::vector<double>>();
  auto hi = j.at("hi").get<std::vector<double>>();
  QuadratureRule rule;
  rule.box = ParameterBox(Eigen::Map<const Vector>(lo.data(), lo.size()),
                          Eigen::Map<const Vector>(hi.data(), hi.size()));
  rule.nodes_1d = j.at("nodes_1d").get<std::vector<std::vector<double>>>();
  rule.weights_1d = j.at("weights_1d").get<std::vector<std::vector<double>>>();
  if (rule.nodes_1d.size() != rule.weights_1d.size() ||
      static_cast<int>(rule.nodes_1d.size()) != rule.box.dims()) {
    throw ConfigError("rule JSON: inconsistent dimension counts");
  }
  for (std::size_t d = 0; d < rule.nodes_1d.size(); ++d) {
    if (rule.nodes_1d[d].size() != rule.weights_1d[d].size() ||
        rule.nodes_1d[d].empty()) {
      throw ConfigError("rule JSON: dimension " + std::to_string(d) +
                        " has mismatched node/weight counts");
    }
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Plain text
// ---------------------------------------------------------------------------

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw ConfigError("write failure on '" + path + "'");
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open '" + path + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace phsg::io
