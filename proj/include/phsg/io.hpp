// SPDX-License-Identifier: Apache-2.0
//
// Serialization: JSON model descriptions, Matrix Market export, CSV writers
// with a provenance header, and JSON caching of chaos bases and quadrature
// rules. All numeric output is locale-independent ('.' decimal point) and
// deterministic: identical inputs produce byte-identical files.

#pragma once

#include "phsg/chaos.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/sg.hpp"
#include "phsg/types.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace phsg::io {

/// Tool identification embedded in provenance headers.
std::string tool_version();

/// Shortest round-trip decimal representation with up to 17 significant
/// digits (std::to_chars); never uses a locale.
std::string format_number(double v);

// ---------------------------------------------------------------------------
// JSON model description:
//   {"n":…, "m":…, "E":[[…]], "J":…, "R":…, "Q":…, "B":…, "P":…, "S":…, "N":…}
// with row-major numeric matrix arrays. Omitted slots default to zero,
// except E and Q which default to the identity.
// ---------------------------------------------------------------------------

PHSystem parse_model_json(const std::string& text);
PHSystem read_model_json(const std::string& path);

/// Serialize a model; a non-empty provenance string (itself a JSON object)
/// is embedded under the "provenance" key.
std::string model_to_json(const PHSystem& sys,
                          const std::string& provenance_json = {});
void write_model_json(const std::string& path, const PHSystem& sys,
                      const std::string& provenance_json = {});

// ---------------------------------------------------------------------------
// Matrix Market (coordinate real general). Comment lines carry the
// provenance JSON. The reader accepts exactly the subset the writer emits.
// ---------------------------------------------------------------------------

void write_matrix_market(const std::string& path, const SparseMatrix& mat,
                         const std::string& comment = {});
SparseMatrix read_matrix_market(const std::string& path);

// ---------------------------------------------------------------------------
// CSV with one '#'-prefixed provenance line, a header row, comma separators.
// ---------------------------------------------------------------------------

class CsvWriter {
 public:
  /// Opens `path`, writes "# <provenance_json>" (if non-empty) and the
  /// header row. Throws ConfigError if the file cannot be created.
  CsvWriter(const std::string& path, const std::string& provenance_json,
            const std::vector<std::string>& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  /// Numeric row; every cell is rendered with format_number.
  void row(const std::vector<double>& values);
  /// Pre-rendered row for mixed numeric/flag columns.
  void text_row(const std::vector<std::string>& cells);

  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

// ---------------------------------------------------------------------------
// SG metadata sidecar and chaos-basis / quadrature-rule caching.
// ---------------------------------------------------------------------------

/// JSON object with the block-system metadata: s, d, q, n, m, ns, ms and the
/// assembly drop tolerance; provenance embedded when non-empty.
std::string sg_sidecar_json(const SGSystem& sg, double droptol,
                            const std::string& provenance_json = {});

std::string basis_to_json(const ChaosBasis& basis);
ChaosBasis basis_from_json(const std::string& text);

std::string rule_to_json(const QuadratureRule& rule);
QuadratureRule rule_from_json(const std::string& text);

/// Write `text` to `path` (throws ConfigError on failure).
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace phsg::io
