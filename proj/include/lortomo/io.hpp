// Copyright 2026 The lortomo Authors
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

// JSON and CSV encodings of protocols, states, transforms and campaign
// outputs. Complex numbers are [re, im] pairs, matrices are row-major nested
// arrays. Parse failures and invariant violations in a file raise
// SchemaError naming what was wrong.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lortomo/errors.hpp"
#include "lortomo/linalg.hpp"
#include "lortomo/lorentz.hpp"
#include "lortomo/loss.hpp"
#include "lortomo/protocol.hpp"
#include "lortomo/qstate.hpp"

namespace lortomo::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.3.0";

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(what + ": invalid JSON (" + e.what() + ")");
  }
}

inline Json read_json(const std::string& path) { return parse_json(read_text(path), path); }

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Matrices

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError(where + ": complex number must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename Derived>
Json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw SchemaError(where + ": matrix must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError(where + ": matrix rows must all have length " + std::to_string(cols));
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)],
                                  where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return m;
}

inline std::size_t require_dim(const Json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": top level must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0) {
    throw SchemaError(where + ": \"dim\" must be a positive integer");
  }
  return j["dim"].get<std::size_t>();
}

// ---------------------------------------------------------------------------
// Protocol: {"dim", "rows", "weights", "completion": {"a0", "lambda0"} | null}

inline Json protocol_to_json(const Protocol& p) {
  Json j;
  j["dim"] = p.dim();
  Json rows = Json::array();
  for (const auto& row : p.rows()) {
    Json r = Json::array();
    for (Eigen::Index k = 0; k < row.size(); ++k) r.push_back(complex_to_json(row[k]));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["weights"] = p.weights();
  if (p.has_completion()) {
    j["completion"] = Json{{"a0", p.completion()->a0}, {"lambda0", matrix_to_json(p.completion()->lambda0)}};
  } else {
    j["completion"] = nullptr;
  }
  return j;
}

inline Protocol protocol_from_json(const Json& j, const std::string& where = "protocol") {
  const std::size_t dim = require_dim(j, where);
  if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].empty()) {
    throw SchemaError(where + ": \"rows\" must be a non-empty array");
  }
  if (!j.contains("weights") || !j["weights"].is_array()) {
    throw SchemaError(where + ": \"weights\" must be an array");
  }
  std::vector<ComplexRow> rows;
  for (std::size_t r = 0; r < j["rows"].size(); ++r) {
    const Json& row = j["rows"][r];
    if (!row.is_array() || row.size() != dim) {
      throw SchemaError(where + ": row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
    }
    ComplexRow x(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
      x[static_cast<Eigen::Index>(k)] = complex_from_json(row[k], where + ".rows[" + std::to_string(r) + "]");
    }
    rows.push_back(std::move(x));
  }
  std::vector<double> weights;
  for (const auto& w : j["weights"]) {
    if (!w.is_number()) throw SchemaError(where + ": weights must be numbers");
    weights.push_back(w.get<double>());
  }
  std::optional<Completion> completion;
  if (j.contains("completion") && !j["completion"].is_null()) {
    const Json& c = j["completion"];
    if (!c.is_object() || !c.contains("a0") || !c["a0"].is_number() || !c.contains("lambda0")) {
      throw SchemaError(where + ": \"completion\" must be null or {\"a0\": number, \"lambda0\": matrix}");
    }
    completion = Completion{c["a0"].get<double>(), matrix_from_json(c["lambda0"], where + ".completion.lambda0")};
  }
  try {
    return Protocol(dim, std::move(rows), std::move(weights), std::move(completion));
  } catch (const DomainError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

inline Protocol read_protocol(const std::string& path) { return protocol_from_json(read_json(path), path); }

// ---------------------------------------------------------------------------
// State: {"dim", "matrix"} or {"stokes": [P0, P1, P2, P3]}

inline Json state_to_json(const DensityMatrix& rho) {
  Json j;
  j["dim"] = rho.dim();
  j["matrix"] = matrix_to_json(rho.matrix());
  if (rho.dim() == 2) {
    const StokesVector p = stokes_from_density(rho);
    j["stokes"] = {p.p0, p.p1, p.p2, p.p3};
  }
  return j;
}

inline DensityMatrix state_from_json(const Json& j, const std::string& where = "state") {
  if (!j.is_object()) throw SchemaError(where + ": top level must be a JSON object");
  try {
    if (j.contains("matrix")) {
      const std::size_t dim = require_dim(j, where);
      const ComplexMatrix m = matrix_from_json(j["matrix"], where + ".matrix");
      if (static_cast<std::size_t>(m.rows()) != dim || m.rows() != m.cols()) {
        throw SchemaError(where + ": \"matrix\" must be " + std::to_string(dim) + " x " + std::to_string(dim));
      }
      return DensityMatrix::physical(m);
    }
    if (j.contains("stokes")) {
      const Json& s = j["stokes"];
      if (!s.is_array() || s.size() != 4) throw SchemaError(where + ": \"stokes\" must hold 4 numbers");
      for (const auto& v : s) {
        if (!v.is_number()) throw SchemaError(where + ": \"stokes\" must hold 4 numbers");
      }
      const DensityMatrix rho = density_from_stokes({s[0].get<double>(), s[1].get<double>(),
                                                     s[2].get<double>(), s[3].get<double>()});
      if (!rho.is_physical()) throw SchemaError(where + ": Stokes vector lies outside the light cone (P0 < |P|)");
      return rho;
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const DomainError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": state needs \"matrix\" or \"stokes\"");
}

inline DensityMatrix read_state(const std::string& path) { return state_from_json(read_json(path), path); }

// ---------------------------------------------------------------------------
// Transform: {"dim", "matrix"}

inline Json transform_to_json(const LorentzTransform& l) {
  Json j;
  j["dim"] = l.dim();
  j["matrix"] = matrix_to_json(l.matrix());
  return j;
}

inline LorentzTransform transform_from_json(const Json& j, const std::string& where = "transform") {
  const std::size_t dim = require_dim(j, where);
  if (!j.contains("matrix")) throw SchemaError(where + ": \"matrix\" is required");
  const ComplexMatrix m = matrix_from_json(j["matrix"], where + ".matrix");
  if (static_cast<std::size_t>(m.rows()) != dim || m.rows() != m.cols()) {
    throw SchemaError(where + ": \"matrix\" must be " + std::to_string(dim) + " x " + std::to_string(dim));
  }
  try {
    return LorentzTransform(m);
  } catch (const DomainError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

inline LorentzTransform read_transform(const std::string& path) {
  return transform_from_json(read_json(path), path);
}

// ---------------------------------------------------------------------------
// Loss CSV: experiment_index,loss,counts_total

struct LossRow {
  std::size_t experiment_index = 0;
  double loss = 0.0;
  double counts_total = 0.0;
};

inline constexpr const char* kLossHeader = "experiment_index,loss,counts_total";

/// `manifest` (may be empty) is recorded on a leading "# manifest: " line.
inline std::string losses_to_csv(const std::vector<LossRow>& rows, const std::string& manifest) {
  std::string out;
  if (!manifest.empty()) out += "# manifest: " + manifest + "\n";
  out += kLossHeader;
  out += "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.experiment_index) + "," + format_double(r.loss) + "," +
           format_double(r.counts_total) + "\n";
  }
  return out;
}

inline std::vector<LossRow> losses_from_csv(const std::string& text, const std::string& where = "losses") {
  std::vector<LossRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kLossHeader) {
        throw SchemaError(where + ": expected header '" + std::string(kLossHeader) + "'");
      }
      header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string a, b, c;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, c)) {
      throw SchemaError(where + ": line " + std::to_string(lineno) + " must have 3 fields");
    }
    LossRow r;
    try {
      std::size_t used = 0;
      r.experiment_index = std::stoull(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      r.loss = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      r.counts_total = std::stod(c, &used);
      if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::exception&) {
      throw SchemaError(where + ": line " + std::to_string(lineno) + " has a malformed number");
    }
    if (!std::isfinite(r.loss) || r.loss < 0.0) {
      throw SchemaError(where + ": line " + std::to_string(lineno) + ": loss must be finite and >= 0");
    }
    rows.push_back(r);
  }
  if (!header) throw SchemaError(where + ": missing header '" + std::string(kLossHeader) + "'");
  return rows;
}

inline std::vector<LossSample> to_samples(const std::vector<LossRow>& rows) {
  std::vector<LossSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.loss, r.experiment_index});
  return out;
}

// ---------------------------------------------------------------------------
// Run manifest

struct InputDigest {
  std::string path;
  std::string sha256;  // lowercase hex
};

/// UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible builds of
/// output trees.
inline std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      t = static_cast<std::time_t>(std::stoll(env));
    } catch (...) {
    }
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json make_manifest(const std::string& command, std::uint64_t seed, const Json& config,
                          const std::vector<InputDigest>& inputs) {
  Json j;
  j["tool"] = "lortomo";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["config"] = config;
  Json in = Json::array();
  for (const auto& d : inputs) in.push_back({{"path", d.path}, {"sha256", d.sha256}});
  j["inputs"] = std::move(in);
  j["timestamp"] = utc_timestamp();
  return j;
}

}  // namespace lortomo::io
