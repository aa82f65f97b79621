#pragma once

// File formats: matrices (JSON / CSV), variation specs, threshold reports
// and issue trajectories. Node numbers in every file are 1-based.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "dfpower/analysis.hpp"
#include "dfpower/dynamics.hpp"
#include "dfpower/errors.hpp"
#include "dfpower/graph_core.hpp"
#include "dfpower/topology.hpp"

namespace dfpower {

using json = nlohmann::json;

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// ---- matrices ----------------------------------------------------------

inline json matrix_to_json(const Matrix& c) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < c.cols(); ++j) row.push_back(c(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"n", c.rows()}, {"rows", std::move(rows)}};
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
    throw FormatError("matrix JSON needs a \"rows\" array");
  }
  const auto& rows = j["rows"];
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (j.contains("n") && j["n"].get<Eigen::Index>() != n) {
    throw DimensionError("matrix JSON: n does not match the number of rows");
  }
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw DimensionError("matrix JSON: row " + std::to_string(i + 1) + " must have " +
                           std::to_string(n) + " entries");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw FormatError("matrix JSON: non-numeric entry");
      c(i, k) = v.get<double>();
    }
  }
  return c;
}

inline Matrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      if (first == std::string::npos) throw FormatError("matrix CSV: empty field");
      const std::string tok = field.substr(first, last - first + 1);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw FormatError("matrix CSV: cannot parse '" + tok + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw DimensionError("matrix CSV: expected " + std::to_string(n) + " columns in row " +
                           std::to_string(i + 1));
    }
    for (Eigen::Index k = 0; k < n; ++k) c(i, k) = row[static_cast<std::size_t>(k)];
  }
  return c;
}

inline std::string matrix_to_csv(const Matrix& c) {
  std::string out;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (j) out += ',';
      out += format_double(c(i, j));
    }
    out += '\n';
  }
  return out;
}

// CSV when the extension is .csv, JSON otherwise.
inline Matrix read_matrix_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".csv") return matrix_from_csv(text);
  try {
    return matrix_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline json validation_to_json(const ValidationReport& r, std::size_t n) {
  json j{{"n", n},
         {"row_stochastic", r.row_stochastic},
         {"zero_diagonal", r.zero_diagonal},
         {"nonnegative", r.nonnegative},
         {"irreducible", r.irreducible},
         {"worst_row_sum_error", r.worst_row_sum_error},
         {"valid", r.ok()}};
  j["star_center"] = r.star_center ? json(*r.star_center + 1) : json(nullptr);
  return j;
}

// ---- self-weights --------------------------------------------------------

// Either a bare array or {"x": [...]}.
inline SelfWeights self_weights_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("x") : j;
  if (!arr.is_array()) throw FormatError("self-weights must be a JSON array");
  Vector x(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) x(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return SelfWeights(std::move(x));
}

inline json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline json nodes_to_json(const std::vector<std::size_t>& nodes) {
  json arr = json::array();
  for (std::size_t i : nodes) arr.push_back(i + 1);
  return arr;
}

// Header `s,x_1,...,x_n`; without recorded states the rows are x(0) and the
// final state.
inline std::string trajectory_to_csv(const IssueTrajectory& t) {
  const std::size_t n = t.states.front().size();
  std::string out = "s";
  for (std::size_t i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  out += '\n';
  const bool full = t.states.size() == t.issues + 1;
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const std::size_t s = full ? k : (k == 0 ? 0 : t.issues);
    out += std::to_string(s);
    for (std::size_t i = 0; i < n; ++i) out += ',' + format_double(t.states[k][i]);
    out += '\n';
  }
  return out;
}

// ---- variation specs -----------------------------------------------------

inline json spec_to_json(const VariationSpec& s) {
  json j;
  j["kind"] = std::string(to_string(s.kind));
  j["n"] = s.n;
  j["m"] = s.m ? json(*s.m) : json(nullptr);
  j["center_row"] = s.center_row;
  j["center_row_2"] = s.kind == VariationKind::LeadershipGroup ? json(s.center_row_2)
                                                               : json(nullptr);
  j["beta1"] = s.beta1 ? json(*s.beta1) : json(nullptr);
  j["beta2"] = s.beta2 ? json(*s.beta2) : json(nullptr);
  if (s.rescale_center_rows) j["rescale_center_rows"] = true;
  return j;
}

inline VariationSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("variation spec must be a JSON object");
  try {
    VariationSpec s;
    s.kind = parse_variation_kind(j.at("kind").get<std::string>());
    s.n = j.at("n").get<std::size_t>();
    if (j.contains("m") && !j["m"].is_null()) s.m = j["m"].get<std::size_t>();
    s.center_row = j.at("center_row").get<std::vector<double>>();
    if (j.contains("center_row_2") && !j["center_row_2"].is_null()) {
      s.center_row_2 = j["center_row_2"].get<std::vector<double>>();
    }
    if (j.contains("beta1") && !j["beta1"].is_null()) s.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2") && !j["beta2"].is_null()) s.beta2 = j["beta2"].get<double>();
    if (j.contains("rescale_center_rows")) {
      s.rescale_center_rows = j["rescale_center_rows"].get<bool>();
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("variation spec: ") + e.what());
  }
}

// ---- threshold reports ---------------------------------------------------

inline json verdict_to_json(const Verdict& v) {
  return json{{"holds", v.holds},
              {"tie", v.tie},
              {"lhs", v.lhs},
              {"critical", v.critical},
              {"relation", to_string(v.relation)},
              {"role", to_string(v.role)}};
}

inline json report_to_json(const ThresholdReport& r) {
  json verdicts = json::object();
  for (const auto& [id, v] : r.verdicts) verdicts[id] = verdict_to_json(v);
  return json{{"variation", spec_to_json(r.variation)},
              {"verdicts", std::move(verdicts)},
              {"gamma", vector_to_json(r.gamma)},
              {"predicted_leader", nodes_to_json(r.predicted_leader)}};
}

}  // namespace dfpower
