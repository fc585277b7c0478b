// Copyright 2026 The liftdep authors
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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "liftdep/metrics.hpp"
#include "liftdep/search.hpp"
#include "liftdep/version.hpp"

namespace liftdep {

enum class ColumnKind { categorical, continuous, group, target, ignore };

inline const char* to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::group: return "group";
    case ColumnKind::target: return "target";
    case ColumnKind::ignore: return "ignore";
  }
  return "?";
}

inline ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "continuous") return ColumnKind::continuous;
  if (s == "group") return ColumnKind::group;
  if (s == "target") return ColumnKind::target;
  if (s == "ignore") return ColumnKind::ignore;
  throw SchemaMismatch("unknown column kind '" + s + "'");
}

struct SchemaColumn {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
};

/// Column names and kinds for a delimited text file. Exactly one column must
/// be the target; rows whose target value is missing are rejected at
/// ingestion.
struct DatasetSchema {
  std::vector<SchemaColumn> columns;
  std::string missing_marker = "?";
  char delimiter = ',';
  bool header = true;

  void validate() const {
    if (columns.empty()) throw SchemaMismatch("schema has no columns");
    std::size_t targets = 0;
    for (const auto& c : columns) {
      if (c.name.empty()) throw SchemaMismatch("schema has an unnamed column");
      if (c.kind == ColumnKind::target) ++targets;
    }
    if (targets != 1)
      throw SchemaMismatch("schema must declare exactly one target column, found " +
                           std::to_string(targets));
  }
};

inline DatasetSchema schema_from_json(const nlohmann::json& j) {
  DatasetSchema s;
  for (const auto& c : j.at("columns"))
    s.columns.push_back({c.at("name").get<std::string>(),
                         column_kind_from_string(c.at("kind").get<std::string>())});
  s.missing_marker = j.value("missing", "?");
  const std::string delim = j.value("delimiter", ",");
  if (delim.size() != 1) throw SchemaMismatch("delimiter must be a single character");
  s.delimiter = delim[0];
  s.header = j.value("header", true);
  s.validate();
  return s;
}

inline DatasetSchema load_schema(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open schema file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch("schema file '" + path + "': " + e.what());
  }
  return schema_from_json(j);
}

/// A loaded, typed row set. Column stores are immutable once loaded and can
/// be shared freely across search workers.
struct Dataset {
  DatasetSchema schema;
  std::vector<CodedColumn> categorical;
  std::vector<NumericColumn> numeric;
  std::vector<CodedColumn> group_columns;
  CodedColumn target;
  std::size_t rows = 0;
  std::size_t dropped_missing_target = 0;

  const CodedColumn* find_categorical(const std::string& name) const {
    for (const auto& c : categorical)
      if (c.name == name) return &c;
    return nullptr;
  }
  const NumericColumn* find_numeric(const std::string& name) const {
    for (const auto& c : numeric)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

}  // namespace detail

/// Loads a delimited text file against a resolved schema. "?" (or the
/// configured marker) becomes the missing value; a continuous field that is
/// neither numeric nor the marker is an error, not a silent missing.
inline Dataset load_csv(const std::string& path, DatasetSchema schema) {
  schema.validate();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open dataset file '" + path + "'");
  std::stringstream buffer;
  buffer << f.rdbuf();
  const std::string content = buffer.str();

  Dataset ds;
  const std::size_t n_cols = schema.columns.size();

  std::vector<std::vector<std::string>> raw_categorical;  // per categorical/group/target column
  std::vector<std::size_t> cat_slot(n_cols, SIZE_MAX), num_slot(n_cols, SIZE_MAX);
  std::size_t n_cat = 0, n_num = 0;
  for (std::size_t c = 0; c < n_cols; ++c) {
    switch (schema.columns[c].kind) {
      case ColumnKind::categorical:
      case ColumnKind::group:
      case ColumnKind::target:
        cat_slot[c] = n_cat++;
        break;
      case ColumnKind::continuous:
        num_slot[c] = n_num++;
        break;
      case ColumnKind::ignore:
        break;
    }
  }
  raw_categorical.resize(n_cat);
  std::vector<std::vector<double>> raw_numeric(n_num);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_pending = schema.header;
  std::size_t target_col = 0;
  for (std::size_t c = 0; c < n_cols; ++c)
    if (schema.columns[c].kind == ColumnKind::target) target_col = c;

  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos >= content.size()) break;  // trailing newline
      throw MalformedRow("'" + path + "' line " + std::to_string(line_no) + ": empty line");
    }

    const auto fields = detail::split_fields(line, schema.delimiter);
    if (fields.size() != n_cols)
      throw MalformedRow("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                         std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()));

    if (header_pending) {
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (std::string_view(schema.columns[c].name) != fields[c])
          throw SchemaMismatch("'" + path + "' line " + std::to_string(line_no) + ": header field " +
                               std::to_string(c + 1) + " is '" + std::string(fields[c]) +
                               "', schema says '" + schema.columns[c].name + "'");
      }
      header_pending = false;
      continue;
    }

    if (fields[target_col] == schema.missing_marker) {
      ++ds.dropped_missing_target;
      continue;
    }

    for (std::size_t c = 0; c < n_cols; ++c) {
      if (cat_slot[c] != SIZE_MAX) {
        raw_categorical[cat_slot[c]].emplace_back(fields[c]);
      } else if (num_slot[c] != SIZE_MAX) {
        if (fields[c] == schema.missing_marker) {
          raw_numeric[num_slot[c]].push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
          double v = 0.0;
          const char* first = fields[c].data();
          const char* last = first + fields[c].size();
          auto [ptr, ec] = std::from_chars(first, last, v);
          if (ec != std::errc() || ptr != last)
            throw MalformedRow("'" + path + "' line " + std::to_string(line_no) + ": column '" +
                               schema.columns[c].name + "': cannot parse '" +
                               std::string(fields[c]) + "' as a number");
          raw_numeric[num_slot[c]].push_back(v);
        }
      }
    }
    ++ds.rows;
  }

  if (line_no == 0)
    throw MalformedRow("'" + path + "' line 1: file is empty");
  if (header_pending)
    throw MalformedRow("'" + path + "' line 1: header expected but the file has no rows");
  if (ds.rows == 0)
    throw MalformedRow("'" + path + "' line " + std::to_string(line_no) + ": no data rows");

  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto& sc = schema.columns[c];
    if (cat_slot[c] != SIZE_MAX) {
      CodedColumn col = make_coded_column(sc.name, raw_categorical[cat_slot[c]], schema.missing_marker);
      if (sc.kind == ColumnKind::target)
        ds.target = std::move(col);
      else if (sc.kind == ColumnKind::group)
        ds.group_columns.push_back(std::move(col));
      else
        ds.categorical.push_back(std::move(col));
    } else if (num_slot[c] != SIZE_MAX) {
      ds.numeric.push_back({sc.name, std::move(raw_numeric[num_slot[c]])});
    }
  }
  ds.schema = std::move(schema);
  return ds;
}

namespace detail {

inline std::string format_sig3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.3g", v);
  std::string s(buf);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string format_frac3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string format_count(std::int64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  const std::size_t n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

inline std::string tuple_label(const std::vector<std::string>& parts) {
  if (parts.size() == 1) return parts.front();
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  out += ")";
  return out;
}

}  // namespace detail

/// Renders lift values with observed counts in parentheses, plus the row and
/// column relative frequencies, in a fixed-width text grid.
inline std::string render_lift_table(const LiftTable& lt) {
  const JointTable& t = lt.base;
  const std::size_t nx = t.rows(), ny = t.cols();

  std::vector<std::vector<std::string>> grid(nx + 2, std::vector<std::string>(ny + 2));
  grid[0][0] = detail::tuple_label(t.x_names) + " \\ " + t.y_name;
  for (std::size_t j = 0; j < ny; ++j) grid[0][j + 1] = t.y_label(j);
  grid[0][ny + 1] = "Rel. freq.";
  const double total = static_cast<double>(t.total);
  for (std::size_t i = 0; i < nx; ++i) {
    grid[i + 1][0] = detail::tuple_label(t.x_label(i));
    for (std::size_t j = 0; j < ny; ++j)
      grid[i + 1][j + 1] =
          detail::format_sig3(lt.at(i, j)) + " (" + detail::format_count(t.at(i, j)) + ")";
    grid[i + 1][ny + 1] = detail::format_frac3(static_cast<double>(t.row_sums[i]) / total);
  }
  grid[nx + 1][0] = "Rel. freq.";
  for (std::size_t j = 0; j < ny; ++j)
    grid[nx + 1][j + 1] = detail::format_frac3(static_cast<double>(t.col_sums[j]) / total);
  grid[nx + 1][ny + 1] = detail::format_frac3(1.0);

  std::vector<std::size_t> widths(ny + 2, 0);
  for (const auto& row : grid)
    for (std::size_t j = 0; j < row.size(); ++j) widths[j] = std::max(widths[j], row[j].size());

  std::string out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t j = 0; j < grid[r].size(); ++j) {
      if (j) out += "  ";
      out += grid[r][j];
      out.append(widths[j] - grid[r][j].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (r == 0) {
      std::size_t rule = 0;
      for (std::size_t j = 0; j < widths.size(); ++j) rule += widths[j] + (j ? 2 : 0);
      out.append(rule, '-');
      out += '\n';
    }
  }
  return out;
}

inline nlohmann::json lift_table_to_json(const LiftTable& lt) {
  const JointTable& t = lt.base;
  nlohmann::json j;
  j["x_names"] = t.x_names;
  j["y_name"] = t.y_name;
  nlohmann::json xl = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) xl.push_back(t.x_label(i));
  j["x_levels"] = std::move(xl);
  nlohmann::json yl = nlohmann::json::array();
  for (std::size_t jj = 0; jj < t.cols(); ++jj) yl.push_back(t.y_label(jj));
  j["y_levels"] = std::move(yl);
  nlohmann::json counts = nlohmann::json::array(), lifts = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    nlohmann::json crow = nlohmann::json::array(), lrow = nlohmann::json::array();
    for (std::size_t jj = 0; jj < t.cols(); ++jj) {
      crow.push_back(t.at(i, jj));
      lrow.push_back(lt.at(i, jj));
    }
    counts.push_back(std::move(crow));
    lifts.push_back(std::move(lrow));
  }
  j["counts"] = std::move(counts);
  j["lift"] = std::move(lifts);
  j["x_marginal"] = marginal_x(t);
  j["y_marginal"] = marginal_y(t);
  j["total"] = t.total;
  return j;
}

inline nlohmann::json model_to_json(const DiscretizationModel& m) {
  nlohmann::json j;
  j["subset"] = m.subset;
  j["quantiles"] = m.spec.probs;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : m.groups) {
    nlohmann::json gj;
    gj["key"] = g.key;
    gj["rows"] = g.rows;
    gj["cuts"] = g.cuts;
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.covariance.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < g.covariance.cols(); ++c) row.push_back(g.covariance(r, c));
      cov.push_back(std::move(row));
    }
    gj["covariance"] = std::move(cov);
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j;
}

inline nlohmann::json candidate_to_json(const Candidate& c, std::size_t rank) {
  nlohmann::json j;
  j["rank"] = rank;
  j["features"] = c.feature_names;
  switch (c.kind) {
    case LocusKind::whole_range:
      j["locus"] = {{"kind", "whole_range"}};
      break;
    case LocusKind::window:
      j["locus"] = {{"kind", "window"}, {"members", c.window}};
      break;
    case LocusKind::profile:
      j["locus"] = {{"kind", "profile"}, {"values", c.profile}};
      break;
  }
  j["score"] = c.score;
  j["support_count"] = c.support_count;
  j["table_total"] = c.table_total;
  if (c.model) j["discretization"] = model_to_json(*c.model);
  return j;
}

/// Assembles the machine-readable result of one run. Re-running with the
/// same data and config reproduces the document byte for byte.
inline nlohmann::json result_document(const std::string& algorithm, const nlohmann::json& config,
                                      const nlohmann::json& dataset_info,
                                      const SelectionResult& result,
                                      const LiftTable* top_table) {
  nlohmann::json doc;
  doc["tool"] = {{"name", "liftdep"}, {"version", kVersion}};
  doc["algorithm"] = algorithm;
  doc["config"] = config;
  doc["dataset"] = dataset_info;
  nlohmann::json ranking = nlohmann::json::array();
  for (std::size_t i = 0; i < result.ranked.size(); ++i)
    ranking.push_back(candidate_to_json(result.ranked[i], i + 1));
  doc["ranking"] = std::move(ranking);
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : result.skipped)
    skipped.push_back({{"features", s.feature_names}, {"reason", s.reason}});
  doc["skipped"] = std::move(skipped);
  doc["top_lift_table"] = top_table ? lift_table_to_json(*top_table) : nlohmann::json(nullptr);
  return doc;
}

/// Canonical form: sorted keys, two-space indent, shortest round-trip float
/// rendering, newline-terminated.
inline std::string canonical_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

inline void write_results(const nlohmann::json& doc, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << canonical_json(doc);
  f.flush();
  if (!f) throw IoError("failed writing results to '" + path + "'");
}

inline nlohmann::json read_results(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open results file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("results file '" + path + "': " + e.what());
  }
  return j;
}

}  // namespace liftdep
