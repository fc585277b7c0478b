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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftdep/errors.hpp"

namespace liftdep {

/// A categorical column: one integer code per row into a lexicographically
/// sorted label dictionary. Code -1 marks a missing value, so code order
/// equals label order.
struct CodedColumn {
  std::string name;
  std::vector<std::string> levels;   // code -> label
  std::vector<std::int32_t> codes;   // one per row, -1 = missing

  std::size_t size() const { return codes.size(); }
  const std::string& label(std::int32_t code) const { return levels.at(static_cast<std::size_t>(code)); }
};

/// A continuous column; NaN marks a missing value.
struct NumericColumn {
  std::string name;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Builds a CodedColumn from raw string cells. The dictionary contains the
/// distinct non-missing values in sorted order.
inline CodedColumn make_coded_column(std::string name, std::span<const std::string> raw,
                                     const std::string& missing_marker = "?") {
  CodedColumn col;
  col.name = std::move(name);
  col.levels.assign(raw.begin(), raw.end());
  std::erase(col.levels, missing_marker);
  std::sort(col.levels.begin(), col.levels.end());
  col.levels.erase(std::unique(col.levels.begin(), col.levels.end()), col.levels.end());
  col.codes.reserve(raw.size());
  for (const std::string& v : raw) {
    if (v == missing_marker) {
      col.codes.push_back(-1);
    } else {
      auto it = std::lower_bound(col.levels.begin(), col.levels.end(), v);
      col.codes.push_back(static_cast<std::int32_t>(it - col.levels.begin()));
    }
  }
  return col;
}

inline CodedColumn make_coded_column(std::string name, const std::vector<std::string>& raw,
                                     const std::string& missing_marker = "?") {
  return make_coded_column(std::move(name), std::span<const std::string>(raw), missing_marker);
}

/// Empirical joint contingency table of a feature tuple X against the target
/// Y, tallied over complete cases only. Levels are observed levels: every row
/// and column has a positive sum, and x levels are sorted lexicographically
/// on their value tuples. Immutable after construction; safe to share across
/// threads.
struct JointTable {
  std::vector<std::string> x_names;                 // one per feature column
  std::string y_name;
  std::vector<std::vector<std::string>> x_dicts;    // per feature: code -> label
  std::vector<std::string> y_dict;
  std::vector<std::vector<std::int32_t>> x_levels;  // observed tuples, lex ascending
  std::vector<std::int32_t> y_levels;               // observed codes, ascending
  std::vector<std::int64_t> counts;                 // row-major rows() x cols()
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t total = 0;

  std::size_t rows() const { return x_levels.size(); }
  std::size_t cols() const { return y_levels.size(); }
  std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * cols() + j]; }

  std::vector<std::string> x_label(std::size_t i) const {
    std::vector<std::string> out;
    out.reserve(x_levels[i].size());
    for (std::size_t c = 0; c < x_levels[i].size(); ++c)
      out.push_back(x_dicts[c][static_cast<std::size_t>(x_levels[i][c])]);
    return out;
  }
  const std::string& y_label(std::size_t j) const {
    return y_dict[static_cast<std::size_t>(y_levels[j])];
  }
};

namespace detail {

inline void finalize_table(JointTable& t, std::vector<std::vector<std::int32_t>> levels,
                           std::vector<std::vector<std::int64_t>> level_counts,
                           std::size_t n_y_total) {
  // Compress the target axis to observed values.
  std::vector<std::int64_t> y_totals(n_y_total, 0);
  for (const auto& row : level_counts)
    for (std::size_t j = 0; j < n_y_total; ++j) y_totals[j] += row[j];
  std::vector<std::size_t> y_keep;
  for (std::size_t j = 0; j < n_y_total; ++j)
    if (y_totals[j] > 0) y_keep.push_back(j);

  t.x_levels = std::move(levels);
  t.y_levels.reserve(y_keep.size());
  for (std::size_t j : y_keep) t.y_levels.push_back(static_cast<std::int32_t>(j));

  const std::size_t nx = t.x_levels.size();
  const std::size_t ny = y_keep.size();
  t.counts.assign(nx * ny, 0);
  t.row_sums.assign(nx, 0);
  t.col_sums.assign(ny, 0);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::int64_t c = level_counts[i][y_keep[j]];
      t.counts[i * ny + j] = c;
      t.row_sums[i] += c;
      t.col_sums[j] += c;
      t.total += c;
    }
  }
}

}  // namespace detail

/// Tallies the joint table of `features` against `target` over the rows that
/// are complete on all of them; the total therefore varies from one subset to
/// another. Throws EmptySupport when no complete case exists.
inline JointTable build_table(std::span<const CodedColumn* const> features, const CodedColumn& target) {
  if (features.empty()) throw EmptyInput("build_table: empty feature subset");
  const std::size_t n = target.size();
  for (const CodedColumn* f : features)
    if (f->size() != n)
      throw DimensionMismatch("build_table: column '" + f->name + "' has " +
                              std::to_string(f->size()) + " rows, target has " + std::to_string(n));

  const std::size_t k = features.size();
  const std::size_t n_y = target.levels.size();

  JointTable t;
  t.y_name = target.name;
  t.y_dict = target.levels;
  t.x_names.reserve(k);
  t.x_dicts.reserve(k);
  for (const CodedColumn* f : features) {
    t.x_names.push_back(f->name);
    t.x_dicts.push_back(f->levels);
  }

  // Mixed-radix packing of code tuples, first feature most significant, so
  // numeric key order equals lexicographic tuple order. Falls back to an
  // ordered map of tuples when the key space exceeds 64 bits.
  bool packable = true;
  std::uint64_t span = 1;
  std::vector<std::uint64_t> radix(k);
  for (std::size_t c = 0; c < k; ++c) {
    radix[c] = std::max<std::uint64_t>(features[c]->levels.size(), 1);
    if (span > std::numeric_limits<std::uint64_t>::max() / radix[c]) {
      packable = false;
      break;
    }
    span *= radix[c];
  }

  std::vector<std::vector<std::int32_t>> levels;
  std::vector<std::vector<std::int64_t>> level_counts;

  if (packable) {
    constexpr std::uint64_t kDenseLimit = 1u << 16;
    std::vector<std::int64_t> cell_counts;  // key-major, dense over the packed key space
    std::unordered_map<std::uint64_t, std::vector<std::int64_t>> sparse;
    const bool dense = span <= kDenseLimit && span * std::max<std::uint64_t>(n_y, 1) <= kDenseLimit;
    if (dense) cell_counts.assign(span * n_y, 0);

    for (std::size_t r = 0; r < n; ++r) {
      const std::int32_t yc = target.codes[r];
      if (yc < 0) continue;
      std::uint64_t key = 0;
      bool complete = true;
      for (std::size_t c = 0; c < k; ++c) {
        const std::int32_t xc = features[c]->codes[r];
        if (xc < 0) {
          complete = false;
          break;
        }
        key = key * radix[c] + static_cast<std::uint64_t>(xc);
      }
      if (!complete) continue;
      if (dense) {
        ++cell_counts[key * n_y + static_cast<std::uint64_t>(yc)];
      } else {
        auto [it, inserted] = sparse.try_emplace(key);
        if (inserted) it->second.assign(n_y, 0);
        ++it->second[static_cast<std::size_t>(yc)];
      }
    }

    std::vector<std::uint64_t> keys;
    if (dense) {
      for (std::uint64_t key = 0; key < span; ++key) {
        bool any = false;
        for (std::size_t j = 0; j < n_y; ++j) any |= cell_counts[key * n_y + j] > 0;
        if (any) keys.push_back(key);
      }
    } else {
      keys.reserve(sparse.size());
      for (const auto& [key, _] : sparse) keys.push_back(key);
      std::sort(keys.begin(), keys.end());
    }

    levels.reserve(keys.size());
    level_counts.reserve(keys.size());
    for (std::uint64_t key : keys) {
      std::vector<std::int32_t> tuple(k);
      std::uint64_t rest = key;
      for (std::size_t c = k; c-- > 0;) {
        tuple[c] = static_cast<std::int32_t>(rest % radix[c]);
        rest /= radix[c];
      }
      levels.push_back(std::move(tuple));
      if (dense) {
        level_counts.emplace_back(cell_counts.begin() + static_cast<std::ptrdiff_t>(key * n_y),
                                  cell_counts.begin() + static_cast<std::ptrdiff_t>((key + 1) * n_y));
      } else {
        level_counts.push_back(std::move(sparse[key]));
      }
    }
  } else {
    std::map<std::vector<std::int32_t>, std::vector<std::int64_t>> cells;
    std::vector<std::int32_t> tuple(k);
    for (std::size_t r = 0; r < n; ++r) {
      const std::int32_t yc = target.codes[r];
      if (yc < 0) continue;
      bool complete = true;
      for (std::size_t c = 0; c < k; ++c) {
        tuple[c] = features[c]->codes[r];
        if (tuple[c] < 0) {
          complete = false;
          break;
        }
      }
      if (!complete) continue;
      auto [it, inserted] = cells.try_emplace(tuple);
      if (inserted) it->second.assign(n_y, 0);
      ++it->second[static_cast<std::size_t>(yc)];
    }
    for (auto& [tup, cnts] : cells) {
      levels.push_back(tup);
      level_counts.push_back(std::move(cnts));
    }
  }

  detail::finalize_table(t, std::move(levels), std::move(level_counts), n_y);
  if (t.total == 0)
    throw EmptySupport("build_table: no complete case for the selected columns");
  return t;
}

inline JointTable build_table(std::initializer_list<const CodedColumn*> features, const CodedColumn& target) {
  return build_table(std::span<const CodedColumn* const>(features.begin(), features.size()), target);
}

/// Assembles a table directly from a counts matrix; used for fixtures and for
/// re-materializing serialized tables. Rows/columns whose sum is zero are
/// dropped, matching the observed-levels invariant.
inline JointTable make_table(const std::vector<std::vector<std::int64_t>>& counts,
                             const std::vector<std::vector<std::string>>& x_labels,
                             const std::vector<std::string>& y_labels,
                             std::vector<std::string> x_names = {}, std::string y_name = "Y") {
  if (counts.empty() || counts.size() != x_labels.size())
    throw DimensionMismatch("make_table: counts and x_labels disagree");
  const std::size_t arity = x_labels.front().size();
  if (arity == 0) throw EmptyInput("make_table: empty x tuples");
  if (x_names.empty()) {
    for (std::size_t c = 0; c < arity; ++c) x_names.push_back("X" + std::to_string(c + 1));
  }
  if (x_names.size() != arity) throw DimensionMismatch("make_table: x_names arity mismatch");

  JointTable t;
  t.x_names = std::move(x_names);
  t.y_name = std::move(y_name);

  // Per-position dictionaries over the labels that actually appear.
  t.x_dicts.assign(arity, {});
  for (const auto& tup : x_labels) {
    if (tup.size() != arity) throw DimensionMismatch("make_table: ragged x tuples");
    for (std::size_t c = 0; c < arity; ++c) t.x_dicts[c].push_back(tup[c]);
  }
  for (auto& dict : t.x_dicts) {
    std::sort(dict.begin(), dict.end());
    dict.erase(std::unique(dict.begin(), dict.end()), dict.end());
  }
  t.y_dict = y_labels;
  std::sort(t.y_dict.begin(), t.y_dict.end());
  if (std::adjacent_find(t.y_dict.begin(), t.y_dict.end()) != t.y_dict.end())
    throw SchemaMismatch("make_table: duplicate y labels");

  std::map<std::vector<std::int32_t>, std::vector<std::int64_t>> cells;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != y_labels.size())
      throw DimensionMismatch("make_table: counts row width disagrees with y labels");
    std::vector<std::int32_t> tup(arity);
    for (std::size_t c = 0; c < arity; ++c) {
      auto it = std::lower_bound(t.x_dicts[c].begin(), t.x_dicts[c].end(), x_labels[i][c]);
      tup[c] = static_cast<std::int32_t>(it - t.x_dicts[c].begin());
    }
    auto [it, inserted] = cells.try_emplace(std::move(tup));
    if (!inserted) throw SchemaMismatch("make_table: duplicate x tuple");
    it->second.assign(t.y_dict.size(), 0);
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] < 0) throw InvalidDistribution("make_table: negative count");
      auto yit = std::lower_bound(t.y_dict.begin(), t.y_dict.end(), y_labels[j]);
      it->second[static_cast<std::size_t>(yit - t.y_dict.begin())] = counts[i][j];
    }
  }

  std::vector<std::vector<std::int32_t>> levels;
  std::vector<std::vector<std::int64_t>> level_counts;
  for (auto& [tup, cnts] : cells) {
    std::int64_t s = 0;
    for (std::int64_t c : cnts) s += c;
    if (s == 0) continue;  // unobserved level
    levels.push_back(tup);
    level_counts.push_back(std::move(cnts));
  }
  detail::finalize_table(t, std::move(levels), std::move(level_counts), t.y_dict.size());
  if (t.total == 0) throw EmptySupport("make_table: all counts are zero");
  return t;
}

/// g(x): relative frequency of each observed x level.
inline std::vector<double> marginal_x(const JointTable& t) {
  if (t.total <= 0) throw EmptySupport("marginal_x: empty table");
  std::vector<double> g(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i)
    g[i] = static_cast<double>(t.row_sums[i]) / static_cast<double>(t.total);
  return g;
}

/// h(y): relative frequency of each observed y value.
inline std::vector<double> marginal_y(const JointTable& t) {
  if (t.total <= 0) throw EmptySupport("marginal_y: empty table");
  std::vector<double> h(t.cols());
  for (std::size_t j = 0; j < t.cols(); ++j)
    h[j] = static_cast<double>(t.col_sums[j]) / static_cast<double>(t.total);
  return h;
}

/// f(y | x) for one observed x level.
inline std::vector<double> conditional_y_given_x(const JointTable& t, std::size_t x_index) {
  if (t.total <= 0) throw EmptySupport("conditional_y_given_x: empty table");
  if (x_index >= t.rows()) throw std::out_of_range("conditional_y_given_x: x index out of range");
  const std::int64_t rs = t.row_sums[x_index];
  if (rs == 0) throw ZeroConditioningEvent("conditional_y_given_x: conditioning event has zero mass");
  std::vector<double> f(t.cols());
  for (std::size_t j = 0; j < t.cols(); ++j)
    f[j] = static_cast<double>(t.at(x_index, j)) / static_cast<double>(rs);
  return f;
}

}  // namespace liftdep
