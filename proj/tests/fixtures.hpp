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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "liftdep/distribution.hpp"

// Reference contingency tables with published dependence coefficients, used
// as ground truth across the suites. The expected values asserted in the
// tests were recomputed independently with the direct-summation oracles at
// the bottom of this header.

namespace fixtures {

using Counts = std::vector<std::vector<std::int64_t>>;

inline std::vector<std::vector<std::string>> tertile_rows() {
  return {{"Tertile 1"}, {"Tertile 2"}, {"Tertile 3"}};
}
inline std::vector<std::string> tertile_cols() { return {"Tertile 1", "Tertile 2", "Tertile 3"}; }

// Joint performance on mathematics+physics (distance tertiles) against the
// first-year grade tertile; 79 statistics students. Known coefficients:
// eta = 0.0387, L(Tertile 1, Tertile 2) = 1.46.
inline const Counts& math_physics_counts() {
  static const Counts c = {{9, 13, 5}, {9, 8, 9}, {9, 5, 12}};
  return c;
}

// Joint performance on five subjects against the grade tertile; 8353
// students. Known coefficients: eta = 0.0354, L(T3, T3) = 1.49.
inline const Counts& five_subject_counts() {
  static const Counts c = {{1277, 1018, 533}, {921, 951, 871}, {630, 775, 1377}};
  return c;
}

// Mathematics performance tertile against the grade tertile; 8353 students.
// Known coefficients: eta({Tertile 3}) = 0.0575, L(T3, T3) = 1.51.
inline const Counts& math_counts() {
  static const Counts c = {{1398, 1111, 667}, {843, 972, 847}, {587, 661, 1267}};
  return c;
}

// Covertype: quintiles of the joint Mahalanobis score of (elevation,
// distance to hydrology, distance to fire points) against the 7 cover
// types; 581,012 terrains. Known coefficients: eta = 0.307,
// eta({Quintile 5}) = 0.38, L(Quintile 1, type 3) = 4.94.
inline const Counts& covertype_counts() {
  static const Counts c = {{3244, 54473, 35344, 2747, 3385, 17010, 0},
                           {18816, 90872, 410, 0, 5663, 357, 84},
                           {40195, 75562, 0, 0, 445, 0, 0},
                           {70427, 45314, 0, 0, 0, 0, 461},
                           {79158, 17080, 0, 0, 0, 0, 19965}};
  return c;
}

inline liftdep::JointTable math_physics_table() {
  return liftdep::make_table(math_physics_counts(), tertile_rows(), tertile_cols(),
                             {"(Mathematics,Physics)"}, "Grade");
}

inline liftdep::JointTable five_subject_table() {
  return liftdep::make_table(five_subject_counts(), tertile_rows(), tertile_cols(),
                             {"(M,P,C,B,Po)"}, "Grade");
}

inline liftdep::JointTable math_table() {
  return liftdep::make_table(math_counts(), tertile_rows(), tertile_cols(), {"Mathematics"},
                             "Grade");
}

inline liftdep::JointTable covertype_table() {
  return liftdep::make_table(
      covertype_counts(),
      {{"Quintile 1"}, {"Quintile 2"}, {"Quintile 3"}, {"Quintile 4"}, {"Quintile 5"}},
      {"1", "2", "3", "4", "5", "6", "7"}, {"(E,HH,HF)"}, "Cover type");
}

// ---------------------------------------------------------------------------
// Direct-summation oracles, deliberately independent of the library: plain
// loops over the counts matrix using the textbook probability formulas.

inline double oracle_entropy_y(const Counts& counts) {
  std::int64_t total = 0;
  std::vector<std::int64_t> col(counts[0].size(), 0);
  for (const auto& row : counts)
    for (std::size_t j = 0; j < row.size(); ++j) {
      col[j] += row[j];
      total += row[j];
    }
  double h = 0.0;
  for (std::int64_t c : col)
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(total);
      h -= p * std::log(p);
    }
  return h;
}

inline double oracle_conditional_entropy(const Counts& counts) {
  std::int64_t total = 0;
  std::vector<std::int64_t> row_sum(counts.size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::int64_t c : counts[i]) {
      row_sum[i] += c;
      total += c;
    }
  double ce = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::int64_t c : counts[i])
      if (c > 0)
        ce -= (static_cast<double>(c) / static_cast<double>(total)) *
              std::log(static_cast<double>(c) / static_cast<double>(row_sum[i]));
  return ce;
}

inline double oracle_mutual_information(const Counts& counts) {
  return oracle_entropy_y(counts) - oracle_conditional_entropy(counts);
}

inline double oracle_eta_window(const Counts& counts, const std::vector<std::size_t>& members) {
  std::int64_t total = 0;
  std::vector<std::int64_t> row_sum(counts.size(), 0), col_sum(counts[0].size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      row_sum[i] += counts[i][j];
      col_sum[j] += counts[i][j];
      total += counts[i][j];
    }
  double num = 0.0, den = 0.0;
  for (std::size_t i : members) {
    const double g = static_cast<double>(row_sum[i]) / static_cast<double>(total);
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] == 0) continue;
      const double fyx = static_cast<double>(counts[i][j]) / static_cast<double>(row_sum[i]);
      const double h = static_cast<double>(col_sum[j]) / static_cast<double>(total);
      num += g * fyx * std::log(fyx / h);
      den -= g * fyx * std::log(h);
    }
  }
  if (den == 0.0) return 1.0;
  return num / den;
}

}  // namespace fixtures
