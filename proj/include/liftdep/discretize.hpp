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

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "liftdep/distribution.hpp"

// Conversion of continuous features to ordinal levels. Single features are
// cut at per-group marginal quantiles of the raw value; feature subsets are
// collapsed to one ordinal column by cutting the per-group quantiles of the
// Mahalanobis distance of each row to the origin, so that a subset scores
// "jointly low" or "jointly high" as a unit.

namespace liftdep {

/// Cut probabilities, strictly increasing in (0,1). Two cuts make tertiles,
/// four make quintiles.
struct QuantileSpec {
  std::vector<double> probs;

  static QuantileSpec tertiles() { return {{1.0 / 3.0, 2.0 / 3.0}}; }
  static QuantileSpec quintiles() { return {{0.2, 0.4, 0.6, 0.8}}; }

  std::size_t level_count() const { return probs.size() + 1; }

  void validate() const {
    if (probs.empty()) throw std::invalid_argument("QuantileSpec: no cut probabilities");
    double prev = 0.0;
    for (double p : probs) {
      if (!(p > prev && p < 1.0))
        throw std::invalid_argument("QuantileSpec: probabilities must be strictly increasing in (0,1)");
      prev = p;
    }
  }
};

/// Empirical-CDF cuts: cut j is the smallest observed value v with
/// #{values <= v}/n >= probs[j]. Deterministic under ties.
inline std::vector<double> quantile_cuts(std::span<const double> values, const QuantileSpec& spec) {
  spec.validate();
  if (values.empty()) throw EmptyInput("quantile_cuts: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> cuts;
  cuts.reserve(spec.probs.size());
  for (double p : spec.probs) {
    // smallest 1-based rank i with i/n >= p
    std::size_t lo = 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (static_cast<double>(mid) / static_cast<double>(n) >= p)
        hi = mid;
      else
        lo = mid + 1;
    }
    cuts.push_back(sorted[lo - 1]);
  }
  return cuts;
}

/// 0-based level of a value: level j iff cuts[j-1] < v <= cuts[j], with the
/// bottom level open below and the top level open above.
inline std::int32_t quantile_level(double v, std::span<const double> cuts) {
  return static_cast<std::int32_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

/// Centered sample covariance with divisor n-1.
inline Eigen::MatrixXd covariance(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.rows() < 2)
    throw InsufficientData("covariance: need at least 2 rows, got " + std::to_string(rows.rows()));
  const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix via its eigen
/// decomposition; eigenvalues at or below rel_tol times the largest magnitude
/// are treated as zero, so collinear columns degrade gracefully.
inline Eigen::MatrixXd pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                      double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) throw DimensionMismatch("pseudo_inverse: matrix is not square");
  if (m.rows() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double threshold = rel_tol * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > threshold) inv[i] = 1.0 / ev[i];
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// sqrt(x' pinv(cov) x); the Euclidean norm when cov is the identity.
inline double mahalanobis_to_zero(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::Ref<const Eigen::MatrixXd>& cov) {
  if (cov.rows() != cov.cols() || x.size() != cov.rows())
    throw DimensionMismatch("mahalanobis_to_zero: vector of size " + std::to_string(x.size()) +
                            " against " + std::to_string(cov.rows()) + "x" +
                            std::to_string(cov.cols()) + " covariance");
  const Eigen::MatrixXd pinv = pseudo_inverse(cov);
  const double q = x.dot(pinv * x);
  return std::sqrt(std::max(q, 0.0));
}

/// Maps each row to a group; group keys are sorted tuples of the grouping
/// columns' values. With no grouping columns there is a single global group.
struct GroupIndex {
  std::vector<std::int32_t> group_of_row;      // -1 when a grouping value is missing
  std::vector<std::vector<std::string>> keys;  // per group; empty tuple for the global group

  std::size_t size() const { return keys.size(); }

  static GroupIndex single(std::size_t n_rows) {
    GroupIndex g;
    g.group_of_row.assign(n_rows, 0);
    g.keys.push_back({});
    return g;
  }
};

inline GroupIndex build_groups(std::span<const CodedColumn* const> cols, std::size_t n_rows) {
  if (cols.empty()) return GroupIndex::single(n_rows);
  for (const CodedColumn* c : cols)
    if (c->size() != n_rows)
      throw DimensionMismatch("build_groups: column '" + c->name + "' row count mismatch");

  std::map<std::vector<std::int32_t>, std::int32_t> ids;
  std::vector<std::vector<std::int32_t>> tuples(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::vector<std::int32_t> tup(cols.size());
    bool complete = true;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      tup[c] = cols[c]->codes[r];
      if (tup[c] < 0) complete = false;
    }
    if (complete) ids.emplace(tup, 0);
    tuples[r] = std::move(tup);
  }

  GroupIndex g;
  std::int32_t next = 0;
  for (auto& [tup, id] : ids) {
    id = next++;
    std::vector<std::string> key(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      key[c] = cols[c]->levels[static_cast<std::size_t>(tup[c])];
    g.keys.push_back(std::move(key));
  }
  g.group_of_row.assign(n_rows, -1);
  for (std::size_t r = 0; r < n_rows; ++r) {
    bool complete = true;
    for (std::int32_t v : tuples[r]) complete &= v >= 0;
    if (complete) g.group_of_row[r] = ids[tuples[r]];
  }
  return g;
}

/// Everything needed to audit or re-apply one group's binning: its covariance
/// estimate and the cut values on the distance scale (raw-value scale for
/// single-feature subsets).
struct GroupModel {
  std::vector<std::string> key;
  Eigen::MatrixXd covariance;
  std::vector<double> cuts;
  std::int64_t rows = 0;  // complete rows the estimates were fitted on
};

struct DiscretizationModel {
  std::vector<std::string> subset;
  QuantileSpec spec;
  std::vector<GroupModel> groups;
};

struct JointDiscretization {
  CodedColumn column;
  DiscretizationModel model;
};

/// Collapses a continuous feature subset to a single ordinal column. Within
/// each group: estimate the covariance of the complete rows, measure each
/// row's Mahalanobis distance to the origin, and cut the distances at the
/// spec's quantiles. Single-feature subsets are cut on the raw value instead.
/// Rows with any missing value (or an unassigned group) get the missing code.
inline JointDiscretization discretize_joint(std::span<const NumericColumn* const> cols,
                                            const GroupIndex& groups, const QuantileSpec& spec) {
  spec.validate();
  if (cols.empty()) throw EmptyInput("discretize_joint: empty feature subset");
  const std::size_t n = groups.group_of_row.size();
  for (const NumericColumn* c : cols)
    if (c->size() != n)
      throw DimensionMismatch("discretize_joint: column '" + c->name + "' row count mismatch");
  const std::size_t k = cols.size();

  JointDiscretization out;
  out.model.spec = spec;
  for (const NumericColumn* c : cols) out.model.subset.push_back(c->name);

  std::vector<std::int32_t> labels(n, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < n; ++r) {
      if (groups.group_of_row[r] != static_cast<std::int32_t>(g)) continue;
      bool complete = true;
      for (const NumericColumn* c : cols) complete &= std::isfinite(c->values[r]);
      if (complete) members.push_back(r);
    }
    if (members.size() < 2) {
      std::string key;
      for (const auto& part : groups.keys[g]) key += (key.empty() ? "" : ",") + part;
      throw InsufficientData("discretize_joint: group (" + key + ") has " +
                             std::to_string(members.size()) + " complete rows, need >= 2");
    }

    Eigen::MatrixXd mat(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(k));
    for (std::size_t m = 0; m < members.size(); ++m)
      for (std::size_t c = 0; c < k; ++c)
        mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = cols[c]->values[members[m]];

    GroupModel gm;
    gm.key = groups.keys[g];
    gm.rows = static_cast<std::int64_t>(members.size());
    gm.covariance = covariance(mat);

    std::vector<double> scale(members.size());
    if (k == 1) {
      for (std::size_t m = 0; m < members.size(); ++m) scale[m] = mat(static_cast<Eigen::Index>(m), 0);
    } else {
      const Eigen::MatrixXd pinv = pseudo_inverse(gm.covariance);
      for (std::size_t m = 0; m < members.size(); ++m) {
        const Eigen::VectorXd x = mat.row(static_cast<Eigen::Index>(m));
        scale[m] = std::sqrt(std::max(x.dot(pinv * x), 0.0));
      }
    }
    gm.cuts = quantile_cuts(scale, spec);
    for (std::size_t m = 0; m < members.size(); ++m)
      labels[members[m]] = quantile_level(scale[m], gm.cuts);
    out.model.groups.push_back(std::move(gm));
  }

  // Ordinal level labels "1".."L", zero-padded so label order is level order.
  const std::size_t n_levels = spec.level_count();
  const std::size_t width = std::to_string(n_levels).size();
  std::string name = "(";
  for (std::size_t c = 0; c < k; ++c) name += (c ? "," : "") + cols[c]->name;
  name += ")";
  out.column.name = std::move(name);
  for (std::size_t l = 1; l <= n_levels; ++l) {
    std::string label = std::to_string(l);
    label.insert(0, width - label.size(), '0');
    out.column.levels.push_back(std::move(label));
  }
  out.column.codes = std::move(labels);
  return out;
}

inline JointDiscretization discretize_joint(std::initializer_list<const NumericColumn*> cols,
                                            const GroupIndex& groups, const QuantileSpec& spec) {
  return discretize_joint(std::span<const NumericColumn* const>(cols.begin(), cols.size()), groups,
                          spec);
}

}  // namespace liftdep
