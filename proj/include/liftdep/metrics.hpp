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
#include <cmath>
#include <span>
#include <vector>

#include "liftdep/distribution.hpp"

// Dependence measures over joint contingency tables, at three resolutions:
// a single normalized coefficient for the whole range (eta), one coefficient
// per window of the feature range, and one lift value per point of the joint
// range. Everything is computed in nats with the 0 log 0 = 0 convention; eta
// is invariant to the log base since numerator and denominator share it.

namespace liftdep {

namespace detail {

inline void require_support(const JointTable& t, const char* who) {
  if (t.total <= 0) throw EmptySupport(std::string(who) + ": empty table");
}

}  // namespace detail

/// Shannon entropy of a probability vector, in nats.
inline double entropy(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw InvalidDistribution("entropy: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidDistribution("entropy: probabilities sum to " + std::to_string(sum));
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return std::max(h, 0.0);
}

inline double entropy(const std::vector<double>& p) { return entropy(std::span<const double>(p)); }

/// H(Y|X) = -sum f(x,y) log f(y|x).
inline double conditional_entropy(const JointTable& t) {
  detail::require_support(t, "conditional_entropy");
  const double total = static_cast<double>(t.total);
  double ce = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const std::int64_t c = t.at(i, j);
      if (c == 0) continue;
      ce -= (static_cast<double>(c) / total) *
            std::log(static_cast<double>(c) / static_cast<double>(t.row_sums[i]));
    }
  }
  return std::max(ce, 0.0);
}

/// Per observed x level, the numerator and denominator contributions of that
/// level to the window coefficient: kl[i] = g(x) * KL(f(.|x) || h) and
/// cross[i] = g(x) * H(f(.|x), h). Summing kl over all levels gives the
/// mutual information; summing cross gives H(Y) up to rounding.
struct EtaTerms {
  std::vector<double> kl;
  std::vector<double> cross;
};

inline EtaTerms eta_terms(const JointTable& t) {
  detail::require_support(t, "eta_terms");
  const double total = static_cast<double>(t.total);
  EtaTerms e;
  e.kl.assign(t.rows(), 0.0);
  e.cross.assign(t.rows(), 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const std::int64_t c = t.at(i, j);
      if (c == 0) continue;
      const double f = static_cast<double>(c) / total;
      const double log_h = std::log(static_cast<double>(t.col_sums[j]) / total);
      // log f(y|x) - log h(y) rather than one log of the ratio: a level on
      // which Y is deterministic has log f(y|x) = log 1 = 0 exactly, so its
      // kl and cross terms are bitwise equal and such windows score exactly 1
      e.kl[i] += f * (std::log(static_cast<double>(c) / static_cast<double>(t.row_sums[i])) - log_h);
      e.cross[i] -= f * log_h;
    }
    e.kl[i] = std::max(e.kl[i], 0.0);  // KL >= 0; shave rounding dust
  }
  return e;
}

/// I(X;Y) = sum f(x,y) log( f(x,y) / (g(x) h(y)) ), in nats.
inline double mutual_information(const JointTable& t) {
  const EtaTerms e = eta_terms(t);
  double mi = 0.0;
  for (double v : e.kl) mi += v;
  return mi;
}

/// Normalized mutual information I(X;Y)/H(Y), defined as 1 when H(Y) = 0.
inline double eta_global(const JointTable& t) {
  detail::require_support(t, "eta_global");
  const double h = entropy(marginal_y(t));
  if (h == 0.0) return 1.0;
  return std::clamp(mutual_information(t) / h, 0.0, 1.0);
}

/// The lift function over the full observed range: L(x,y) = f(x,y)/(g(x)h(y)),
/// with 0 at cells where f(x,y) = 0.
struct LiftTable {
  JointTable base;
  std::vector<double> lift;  // row-major, same shape as base.counts

  double at(std::size_t i, std::size_t j) const { return lift[i * base.cols() + j]; }
};

inline LiftTable lift(const JointTable& t) {
  detail::require_support(t, "lift");
  LiftTable lt;
  lt.base = t;
  lt.lift.assign(t.rows() * t.cols(), 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const std::int64_t c = t.at(i, j);
      if (c == 0) continue;
      lt.lift[i * t.cols() + j] = static_cast<double>(c * t.total) /
                                  static_cast<double>(t.row_sums[i] * t.col_sums[j]);
    }
  }
  return lt;
}

/// A nonempty set of observed x levels of one table, held as strictly
/// increasing row indices.
struct Window {
  std::vector<std::size_t> members;
};

/// Dependence of Y on X restricted to the window: the ratio of the expected
/// KL divergence of f(.|x) from h to the expected cross entropy, both over
/// x in the window. Equals eta_global when the window is the full range;
/// defined as 1 when the denominator vanishes (Y degenerate on the window's
/// support, which can only happen when Y is constant on the whole table).
inline double eta_window(const JointTable& t, const Window& w) {
  detail::require_support(t, "eta_window");
  if (w.members.empty())
    throw ZeroProbabilityWindow("eta_window: empty window has probability zero");
  for (std::size_t m = 0; m < w.members.size(); ++m) {
    if (w.members[m] >= t.rows()) throw std::out_of_range("eta_window: member index out of range");
    if (m > 0 && w.members[m] <= w.members[m - 1])
      throw std::invalid_argument("eta_window: members must be strictly increasing");
  }
  const EtaTerms e = eta_terms(t);
  double num = 0.0, den = 0.0;
  for (std::size_t i : w.members) {
    num += e.kl[i];
    den += e.cross[i];
  }
  if (den == 0.0) return 1.0;
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace liftdep
