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

#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "liftdep/discretize.hpp"
#include "liftdep/metrics.hpp"

// Exhaustive multi-resolution feature selection. The outer search space is
// the lattice of nonempty feature subsets up to max_k; inside each subset,
// select_window ranks subsets of the observed value range and select_profile
// ranks single value tuples. Scoring is a pure map over candidates, so the
// evaluation is parallelized over subsets and merged with a total order that
// makes the ranking independent of the worker count.

namespace liftdep {

enum class SearchMode { categorical, joint_discretized };
enum class LocusKind { whole_range, window, profile };

struct SearchConfig {
  std::size_t max_k = 0;             // maximum subset cardinality; 0 = number of features
  double min_support = 0.0;          // windows keep mass >= min_support; profiles require >
  std::size_t max_window_cells = 0;  // cap on window size; 0 = unlimited
  SearchMode mode = SearchMode::categorical;
  QuantileSpec quantiles = QuantileSpec::tertiles();  // joint-discretized mode
  std::optional<std::string> target_value;            // select_profile only
  std::size_t top_n = 10;
  unsigned workers = 1;
};

/// A scored point of the search space: a feature subset plus the locus the
/// score was measured on (the whole range, a window of it, or a single value
/// tuple). support_count is the number of rows in the locus; table_total the
/// complete-case count of the subset's table.
struct Candidate {
  std::vector<std::size_t> features;  // indices into the searched feature list, ascending
  std::vector<std::string> feature_names;
  LocusKind kind = LocusKind::whole_range;
  std::vector<std::vector<std::string>> window;  // label tuples when kind == window
  std::vector<std::string> profile;              // label tuple when kind == profile
  double score = 0.0;
  std::int64_t support_count = 0;
  std::int64_t table_total = 0;
  std::optional<DiscretizationModel> model;  // joint-discretized mode only
};

/// Ranking order: score descending, then fewer features, then smaller
/// window, then subset and locus lexicographically. Total, so reductions
/// over any partition of the candidates agree.
inline bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.features.size() != b.features.size()) return a.features.size() < b.features.size();
  if (a.window.size() != b.window.size()) return a.window.size() < b.window.size();
  if (a.features != b.features) return a.features < b.features;
  if (a.window != b.window) return a.window < b.window;
  return a.profile < b.profile;
}

struct SkippedCandidate {
  std::vector<std::string> feature_names;
  std::string reason;
};

struct SelectionResult {
  std::vector<Candidate> ranked;          // top_n, extended through ties at the best score
  std::vector<SkippedCandidate> skipped;  // per-subset diagnostics, in enumeration order
};

/// Columns the search runs over. In categorical mode `categorical` holds the
/// searchable features; in joint-discretized mode `numeric` does and `groups`
/// (when present) scopes the discretization.
struct SearchInput {
  std::vector<const CodedColumn*> categorical;
  std::vector<const NumericColumn*> numeric;
  const CodedColumn* target = nullptr;
  const GroupIndex* groups = nullptr;
};

/// All nonempty subsets of {0..n_features-1} of size <= max_k, in
/// (size, lexicographic) order.
inline std::vector<std::vector<std::size_t>> enumerate_subsets(std::size_t n_features,
                                                               std::size_t max_k) {
  if (max_k > n_features)
    throw std::invalid_argument("enumerate_subsets: max_k exceeds the feature count");
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start, std::size_t size) -> void {
    if (cur.size() == size) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i + (size - cur.size()) <= n_features; ++i) {
      cur.push_back(i);
      self(self, i + 1, size);
      cur.pop_back();
    }
  };
  for (std::size_t size = 1; size <= max_k; ++size) rec(rec, 0, size);
  return out;
}

namespace detail {

/// Visits every nonempty index set over the table's observed x levels with
/// size <= max_cells and mass >= min_support, in (size, lex) order, carrying
/// running sums of the eta terms. fn(members, count_sum, num, den).
template <typename Fn>
void for_each_window(const JointTable& t, const EtaTerms& terms, std::size_t max_cells,
                     double min_support, Fn&& fn) {
  const std::size_t n = t.rows();
  const std::size_t cap = max_cells == 0 ? n : std::min(max_cells, n);
  std::vector<std::size_t> members;
  const double threshold = min_support * static_cast<double>(t.total);
  auto rec = [&](auto&& self, std::size_t start, std::size_t size, std::int64_t count_sum,
                 double num, double den) -> void {
    if (members.size() == size) {
      if (static_cast<double>(count_sum) >= threshold) fn(members, count_sum, num, den);
      return;
    }
    for (std::size_t i = start; i + (size - members.size()) <= n; ++i) {
      members.push_back(i);
      self(self, i + 1, size, count_sum + t.row_sums[i], num + terms.kl[i], den + terms.cross[i]);
      members.pop_back();
    }
  };
  for (std::size_t size = 1; size <= cap; ++size) rec(rec, 0, size, 0, 0.0, 0.0);
}

/// Bounded candidate list ordered by ranks_before; keeps the cap best plus
/// every candidate tied with the best score.
class TopList {
 public:
  explicit TopList(std::size_t cap) : cap_(cap) {}

  bool would_accept(double score) const {
    if (items_.size() < cap_) return true;
    return score >= items_.back().score || score == items_.front().score;
  }

  void push(Candidate&& c) {
    auto pos = std::upper_bound(items_.begin(), items_.end(), c,
                                [](const Candidate& a, const Candidate& b) { return ranks_before(a, b); });
    items_.insert(pos, std::move(c));
    trim();
  }

  void merge(TopList&& other) {
    for (auto& c : other.items_) push(std::move(c));
  }

  std::vector<Candidate> take() && { return std::move(items_); }

 private:
  void trim() {
    if (items_.size() <= cap_) return;
    const double best = items_.front().score;
    std::size_t keep = cap_;
    while (keep < items_.size() && items_[keep].score == best) ++keep;
    items_.resize(keep);
  }

  std::size_t cap_;
  std::vector<Candidate> items_;
};

struct SubsetEval {
  JointTable table;
  std::optional<DiscretizationModel> model;
};

inline SubsetEval prepare_subset(const SearchInput& in, const SearchConfig& cfg,
                                 const std::vector<std::size_t>& subset) {
  SubsetEval ev;
  if (cfg.mode == SearchMode::categorical) {
    std::vector<const CodedColumn*> cols;
    cols.reserve(subset.size());
    for (std::size_t i : subset) cols.push_back(in.categorical[i]);
    ev.table = build_table(cols, *in.target);
  } else {
    std::vector<const NumericColumn*> cols;
    cols.reserve(subset.size());
    for (std::size_t i : subset) cols.push_back(in.numeric[i]);
    const GroupIndex single = in.groups ? GroupIndex() : GroupIndex::single(in.target->size());
    const GroupIndex& groups = in.groups ? *in.groups : single;
    JointDiscretization d = discretize_joint(cols, groups, cfg.quantiles);
    ev.table = build_table({&d.column}, *in.target);
    ev.model = std::move(d.model);
  }
  return ev;
}

inline std::vector<std::string> subset_names(const SearchInput& in, const SearchConfig& cfg,
                                             const std::vector<std::size_t>& subset) {
  std::vector<std::string> names;
  names.reserve(subset.size());
  for (std::size_t i : subset)
    names.push_back(cfg.mode == SearchMode::categorical ? in.categorical[i]->name
                                                        : in.numeric[i]->name);
  return names;
}

inline std::size_t feature_count(const SearchInput& in, const SearchConfig& cfg) {
  return cfg.mode == SearchMode::categorical ? in.categorical.size() : in.numeric.size();
}

inline void validate_input(const SearchInput& in, const SearchConfig& cfg) {
  if (in.target == nullptr) throw std::invalid_argument("search: no target column");
  if (feature_count(in, cfg) == 0) throw std::invalid_argument("search: no feature columns");
  if (!(cfg.min_support >= 0.0 && cfg.min_support < 1.0))
    throw std::invalid_argument("search: min_support must be in [0,1)");
  if (cfg.top_n == 0) throw std::invalid_argument("search: top_n must be positive");
}

/// Evaluates every subset with `emit`, splitting the subset list across
/// workers; per-candidate failures become skip diagnostics. The merge is
/// order-insensitive, so the result does not depend on the worker count.
template <typename Emit>
SelectionResult run_search(const SearchInput& in, const SearchConfig& cfg, Emit&& emit) {
  validate_input(in, cfg);
  const std::size_t m = feature_count(in, cfg);
  const std::size_t max_k = cfg.max_k == 0 ? m : std::min(cfg.max_k, m);
  const auto subsets = enumerate_subsets(m, max_k);

  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(subsets.size())));

  std::vector<TopList> tops(workers, TopList(cfg.top_n));
  std::vector<std::vector<std::pair<std::size_t, SkippedCandidate>>> skips(workers);
  std::vector<std::exception_ptr> failures(workers);

  auto work = [&](unsigned w) {
    try {
      for (std::size_t s = w; s < subsets.size(); s += workers) {
        try {
          SubsetEval ev = prepare_subset(in, cfg, subsets[s]);
          emit(subsets[s], ev, tops[w]);
        } catch (const Error& e) {
          skips[w].emplace_back(s, SkippedCandidate{subset_names(in, cfg, subsets[s]), e.what()});
        }
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  TopList merged(cfg.top_n);
  for (auto& t : tops) merged.merge(std::move(t));

  SelectionResult result;
  result.ranked = std::move(merged).take();
  std::vector<std::pair<std::size_t, SkippedCandidate>> all_skips;
  for (auto& s : skips) all_skips.insert(all_skips.end(), std::make_move_iterator(s.begin()),
                                         std::make_move_iterator(s.end()));
  std::sort(all_skips.begin(), all_skips.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  result.skipped.reserve(all_skips.size());
  for (auto& s : all_skips) result.skipped.push_back(std::move(s.second));
  return result;
}

}  // namespace detail

/// All windows of the table's observed range passing the size cap and the
/// minimum-support restriction, in (size, lexicographic) order. The full
/// range is itself a window when it passes the caps.
inline std::vector<Window> enumerate_windows(const JointTable& t, std::size_t max_window_cells,
                                             double min_support = 0.0) {
  const EtaTerms terms = eta_terms(t);
  std::vector<Window> out;
  detail::for_each_window(t, terms, max_window_cells, min_support,
                          [&](const std::vector<std::size_t>& members, std::int64_t, double, double) {
                            out.push_back(Window{members});
                          });
  return out;
}

/// The joint table one subset is scored on (after discretization in
/// joint-discretized mode): the table the select_* algorithms saw.
inline JointTable subset_table(const SearchInput& in, const SearchConfig& cfg,
                               const std::vector<std::size_t>& subset) {
  detail::validate_input(in, cfg);
  if (subset.empty()) throw EmptyInput("subset_table: empty subset");
  for (std::size_t i : subset)
    if (i >= detail::feature_count(in, cfg))
      throw std::out_of_range("subset_table: feature index out of range");
  return detail::prepare_subset(in, cfg, subset).table;
}

/// Ranks feature subsets by the global coefficient eta(Y | whole range).
inline SelectionResult select_global(const SearchInput& in, const SearchConfig& cfg) {
  return detail::run_search(in, cfg,
                            [&](const std::vector<std::size_t>& subset, detail::SubsetEval& ev,
                                detail::TopList& top) {
                              Candidate c;
                              c.score = eta_global(ev.table);
                              if (!top.would_accept(c.score)) return;
                              c.features = subset;
                              c.feature_names = detail::subset_names(in, cfg, subset);
                              c.kind = LocusKind::whole_range;
                              c.support_count = ev.table.total;
                              c.table_total = ev.table.total;
                              c.model = std::move(ev.model);
                              top.push(std::move(c));
                            });
}

/// Ranks (subset, window) pairs by eta(Y | window).
inline SelectionResult select_window(const SearchInput& in, const SearchConfig& cfg) {
  return detail::run_search(
      in, cfg,
      [&](const std::vector<std::size_t>& subset, detail::SubsetEval& ev, detail::TopList& top) {
        const EtaTerms terms = eta_terms(ev.table);
        detail::for_each_window(
            ev.table, terms, cfg.max_window_cells, cfg.min_support,
            [&](const std::vector<std::size_t>& members, std::int64_t count_sum, double num,
                double den) {
              const double score = den == 0.0 ? 1.0 : std::clamp(num / den, 0.0, 1.0);
              if (!top.would_accept(score)) return;
              Candidate c;
              c.features = subset;
              c.feature_names = detail::subset_names(in, cfg, subset);
              c.kind = LocusKind::window;
              c.window.reserve(members.size());
              for (std::size_t i : members) c.window.push_back(ev.table.x_label(i));
              c.score = score;
              c.support_count = count_sum;
              c.table_total = ev.table.total;
              c.model = ev.model;
              top.push(std::move(c));
            });
      });
}

/// Ranks (subset, value tuple) pairs by the lift at the fixed target value;
/// only profiles with relative frequency strictly above min_support compete.
inline SelectionResult select_profile(const SearchInput& in, const SearchConfig& cfg) {
  detail::validate_input(in, cfg);
  if (!cfg.target_value)
    throw std::invalid_argument("select_profile: config.target_value is required");
  const std::string& y_value = *cfg.target_value;
  if (!std::binary_search(in.target->levels.begin(), in.target->levels.end(), y_value))
    throw std::invalid_argument("select_profile: target value '" + y_value +
                                "' does not occur in column '" + in.target->name + "'");

  SelectionResult result = detail::run_search(
      in, cfg,
      [&](const std::vector<std::size_t>& subset, detail::SubsetEval& ev, detail::TopList& top) {
        const JointTable& t = ev.table;
        std::size_t y_idx = t.cols();
        for (std::size_t j = 0; j < t.cols(); ++j) {
          if (t.y_label(j) == y_value) {
            y_idx = j;
            break;
          }
        }
        if (y_idx == t.cols())
          throw EmptySupport("target value '" + y_value + "' has no complete case here");
        const double threshold = cfg.min_support * static_cast<double>(t.total);
        for (std::size_t i = 0; i < t.rows(); ++i) {
          if (!(static_cast<double>(t.row_sums[i]) > threshold)) continue;
          const std::int64_t c = t.at(i, y_idx);
          const double score =
              c == 0 ? 0.0
                     : static_cast<double>(c * t.total) /
                           static_cast<double>(t.row_sums[i] * t.col_sums[y_idx]);
          if (!top.would_accept(score)) continue;
          Candidate cand;
          cand.features = subset;
          cand.feature_names = detail::subset_names(in, cfg, subset);
          cand.kind = LocusKind::profile;
          cand.profile = t.x_label(i);
          cand.score = score;
          cand.support_count = t.row_sums[i];
          cand.table_total = t.total;
          cand.model = ev.model;
          top.push(std::move(cand));
        }
      });

  if (result.ranked.empty())
    throw NoFeasibleProfile("select_profile: no profile of '" + y_value +
                            "' survives the support restriction (min_support = " +
                            std::to_string(cfg.min_support) + "; " +
                            std::to_string(result.skipped.size()) + " subsets skipped)");
  return result;
}

}  // namespace liftdep
