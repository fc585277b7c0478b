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

// Command-line front end. One subcommand per resolution of the dependence
// scale (select-global, select-window, select-profile) plus `lift`, which
// renders the lift table of one fixed feature subset.
//
// Exit status: 0 success, 1 data error, 2 usage error, 3 no feasible profile.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "liftdep/dataio.hpp"
#include "liftdep/search.hpp"
#include "liftdep/version.hpp"

namespace {

struct Options {
  std::string data_path;
  std::string schema_path;
  std::string output_path;
  std::vector<std::string> columns;     // names for headerless files
  std::vector<std::string> features;    // restrict the searched feature set
  std::vector<std::string> continuous;  // continuous feature columns (joint mode)
  std::vector<std::string> groups;      // grouping columns for discretization
  std::string target;
  std::string target_value;
  std::string missing = "?";
  std::string delimiter = ",";
  std::vector<double> quantiles;
  bool no_header = false;
  bool bits = false;
  double min_support = 0.0;
  std::size_t max_k = 0;
  std::size_t max_window_cells = 0;
  std::size_t top_n = 10;
  unsigned workers = 0;  // 0 = all hardware threads
};

void add_common_options(CLI::App* sub, Options& o, bool with_search_flags) {
  sub->add_option("--data", o.data_path, "Path to the delimited dataset file")->required();
  sub->add_option("--schema", o.schema_path, "JSON schema file (columns, kinds, missing marker)");
  sub->add_option("--columns", o.columns, "Column names for a headerless file")->delimiter(',');
  sub->add_flag("--no-header", o.no_header, "The file has no header row");
  sub->add_option("--target", o.target, "Target column name");
  sub->add_option("--features", o.features, "Columns to search (default: every feature column)")
      ->delimiter(',');
  sub->add_option("--continuous", o.continuous,
                  "Continuous columns, discretized jointly per subset")
      ->delimiter(',');
  sub->add_option("--group", o.groups, "Grouping columns for per-group discretization")
      ->delimiter(',');
  sub->add_option("--missing", o.missing, "Missing-value marker (default '?')");
  sub->add_option("--delimiter", o.delimiter, "Field delimiter (default ',')");
  sub->add_option("--quantiles", o.quantiles,
                  "Cut probabilities for joint discretization (default 1/3,2/3)")
      ->delimiter(',');
  sub->add_option("--output", o.output_path, "Write the result document (canonical JSON) here");
  sub->add_flag("--bits", o.bits, "Also report mutual information in bits");
  if (with_search_flags) {
    sub->add_option("--max-k", o.max_k, "Maximum subset size (default: all features)");
    sub->add_option("--min-support", o.min_support,
                    "Minimum relative frequency for a window or profile");
    sub->add_option("--max-window-cells", o.max_window_cells,
                    "Cap on window size (default: unlimited)");
    sub->add_option("--top-n", o.top_n, "Number of ranked candidates to keep (default 10)");
    sub->add_option("--workers", o.workers, "Worker threads (default: hardware parallelism)");
  }
}

void validate_flags(const Options& o, const std::string& subcommand) {
  if (o.delimiter.size() != 1)
    throw std::invalid_argument("--delimiter must be a single character");
  if (!(o.min_support >= 0.0 && o.min_support < 1.0))
    throw std::invalid_argument("--min-support must be in [0,1)");
  if (o.top_n == 0) throw std::invalid_argument("--top-n must be positive");
  if (subcommand == "select-profile" && o.target_value.empty())
    throw std::invalid_argument("select-profile requires --target-value");
  if (!o.schema_path.empty() && !o.columns.empty())
    throw std::invalid_argument("--schema and --columns are mutually exclusive");
  if (o.no_header && o.schema_path.empty() && o.columns.empty())
    throw std::invalid_argument("--no-header needs --columns or --schema to supply column names");
  if (o.schema_path.empty() && o.target.empty())
    throw std::invalid_argument("--target is required when no --schema is given");
  if (!o.continuous.empty())
    for (const std::string& f : o.features)
      if (std::find(o.continuous.begin(), o.continuous.end(), f) == o.continuous.end())
        throw std::invalid_argument("--features '" + f +
                                    "' is not in --continuous; joint mode searches continuous "
                                    "columns only");
  if (!o.quantiles.empty())
    liftdep::QuantileSpec{o.quantiles}.validate();  // rejects bad cut probabilities up front
}

std::vector<std::string> read_header(const std::string& path, char delim) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw liftdep::IoError("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(f, line))
    throw liftdep::MalformedRow("'" + path + "' line 1: file is empty");
  std::vector<std::string> names;
  for (std::string_view field : liftdep::detail::split_fields(line, delim))
    names.emplace_back(field);
  return names;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

liftdep::DatasetSchema resolve_schema(const Options& o) {
  if (!o.schema_path.empty()) {
    liftdep::DatasetSchema s = liftdep::load_schema(o.schema_path);
    if (!o.target.empty()) {
      for (const auto& c : s.columns)
        if (c.kind == liftdep::ColumnKind::target && c.name != o.target)
          throw std::invalid_argument("--target '" + o.target + "' conflicts with schema target '" +
                                      c.name + "'");
    }
    return s;
  }

  std::vector<std::string> names = o.columns;
  if (names.empty()) names = read_header(o.data_path, o.delimiter[0]);

  liftdep::DatasetSchema s;
  s.missing_marker = o.missing;
  s.delimiter = o.delimiter[0];
  s.header = !o.no_header;
  for (const std::string& name : names) {
    liftdep::ColumnKind kind;
    if (name == o.target) {
      kind = liftdep::ColumnKind::target;
    } else if (contains(o.groups, name)) {
      kind = liftdep::ColumnKind::group;
    } else if (contains(o.continuous, name)) {
      kind = liftdep::ColumnKind::continuous;
    } else if (!o.features.empty() || !o.continuous.empty()) {
      // an explicit feature list (or joint mode) leaves the rest out
      kind = contains(o.features, name) ? liftdep::ColumnKind::categorical
                                        : liftdep::ColumnKind::ignore;
    } else {
      kind = liftdep::ColumnKind::categorical;
    }
    s.columns.push_back({name, kind});
  }
  for (const auto& want :
       {std::make_pair(&o.continuous, "--continuous"), std::make_pair(&o.groups, "--group")}) {
    for (const std::string& name : *want.first)
      if (!contains(names, name))
        throw std::invalid_argument(std::string(want.second) + " names unknown column '" + name + "'");
  }
  if (!o.target.empty() && !contains(names, o.target))
    throw std::invalid_argument("--target names unknown column '" + o.target + "'");
  s.validate();
  return s;
}

struct ResolvedRun {
  liftdep::Dataset data;
  liftdep::GroupIndex groups;
  std::vector<std::string> searched;
  bool joint = false;
  liftdep::SearchConfig config;
  nlohmann::json config_echo;

  // Pointers are bound at the object's final address, not inside
  // prepare_run, so moving a ResolvedRun cannot leave them dangling.
  liftdep::SearchInput input() const {
    liftdep::SearchInput in;
    for (const std::string& name : searched) {
      if (joint)
        in.numeric.push_back(data.find_numeric(name));
      else
        in.categorical.push_back(data.find_categorical(name));
    }
    in.target = &data.target;
    if (joint) in.groups = &groups;
    return in;
  }
};

ResolvedRun prepare_run(const Options& o, const std::string& subcommand) {
  ResolvedRun r;
  r.data = liftdep::load_csv(o.data_path, resolve_schema(o));
  if (r.data.dropped_missing_target > 0)
    std::cerr << "liftdep: dropped " << r.data.dropped_missing_target
              << " rows with a missing target value\n";

  r.joint = !r.data.numeric.empty();
  if (!o.features.empty()) {
    r.searched = o.features;
  } else {
    if (r.joint)
      for (const auto& c : r.data.numeric) r.searched.push_back(c.name);
    else
      for (const auto& c : r.data.categorical) r.searched.push_back(c.name);
  }
  if (r.searched.empty()) throw std::invalid_argument("no feature columns to search");

  const bool joint = r.joint;
  r.config.mode = joint ? liftdep::SearchMode::joint_discretized : liftdep::SearchMode::categorical;
  for (const std::string& name : r.searched) {
    if (joint) {
      if (!r.data.find_numeric(name))
        throw std::invalid_argument("--features names '" + name + "', not a continuous column");
    } else {
      if (!r.data.find_categorical(name))
        throw std::invalid_argument("--features names '" + name + "', not a categorical column");
    }
  }

  if (joint) {
    std::vector<const liftdep::CodedColumn*> group_cols;
    for (const auto& g : r.data.group_columns) group_cols.push_back(&g);
    r.groups = liftdep::build_groups(group_cols, r.data.target.size());
  }

  r.config.max_k = o.max_k;
  r.config.min_support = o.min_support;
  r.config.max_window_cells = o.max_window_cells;
  if (!o.quantiles.empty()) r.config.quantiles = liftdep::QuantileSpec{o.quantiles};
  if (!o.target_value.empty()) r.config.target_value = o.target_value;
  r.config.top_n = o.top_n;
  r.config.workers = o.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.workers;

  // Everything that determines the result; worker count deliberately not
  // echoed since the ranking is worker-count invariant.
  nlohmann::json schema_echo = nlohmann::json::array();
  for (const auto& c : r.data.schema.columns)
    schema_echo.push_back({{"name", c.name}, {"kind", liftdep::to_string(c.kind)}});
  r.config_echo = {
      {"algorithm", subcommand},
      {"data", o.data_path},
      {"schema", std::move(schema_echo)},
      {"missing", r.data.schema.missing_marker},
      {"delimiter", std::string(1, r.data.schema.delimiter)},
      {"header", r.data.schema.header},
      {"features", r.searched},
      {"target", r.data.target.name},
      {"mode", joint ? "joint-discretized" : "categorical"},
      {"quantiles", r.config.quantiles.probs},
      {"max_k", r.config.max_k},
      {"min_support", r.config.min_support},
      {"max_window_cells", r.config.max_window_cells},
      {"top_n", r.config.top_n},
  };
  if (r.config.target_value) r.config_echo["target_value"] = *r.config.target_value;
  return r;
}

std::string sig3(double v) { return liftdep::detail::format_sig3(v); }

std::string joined(const std::vector<std::string>& parts) {
  return liftdep::detail::tuple_label(parts);
}

nlohmann::json dataset_info(const Options& o, const liftdep::Dataset& d) {
  return {{"path", o.data_path},
          {"rows", d.rows},
          {"dropped_missing_target", d.dropped_missing_target}};
}

void print_top(const liftdep::Candidate& c, const liftdep::LiftTable& table, bool bits) {
  std::cout << "features: " << joined(c.feature_names) << "\n";
  switch (c.kind) {
    case liftdep::LocusKind::whole_range:
      std::cout << "eta: " << sig3(c.score) << "\n";
      break;
    case liftdep::LocusKind::window: {
      std::string w;
      for (std::size_t i = 0; i < c.window.size(); ++i)
        w += (i ? ", " : "") + joined(c.window[i]);
      std::cout << "window: {" << w << "}\n";
      std::cout << "eta: " << sig3(c.score) << "\n";
      break;
    }
    case liftdep::LocusKind::profile:
      std::cout << "profile: " << joined(c.profile) << "\n";
      std::cout << "lift: " << sig3(c.score) << "\n";
      break;
  }
  std::cout << "support: " << c.support_count << " of " << c.table_total << " complete cases\n\n";
  std::cout << liftdep::render_lift_table(table);
  if (bits) {
    const double mi = liftdep::mutual_information(table.base);
    std::cout << "mutual information: " << mi << " nats (" << mi / std::log(2.0) << " bits)\n";
  }
}

int run_lift(const Options& o) {
  const ResolvedRun r = prepare_run(o, "lift");
  const liftdep::SearchInput in = r.input();
  std::vector<std::size_t> all(liftdep::detail::feature_count(in, r.config));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const liftdep::JointTable t = liftdep::subset_table(in, r.config, all);
  const liftdep::LiftTable lt = liftdep::lift(t);

  const double eta = liftdep::eta_global(t);
  const double mi = liftdep::mutual_information(t);
  std::cout << liftdep::render_lift_table(lt);
  std::cout << "eta: " << eta << "\n";
  std::cout << "mutual information: " << mi << " nats";
  if (o.bits) std::cout << " (" << mi / std::log(2.0) << " bits)";
  std::cout << "\n";

  if (!o.output_path.empty()) {
    liftdep::Candidate c;
    c.feature_names = t.x_names;
    c.kind = liftdep::LocusKind::whole_range;
    c.score = eta;
    c.support_count = t.total;
    c.table_total = t.total;
    liftdep::SelectionResult res;
    res.ranked.push_back(std::move(c));
    liftdep::write_results(
        liftdep::result_document("lift", r.config_echo, dataset_info(o, r.data), res, &lt),
        o.output_path);
  }
  return 0;
}

int run_select(const Options& o, const std::string& subcommand) {
  const ResolvedRun r = prepare_run(o, subcommand);
  const liftdep::SearchInput in = r.input();

  liftdep::SelectionResult result;
  if (subcommand == "select-global")
    result = liftdep::select_global(in, r.config);
  else if (subcommand == "select-window")
    result = liftdep::select_window(in, r.config);
  else
    result = liftdep::select_profile(in, r.config);

  if (!result.skipped.empty())
    std::cerr << "liftdep: skipped " << result.skipped.size()
              << " candidate subsets (see the result document for reasons)\n";

  std::optional<liftdep::LiftTable> top_table;
  if (!result.ranked.empty())
    top_table = liftdep::lift(liftdep::subset_table(in, r.config, result.ranked[0].features));

  if (!o.output_path.empty())
    liftdep::write_results(
        liftdep::result_document(subcommand, r.config_echo, dataset_info(o, r.data), result,
                                 top_table ? &*top_table : nullptr),
        o.output_path);

  if (result.ranked.empty()) {
    std::cerr << "liftdep: no candidate survived (all subsets skipped)\n";
    return 0;
  }
  std::cout << "ranked " << result.ranked.size() << " candidates; best:\n";
  print_top(result.ranked[0], *top_table, o.bits);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liftdep: dependence measurement and multi-resolution feature selection"};
  app.set_version_flag("--version", std::string("liftdep ") + liftdep::kVersion);
  app.require_subcommand(1);

  Options o;
  CLI::App* lift_cmd =
      app.add_subcommand("lift", "Render the lift table of one fixed feature subset");
  add_common_options(lift_cmd, o, false);
  CLI::App* global_cmd =
      app.add_subcommand("select-global", "Rank feature subsets by the global eta coefficient");
  add_common_options(global_cmd, o, true);
  CLI::App* window_cmd = app.add_subcommand(
      "select-window", "Rank (subset, value window) pairs by the windowed eta coefficient");
  add_common_options(window_cmd, o, true);
  CLI::App* profile_cmd = app.add_subcommand(
      "select-profile", "Rank (subset, value tuple) pairs by lift at a fixed target value");
  add_common_options(profile_cmd, o, true);
  profile_cmd->add_option("--target-value", o.target_value,
                          "Target value whose lift is maximized");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "liftdep: " << e.what() << "\n";
    return 2;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    validate_flags(o, subcommand);
  } catch (const std::exception& e) {
    std::cerr << "liftdep: " << e.what() << "\n";
    return 2;
  }

  try {
    if (subcommand == "lift") return run_lift(o);
    return run_select(o, subcommand);
  } catch (const liftdep::NoFeasibleProfile& e) {
    std::cerr << "liftdep: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "liftdep: " << e.what() << "\n";
    return 1;
  }
}
