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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "liftdep/metrics.hpp"

#include "fixtures.hpp"
#include "random_tables.hpp"

using Catch::Matchers::WithinAbs;
using namespace liftdep;

TEST_CASE("entropy basics") {
  REQUIRE_THAT(entropy({0.5, 0.5}), WithinAbs(std::log(2.0), 1e-15));
  REQUIRE(entropy({1.0}) == 0.0);
  REQUIRE(entropy({1.0, 0.0}) == 0.0);
  REQUIRE_THROWS_AS(entropy({0.7, -0.1, 0.4}), InvalidDistribution);
  REQUIRE_THROWS_AS(entropy({0.5, 0.6}), InvalidDistribution);
}

TEST_CASE("entropy of the grade marginal matches the direct summation") {
  const double expected = fixtures::oracle_entropy_y(fixtures::math_counts());
  REQUIRE_THAT(entropy(marginal_y(fixtures::math_table())), WithinAbs(expected, 1e-12));
  // frozen value of the same sum
  REQUIRE_THAT(expected, WithinAbs(1.0985361264092017, 1e-12));
}

TEST_CASE("conditional entropy") {
  SECTION("zero when Y is a function of X") {
    REQUIRE(conditional_entropy(gen::table_from_counts({{10, 0}, {0, 10}})) == 0.0);
  }
  SECTION("equals H(Y) under independence") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 20; ++iter) {
      const JointTable t = gen::independent_table(rng);
      REQUIRE_THAT(conditional_entropy(t), WithinAbs(entropy(marginal_y(t)), 1e-12));
    }
  }
  SECTION("math+physics table matches the direct summation") {
    const double expected = fixtures::oracle_conditional_entropy(fixtures::math_physics_counts());
    REQUIRE_THAT(conditional_entropy(fixtures::math_physics_table()), WithinAbs(expected, 1e-12));
    REQUIRE_THAT(expected, WithinAbs(1.0558911097834731, 1e-12));
  }
}

TEST_CASE("mutual information") {
  SECTION("zero under exact independence") {
    std::mt19937_64 rng(12);
    for (int iter = 0; iter < 20; ++iter)
      REQUIRE_THAT(mutual_information(gen::independent_table(rng)), WithinAbs(0.0, 1e-12));
  }
  SECTION("log 2 for the deterministic uniform identity") {
    REQUIRE_THAT(mutual_information(gen::table_from_counts({{10, 0}, {0, 10}})),
                 WithinAbs(std::log(2.0), 1e-15));
  }
  SECTION("math+physics table: MI is 0.0387 of H(Y)") {
    const JointTable t = fixtures::math_physics_table();
    REQUIRE_THAT(mutual_information(t), WithinAbs(0.0387 * entropy(marginal_y(t)), 1e-3));
  }
}

TEST_CASE("eta_global on the reference tables") {
  REQUIRE_THAT(eta_global(fixtures::math_physics_table()), WithinAbs(0.0387, 5e-4));
  REQUIRE_THAT(eta_global(fixtures::five_subject_table()), WithinAbs(0.0354, 5e-4));
  REQUIRE_THAT(eta_global(fixtures::covertype_table()), WithinAbs(0.307, 1e-2));
}

TEST_CASE("eta_global attains its bounds") {
  std::mt19937_64 rng(13);
  REQUIRE_THAT(eta_global(gen::independent_table(rng)), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(eta_global(gen::table_from_counts({{10, 0}, {0, 10}})), WithinAbs(1.0, 1e-12));
  // degenerate target: H(Y) = 0 defines eta = 1
  const JointTable deg = gen::table_from_counts({{4}, {6}});
  REQUIRE(eta_global(deg) == 1.0);
}

TEST_CASE("lift values on the reference tables") {
  SECTION("math+physics") {
    const LiftTable lt = lift(fixtures::math_physics_table());
    REQUIRE_THAT(lt.at(0, 1), WithinAbs(1.46, 5e-3));
  }
  SECTION("five subjects") {
    REQUIRE_THAT(lift(fixtures::five_subject_table()).at(2, 2), WithinAbs(1.49, 5e-3));
  }
  SECTION("covertype") {
    const LiftTable lt = lift(fixtures::covertype_table());
    REQUIRE_THAT(lt.at(0, 2), WithinAbs(4.94, 5e-2));
    REQUIRE(lt.at(0, 6) == 0.0);  // empty cell
  }
  SECTION("uniform independent table lifts nothing") {
    const LiftTable lt = lift(gen::table_from_counts({{25, 25}, {25, 25}}));
    for (double v : lt.lift) REQUIRE_THAT(v, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("eta_window on the math table") {
  const JointTable t = fixtures::math_table();
  REQUIRE_THAT(eta_window(t, {{2}}), WithinAbs(0.0575, 5e-4));
  REQUIRE_THAT(eta_window(t, {{2}}),
               WithinAbs(fixtures::oracle_eta_window(fixtures::math_counts(), {2}), 1e-12));
  REQUIRE_THAT(lift(t).at(2, 2), WithinAbs(1.51, 5e-3));
}

TEST_CASE("eta_window on the covertype quintile table") {
  const JointTable t = fixtures::covertype_table();
  REQUIRE_THAT(eta_window(t, {{4}}), WithinAbs(0.38, 1e-2));
  REQUIRE_THAT(eta_window(t, {{0, 4}}), WithinAbs(0.36, 1e-2));
}

TEST_CASE("eta_window edge cases") {
  const JointTable t = fixtures::math_table();
  SECTION("full range reduces to eta_global") {
    REQUIRE_THAT(eta_window(t, {{0, 1, 2}}), WithinAbs(eta_global(t), 1e-12));
  }
  SECTION("empty window is a zero-probability event") {
    REQUIRE_THROWS_AS(eta_window(t, Window{}), ZeroProbabilityWindow);
  }
  SECTION("invalid members") {
    REQUIRE_THROWS_AS(eta_window(t, {{0, 0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(eta_window(t, {{9}}), std::out_of_range);
  }
  SECTION("zero on any window of an independent table") {
    std::mt19937_64 rng(14);
    const JointTable ind = gen::independent_table(rng);
    REQUIRE_THAT(eta_window(ind, {{0}}), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(eta_window(ind, {{0, 1}}), WithinAbs(0.0, 1e-12));
  }
  SECTION("one when Y is a function of X on the window and h is spread") {
    const JointTable f = gen::table_from_counts({{7, 0, 0}, {0, 5, 0}, {2, 3, 4}});
    REQUIRE_THAT(eta_window(f, {{0, 1}}), WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("metric properties on random tables") {
  std::mt19937_64 rng(20260811);
  for (int iter = 0; iter < 200; ++iter) {
    const JointTable t = gen::random_table(rng);
    const double mi = mutual_information(t);
    const double hy = entropy(marginal_y(t));

    // decomposition I = H(Y) - H(Y|X)
    REQUIRE_THAT(mi, WithinAbs(hy - conditional_entropy(t), 1e-9));

    // I as the expectation of log lift over the joint distribution
    const LiftTable lt = lift(t);
    double e_log_lift = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      for (std::size_t j = 0; j < t.cols(); ++j)
        if (t.at(i, j) > 0)
          e_log_lift += (static_cast<double>(t.at(i, j)) / static_cast<double>(t.total)) *
                        std::log(lt.at(i, j));
    REQUIRE_THAT(mi, WithinAbs(e_log_lift, 1e-9));

    // sum_y L(x,y) h(y) = 1 for every x
    const auto h = marginal_y(t);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < t.cols(); ++j) s += lt.at(i, j) * h[j];
      REQUIRE_THAT(s, WithinAbs(1.0, 1e-9));
    }

    // lift cannot sit on one side of 1 over the whole joint range
    double lmin = lt.lift[0], lmax = lt.lift[0];
    for (double v : lt.lift) {
      lmin = std::min(lmin, v);
      lmax = std::max(lmax, v);
    }
    REQUIRE(lmin <= 1.0 + 1e-12);
    REQUIRE(lmax >= 1.0 - 1e-12);

    // bounds
    REQUIRE(hy <= std::log(static_cast<double>(t.cols())) + 1e-12);
    const double eta = eta_global(t);
    REQUIRE(eta >= 0.0);
    REQUIRE(eta <= 1.0);
    REQUIRE_THAT(eta_window(t, [&] {
                   Window w;
                   for (std::size_t i = 0; i < t.rows(); ++i) w.members.push_back(i);
                   return w;
                 }()),
                 WithinAbs(eta, 1e-12));

    // lift definition against the probability route
    const auto g = marginal_x(t);
    for (std::size_t i = 0; i < t.rows(); ++i)
      for (std::size_t j = 0; j < t.cols(); ++j) {
        const double f = static_cast<double>(t.at(i, j)) / static_cast<double>(t.total);
        if (f == 0.0) continue;
        REQUIRE_THAT(lt.at(i, j), WithinAbs(f / (g[i] * h[j]), 1e-12));
      }
  }
}

TEST_CASE("count scale invariance") {
  std::mt19937_64 rng(20260812);
  for (int iter = 0; iter < 100; ++iter) {
    const auto counts = gen::random_counts(rng);
    std::uniform_int_distribution<std::int64_t> k_d(2, 11);
    const std::int64_t k = k_d(rng);
    auto scaled = counts;
    for (auto& row : scaled)
      for (auto& c : row) c *= k;
    const JointTable t = gen::table_from_counts(counts);
    const JointTable ts = gen::table_from_counts(scaled);
    REQUIRE_THAT(eta_global(ts), WithinAbs(eta_global(t), 1e-12));
    const LiftTable lt = lift(t), lts = lift(ts);
    for (std::size_t i = 0; i < lt.lift.size(); ++i)
      REQUIRE_THAT(lts.lift[i], WithinAbs(lt.lift[i], 1e-12));
    Window w{{0}};
    if (t.rows() > 2) w.members.push_back(2);
    REQUIRE_THAT(eta_window(ts, w), WithinAbs(eta_window(t, w), 1e-12));
  }
}
