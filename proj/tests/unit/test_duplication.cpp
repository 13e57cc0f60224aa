/*
 * Copyright 2026 The xbarc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "xbarc/duplication.hpp"
#include "xbarc/error.hpp"

using namespace xbarc;
using namespace xbarc::test;

namespace {

DuplicationProblem problem(std::vector<std::int64_t> c, std::vector<std::int64_t> a, std::int64_t cap) {
  DuplicationProblem p;
  p.cycles = std::move(c);
  p.areas = std::move(a);
  p.capacity = cap;
  return p;
}

}  // namespace

TEST_CASE("single layer fills the capacity") {
  const auto plan = solve_duplication(problem({100}, {10}, 35));
  CHECK(plan.copies == std::vector<int>{3});
  CHECK(lp_relaxation_bound(problem({100}, {10}, 35)) == doctest::Approx(3.5));
}

TEST_CASE("three-layer example matches exhaustive enumeration") {
  const auto p = problem({100, 50, 25}, {4, 2, 1}, 20);
  const auto plan = solve_duplication(p);
  CHECK(plan.copies == std::vector<int>{3, 2, 1});
  CHECK(plan.bottleneck_copies() == 3);
  CHECK(duplicated_area(p, copies_for_bottleneck(p, 4)) == 21);

  // Oracle: every x with x_i <= 8.
  std::int64_t best = 0;
  std::vector<int> best_x;
  for (int a = 1; a <= 8; ++a)
    for (int b = 1; b <= 8; ++b)
      for (int c = 1; c <= 8; ++c) {
        if (4 * a + 2 * b + c > 20) continue;
        if (b * 100 < a * 50 || c * 100 < a * 25) continue;
        if (a > best || (a == best && 4 * a + 2 * b + c < 4 * best_x[0] + 2 * best_x[1] + best_x[2])) {
          best = a;
          best_x = {a, b, c};
        }
      }
  CHECK(plan.copies == best_x);
  CHECK(lp_relaxation_bound(p) == doctest::Approx(20.0 / 5.25));
}

TEST_CASE("no slack keeps single copies") {
  CHECK(solve_duplication(problem({10, 10}, {5, 5}, 10)).copies == std::vector<int>{1, 1});
  CHECK(lp_relaxation_bound(problem({7, 7}, {3, 3}, 6)) == doctest::Approx(1.0));
}

TEST_CASE("infeasible single copy reports the deficit") {
  try {
    solve_duplication(problem({5, 6}, {10, 10}, 15));
    FAIL("expected DuplicationInfeasible");
  } catch (const DuplicationInfeasible& e) {
    CHECK(e.deficit() == 5);
  }
}

TEST_CASE("bottleneck tie breaks to the earliest layer") {
  const auto p = problem({8, 8, 2}, {1, 1, 1}, 100);
  CHECK(p.bottleneck() == 0);
  const auto plan = solve_duplication(p);
  CHECK(plan.bottleneck_layer == 0);
}

TEST_CASE("capped bottleneck copies") {
  const auto p = problem({100}, {1}, 1000);
  CHECK(solve_duplication(p, 7).copies == std::vector<int>{7});
}

TEST_CASE("apply_duplication expands every box of a layer") {
  std::vector<LayerBox> boxes = {box(0, 4, 4, 10), box(0, 4, 2, 10, 0, 1), box(1, 3, 3, 5)};
  const auto out = apply_duplication(boxes, std::vector<int>{2, 1});
  REQUIRE(out.size() == 5);
  int copies_of_0 = 0;
  for (const auto& b : out)
    if (b.layer_idx == 0 && b.copy_idx == 1) ++copies_of_0;
  CHECK(copies_of_0 == 2);
}

TEST_CASE("property: exact agreement with brute force and the LP bound") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_dist(1, 4), c_dist(1, 64), a_dist(1, 16), cap_dist(1, 128);
  int checked = 0;
  for (int iter = 0; iter < 600; ++iter) {
    const int n = n_dist(rng);
    std::vector<std::int64_t> C(n), A(n);
    for (int i = 0; i < n; ++i) {
      C[i] = c_dist(rng);
      A[i] = a_dist(rng);
    }
    const std::int64_t cap = cap_dist(rng);
    const auto p = problem(C, A, cap);
    std::int64_t sum_a = 0;
    for (auto a : A) sum_a += a;
    if (sum_a > cap) {
      CHECK_THROWS_AS(solve_duplication(p), DuplicationInfeasible);
      continue;
    }
    const auto plan = solve_duplication(p);
    const auto oracle = brute_force_duplication(C, A, cap);
    REQUIRE(plan.bottleneck_copies() == oracle.best_xt);
    CHECK(plan.copies == oracle.best_min_area);
    CHECK(plan.bottleneck_copies() <= lp_relaxation_bound(p) + 1e-9);
    CHECK(duplicated_area(p, plan.copies) <= cap);

    // Bottleneck optimality among vectors of no greater area.
    const auto t = p.bottleneck();
    const auto best = best_bottleneck_within(C, A, duplicated_area(p, plan.copies));
    CHECK(best.first * plan.copies[t] == doctest::Approx(static_cast<double>(C[t]) * best.second));
    CHECK(best.first * plan.copies[t] >= C[t] * best.second);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("property: more capacity never lowers x_t") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> n_dist(1, 6), c_dist(1, 500), a_dist(1, 40);
  for (int iter = 0; iter < 200; ++iter) {
    const int n = n_dist(rng);
    std::vector<std::int64_t> C(n), A(n);
    std::int64_t sum_a = 0;
    for (int i = 0; i < n; ++i) {
      C[i] = c_dist(rng);
      A[i] = a_dist(rng);
      sum_a += A[i];
    }
    int prev = 0;
    for (std::int64_t cap = sum_a; cap < sum_a * 6; cap += 1 + sum_a / 7) {
      const int xt = solve_duplication(problem(C, A, cap)).bottleneck_copies();
      CHECK(xt >= prev);
      prev = xt;
    }
  }
}
