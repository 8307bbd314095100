#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.hpp"

using namespace ndsearch;

namespace {

bool in_list(const NeighborList& nl, int from, int to) {
  const auto& l = nl[static_cast<std::size_t>(from)];
  return std::find(l.begin(), l.end(), to) != l.end();
}

// Improving 2-Opt moves that a sequential chain anchored at one of the four
// endpoints can start: the first added edge must be a candidate edge and the
// first partial gain positive.
std::size_t reachable_improving_moves(const TspInstance& inst, const NeighborList& nl, const Tour& t) {
  const auto& c = inst.costs;
  const std::size_t n = t.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const int a = t.order[i], b = t.order[i + 1], cc = t.order[j], d = t.order[(j + 1) % n];
      const double gain = c(a, b) + c(cc, d) - c(a, cc) - c(b, d);
      if (!(gain > 1e-9)) continue;
      const int anchors[4][3] = {{a, b, d}, {b, a, cc}, {cc, d, b}, {d, cc, a}};
      for (const auto& an : anchors)
        if (in_list(nl, an[1], an[2]) && c(an[0], an[1]) - c(an[1], an[2]) > 0) {
          ++count;
          break;
        }
    }
  return count;
}

}  // namespace

TEST(Lk, OutputIsValidAndNoWorse) {
  const auto& inst = testutil::eil51();
  const auto nl = build_neighbor_lists(inst, 10);
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const auto t0 = random_tour(inst, rng);
    Budget b;
    const auto t = lk_search(inst, nl, t0, b);
    ASSERT_TRUE(is_permutation_of_n(t.order));
    EXPECT_DOUBLE_EQ(t.cached_cost, tour_cost(inst, t));
    EXPECT_LE(t.cached_cost, t0.cached_cost);
    EXPECT_LE(t.cached_cost, 426 * 1.15);
  }
}

TEST(Lk, NoReachableImproving2OptMoveRemains) {
  const auto& inst = testutil::eil51();
  const auto nl = build_neighbor_lists(inst, 8);
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    Budget b;
    const auto t = lk_search(inst, nl, random_tour(inst, rng), b);
    EXPECT_EQ(reachable_improving_moves(inst, nl, t), 0u);
  }
}

TEST(Lk, LkOptimalTourUnchanged) {
  const auto& inst = testutil::eil51();
  const auto nl = build_neighbor_lists(inst);
  Rng rng(3);
  Budget b;
  const auto t = lk_search(inst, nl, random_tour(inst, rng), b);
  Budget b2;
  const auto u = lk_search(inst, nl, t, b2);
  EXPECT_EQ(u.order, t.order);
  EXPECT_GT(b2.consumed(), 0u);
}

TEST(Lk, TenCityInstancesReachExhaustiveOptimum) {
  int hits = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto inst = random_tsp(10, 100 + s);
    const double opt = testutil::brute_force_tsp(inst);
    const auto nl = build_neighbor_lists(inst, 9);
    Rng rng(s);
    Budget b;
    const auto t = lk_search(inst, nl, random_tour(inst, rng), b);
    hits += relative_close(t.cached_cost, opt);
  }
  EXPECT_GE(hits, 8);
}

TEST(Lk, BudgetExhaustionReturnsValidTour) {
  const auto& inst = testutil::eil51();
  const auto nl = build_neighbor_lists(inst);
  Rng rng(4);
  const auto t0 = random_tour(inst, rng);
  Budget b(50);
  const auto t = lk_search(inst, nl, t0, b);
  EXPECT_EQ(b.consumed(), 50u);
  EXPECT_TRUE(is_permutation_of_n(t.order));
  EXPECT_LE(t.cached_cost, t0.cached_cost);
}

TEST(Lk, DepthOneIsRestricted2Opt) {
  const auto& inst = testutil::eil51();
  const auto nl = build_neighbor_lists(inst, 50);
  LkConfig cfg;
  cfg.max_depth = 1;
  Rng rng(5);
  Budget b;
  const auto t = lk_search(inst, nl, random_tour(inst, rng), b, cfg);
  // With full candidate lists nothing is filtered by membership, and any
  // improving 2-Opt move has a positive first partial gain on some side.
  EXPECT_TRUE(is_local_optimum(TwoOptNeighborhood(inst), t));
}

TEST(Lk, CustomCostViewDrivesSearch) {
  const auto& inst = testutil::eil51();
  const auto nl = build_neighbor_lists(inst);
  struct Flat {
    double operator()(int, int) const { return 1.0; }
  };
  Rng rng(6);
  const auto t0 = random_tour(inst, rng);
  Budget b;
  const auto t = lk_search(inst, nl, t0, b, Flat{});
  EXPECT_EQ(t.order, t0.order);  // every tour costs n under a flat view
  EXPECT_DOUBLE_EQ(t.cached_cost, t0.cached_cost);
}
