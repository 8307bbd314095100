#pragma once

// Shared fixtures and brute-force oracles for the test suites.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ndsearch/ndsearch.hpp"

namespace testutil {

inline std::string data_path(const std::string& file) { return std::string(NDSEARCH_DATA_DIR) + "/" + file; }

inline const ndsearch::TspInstance& eil51() {
  static const ndsearch::TspInstance inst = ndsearch::parse_tsplib(ndsearch::read_file(data_path("eil51.tsp")));
  return inst;
}

// OR-Library-shaped stand-in for bqp1000.1: density 0.1, integers in
// [-100, 100], written out and parsed back through the OR-Library format.
inline const ndsearch::QuboInstance& bqp1000() {
  static const ndsearch::QuboInstance inst = [] {
    auto q = ndsearch::parse_orlib_bqp(ndsearch::format_orlib_bqp(ndsearch::random_qubo(1000, 1, 0.1, 100)));
    q.name = "bqp1000_synth";
    return q;
  }();
  return inst;
}

// Optimal tour cost by enumerating permutations with city 0 fixed.
inline double brute_force_tsp(const ndsearch::TspInstance& inst) {
  std::vector<int> rest(inst.n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> order(inst.n);
  do {
    if (rest.front() > rest.back()) continue;  // each cycle once per direction
    order[0] = 0;
    std::copy(rest.begin(), rest.end(), order.begin() + 1);
    best = std::min(best, ndsearch::tour_cost(inst.costs, order));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

// Max of z^T Q z over all 2^n vectors, Gray-code order with O(n) updates.
inline double brute_force_qubo(const ndsearch::QuboInstance& inst) {
  auto bv = ndsearch::make_bitvector(inst, std::vector<std::uint8_t>(inst.n, 0));
  double best = bv.cached_value;
  const std::uint64_t total = std::uint64_t{1} << inst.n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto bit = static_cast<std::size_t>(__builtin_ctzll(g));
    ndsearch::flip_update(inst.q, bv, bit);
    best = std::max(best, bv.cached_value);
  }
  return best;
}

}  // namespace testutil
