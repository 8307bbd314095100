#pragma once

// Neighborhood adapters (2-Opt on tours, 1-bit-flip on bit vectors), the
// first-improvement descent, tabu search and the perturbation operators.
//
// A neighborhood type N provides:
//   using Solution, Move;  static constexpr Sense sense;
//   size(x), value(x), delta(x, m), apply(x, m, delta), for_each(x, fn)
//   and, when built with a split, sub_values(x) / sub_delta(x, m).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ndsearch/core.hpp"
#include "ndsearch/instances.hpp"

namespace ndsearch {

class TwoOptNeighborhood {
 public:
  using Solution = Tour;
  using Move = TwoOptMove;
  static constexpr Sense sense = Sense::minimize;

  explicit TwoOptNeighborhood(const TspInstance& inst, const SplitCosts* split = nullptr)
      : inst_(&inst), split_(split) {}

  const TspInstance& instance() const { return *inst_; }
  bool has_split() const { return split_ != nullptr; }
  std::size_t size(const Tour& t) const { return two_opt_neighborhood_size(t.size()); }
  double value(const Tour& t) const { return t.cached_cost; }
  double delta(const Tour& t, Move m) const { return two_opt_delta(inst_->costs, t.order, m.i, m.j); }
  void apply(Tour& t, Move m, double d) const { apply_two_opt(t, m.i, m.j, d); }

  SubValues sub_values(const Tour& t) const { return tour_cost(split(), t); }
  SubValues sub_delta(const Tour& t, Move m) const {
    return {two_opt_delta(split().c1, t.order, m.i, m.j), two_opt_delta(split().c2, t.order, m.i, m.j)};
  }

  template <class Fn>
  bool for_each(const Tour& t, Fn&& fn) const {
    return for_each_two_opt(t.size(), [&](std::size_t i, std::size_t j) { return fn(Move{i, j}); });
  }

 private:
  const SplitCosts& split() const {
    if (!split_) throw std::logic_error("neighborhood has no split attached");
    return *split_;
  }
  const TspInstance* inst_;
  const SplitCosts* split_;
};

class OneFlipNeighborhood {
 public:
  using Solution = BitVector;
  using Move = std::size_t;
  static constexpr Sense sense = Sense::maximize;

  explicit OneFlipNeighborhood(const QuboInstance& inst, const SplitCosts* split = nullptr)
      : inst_(&inst), split_(split) {}

  const QuboInstance& instance() const { return *inst_; }
  bool has_split() const { return split_ != nullptr; }
  std::size_t size(const BitVector& bv) const { return bv.size(); }
  double value(const BitVector& bv) const { return bv.cached_value; }
  double delta(const BitVector& bv, Move i) const { return bv.gains[i]; }
  void apply(BitVector& bv, Move i, double) const { flip_update(inst_->q, bv, i); }

  SubValues sub_values(const BitVector& bv) const {
    const double f1 = qubo_value(split().c1, bv.bits);
    return {f1, bv.cached_value - f1};
  }
  // f1 gain of flipping i, computed in O(n); f2 gain is the remainder.
  SubValues sub_delta(const BitVector& bv, Move i) const {
    const double* row = split().c1.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < bv.size(); ++j)
      if (j != i && bv.bits[j]) s += row[j];
    const double g1 = (bv.bits[i] ? -1.0 : 1.0) * (row[i] + 2.0 * s);
    return {g1, bv.gains[i] - g1};
  }

  template <class Fn>
  bool for_each(const BitVector& bv, Fn&& fn) const {
    for (std::size_t i = 0; i < bv.size(); ++i)
      if (fn(i)) return true;
    return false;
  }

 private:
  const SplitCosts& split() const {
    if (!split_) throw std::logic_error("neighborhood has no split attached");
    return *split_;
  }
  const QuboInstance* inst_;
  const SplitCosts* split_;
};

// ---------------------------------------------------------------------------
// First-improvement descent

template <class Solution>
struct LocalSearchResult {
  Solution solution;
  bool locally_optimal = false;
};

// Scans moves in the neighborhood's fixed order, accepts the first improving
// one and restarts the scan. Returns false if the budget ran out first.
template <class N>
bool descend(const N& nb, typename N::Solution& x, Budget& budget) {
  for (;;) {
    bool improved = false, out = false;
    nb.for_each(x, [&](typename N::Move m) {
      if (!budget.consume()) return out = true;
      const double d = nb.delta(x, m);
      if (!improving_delta(N::sense, d)) return false;
      nb.apply(x, m, d);
      return improved = true;
    });
    if (out) return false;
    if (!improved) return true;
  }
}

inline LocalSearchResult<Tour> local_search_2opt(const TspInstance& inst, Tour tour, Budget& budget) {
  const bool ok = descend(TwoOptNeighborhood(inst), tour, budget);
  return {std::move(tour), ok};
}

inline LocalSearchResult<BitVector> local_search_1flip(const QuboInstance& inst, BitVector bv, Budget& budget) {
  const bool ok = descend(OneFlipNeighborhood(inst), bv, budget);
  return {std::move(bv), ok};
}

// Exhaustive check, no budget.
template <class N>
bool is_local_optimum(const N& nb, const typename N::Solution& x) {
  return !nb.for_each(x, [&](typename N::Move m) { return improving_delta(N::sense, nb.delta(x, m)); });
}

// ---------------------------------------------------------------------------
// Perturbations

// Cuts at three distinct positions p1 < p2 < p3 in [1, n], giving segments
// A = [0, p1), B = [p1, p2), C = [p2, p3), D = [p3, n), and reconnects A C B D.
// p3 == n leaves D empty, so the closing edge is also eligible: every triple of
// tour edges is equally likely, whichever city happens to sit at position 0.
inline Tour segment_swap(const TspInstance& inst, const Tour& t, Rng& rng) {
  const std::size_t n = t.size();
  if (n < 4) throw DomainError("segment_swap needs n >= 4");
  std::size_t p[3];
  for (;;) {
    for (auto& v : p) v = 1 + rng.index(n);
    if (p[0] != p[1] && p[0] != p[2] && p[1] != p[2]) break;
  }
  std::sort(p, p + 3);
  const auto& o = t.order;
  Tour out;
  out.order.reserve(n);
  const auto b = o.begin();
  out.order.insert(out.order.end(), b, b + static_cast<std::ptrdiff_t>(p[0]));
  out.order.insert(out.order.end(), b + static_cast<std::ptrdiff_t>(p[1]), b + static_cast<std::ptrdiff_t>(p[2]));
  out.order.insert(out.order.end(), b + static_cast<std::ptrdiff_t>(p[0]), b + static_cast<std::ptrdiff_t>(p[1]));
  out.order.insert(out.order.end(), b + static_cast<std::ptrdiff_t>(p[2]), o.end());
  const auto& c = inst.costs;
  const int a1 = o[p[0] - 1], b0 = o[p[0]], b1 = o[p[1] - 1], c0 = o[p[1]], c1 = o[p[2] - 1], d0 = o[p[2] % n];
  out.cached_cost = t.cached_cost - c(a1, b0) - c(b1, c0) - c(c1, d0) + c(a1, c0) + c(c1, b0) + c(b1, d0);
  return out;
}

inline Tour double_bridge(const TspInstance& inst, const Tour& t, Rng& rng) {
  if (t.size() < 8) throw DomainError("double_bridge needs n >= 8");
  return segment_swap(inst, t, rng);
}

// Drivers' TSP kick: the double bridge, or the same reconnection on tours too
// short for it.
inline Tour tsp_kick(const TspInstance& inst, const Tour& t, Rng& rng) {
  return t.size() >= 8 ? double_bridge(inst, t, rng) : segment_swap(inst, t, rng);
}

// round(fraction * n) distinct positions, uniformly chosen.
inline std::vector<std::size_t> choose_flip_positions(std::size_t n, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("flip fraction must lie in (0, 1]");
  const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < m; ++k) std::swap(idx[k], idx[k + rng.index(n - k)]);
  idx.resize(m);
  return idx;
}

inline BitVector apply_flips(const QuboInstance& inst, BitVector bv, const std::vector<std::size_t>& positions) {
  for (auto i : positions) bv.bits.at(i) ^= 1u;
  rebuild_gains(inst.q, bv);
  return bv;
}

inline BitVector random_flip_perturbation(const QuboInstance& inst, const BitVector& bv, double fraction, Rng& rng) {
  return apply_flips(inst, bv, choose_flip_positions(bv.size(), fraction, rng));
}

// ---------------------------------------------------------------------------
// Tabu search (maximization, best-improvement over 1-bit flips)

struct TabuConfig {
  bool aspiration = true;
  std::size_t nonimproving_factor = 20;  // stop after factor * n moves without a new best
};

struct TabuState {
  std::size_t tenure = 0;
  std::vector<long long> last_flip;
  std::size_t nonimproving_limit = 0;
};

inline std::size_t sample_tenure(std::size_t n, Rng& rng) {
  const long long lo = static_cast<long long>(n / 100 + 1);
  return static_cast<std::size_t>(rng.between(lo, lo + 9));
}

// A variable flipped at iteration t stays tabu through iteration t + K.
inline BitVector tabu_search(const QuboInstance& inst, BitVector bv, Rng& rng, Budget& budget,
                             const TabuConfig& cfg = {}, TabuState* state_out = nullptr) {
  const std::size_t n = bv.size();
  TabuState st;
  st.tenure = sample_tenure(n, rng);
  st.last_flip.assign(n, std::numeric_limits<long long>::min() / 2);
  st.nonimproving_limit = cfg.nonimproving_factor * n;
  BitVector best = bv;
  long long iter = 0;
  std::size_t since_best = 0;
  const auto K = static_cast<long long>(st.tenure);
  while (since_best < st.nonimproving_limit) {
    std::size_t pick = n;
    double pick_val = 0.0;
    bool out = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!budget.consume()) {
        out = true;
        break;
      }
      const double v = bv.cached_value + bv.gains[i];
      const bool tabu = iter - st.last_flip[i] <= K;
      if (tabu && !(cfg.aspiration && v > best.cached_value)) continue;
      if (pick == n || v > pick_val) {
        pick = i;
        pick_val = v;
      }
    }
    if (out || pick == n) break;
    flip_update(inst.q, bv, pick);
    st.last_flip[pick] = iter++;
    if (bv.cached_value > best.cached_value) {
      best = bv;
      since_best = 0;
    } else {
      ++since_best;
    }
  }
  if (state_out) *state_out = std::move(st);
  return best;
}

}  // namespace ndsearch
