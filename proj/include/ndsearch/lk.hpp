#pragma once

// Bounded-depth Lin-Kernighan: each improving step is a chain of sequential
// 2-Opt exchanges anchored at t1, kept while the cumulative gain stays
// positive. Candidate t's come from nearest-neighbor lists. All alternatives
// are tried at the first two levels; deeper levels pick the single best.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ndsearch/core.hpp"
#include "ndsearch/instances.hpp"

namespace ndsearch {

struct LkConfig {
  std::size_t max_depth = 10;
  std::size_t breadth_levels = 2;
  double min_gain = 1e-9;  // guards against accepting rounding noise
};

// Plain cost view over the instance matrix.
struct MatrixCost {
  const SymMatrix* c;
  double operator()(int i, int j) const { return (*c)(i, j); }
};

namespace detail {

// Array tour with a position index; reversals flip the shorter side.
class LkTour {
 public:
  explicit LkTour(const std::vector<int>& order) : order_(order), pos_(order.size()) {
    for (std::size_t k = 0; k < order_.size(); ++k) pos_[order_[k]] = static_cast<int>(k);
  }
  int n() const { return static_cast<int>(order_.size()); }
  int succ(int c) const { return order_[(pos_[c] + 1) % n()]; }
  int pred(int c) const { return order_[(pos_[c] + n() - 1) % n()]; }
  const std::vector<int>& order() const { return order_; }

  // Removes edges (a, b) and (c, d), adds (a, c) and (b, d). Requires
  // b = succ(a), d = succ(c) or b = pred(a), d = pred(c).
  void exchange(int a, int b, int c, int d) {
    if (succ(a) != b) {
      std::swap(a, b);
      std::swap(c, d);
    }
    // Now b = succ(a) and d = succ(c): reverse the path b..c or d..a.
    const int len = (pos_[c] - pos_[b] + n()) % n() + 1;
    if (2 * len <= n())
      reverse(pos_[b], pos_[c]);
    else
      reverse(pos_[d], pos_[a]);
  }

 private:
  void reverse(int i, int j) {
    int len = (j - i + n()) % n() + 1;
    for (int s = 0; s < len / 2; ++s) {
      const int pi = (i + s) % n(), pj = (j - s + n()) % n();
      std::swap(order_[pi], order_[pj]);
      pos_[order_[pi]] = pi;
      pos_[order_[pj]] = pj;
    }
  }
  std::vector<int> order_;
  std::vector<int> pos_;
};

template <class Cost>
class LkEngine {
 public:
  LkEngine(const Cost& cost, const NeighborList& nl, const LkConfig& cfg, Budget& budget, LkTour& tour)
      : cost_(cost), nl_(nl), cfg_(cfg), budget_(budget), tour_(tour) {}

  // Tries one improving chain from t1 along one of its tour edges.
  bool improve_from(int t1, bool forward) {
    t1_ = t1;
    const int t2 = forward ? tour_.succ(t1) : tour_.pred(t1);
    stack_.clear();
    best_gain_ = 0.0;
    best_len_ = 0;
    step(1, t2, cost_(t1, t2));
    if (!(best_gain_ > cfg_.min_gain)) best_len_ = 0;
    while (stack_.size() > best_len_) undo_top();
    return best_len_ > 0;
  }

  bool out_of_budget() const { return out_; }
  double last_gain() const { return best_gain_; }

 private:
  struct Cand {
    int t5, t6;
    double g_open, closed, rank;
  };
  struct Done {
    int a, b, c, d;
  };

  // Returns true once an improving chain is recorded.
  bool step(std::size_t level, int last, double g) {
    const bool fwd = tour_.succ(t1_) == last;
    std::vector<Cand> cands;
    for (int t5 : nl_[static_cast<std::size_t>(last)]) {
      if (out_) break;
      if (t5 == t1_) continue;
      const int t6 = fwd ? tour_.pred(t5) : tour_.succ(t5);
      if (t6 == last) continue;  // t5 adjacent to last on the wrong side
      if (!budget_.consume()) {
        out_ = true;
        break;
      }
      const double g1 = g - cost_(last, t5);
      if (!(g1 > 0.0)) continue;
      const double c56 = cost_(t5, t6);
      cands.push_back({t5, t6, g1 + c56, g1 + c56 - cost_(t6, t1_), c56 - cost_(last, t5)});
    }
    if (cands.empty()) return false;
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.rank > y.rank; });
    if (level > cfg_.breadth_levels) cands.resize(1);
    for (const Cand& cd : cands) {
      tour_.exchange(t1_, last, cd.t6, cd.t5);
      stack_.push_back({t1_, cd.t6, last, cd.t5});
      if (cd.closed > best_gain_) {
        best_gain_ = cd.closed;
        best_len_ = stack_.size();
      }
      if (level < cfg_.max_depth && !out_) step(level + 1, cd.t6, cd.g_open);
      if (best_gain_ > cfg_.min_gain || out_) return best_gain_ > cfg_.min_gain;
      undo_top();
    }
    return false;
  }

  void undo_top() {
    const Done m = stack_.back();
    stack_.pop_back();
    tour_.exchange(m.a, m.b, m.c, m.d);
  }

  const Cost& cost_;
  const NeighborList& nl_;
  const LkConfig& cfg_;
  Budget& budget_;
  LkTour& tour_;
  int t1_ = 0;
  std::vector<Done> stack_;
  double best_gain_ = 0.0;
  std::size_t best_len_ = 0;
  bool out_ = false;
};

}  // namespace detail

// Improves `tour` under the cost view `cost` until no improving chain starts
// at any city (or the budget runs out). One FE per candidate examined. The
// returned tour's cached_cost is its cost under the instance matrix.
template <class Cost>
Tour lk_search(const TspInstance& inst, const NeighborList& nl, const Tour& tour, Budget& budget, const Cost& cost,
               const LkConfig& cfg = {}) {
  detail::LkTour t(tour.order);
  detail::LkEngine<Cost> eng(cost, nl, cfg, budget, t);
  const int n = t.n();
  bool improved = true;
  while (improved && !eng.out_of_budget()) {
    improved = false;
    for (int t1 = 0; t1 < n && !eng.out_of_budget(); ++t1)
      for (bool fwd : {true, false})
        while (eng.improve_from(t1, fwd)) improved = true;
  }
  Tour out{t.order(), 0.0};
  out.cached_cost = tour_cost(inst, out);
  return out;
}

inline Tour lk_search(const TspInstance& inst, const NeighborList& nl, const Tour& tour, Budget& budget,
                      const LkConfig& cfg = {}) {
  return lk_search(inst, nl, tour, budget, MatrixCost{&inst.costs}, cfg);
}

}  // namespace ndsearch
