#pragma once

// Escape mechanisms built on the (f1, f2) decomposition: dominance tests,
// non-dominance search (NDS), its unfiltered counterpart (ENS), and
// non-dominance exploitation via random edge penalties.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ndsearch/core.hpp"
#include "ndsearch/instances.hpp"
#include "ndsearch/lk.hpp"
#include "ndsearch/search.hpp"

namespace ndsearch {

struct ObjectivePair {
  double v1 = 0.0;
  double v2 = 0.0;
  Sense sense = Sense::minimize;
};

// u dominates v: no worse in both components and strictly better in one.
// Exact comparisons.
inline bool dominates(const ObjectivePair& u, const ObjectivePair& v) {
  if (u.sense != v.sense) throw std::invalid_argument("dominates: mixed optimization senses");
  if (u.sense == Sense::minimize)
    return u.v1 <= v.v1 && u.v2 <= v.v2 && (u.v1 < v.v1 || u.v2 < v.v2);
  return u.v1 >= v.v1 && u.v2 >= v.v2 && (u.v1 > v.v1 || u.v2 > v.v2);
}

inline bool non_dominated(const ObjectivePair& u, const ObjectivePair& v) { return !dominates(u, v) && !dominates(v, u); }

inline ObjectivePair make_pair_of(const SubValues& s, Sense sense) { return {s.f1, s.f2, sense}; }

template <class Solution>
struct EscapeResult {
  Solution solution;
  bool improved = false;
  std::uint64_t fe = 0;            // evaluations charged by this call
  std::size_t expanded = 0;        // neighbors whose own neighborhood was scanned
  bool budget_exhausted = false;
};

namespace detail {

// Shared two-hop scan. With `filter`, only neighbors not dominated by x_star
// (in (f1, f2)) are expanded.
template <class N>
EscapeResult<typename N::Solution> two_hop(const N& nb, const typename N::Solution& x_star, Budget& budget,
                                           bool filter) {
  using Move = typename N::Move;
  EscapeResult<typename N::Solution> res{x_star, false, 0, 0, false};
  const std::uint64_t fe0 = budget.consumed();
  const double f_star = nb.value(x_star);
  ObjectivePair p_star;
  if (filter) p_star = make_pair_of(nb.sub_values(x_star), N::sense);
  nb.for_each(x_star, [&](Move m) {
    if (!budget.consume()) return res.budget_exhausted = true;
    double d;
    if (filter) {
      const SubValues sd = nb.sub_delta(x_star, m);
      const ObjectivePair p{p_star.v1 + sd.f1, p_star.v2 + sd.f2, N::sense};
      if (dominates(p_star, p)) return false;
      d = nb.delta(x_star, m);
    } else {
      d = nb.delta(x_star, m);
    }
    ++res.expanded;
    auto y = x_star;
    nb.apply(y, m, d);
    nb.for_each(y, [&](Move m2) {
      if (!budget.consume()) return res.budget_exhausted = true;
      const double d2 = nb.delta(y, m2);
      if (!clearly_better(N::sense, nb.value(y) + d2, f_star)) return false;
      nb.apply(y, m2, d2);
      res.solution = std::move(y);
      return res.improved = true;
    });
    return res.improved || res.budget_exhausted;
  });
  res.fe = budget.consumed() - fe0;
  return res;
}

}  // namespace detail

// Non-dominance search around a local optimum. Returns x_star unchanged when
// no two-hop improvement is found behind a non-dominated neighbor.
template <class N>
EscapeResult<typename N::Solution> nds(const N& nb, const typename N::Solution& x_star, Budget& budget) {
  return detail::two_hop(nb, x_star, budget, true);
}

// Exhaustive two-hop search: NDS without the dominance filter.
template <class N>
EscapeResult<typename N::Solution> ens(const N& nb, const typename N::Solution& x_star, Budget& budget) {
  return detail::two_hop(nb, x_star, budget, false);
}

// ---------------------------------------------------------------------------
// Non-dominance exploitation

struct PenaltyConfig {
  std::size_t T = 1000;
  std::size_t k = 5;
  double c_tilde = 0.0;  // <= 0 means: largest edge cost of the instance
};

inline double resolve_c_tilde(const PenaltyConfig& cfg, const TspInstance& inst) {
  return cfg.c_tilde > 0.0 ? cfg.c_tilde : inst.max_cost();
}

// Cost view with a handful of edges raised by c_tilde.
struct PenalizedCost {
  const SymMatrix* base = nullptr;
  std::vector<std::pair<int, int>> edges;  // (min, max)
  double c_tilde = 0.0;

  bool penalized(int i, int j) const {
    const auto e = std::minmax(i, j);
    for (const auto& p : edges)
      if (p.first == e.first && p.second == e.second) return true;
    return false;
  }
  double operator()(int i, int j) const { return (*base)(i, j) + (penalized(i, j) ? c_tilde : 0.0); }
  double tour_value(const Tour& t) const {
    double s = 0.0;
    const std::size_t n = t.size();
    for (std::size_t p = 0; p < n; ++p) s += (*this)(t.order[p], t.order[(p + 1) % n]);
    return s;
  }
};

// k distinct edges of x_star chosen uniformly; the instance is not touched.
inline PenalizedCost add_random_penalty(const Tour& x_star, const TspInstance& inst, const PenaltyConfig& cfg,
                                        Rng& rng) {
  const std::size_t n = x_star.size();
  if (cfg.k < 1 || cfg.k > n) throw std::invalid_argument("penalty k must lie in [1, n]");
  PenalizedCost pc{&inst.costs, {}, resolve_c_tilde(cfg, inst)};
  if (!(pc.c_tilde > 0.0)) throw std::invalid_argument("penalty magnitude must be positive");
  for (std::size_t p : choose_flip_positions(n, static_cast<double>(cfg.k) / static_cast<double>(n), rng))
    pc.edges.push_back(std::minmax(x_star.order[p], x_star.order[(p + 1) % n]));
  return pc;
}

struct ExploitResult {
  Tour solution;
  bool improved = false;
  std::size_t rounds = 0;
};

// Up to T rounds of: penalize k edges of x_star, LK on the penalized cost, LK
// on the true cost. Returns on the first round that beats x_star.
inline ExploitResult further_exploit(const Tour& x_star, const TspInstance& inst, const NeighborList& nl,
                                     const PenaltyConfig& cfg, Budget& budget, Rng& rng, const LkConfig& lk = {}) {
  if (cfg.T < 1) throw std::invalid_argument("penalty rounds T must be >= 1");
  ExploitResult res{x_star, false, 0};
  for (std::size_t r = 0; r < cfg.T && !budget.exhausted(); ++r) {
    ++res.rounds;
    const PenalizedCost pc = add_random_penalty(x_star, inst, cfg, rng);
    const Tour x1 = lk_search(inst, nl, x_star, budget, pc, lk);
    Tour x2 = lk_search(inst, nl, x1, budget, lk);
    if (clearly_better(Sense::minimize, x2.cached_cost, x_star.cached_cost)) {
      res.solution = std::move(x2);
      res.improved = true;
      return res;
    }
  }
  return res;
}

}  // namespace ndsearch
