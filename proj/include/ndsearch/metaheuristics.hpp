#pragma once

// The eight drivers: ILS, ILS+ENS, ILS+NDS (TSP 2-Opt or UBQP 1-flip), ITS,
// ITS+NDS (UBQP), ILK, ILK+E, ILK+NDE (TSP). Each run draws from named
// streams of one master seed: "init", "perturbation", "tabu", "penalty".
// Perturbation is applied to the current local optimum, not to the best.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "ndsearch/core.hpp"
#include "ndsearch/decomposition.hpp"
#include "ndsearch/escape.hpp"
#include "ndsearch/instances.hpp"
#include "ndsearch/lk.hpp"
#include "ndsearch/search.hpp"
#include "ndsearch/trace.hpp"

namespace ndsearch {

enum class Algorithm { ils, ils_ens, ils_nds, its, its_nds, ilk, ilk_e, ilk_nde };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ils: return "ils";
    case Algorithm::ils_ens: return "ils_ens";
    case Algorithm::ils_nds: return "ils_nds";
    case Algorithm::its: return "its";
    case Algorithm::its_nds: return "its_nds";
    case Algorithm::ilk: return "ilk";
    case Algorithm::ilk_e: return "ilk_e";
    case Algorithm::ilk_nde: return "ilk_nde";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string s) {
  for (auto& c : s) c = c == '+' || c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto a : {Algorithm::ils, Algorithm::ils_ens, Algorithm::ils_nds, Algorithm::its, Algorithm::its_nds,
                 Algorithm::ilk, Algorithm::ilk_e, Algorithm::ilk_nde})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

inline bool needs_split(Algorithm a) {
  return a == Algorithm::ils_nds || a == Algorithm::its_nds || a == Algorithm::ilk_nde;
}
inline bool needs_penalty(Algorithm a) { return a == Algorithm::ilk_e || a == Algorithm::ilk_nde; }
inline bool is_lk_family(Algorithm a) {
  return a == Algorithm::ilk || a == Algorithm::ilk_e || a == Algorithm::ilk_nde;
}
inline bool is_tabu_family(Algorithm a) { return a == Algorithm::its || a == Algorithm::its_nds; }

enum class Perturbation { automatic, double_bridge, random_flip };

struct SolverConfig {
  Algorithm algorithm = Algorithm::ils;
  std::optional<SplitParams> split_params;
  std::shared_ptr<const SplitCosts> split;  // precomputed; overrides split_params
  std::optional<PenaltyConfig> penalty;
  std::uint64_t max_fe = std::numeric_limits<std::uint64_t>::max();
  std::optional<std::chrono::milliseconds> max_wall;
  std::uint64_t seed = 0;
  Perturbation perturbation = Perturbation::automatic;
  double flip_fraction = 0.25;
  std::optional<double> target;  // stop once best reaches it
  double warmup_fraction = 0.2;  // ILK+E / ILK+NDE: plain ILK for this budget share
  TabuConfig tabu;
  LkConfig lk;
  std::size_t neighbor_k = 20;
  bool time_axis = false;
};

inline nlohmann::json config_to_json(const SolverConfig& c) {
  nlohmann::json j{{"algorithm", to_string(c.algorithm)},
                   {"seed", c.seed},
                   {"max_fe", c.max_fe},
                   {"flip_fraction", c.flip_fraction},
                   {"warmup_fraction", c.warmup_fraction},
                   {"aspiration", c.tabu.aspiration},
                   {"lk_depth", c.lk.max_depth},
                   {"neighbor_k", c.neighbor_k}};
  if (c.max_wall) j["max_wall_ms"] = c.max_wall->count();
  if (c.target) j["target"] = *c.target;
  const SplitParams* sp = c.split ? &c.split->source_params : (c.split_params ? &*c.split_params : nullptr);
  if (sp) j["split"] = {{"a", sp->a}, {"q_prime", sp->q_prime}, {"seed", sp->seed}};
  if (c.split) j["split"]["rho"] = c.split->rho;
  if (c.penalty) j["penalty"] = {{"T", c.penalty->T}, {"k", c.penalty->k}, {"c_tilde", c.penalty->c_tilde}};
  return j;
}

namespace detail {

inline void validate(const SolverConfig& c) {
  if (needs_split(c.algorithm) && !c.split && !c.split_params)
    throw std::invalid_argument(std::string(to_string(c.algorithm)) + " needs split parameters");
  if (needs_penalty(c.algorithm) && !c.penalty)
    throw std::invalid_argument(std::string(to_string(c.algorithm)) + " needs a penalty configuration");
  if (!(c.warmup_fraction >= 0.0 && c.warmup_fraction < 1.0))
    throw std::invalid_argument("warmup fraction must lie in [0, 1)");
}

template <class Instance>
std::shared_ptr<const SplitCosts> resolve_split(const SolverConfig& c, const Instance& inst) {
  if (c.split) {
    if (c.split->n() != inst.n) throw std::invalid_argument("split size does not match instance");
    return c.split;
  }
  if (c.split_params) return std::make_shared<const SplitCosts>(sample_split(inst, *c.split_params));
  return nullptr;
}

inline bool reached(const SolverConfig& c, Sense s, double best) {
  return c.target && (best == *c.target || better(s, best, *c.target));
}

inline std::vector<int> solution_vector(const Tour& t) { return t.order; }
inline std::vector<int> solution_vector(const BitVector& b) { return {b.bits.begin(), b.bits.end()}; }

template <class Solution>
RunTrace make_trace(const SolverConfig& c, const std::string& instance, Sense s) {
  RunTrace t;
  t.algorithm = to_string(c.algorithm);
  t.instance = instance;
  t.seed = c.seed;
  t.time_axis = c.time_axis;
  t.sense = s;
  t.config = config_to_json(c);
  return t;
}

// ILS family on any neighborhood. `escape` is 0 (none), 1 (ENS) or 2 (NDS).
template <class N, class Perturb>
RunTrace iterated_descent(const SolverConfig& c, const N& nb, typename N::Solution x, const std::string& name,
                          int escape, Perturb&& perturb) {
  RunTrace trace = make_trace<typename N::Solution>(c, name, N::sense);
  Budget budget(c.max_fe, c.max_wall);
  TraceRecorder rec(trace, budget);
  auto best = x;
  rec.start(nb.value(best));
  while (!budget.exhausted() && !reached(c, N::sense, nb.value(best))) {
    ++trace.counters.iterations;
    descend(nb, x, budget);
    if (better(N::sense, nb.value(x), nb.value(best))) {
      best = x;
      rec.improve(nb.value(best));
    } else {
      rec.tick();
    }
    if (budget.exhausted() || reached(c, N::sense, nb.value(best))) break;
    if (escape) {
      ++trace.counters.escape_calls;
      auto r = escape == 2 ? nds(nb, x, budget) : ens(nb, x, budget);
      trace.counters.escape_fe += r.fe;
      if (r.improved) {
        ++trace.counters.escape_successes;
        x = std::move(r.solution);
        continue;
      }
      if (budget.exhausted()) break;
    }
    x = perturb(x);
  }
  rec.finish();
  trace.final_solution = solution_vector(best);
  return trace;
}

}  // namespace detail

inline RunTrace run_ils_family(const SolverConfig& c, const TspInstance& inst) {
  detail::validate(c);
  if (c.perturbation == Perturbation::random_flip) throw std::invalid_argument("random_flip applies to UBQP only");
  const auto split = detail::resolve_split(c, inst);
  const int escape = c.algorithm == Algorithm::ils_nds ? 2 : c.algorithm == Algorithm::ils_ens ? 1 : 0;
  TwoOptNeighborhood nb(inst, escape == 2 ? split.get() : nullptr);
  Rng init = make_stream(c.seed, "init"), pert = make_stream(c.seed, "perturbation");
  return detail::iterated_descent(c, nb, random_tour(inst, init), inst.name, escape,
                                  [&](const Tour& t) { return tsp_kick(inst, t, pert); });
}

inline RunTrace run_ils_family(const SolverConfig& c, const QuboInstance& inst) {
  detail::validate(c);
  if (c.perturbation == Perturbation::double_bridge) throw std::invalid_argument("double_bridge applies to TSP only");
  const auto split = detail::resolve_split(c, inst);
  const int escape = c.algorithm == Algorithm::ils_nds ? 2 : c.algorithm == Algorithm::ils_ens ? 1 : 0;
  OneFlipNeighborhood nb(inst, escape == 2 ? split.get() : nullptr);
  Rng init = make_stream(c.seed, "init"), pert = make_stream(c.seed, "perturbation");
  return detail::iterated_descent(c, nb, random_bitvector(inst, init), inst.name, escape,
                                  [&](const BitVector& b) { return random_flip_perturbation(inst, b, c.flip_fraction, pert); });
}

template <class Instance>
RunTrace run_ils(SolverConfig c, const Instance& inst) {
  c.algorithm = Algorithm::ils;
  return run_ils_family(c, inst);
}
template <class Instance>
RunTrace run_ils_ens(SolverConfig c, const Instance& inst) {
  c.algorithm = Algorithm::ils_ens;
  return run_ils_family(c, inst);
}
template <class Instance>
RunTrace run_ils_nds(SolverConfig c, const Instance& inst) {
  c.algorithm = Algorithm::ils_nds;
  return run_ils_family(c, inst);
}

// ITS / ITS+NDS on UBQP.
inline RunTrace run_its_family(const SolverConfig& c, const QuboInstance& inst) {
  detail::validate(c);
  const bool with_nds = c.algorithm == Algorithm::its_nds;
  const auto split = detail::resolve_split(c, inst);
  OneFlipNeighborhood nb(inst, with_nds ? split.get() : nullptr);
  Rng init = make_stream(c.seed, "init"), pert = make_stream(c.seed, "perturbation"),
      tabu = make_stream(c.seed, "tabu");
  RunTrace trace = detail::make_trace<BitVector>(c, inst.name, Sense::maximize);
  Budget budget(c.max_fe, c.max_wall);
  TraceRecorder rec(trace, budget);
  BitVector x = random_bitvector(inst, init);
  BitVector best = x;
  rec.start(best.cached_value);
  while (!budget.exhausted() && !detail::reached(c, Sense::maximize, best.cached_value)) {
    ++trace.counters.iterations;
    x = tabu_search(inst, std::move(x), tabu, budget, c.tabu);
    if (x.cached_value > best.cached_value) {
      best = x;
      rec.improve(best.cached_value);
    } else {
      rec.tick();
    }
    if (budget.exhausted() || detail::reached(c, Sense::maximize, best.cached_value)) break;
    if (with_nds) {
      ++trace.counters.escape_calls;
      auto r = nds(nb, x, budget);
      trace.counters.escape_fe += r.fe;
      if (r.improved) {
        ++trace.counters.escape_successes;
        x = std::move(r.solution);
        continue;
      }
      if (budget.exhausted()) break;
    }
    x = random_flip_perturbation(inst, x, c.flip_fraction, pert);
  }
  rec.finish();
  trace.final_solution = detail::solution_vector(best);
  return trace;
}

inline RunTrace run_its(SolverConfig c, const QuboInstance& inst) {
  c.algorithm = Algorithm::its;
  return run_its_family(c, inst);
}
inline RunTrace run_its_nds(SolverConfig c, const QuboInstance& inst) {
  c.algorithm = Algorithm::its_nds;
  return run_its_family(c, inst);
}

// ILK / ILK+E / ILK+NDE on TSP.
inline RunTrace run_ilk_family(const SolverConfig& c, const TspInstance& inst) {
  detail::validate(c);
  const auto split = c.algorithm == Algorithm::ilk_nde ? detail::resolve_split(c, inst) : nullptr;
  const NeighborList nl = build_neighbor_lists(inst, c.neighbor_k);
  Rng init = make_stream(c.seed, "init"), pert = make_stream(c.seed, "perturbation"),
      pen = make_stream(c.seed, "penalty");
  RunTrace trace = detail::make_trace<Tour>(c, inst.name, Sense::minimize);
  Budget budget(c.max_fe, c.max_wall);
  TraceRecorder rec(trace, budget);
  Tour x = random_tour(inst, init);
  rec.start(x.cached_cost);
  x = lk_search(inst, nl, x, budget, c.lk);
  Tour best = x;
  if (best.cached_cost < rec.best()) rec.improve(best.cached_cost);
  const PenaltyConfig penalty = c.penalty.value_or(PenaltyConfig{});
  while (!budget.exhausted() && !detail::reached(c, Sense::minimize, best.cached_cost)) {
    ++trace.counters.iterations;
    const bool warm = budget.fraction_used() < c.warmup_fraction;
    bool exploit = false;
    if (!warm && c.algorithm == Algorithm::ilk_e) exploit = true;
    if (!warm && c.algorithm == Algorithm::ilk_nde) {
      const auto pb = make_pair_of(tour_cost(*split, best), Sense::minimize);
      const auto px = make_pair_of(tour_cost(*split, x), Sense::minimize);
      exploit = !dominates(pb, px);
      if (!exploit) ++trace.counters.gate_blocked;
    }
    bool moved = false;
    if (exploit) {
      ++trace.counters.escape_calls;
      const std::uint64_t fe0 = budget.consumed();
      auto r = further_exploit(x, inst, nl, penalty, budget, pen, c.lk);
      trace.counters.escape_fe += budget.consumed() - fe0;
      if (r.improved) {
        ++trace.counters.escape_successes;
        x = std::move(r.solution);
        moved = true;
      }
    }
    if (!moved && !budget.exhausted()) x = lk_search(inst, nl, tsp_kick(inst, x, pert), budget, c.lk);
    if (x.cached_cost < best.cached_cost) {
      best = x;
      rec.improve(best.cached_cost);
    } else {
      rec.tick();
    }
  }
  rec.finish();
  trace.final_solution = best.order;
  return trace;
}

inline RunTrace run_ilk(SolverConfig c, const TspInstance& inst) {
  c.algorithm = Algorithm::ilk;
  return run_ilk_family(c, inst);
}
inline RunTrace run_ilk_e(SolverConfig c, const TspInstance& inst) {
  c.algorithm = Algorithm::ilk_e;
  return run_ilk_family(c, inst);
}
inline RunTrace run_ilk_nde(SolverConfig c, const TspInstance& inst) {
  c.algorithm = Algorithm::ilk_nde;
  return run_ilk_family(c, inst);
}

// Dispatch by algorithm.
inline RunTrace run_solver(const SolverConfig& c, const TspInstance& inst) {
  if (is_tabu_family(c.algorithm)) throw std::invalid_argument("ITS drivers apply to UBQP only");
  return is_lk_family(c.algorithm) ? run_ilk_family(c, inst) : run_ils_family(c, inst);
}

inline RunTrace run_solver(const SolverConfig& c, const QuboInstance& inst) {
  if (is_lk_family(c.algorithm)) throw std::invalid_argument("ILK drivers apply to TSP only");
  return is_tabu_family(c.algorithm) ? run_its_family(c, inst) : run_ils_family(c, inst);
}

}  // namespace ndsearch
