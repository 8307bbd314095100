#pragma once

// Neighborhood classification of local optima: each neighbor x' of x* is
// promising (P) if some x'' in N(x') strictly beats x*, and dominated (D) if
// (f1, f2)(x*) dominates (f1, f2)(x'). Also the expected-FE estimates.

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "ndsearch/core.hpp"
#include "ndsearch/escape.hpp"
#include "ndsearch/instances.hpp"
#include "ndsearch/search.hpp"

namespace ndsearch {

struct NeighborCounts {
  std::uint64_t np_d = 0, np_nd = 0, p_d = 0, p_nd = 0;
  std::uint64_t total() const { return np_d + np_nd + p_d + p_nd; }
};

// Proportions; marginals are derived from the four cross cells.
struct NeighborStats {
  double np_d = 0.0, np_nd = 0.0, p_d = 0.0, p_nd = 0.0;
  std::size_t sample_size = 0;

  double p() const { return p_d + p_nd; }
  double np() const { return np_d + np_nd; }
  double d() const { return np_d + p_d; }
  double nd() const { return np_nd + p_nd; }
  // NaN when the denominator is empty.
  double ratio_p_d() const { return d() > 0.0 ? p_d / d() : std::numeric_limits<double>::quiet_NaN(); }
  double ratio_p_nd() const { return nd() > 0.0 ? p_nd / nd() : std::numeric_limits<double>::quiet_NaN(); }
};

inline NeighborStats to_stats(const NeighborCounts& c) {
  const double t = static_cast<double>(c.total());
  if (t == 0.0) return {0, 0, 0, 0, 1};
  return {c.np_d / t, c.np_nd / t, c.p_d / t, c.p_nd / t, 1};
}

// Random restarts + descent on f. Duplicates are kept.
template <class Instance>
auto collect_local_optima(const Instance& inst, std::size_t count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("collect_local_optima: count must be >= 1");
  if constexpr (std::is_same_v<Instance, TspInstance>) {
    TwoOptNeighborhood nb(inst);
    std::vector<Tour> out;
    for (std::size_t k = 0; k < count; ++k) {
      Tour t = random_tour(inst, rng);
      Budget b;
      descend(nb, t, b);
      out.push_back(std::move(t));
    }
    return out;
  } else {
    OneFlipNeighborhood nb(inst);
    std::vector<BitVector> out;
    for (std::size_t k = 0; k < count; ++k) {
      BitVector x = random_bitvector(inst, rng);
      Budget b;
      descend(nb, x, b);
      out.push_back(std::move(x));
    }
    return out;
  }
}

// Exhaustive two-hop classification of every neighbor of x_star. The search
// inside N(x') stops at the first strict improvement since only existence
// matters.
template <class N>
NeighborCounts classify_counts(const N& nb, const typename N::Solution& x_star) {
  using Move = typename N::Move;
  NeighborCounts c;
  const double f_star = nb.value(x_star);
  const ObjectivePair p_star = make_pair_of(nb.sub_values(x_star), N::sense);
  nb.for_each(x_star, [&](Move m) {
    const SubValues sd = nb.sub_delta(x_star, m);
    const bool dom = dominates(p_star, ObjectivePair{p_star.v1 + sd.f1, p_star.v2 + sd.f2, N::sense});
    auto y = x_star;
    nb.apply(y, m, nb.delta(x_star, m));
    const bool promising = nb.for_each(y, [&](Move m2) {
      return clearly_better(N::sense, nb.value(y) + nb.delta(y, m2), f_star);
    });
    (promising ? (dom ? c.p_d : c.p_nd) : (dom ? c.np_d : c.np_nd)) += 1;
    return false;
  });
  return c;
}

template <class N>
NeighborStats classify_neighbors(const N& nb, const typename N::Solution& x_star) {
  return to_stats(classify_counts(nb, x_star));
}

// Mean of the per-optimum proportions.
inline NeighborStats aggregate_stats(const std::vector<NeighborStats>& list) {
  if (list.empty()) throw std::invalid_argument("aggregate_stats: empty list");
  NeighborStats s;
  std::size_t samples = 0;
  for (const auto& x : list) {
    s.np_d += x.np_d;
    s.np_nd += x.np_nd;
    s.p_d += x.p_d;
    s.p_nd += x.p_nd;
    samples += x.sample_size;
  }
  const double k = static_cast<double>(list.size());
  s.np_d /= k;
  s.np_nd /= k;
  s.p_d /= k;
  s.p_nd /= k;
  s.sample_size = samples;
  return s;
}

// (ND * N + D) / P&ND; +inf when P&ND == 0.
inline double expected_fe_nds(const NeighborStats& s, double N) {
  if (!(s.p_nd > 0.0)) return std::numeric_limits<double>::infinity();
  return (s.nd() * N + s.d()) / s.p_nd;
}

// (N + D/ND) / (P&ND/ND), the same quantity written per non-dominated neighbor.
inline double expected_fe_nds_ratio_form(const NeighborStats& s, double N) {
  if (!(s.p_nd > 0.0)) return std::numeric_limits<double>::infinity();
  return (N + s.d() / s.nd()) / (s.p_nd / s.nd());
}

// N^2 / P; +inf when P == 0.
inline double expected_fe_plain(const NeighborStats& s, double N) {
  if (!(s.p() > 0.0)) return std::numeric_limits<double>::infinity();
  return N * N / s.p();
}

struct LandscapeRow {
  std::string instance;
  double a = 0.0;
  double rho = 0.0;
  NeighborStats stats;
  double neighborhood_size = 0.0;
};

inline std::string landscape_csv_header() {
  return "instance,a,rho,NP,P,D,ND,NP&D,NP&ND,P&D,P&ND,P&D/D,P&ND/ND,samples,E_FE_NDS,E_FE_plain\n";
}

inline std::string landscape_csv_row(const LandscapeRow& r) {
  std::ostringstream o;
  o.precision(10);
  const auto& s = r.stats;
  o << r.instance << ',' << r.a << ',' << r.rho << ',' << s.np() << ',' << s.p() << ',' << s.d() << ',' << s.nd()
    << ',' << s.np_d << ',' << s.np_nd << ',' << s.p_d << ',' << s.p_nd << ',' << s.ratio_p_d() << ','
    << s.ratio_p_nd() << ',' << s.sample_size << ',' << expected_fe_nds(s, r.neighborhood_size) << ','
    << expected_fe_plain(s, r.neighborhood_size) << '\n';
  return o.str();
}

}  // namespace ndsearch
