// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. All thresholds and protocol constants are fixed below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "test_util.hpp"

using namespace ndsearch;

namespace {

// Sweep shared by criteria 1-3.
const std::vector<double> kSweep{-12, -3, 0, 2, 10};
constexpr double kSumRelTol = 1e-9;
constexpr double kRhoHigh = 0.85, kRhoLow = -0.45;
constexpr std::size_t kOptima = 200;
constexpr double kRhoBandLo = 0.25, kRhoBandHi = 0.40;
constexpr double kRatioFactor = 3.0;
constexpr double kSpearmanAlpha = 0.05;
constexpr std::uint64_t kTspOracleFe = 1000000;
constexpr std::uint64_t kQuboOracleFe = 10000000;
constexpr int kQuboHitsNeeded = 18;
constexpr std::uint64_t kEil51Fe = 100000000;
constexpr double kEil51TargetRho = 0.38;
constexpr int kEil51HitsNeeded = 8;
constexpr int kPairedOptima = 100;
constexpr auto kIlkWall = std::chrono::milliseconds(500);
constexpr int kIlkSeeds = 20;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Shared between criteria 3 and 4.
std::vector<LandscapeRow> g_rows;

Outcome criterion1() {
  double worst = 0.0;
  const auto& tsp = testutil::eil51();
  const auto& bqp = testutil::bqp1000();
  for (double a : kSweep) {
    const auto st = sample_split(tsp, {a, 100.0, 1});
    const auto sq = sample_split(bqp, {a, 100.0, 1});
    Rng rng(static_cast<std::uint64_t>(a + 100));
    for (int k = 0; k < 1000; ++k) {
      const auto t = random_tour(tsp, rng);
      const auto s = tour_cost(st, t);
      worst = std::max(worst, std::fabs(s.f1 + s.f2 - t.cached_cost) / std::fabs(t.cached_cost));
      std::vector<std::uint8_t> z(bqp.n);
      for (auto& b : z) b = static_cast<std::uint8_t>(rng.index(2));
      const double f = qubo_value(bqp.q, z), f1 = qubo_value(sq.c1, z), f2 = qubo_value(sq.c2, z);
      if (f != 0.0) worst = std::max(worst, std::fabs(f1 + f2 - f) / std::fabs(f));
    }
  }
  return {worst <= kSumRelTol, fmt("max relative error %.3g over 2 x 5 x 1000 solutions", worst)};
}

// A seed passes when its sweep is strictly increasing and meets both end
// bounds; the seed-mean end values must meet the bounds as well.
Outcome criterion2() {
  const auto& inst = testutil::eil51();
  int good = 0;
  double sum_hi = 0.0, sum_lo = 0.0, min_hi = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pts = sweep_a(inst, kSweep, seed);
    bool ok = pts.back().rho >= kRhoHigh && pts.front().rho <= kRhoLow;
    for (std::size_t k = 1; k < pts.size(); ++k) ok &= pts[k].rho > pts[k - 1].rho;
    good += ok;
    sum_hi += pts.back().rho;
    sum_lo += pts.front().rho;
    min_hi = std::min(min_hi, pts.back().rho);
  }
  const double hi = sum_hi / 10, lo = sum_lo / 10;
  const bool pass = good >= 9 && hi >= kRhoHigh && lo <= kRhoLow;
  return {pass, fmt("%.0f/10 seeds increasing within bounds; mean rho(10) = %.4f (min %.4f), mean rho(-12) = %.4f",
                    good, hi, min_hi, lo)};
}

Outcome criterion3() {
  const auto& inst = testutil::eil51();
  Rng rng(1);
  const auto optima = collect_local_optima(inst, kOptima, rng);
  const double N = static_cast<double>(two_opt_neighborhood_size(inst.n));
  std::vector<double> rhos, nds;
  const LandscapeRow* band = nullptr;
  for (double a : kSweep) {
    const auto split = sample_split(inst, {a, 100.0, 1});
    const TwoOptNeighborhood nb(inst, &split);
    std::vector<NeighborStats> per;
    for (const auto& x : optima) per.push_back(classify_neighbors(nb, x));
    g_rows.push_back({inst.name, a, split.rho, aggregate_stats(per), N});
    rhos.push_back(split.rho);
    nds.push_back(g_rows.back().stats.nd());
  }
  for (const auto& r : g_rows)
    if (r.rho >= kRhoBandLo && r.rho <= kRhoBandHi) band = &r;
  if (!band) return {false, "no sweep split with rho in [0.25, 0.40]"};
  const double pnd = band->stats.ratio_p_nd(), pd = band->stats.ratio_p_d();
  const auto sp = spearman(rhos, nds);
  const bool pass = pnd >= kRatioFactor * pd && sp.rho < 0 && sp.p_value < kSpearmanAlpha;
  return {pass, fmt("rho %.4f: P&ND/ND %.4f vs P&D/D %.4f; Spearman(rho, ND) %.3f", band->rho, pnd, pd, sp.rho) +
                    fmt(" p=%.4f", sp.p_value)};
}

Outcome criterion4() {
  if (g_rows.empty()) return {false, "criterion 3 produced no rows"};
  std::size_t ok = 0, checked = 0;
  std::string detail;
  for (const auto& r : g_rows) {
    if (!(r.stats.p_nd > 0)) continue;
    ++checked;
    const double a = expected_fe_nds(r.stats, r.neighborhood_size), b = expected_fe_plain(r.stats, r.neighborhood_size);
    ok += a < b;
    detail += fmt(" %.2f:%.3g<%.3g", r.rho, a, b);
  }
  return {checked > 0 && ok == checked, std::to_string(ok) + "/" + std::to_string(checked) + " rows;" + detail};
}

Outcome criterion5() {
  int failures = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto inst = random_tsp(7, 1000 + s);
    const double opt = testutil::brute_force_tsp(inst);
    for (auto a : {Algorithm::ils, Algorithm::ils_ens, Algorithm::ils_nds}) {
      SolverConfig c;
      c.algorithm = a;
      c.seed = s;
      c.max_fe = kTspOracleFe;
      c.target = opt;
      if (needs_split(a)) c.split_params = SplitParams{2.0, 100.0, s};
      failures += !relative_close(run_solver(c, inst).final_best, opt);
    }
  }
  return {failures == 0, std::to_string(60 - failures) + "/60 runs reached the exhaustive optimum"};
}

Outcome criterion6() {
  int its = 0, its_nds = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto q = random_qubo(20, 2000 + s);
    const double opt = testutil::brute_force_qubo(q);
    for (auto a : {Algorithm::its, Algorithm::its_nds}) {
      SolverConfig c;
      c.algorithm = a;
      c.seed = s;
      c.max_fe = kQuboOracleFe;
      c.target = opt;
      if (needs_split(a)) c.split_params = SplitParams{2.0, 100.0, s};
      const bool hit = run_solver(c, q).final_best == opt;
      (a == Algorithm::its ? its : its_nds) += hit;
    }
  }
  return {its >= kQuboHitsNeeded && its_nds >= kQuboHitsNeeded,
          fmt("ITS %.0f/20, ITS+NDS %.0f/20", its, its_nds)};
}

Outcome criterion7() {
  const auto& inst = testutil::eil51();
  std::vector<double> grid;
  for (double a = 1.5; a <= 4.0 + 1e-12; a += 0.25) grid.push_back(a);
  const auto split = std::make_shared<const SplitCosts>(split_near_rho(inst, grid, kEil51TargetRho, 1));
  int hits = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    SolverConfig c;
    c.algorithm = Algorithm::ils_nds;
    c.seed = s;
    c.max_fe = kEil51Fe;
    c.split = split;
    c.target = 426;
    hits += run_solver(c, inst).final_best == 426;
  }
  return {hits >= kEil51HitsNeeded,
          fmt("a = %.2f, rho = %.4f: %.0f/10 seeds reached 426", split->source_params.a, split->rho, hits)};
}

Outcome criterion8() {
  const auto& inst = testutil::eil51();
  const auto split = sample_split(inst, {2.0, 100.0, 1});
  const TwoOptNeighborhood nb(inst, &split);
  int fewer = 0, both_failed = 0;
  std::uint64_t max_nds = 0, ens_fe = 0;
  for (int s = 1; s <= kPairedOptima; ++s) {
    // Climb with ENS until it fails, so both escapes are attempted on an
    // optimum where neither can succeed.
    Rng rng(static_cast<std::uint64_t>(s));
    Tour x = random_tour(inst, rng);
    Budget b0;
    descend(nb, x, b0);
    for (;;) {
      Budget b;
      const auto r = ens(nb, x, b);
      if (!r.improved) break;
      x = r.solution;
      descend(nb, x, b);
    }
    Budget bn, be;
    const auto rn = nds(nb, x, bn);
    const auto re = ens(nb, x, be);
    both_failed += !rn.improved && !re.improved;
    fewer += rn.fe < re.fe;
    max_nds = std::max(max_nds, rn.fe);
    ens_fe = re.fe;
  }
  return {both_failed == kPairedOptima && fewer == kPairedOptima,
          fmt("%.0f/100 paired failures with NDS < ENS; max NDS %.0f FE vs ENS %.0f FE", fewer,
              static_cast<double>(max_nds), static_cast<double>(ens_fe))};
}

Outcome criterion9() {
  const auto inst = random_tsp(100, 1);
  std::vector<double> ilk, ilk_e, ilk_nde;
  for (std::uint64_t s = 1; s <= kIlkSeeds; ++s) {
    for (auto a : {Algorithm::ilk, Algorithm::ilk_e, Algorithm::ilk_nde}) {
      SolverConfig c;
      c.algorithm = a;
      c.seed = s;
      c.max_wall = kIlkWall;
      c.time_axis = true;
      if (needs_split(a)) c.split_params = SplitParams{2.0, 100.0, 1};
      if (needs_penalty(a)) c.penalty = PenaltyConfig{1000, 5, 0.0};
      const double f = run_solver(c, inst).final_best;
      (a == Algorithm::ilk ? ilk : a == Algorithm::ilk_e ? ilk_e : ilk_nde).push_back(f);
    }
  }
  const double m = median(ilk), me = median(ilk_e), mn = median(ilk_nde);
  return {mn <= m + 1e-9 * m, fmt("median ILK %.3f, ILK+E %.3f, ILK+NDE %.3f", m, me, mn)};
}

Outcome criterion10() {
  const auto& inst = testutil::eil51();
  const auto q = random_qubo(60, 4, 0.3);
  int same = 0, total = 0;
  for (auto a : {Algorithm::ils, Algorithm::ils_ens, Algorithm::ils_nds, Algorithm::ilk, Algorithm::ilk_e,
                 Algorithm::ilk_nde, Algorithm::its, Algorithm::its_nds}) {
    SolverConfig c;
    c.algorithm = a;
    c.seed = 11;
    c.max_fe = 300000;
    if (needs_split(a)) c.split_params = SplitParams{-3.0, 100.0, 2};
    if (needs_penalty(a)) c.penalty = PenaltyConfig{50, 5, 0.0};
    ++total;
    if (is_tabu_family(a))
      same += trace_to_csv(run_solver(c, q)) == trace_to_csv(run_solver(c, q));
    else
      same += trace_to_csv(run_solver(c, inst)) == trace_to_csv(run_solver(c, inst));
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " algorithms byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu: %s  %s  [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
