#pragma once

// Objective decomposition: every unit cost c is split into c1 + c2 where c1 is
// drawn from a bell / valley / flat density on the unit's interval. The shape
// parameter `a` controls the correlation of the two sub-objectives.

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndsearch/core.hpp"
#include "ndsearch/instances.hpp"

namespace ndsearch {

// Unnormalized density on (0, c): t^a rising to the midpoint then mirrored for
// a > 0 (bell), (c - t)^|a| then t^|a| for a < 0 (valley), flat for a == 0.
inline double pdf_shape(double t, double c, double a) {
  if (!(c > 0.0) || !(t > 0.0) || !(t < c)) throw DomainError("pdf_shape: t must lie in (0, c)");
  const double half = 0.5 * c;
  const double sgn = a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
  const double base = t <= half ? half - sgn * (half - t) : half + sgn * (half - t);
  return std::pow(base, std::fabs(a));
}

// Inverse CDF of the normalized density. The density is symmetric about c/2,
// so only the lower half is inverted and the upper half mirrored.
inline double inverse_cdf_sample(double c, double a, double u) {
  if (!(c > 0.0)) throw DomainError("inverse_cdf_sample: c must be positive");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_cdf_sample: u must lie in (0, 1)");
  const bool upper = u > 0.5;
  const double v = upper ? 1.0 - u : u;  // in (0, 1/2]
  double s;                              // fraction of c, in (0, 1/2]
  if (a >= 0.0) {
    // F(t) = (2t/c)^(a+1) / 2 on the lower half.
    s = 0.5 * std::pow(2.0 * v, 1.0 / (a + 1.0));
  } else {
    // F(t) = (1 - (1 - t/c)^(b+1)) / (2 (1 - 2^-(b+1))) on the lower half.
    const double e = 1.0 - a;  // b + 1
    const double mass = -std::expm1(-e * std::log(2.0));
    s = -std::expm1(std::log1p(-2.0 * v * mass) / e);
  }
  s = std::min(s, 0.5);
  return upper ? c * (1.0 - s) : c * s;
}

// Pearson correlation of c1 vs c2 across units, 1/(|U|-1) normalization.
// UBQP units with q == 0 are excluded.
inline double measure_rho(const SplitCosts& split, const SymMatrix* original = nullptr) {
  const std::size_t n = split.n();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = split.diagonal_units ? i : i + 1; j < n; ++j) {
      if (split.diagonal_units) {
        const bool zero = original ? (*original)(i, j) == 0.0 : (split.c1(i, j) == 0.0 && split.c2(i, j) == 0.0);
        if (zero) continue;
      }
      x.push_back(split.c1(i, j));
      y.push_back(split.c2(i, j));
    }
  const std::size_t m = x.size();
  if (m < 2) throw DomainError("measure_rho: correlation undefined for fewer than 2 units");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double denom = static_cast<double>(m - 1);
  const double cov = sxy / denom, sx = std::sqrt(sxx / denom), sy = std::sqrt(syy / denom);
  if (sx == 0.0 || sy == 0.0) throw DomainError("measure_rho: zero variance, correlation undefined");
  return std::clamp(cov / (sx * sy), -1.0, 1.0);
}

namespace detail {

// One uniform draw per unordered unit in row-major upper-triangle order; zero
// units still consume their draw so that streams stay aligned across a.
inline SplitCosts split_units(const SymMatrix& c, bool ubqp, const SplitParams& p) {
  if (ubqp && !(p.q_prime > 0.0)) throw DomainError("q_prime must be positive");
  const std::size_t n = c.size();
  SplitCosts s;
  s.c1 = SymMatrix(n);
  s.c2 = SymMatrix(n);
  s.source_params = p;
  s.diagonal_units = ubqp;
  Rng rng(p.seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = ubqp ? i : i + 1; j < n; ++j) {
      const double u = rng.uniform01();
      const double cij = c(i, j);
      if (cij == 0.0) continue;
      double c1;
      if (ubqp) {
        c1 = 0.5 * cij - p.q_prime + inverse_cdf_sample(2.0 * p.q_prime, p.a, u);
      } else {
        if (cij < 0.0) throw DomainError("TSP costs must be non-negative");
        c1 = inverse_cdf_sample(cij, p.a, u);
      }
      s.c1.set_sym(i, j, c1);
      s.c2.set_sym(i, j, cij - c1);
    }
  return s;
}

}  // namespace detail

inline SplitCosts sample_split(const TspInstance& inst, const SplitParams& p) {
  auto s = detail::split_units(inst.costs, false, p);
  s.rho = measure_rho(s);
  return s;
}

inline SplitCosts sample_split(const QuboInstance& inst, const SplitParams& p) {
  auto s = detail::split_units(inst.q, true, p);
  s.rho = measure_rho(s, &inst.q);
  return s;
}

// The degenerate split c1 = c2 = c/2 (rho = 1).
template <class Instance>
SplitCosts halving_split(const Instance& inst) {
  const SymMatrix& c = [&]() -> const SymMatrix& {
    if constexpr (std::is_same_v<Instance, TspInstance>) return inst.costs;
    else return inst.q;
  }();
  SplitCosts s;
  const std::size_t n = c.size();
  s.c1 = SymMatrix(n);
  s.c2 = SymMatrix(n);
  s.diagonal_units = std::is_same_v<Instance, QuboInstance>;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s.c1.at(i, j) = 0.5 * c(i, j);
      s.c2.at(i, j) = c(i, j) - s.c1(i, j);
    }
  s.rho = 1.0;
  return s;
}

struct RhoPoint {
  double a = 0.0;
  double rho = 0.0;
};

// One split per a, all drawn from the same seed (common random numbers).
template <class Instance>
std::vector<RhoPoint> sweep_a(const Instance& inst, const std::vector<double>& a_values, std::uint64_t seed,
                              double q_prime = 100.0) {
  if (a_values.empty()) throw std::invalid_argument("sweep_a: empty a list");
  std::vector<RhoPoint> out;
  out.reserve(a_values.size());
  for (double a : a_values) out.push_back({a, sample_split(inst, SplitParams{a, q_prime, seed}).rho});
  return out;
}

// Picks the a whose measured rho is closest to `target_rho` and returns that
// split.
template <class Instance>
SplitCosts split_near_rho(const Instance& inst, const std::vector<double>& a_grid, double target_rho,
                          std::uint64_t seed, double q_prime = 100.0) {
  const auto pts = sweep_a(inst, a_grid, seed, q_prime);
  std::size_t best = 0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (std::fabs(pts[k].rho - target_rho) < std::fabs(pts[best].rho - target_rho)) best = k;
  return sample_split(inst, SplitParams{pts[best].a, q_prime, seed});
}

// ---------------------------------------------------------------------------
// JSON sidecar: c1 for every unit with nonzero c1; c2 is rebuilt as c - c1.

inline nlohmann::json split_to_json(const SplitCosts& s) {
  nlohmann::json units = nlohmann::json::array();
  const std::size_t n = s.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = s.diagonal_units ? i : i + 1; j < n; ++j)
      if (s.c1(i, j) != 0.0) units.push_back({i, j, s.c1(i, j)});
  return {{"format", "ndsearch-split"},
          {"version", 1},
          {"kind", s.diagonal_units ? "ubqp" : "tsp"},
          {"n", n},
          {"a", s.source_params.a},
          {"q_prime", s.source_params.q_prime},
          {"seed", s.source_params.seed},
          {"rho", s.rho},
          {"units", std::move(units)}};
}

inline SplitCosts split_from_json(const nlohmann::json& j, const SymMatrix& original) {
  if (j.value("format", "") != "ndsearch-split") throw ParseError("not a split sidecar", 0);
  const std::size_t n = j.at("n").get<std::size_t>();
  if (n != original.size()) throw ParseError("split sidecar size does not match instance", 0);
  SplitCosts s;
  s.diagonal_units = j.at("kind").get<std::string>() == "ubqp";
  s.source_params = {j.at("a").get<double>(), j.at("q_prime").get<double>(), j.at("seed").get<std::uint64_t>()};
  s.c1 = SymMatrix(n);
  s.c2 = SymMatrix(n);
  for (const auto& u : j.at("units")) {
    const auto a = u.at(0).get<std::size_t>(), b = u.at(1).get<std::size_t>();
    if (a >= n || b >= n) throw ParseError("split unit index out of range", 0);
    s.c1.set_sym(a, b, u.at(2).get<double>());
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) s.c2.at(a, b) = original(a, b) - s.c1(a, b);
  s.rho = j.at("rho").get<double>();
  return s;
}

}  // namespace ndsearch
