#pragma once

// Problem instances (symmetric TSP, UBQP), their solution representations and
// incremental evaluation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ndsearch/core.hpp"

namespace ndsearch {

enum class MetricTag { euc_2d, explicit_matrix };

struct TspInstance {
  std::string name;
  std::size_t n = 0;
  SymMatrix costs;
  MetricTag metric = MetricTag::explicit_matrix;
  std::vector<std::pair<double, double>> coords;  // empty for EXPLICIT

  static constexpr Sense sense = Sense::minimize;

  double cost(std::size_t i, std::size_t j) const { return costs(i, j); }
  double max_cost() const {
    const auto& r = costs.raw();
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
  }
};

struct QuboInstance {
  std::string name;
  std::size_t n = 0;
  SymMatrix q;

  static constexpr Sense sense = Sense::maximize;
};

// Two sub-objective values of one solution.
struct SubValues {
  double f1 = 0.0;
  double f2 = 0.0;
  bool operator==(const SubValues&) const = default;
};

// Per-unit split of a cost matrix into c1 + c2. Units are the upper triangle
// (i < j for TSP edges, i <= j for UBQP entries); both matrices are mirrored.
struct SplitParams {
  double a = 0.0;
  double q_prime = 100.0;
  std::uint64_t seed = 0;
};

struct SplitCosts {
  SymMatrix c1;
  SymMatrix c2;
  double rho = 0.0;
  SplitParams source_params;
  bool diagonal_units = false;  // true for UBQP

  std::size_t n() const { return c1.size(); }
};

// ---------------------------------------------------------------------------
// Instance construction

inline void check_tsp(const TspInstance& inst) {
  if (inst.n < 4) throw DomainError("TSP instance needs at least 4 cities, got " + std::to_string(inst.n));
  for (std::size_t i = 0; i < inst.n; ++i) {
    if (inst.costs(i, i) != 0.0) throw DomainError("TSP diagonal cost must be 0");
    for (std::size_t j = 0; j < inst.n; ++j) {
      if (inst.costs(i, j) < 0.0) throw DomainError("TSP costs must be non-negative");
      if (inst.costs(i, j) != inst.costs(j, i)) throw DomainError("TSP cost matrix must be symmetric");
    }
  }
}

inline double tsplib_nint(double x) { return static_cast<double>(static_cast<long long>(x + 0.5)); }

inline TspInstance make_euclidean_tsp(std::vector<std::pair<double, double>> coords, std::string name = "") {
  TspInstance inst;
  inst.name = std::move(name);
  inst.n = coords.size();
  inst.metric = MetricTag::euc_2d;
  inst.costs = SymMatrix(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = i + 1; j < inst.n; ++j) {
      const double dx = coords[i].first - coords[j].first;
      const double dy = coords[i].second - coords[j].second;
      inst.costs.set_sym(i, j, tsplib_nint(std::sqrt(dx * dx + dy * dy)));
    }
  inst.coords = std::move(coords);
  check_tsp(inst);
  return inst;
}

inline TspInstance make_explicit_tsp(SymMatrix costs, std::string name = "") {
  TspInstance inst;
  inst.name = std::move(name);
  inst.n = costs.size();
  inst.costs = std::move(costs);
  inst.metric = MetricTag::explicit_matrix;
  check_tsp(inst);
  return inst;
}

// Random points in [0, side)^2 with unrounded Euclidean costs. Used for tests
// and synthetic benchmarks; continuous costs make ties measure-zero.
inline TspInstance random_tsp(std::size_t n, std::uint64_t seed, double side = 1000.0) {
  Rng rng(seed);
  SymMatrix c(n);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {rng.uniform01() * side, rng.uniform01() * side};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      c.set_sym(i, j, std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second));
  auto inst = make_explicit_tsp(std::move(c), "random" + std::to_string(n) + "_" + std::to_string(seed));
  inst.coords = std::move(pts);
  return inst;
}

// Dense random Q with entries uniform in [-range, range], `density` fraction
// nonzero. Mirrors the OR-Library generator's shape (density 0.1, range 100).
inline QuboInstance random_qubo(std::size_t n, std::uint64_t seed, double density = 1.0, int range = 100,
                                bool integer = true) {
  Rng rng(seed);
  QuboInstance inst;
  inst.name = "qubo" + std::to_string(n) + "_" + std::to_string(seed);
  inst.n = n;
  inst.q = SymMatrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (rng.uniform01() >= density) continue;
      double v = integer ? static_cast<double>(rng.between(-range, range))
                         : (2.0 * rng.uniform01() - 1.0) * range;
      inst.q.set_sym(i, j, v);
    }
  return inst;
}

// ---------------------------------------------------------------------------
// Parsers

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

// TSPLIB reader for symmetric instances with EDGE_WEIGHT_TYPE EUC_2D or
// EXPLICIT (EDGE_WEIGHT_FORMAT FULL_MATRIX).
inline TspInstance parse_tsplib(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::string name, weight_type, weight_format = "FULL_MATRIX";
  long long dimension = -1;
  std::vector<std::pair<double, double>> coords;
  std::vector<double> weights;
  enum class Section { header, coords, weights } section = Section::header;

  auto need_dimension = [&](std::size_t at) {
    if (dimension < 0) throw ParseError("section before DIMENSION", at);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const std::string ut = detail::upper(t);
    if (ut == "EOF") break;
    if (ut == "NODE_COORD_SECTION") {
      need_dimension(lineno);
      section = Section::coords;
      continue;
    }
    if (ut == "EDGE_WEIGHT_SECTION") {
      need_dimension(lineno);
      section = Section::weights;
      continue;
    }
    const auto colon = t.find(':');
    const bool is_keyword = colon != std::string::npos && std::isalpha(static_cast<unsigned char>(t[0]));
    if (is_keyword) {
      section = Section::header;
      const std::string key = detail::upper(detail::trim(t.substr(0, colon)));
      const std::string value = detail::trim(t.substr(colon + 1));
      if (key == "NAME") {
        name = value;
      } else if (key == "DIMENSION") {
        try {
          dimension = std::stoll(value);
        } catch (const std::exception&) {
          throw ParseError("bad DIMENSION '" + value + "'", lineno);
        }
      } else if (key == "EDGE_WEIGHT_TYPE") {
        weight_type = detail::upper(value);
        if (weight_type != "EUC_2D" && weight_type != "EXPLICIT")
          throw ParseError("unsupported EDGE_WEIGHT_TYPE " + value, lineno);
      } else if (key == "EDGE_WEIGHT_FORMAT") {
        weight_format = detail::upper(value);
        if (weight_format != "FULL_MATRIX" && weight_format != "FUNCTION")
          throw ParseError("unsupported EDGE_WEIGHT_FORMAT " + value, lineno);
      } else if (key == "TYPE") {
        const std::string type = detail::upper(value);
        if (type != "TSP") throw ParseError("unsupported TYPE " + value, lineno);
      }
      continue;
    }
    std::istringstream fields(t);
    if (section == Section::coords) {
      long long id;
      double x, y;
      std::string extra;
      if (!(fields >> id >> x >> y) || (fields >> extra))
        throw ParseError("malformed coordinate line '" + t + "'", lineno);
      if (id < 1 || id > dimension) throw ParseError("node id out of range", lineno);
      coords.emplace_back(x, y);
    } else if (section == Section::weights) {
      double w;
      while (fields >> w) weights.push_back(w);
      if (!fields.eof()) throw ParseError("malformed weight line '" + t + "'", lineno);
    } else {
      throw ParseError("unexpected line '" + t + "'", lineno);
    }
  }

  if (dimension < 0) throw ParseError("missing DIMENSION", 0);
  if (dimension < 4) throw DomainError("TSP instance needs at least 4 cities, got " + std::to_string(dimension));
  const auto n = static_cast<std::size_t>(dimension);
  if (weight_type.empty()) throw ParseError("missing EDGE_WEIGHT_TYPE", 0);
  if (weight_type == "EUC_2D") {
    if (coords.size() != n)
      throw ParseError("expected " + std::to_string(n) + " coordinates, got " + std::to_string(coords.size()), 0);
    return make_euclidean_tsp(std::move(coords), name);
  }
  if (weights.size() != n * n)
    throw ParseError("FULL_MATRIX needs " + std::to_string(n * n) + " weights, got " + std::to_string(weights.size()),
                     0);
  SymMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c.at(i, j) = weights[i * n + j];
  return make_explicit_tsp(std::move(c), name);
}

// OR-Library bqp sparse format: "n nonzeros" then 1-indexed "i j value"
// triples. Off-diagonal triples are mirrored into q[i][j] and q[j][i], so
// f(z) = z^T Q z counts each off-diagonal value twice.
inline QuboInstance parse_orlib_bqp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  long long n = -1, nnz = -1, seen = 0;
  QuboInstance inst;
  std::set<std::pair<long long, long long>> given;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    std::istringstream fields(t);
    std::string extra;
    if (n < 0) {
      if (!(fields >> n >> nnz) || (fields >> extra) || n < 1 || nnz < 0)
        throw ParseError("malformed header '" + t + "'", lineno);
      inst.n = static_cast<std::size_t>(n);
      inst.q = SymMatrix(inst.n);
      continue;
    }
    long long i, j;
    double v;
    if (!(fields >> i >> j >> v) || (fields >> extra)) throw ParseError("malformed triple '" + t + "'", lineno);
    if (i < 1 || i > n || j < 1 || j > n) throw ParseError("index out of range [1, " + std::to_string(n) + "]", lineno);
    if (!given.insert({i, j}).second) throw ParseError("duplicate triple (" + std::to_string(i) + ", " + std::to_string(j) + ")", lineno);
    const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
    if (given.count({j, i}) && i != j) {
      if (inst.q(a, b) != v) throw ParseError("inconsistent mirrored triple", lineno);
    } else {
      inst.q.set_sym(a, b, v);
    }
    ++seen;
  }
  if (n < 0) throw ParseError("missing header", 0);
  if (seen != nnz)
    throw ParseError("header announces " + std::to_string(nnz) + " triples, found " + std::to_string(seen), 0);
  return inst;
}

// Writes the upper triangle of Q as OR-Library triples.
inline std::string format_orlib_bqp(const QuboInstance& inst) {
  std::ostringstream body;
  body.precision(17);
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = i; j < inst.n; ++j)
      if (inst.q(i, j) != 0.0) {
        body << (i + 1) << ' ' << (j + 1) << ' ' << inst.q(i, j) << '\n';
        ++nnz;
      }
  std::ostringstream out;
  out << inst.n << ' ' << nnz << '\n' << body.str();
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Tours

struct Tour {
  std::vector<int> order;
  double cached_cost = 0.0;

  std::size_t size() const { return order.size(); }
  bool operator==(const Tour& o) const { return order == o.order; }
};

inline double tour_cost(const SymMatrix& c, const std::vector<int>& order) {
  double s = 0.0;
  const std::size_t n = order.size();
  for (std::size_t k = 0; k < n; ++k) s += c(order[k], order[(k + 1) % n]);
  return s;
}

inline double tour_cost(const TspInstance& inst, const Tour& t) { return tour_cost(inst.costs, t.order); }

inline SubValues tour_cost(const SplitCosts& split, const Tour& t) {
  return {tour_cost(split.c1, t.order), tour_cost(split.c2, t.order)};
}

inline bool is_permutation_of_n(const std::vector<int>& order) {
  std::vector<char> seen(order.size(), 0);
  for (int v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= order.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline Tour make_tour(const TspInstance& inst, std::vector<int> order) {
  if (order.size() != inst.n || !is_permutation_of_n(order)) throw std::invalid_argument("not a tour of the instance");
  Tour t{std::move(order), 0.0};
  t.cached_cost = tour_cost(inst, t);
  return t;
}

inline Tour identity_tour(const TspInstance& inst) {
  std::vector<int> o(inst.n);
  std::iota(o.begin(), o.end(), 0);
  return make_tour(inst, std::move(o));
}

inline Tour random_tour(const TspInstance& inst, Rng& rng) {
  std::vector<int> o(inst.n);
  std::iota(o.begin(), o.end(), 0);
  rng.shuffle(o);
  return make_tour(inst, std::move(o));
}

// Undirected edge set of a tour as sorted (min, max) pairs.
inline std::vector<std::pair<int, int>> tour_edges(const Tour& t) {
  std::vector<std::pair<int, int>> e;
  const std::size_t n = t.size();
  e.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    int a = t.order[k], b = t.order[(k + 1) % n];
    e.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(e.begin(), e.end());
  return e;
}

// 2-Opt move on positions i < j: removes edges (t[i], t[i+1]) and
// (t[j], t[j+1]) and reverses t[i+1..j].
struct TwoOptMove {
  std::size_t i = 0;
  std::size_t j = 0;
};

inline bool two_opt_degenerate(std::size_t n, std::size_t i, std::size_t j) {
  return j < i + 2 || (i == 0 && j == n - 1);
}

inline std::size_t two_opt_neighborhood_size(std::size_t n) { return n * (n - 3) / 2; }

inline double two_opt_delta(const SymMatrix& c, const std::vector<int>& t, std::size_t i, std::size_t j) {
  const std::size_t n = t.size();
  if (two_opt_degenerate(n, i, j)) return 0.0;
  const int a = t[i], b = t[i + 1], d = t[j], e = t[(j + 1) % n];
  return c(a, d) + c(b, e) - c(a, b) - c(d, e);
}

inline double two_opt_delta(const TspInstance& inst, const Tour& t, std::size_t i, std::size_t j) {
  if (i >= j || j >= t.size()) throw std::invalid_argument("two_opt_delta: need i < j < n");
  return two_opt_delta(inst.costs, t.order, i, j);
}

inline SubValues two_opt_delta(const SplitCosts& split, const Tour& t, std::size_t i, std::size_t j) {
  if (i >= j || j >= t.size()) throw std::invalid_argument("two_opt_delta: need i < j < n");
  return {two_opt_delta(split.c1, t.order, i, j), two_opt_delta(split.c2, t.order, i, j)};
}

inline void apply_two_opt(Tour& t, std::size_t i, std::size_t j, double delta) {
  std::reverse(t.order.begin() + static_cast<std::ptrdiff_t>(i + 1), t.order.begin() + static_cast<std::ptrdiff_t>(j + 1));
  t.cached_cost += delta;
}

// Calls fn(i, j) for every non-degenerate 2-Opt move in lexicographic order;
// stops early when fn returns true.
template <class Fn>
bool for_each_two_opt(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i + 2 < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (fn(i, j)) return true;
    }
  return false;
}

// ---------------------------------------------------------------------------
// Bit vectors

// A UBQP solution with its value and the flip-gain vector
// gains[i] = f(flip_i(z)) - f(z).
struct BitVector {
  std::vector<std::uint8_t> bits;
  double cached_value = 0.0;
  std::vector<double> gains;

  std::size_t size() const { return bits.size(); }
  bool operator==(const BitVector& o) const { return bits == o.bits; }
};

inline double qubo_value(const SymMatrix& q, const std::vector<std::uint8_t>& z) {
  double s = 0.0;
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!z[i]) continue;
    const double* row = q.row(i);
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += z[j] ? row[j] : 0.0;
    s += r;
  }
  return s;
}

inline double qubo_value(const QuboInstance& inst, const BitVector& bv) { return qubo_value(inst.q, bv.bits); }

inline void rebuild_gains(const SymMatrix& q, BitVector& bv) {
  const std::size_t n = bv.size();
  bv.cached_value = qubo_value(q, bv.bits);
  bv.gains.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = q.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && bv.bits[j]) s += row[j];
    const double sign = bv.bits[i] ? -1.0 : 1.0;
    bv.gains[i] = sign * (row[i] + 2.0 * s);
  }
}

inline BitVector make_bitvector(const SymMatrix& q, std::vector<std::uint8_t> bits) {
  if (bits.size() != q.size()) throw std::invalid_argument("bit vector length mismatch");
  BitVector bv{std::move(bits), 0.0, {}};
  rebuild_gains(q, bv);
  return bv;
}

inline BitVector make_bitvector(const QuboInstance& inst, std::vector<std::uint8_t> bits) {
  return make_bitvector(inst.q, std::move(bits));
}

inline BitVector random_bitvector(const QuboInstance& inst, Rng& rng) {
  std::vector<std::uint8_t> bits(inst.n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return make_bitvector(inst, std::move(bits));
}

// Flips bit i in O(n): value and every gain are updated incrementally.
inline void flip_update(const SymMatrix& q, BitVector& bv, std::size_t i) {
  const double di = bv.bits[i] ? -1.0 : 1.0;
  bv.cached_value += bv.gains[i];
  const double* row = q.row(i);
  const std::size_t n = bv.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i) continue;
    const double dk = bv.bits[k] ? -1.0 : 1.0;
    bv.gains[k] += 2.0 * row[k] * di * dk;
  }
  bv.gains[i] = -bv.gains[i];
  bv.bits[i] ^= 1u;
}

// Returns the gain of flipping bit i and applies the flip.
inline double flip_delta_and_update(const QuboInstance& inst, BitVector& bv, std::size_t i) {
  if (i >= bv.size()) throw std::out_of_range("flip index");
  const double g = bv.gains[i];
  flip_update(inst.q, bv, i);
  return g;
}

// Split variant: `bv1` tracks f1 over the same bits as `bv`; f2 = f - f1.
inline SubValues flip_delta_and_update(const QuboInstance& inst, const SplitCosts& split, BitVector& bv,
                                       BitVector& bv1, std::size_t i) {
  if (i >= bv.size()) throw std::out_of_range("flip index");
  const double g = bv.gains[i], g1 = bv1.gains[i];
  flip_update(inst.q, bv, i);
  flip_update(split.c1, bv1, i);
  return {g1, g - g1};
}

// ---------------------------------------------------------------------------
// Candidate neighbor lists

struct NeighborList {
  std::size_t k = 0;
  std::vector<std::vector<int>> lists;

  const std::vector<int>& operator[](std::size_t city) const { return lists[city]; }
};

inline NeighborList build_neighbor_lists(const TspInstance& inst, std::size_t k = 20) {
  if (k < 2) throw std::invalid_argument("neighbor list size must be at least 2");
  NeighborList nl;
  nl.k = std::min(k, inst.n - 1);
  nl.lists.resize(inst.n);
  std::vector<int> others;
  for (std::size_t i = 0; i < inst.n; ++i) {
    others.clear();
    for (std::size_t j = 0; j < inst.n; ++j)
      if (j != i) others.push_back(static_cast<int>(j));
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(nl.k), others.end(), [&](int a, int b) {
      const double ca = inst.costs(i, a), cb = inst.costs(i, b);
      return ca != cb ? ca < cb : a < b;
    });
    nl.lists[i].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(nl.k));
  }
  return nl;
}

}  // namespace ndsearch
