#pragma once

// Shared vocabulary: optimization sense, error types, dense symmetric
// matrices, seeded random streams and the function-evaluation budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ndsearch {

inline constexpr const char* kVersion = "1.0.0";

enum class Sense { minimize, maximize };

inline const char* to_string(Sense s) { return s == Sense::minimize ? "minimize" : "maximize"; }

// True when `candidate` is strictly better than `reference` under `sense`.
inline bool better(Sense sense, double candidate, double reference) {
  return sense == Sense::minimize ? candidate < reference : candidate > reference;
}

// An improving delta is negative when minimizing, positive when maximizing.
inline bool improving_delta(Sense sense, double delta) {
  return sense == Sense::minimize ? delta < 0.0 : delta > 0.0;
}

// Strict improvement that ignores summation-order noise (relative 1e-12).
inline bool clearly_better(Sense sense, double candidate, double reference) {
  const double tol = 1e-12 * std::max(1.0, std::fabs(reference));
  return sense == Sense::minimize ? candidate < reference - tol : candidate > reference + tol;
}

inline bool relative_close(double a, double b, double rel = 1e-9) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= rel * scale;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Dense n x n matrix stored row-major. Symmetry is maintained by callers via
// set_sym().
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  void set_sym(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  const double* row(std::size_t i) const { return data_.data() + i * n_; }
  const std::vector<double>& raw() const { return data_; }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Random streams

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// xoshiro256** with portable helpers, so that traces are identical across
// standard libraries (std:: distributions are implementation-defined).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) {
      x = splitmix64(x);
      s = x;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  // Uniform integer in [0, n), unbiased (Lemire's method).
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: empty range");
    const std::uint64_t bound = n;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  // Uniform integer in [lo, hi].
  long long between(long long lo, long long hi) {
    return lo + static_cast<long long>(index(static_cast<std::size_t>(hi - lo + 1)));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

// Independent named stream derived from a master seed.
inline Rng make_stream(std::uint64_t master_seed, std::string_view name) {
  return Rng(splitmix64(master_seed ^ hash_name(name)));
}

// ---------------------------------------------------------------------------
// Budget

// Counts function evaluations (one per delta or full evaluation). An optional
// wall-clock limit is polled every 256 evaluations.
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Budget(std::uint64_t max_fe = std::numeric_limits<std::uint64_t>::max(),
                  std::optional<std::chrono::milliseconds> max_wall = std::nullopt)
      : max_fe_(max_fe), max_wall_(max_wall), start_(Clock::now()) {}

  static Budget unlimited() { return Budget(); }

  // Charges one evaluation. Returns false (and charges nothing) once exhausted.
  bool consume() {
    if (exhausted_) return false;
    if (consumed_ >= max_fe_) {
      exhausted_ = true;
      return false;
    }
    if (max_wall_ && (consumed_ & 255u) == 0 && elapsed() >= *max_wall_) {
      exhausted_ = true;
      return false;
    }
    ++consumed_;
    return true;
  }

  bool exhausted() {
    if (!exhausted_ && (consumed_ >= max_fe_ || (max_wall_ && elapsed() >= *max_wall_)))
      exhausted_ = true;
    return exhausted_;
  }

  // Forces exhaustion, used when a target value is reached.
  void stop() { exhausted_ = true; }

  std::uint64_t consumed() const { return consumed_; }
  std::uint64_t max_fe() const { return max_fe_; }
  const std::optional<std::chrono::milliseconds>& max_wall() const { return max_wall_; }

  std::chrono::milliseconds elapsed() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_);
  }

  // Fraction of the budget spent so far, by whichever limit is tighter.
  double fraction_used() const {
    double f = max_fe_ == std::numeric_limits<std::uint64_t>::max()
                   ? 0.0
                   : static_cast<double>(consumed_) / static_cast<double>(max_fe_);
    if (max_wall_ && max_wall_->count() > 0)
      f = std::max(f, static_cast<double>(elapsed().count()) / static_cast<double>(max_wall_->count()));
    return f;
  }

 private:
  std::uint64_t max_fe_;
  std::optional<std::chrono::milliseconds> max_wall_;
  Clock::time_point start_;
  std::uint64_t consumed_ = 0;
  bool exhausted_ = false;
};

}  // namespace ndsearch
