#pragma once

// Run traces: best-so-far values at improvement events plus geometric
// checkpoints (powers of 1.3) along the budget axis.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndsearch/core.hpp"

namespace ndsearch {

struct TraceEvent {
  std::uint64_t at = 0;  // consumed FEs, or elapsed ms on a time axis
  double best = 0.0;
  bool operator==(const TraceEvent&) const = default;
};

struct RunCounters {
  std::uint64_t iterations = 0;
  std::uint64_t escape_calls = 0;  // NDS / ENS / FurtherExploit invocations
  std::uint64_t escape_successes = 0;
  std::uint64_t escape_fe = 0;     // FEs spent inside escape calls
  std::uint64_t gate_blocked = 0;  // ILK+NDE iterations where x_best dominated x_j
};

struct RunTrace {
  std::string algorithm;
  std::string instance;
  std::uint64_t seed = 0;
  bool time_axis = false;
  Sense sense = Sense::minimize;
  std::vector<TraceEvent> events;
  double final_best = 0.0;
  std::vector<int> final_solution;  // tour order, or bits as 0/1
  std::uint64_t fe_used = 0;
  RunCounters counters;
  nlohmann::json config;  // echo of the solver configuration
};

class TraceRecorder {
 public:
  TraceRecorder(RunTrace& trace, const Budget& budget) : trace_(trace), budget_(budget) {}

  // Records the starting point (before any evaluation is charged).
  void start(double value) {
    best_ = value;
    push(axis(), value);
  }

  void improve(double best) {
    const std::uint64_t at = axis();
    emit_checkpoints(at);
    best_ = best;
    push(at, best);
  }

  void tick() { emit_checkpoints(axis()); }

  void finish() {
    const std::uint64_t at = axis();
    emit_checkpoints(at);
    push(at, best_);
    trace_.final_best = best_;
    trace_.fe_used = budget_.consumed();
  }

  double best() const { return best_; }

 private:
  std::uint64_t axis() const {
    return trace_.time_axis ? static_cast<std::uint64_t>(budget_.elapsed().count()) : budget_.consumed();
  }

  void emit_checkpoints(std::uint64_t at) {
    while (static_cast<double>(next_cp_) <= static_cast<double>(at)) {
      push(next_cp_, best_);
      cp_value_ *= 1.3;
      const auto nxt = static_cast<std::uint64_t>(std::ceil(cp_value_));
      next_cp_ = nxt > next_cp_ ? nxt : next_cp_ + 1;
    }
  }

  // Keeps events strictly ordered: a second event at the same point replaces
  // the first.
  void push(std::uint64_t at, double best) {
    auto& ev = trace_.events;
    if (!ev.empty() && ev.back().at == at) {
      ev.back().best = best;
      return;
    }
    if (!ev.empty() && ev.back().at > at) return;
    ev.push_back({at, best});
  }

  RunTrace& trace_;
  const Budget& budget_;
  double best_ = 0.0;
  double cp_value_ = 1.0;
  std::uint64_t next_cp_ = 1;
};

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV with "#" provenance lines, then columns fe_or_ms,best_f. No timestamps,
// so identical runs give identical bytes.
inline std::string trace_to_csv(const RunTrace& t, const std::string& provenance = "") {
  std::string out;
  out += "# ndsearch " + std::string(kVersion) + "\n";
  if (!provenance.empty()) out += "# invocation: " + provenance + "\n";
  out += "# algorithm=" + t.algorithm + " instance=" + t.instance + " seed=" + std::to_string(t.seed) +
         " sense=" + to_string(t.sense) + " axis=" + (t.time_axis ? "ms" : "fe") + "\n";
  if (!t.config.is_null()) out += "# config=" + t.config.dump() + "\n";
  out += "fe_or_ms,best_f\n";
  for (const auto& e : t.events) out += std::to_string(e.at) + "," + format_real(e.best) + "\n";
  return out;
}

inline nlohmann::json trace_to_json(const RunTrace& t, const std::string& provenance = "") {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : t.events) ev.push_back({e.at, e.best});
  return {{"format", "ndsearch-trace"},
          {"version", kVersion},
          {"invocation", provenance},
          {"algorithm", t.algorithm},
          {"instance", t.instance},
          {"seed", t.seed},
          {"sense", to_string(t.sense)},
          {"axis", t.time_axis ? "ms" : "fe"},
          {"config", t.config},
          {"events", ev},
          {"final_best", t.final_best},
          {"final_solution", t.final_solution},
          {"fe_used", t.fe_used},
          {"counters",
           {{"iterations", t.counters.iterations},
            {"escape_calls", t.counters.escape_calls},
            {"escape_successes", t.counters.escape_successes},
            {"escape_fe", t.counters.escape_fe},
            {"gate_blocked", t.counters.gate_blocked}}}};
}

}  // namespace ndsearch
