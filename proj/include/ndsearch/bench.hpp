#pragma once

// Multi-seed campaigns: load instances, run every (instance, algorithm, seed)
// cell on a worker pool, persist traces, summarize final excess.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ndsearch/decomposition.hpp"
#include "ndsearch/instances.hpp"
#include "ndsearch/metaheuristics.hpp"
#include "ndsearch/stats.hpp"
#include "ndsearch/trace.hpp"

namespace ndsearch {

inline double excess(double f_x, double f_opt) {
  if (f_opt == 0.0) throw DomainError("excess: optimum value must be nonzero");
  return std::fabs(f_x - f_opt) / std::fabs(f_opt);
}

// Published optima / best-known values.
inline std::optional<double> known_optimum(const std::string& name) {
  static const std::map<std::string, double> table{
      {"eil51", 426},      {"st70", 675},       {"pr76", 108159},    {"rat99", 1211},
      {"rd100", 7910},     {"eil101", 629},     {"bqp1000.1", 371438}, {"bqp2500.1", 1515944},
  };
  const auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

using AnyInstance = std::variant<TspInstance, QuboInstance>;

inline std::string instance_name(const AnyInstance& a) {
  return std::visit([](const auto& i) { return i.name; }, a);
}

// TSPLIB if the text carries a DIMENSION keyword, OR-Library otherwise.
inline AnyInstance load_instance(const std::string& path) {
  const std::string text = read_file(path);
  const std::string stem = std::filesystem::path(path).filename().string();
  if (text.find("DIMENSION") != std::string::npos) {
    auto t = parse_tsplib(text);
    if (t.name.empty()) t.name = std::filesystem::path(path).stem().string();
    return t;
  }
  auto q = parse_orlib_bqp(text);
  auto dot = stem.rfind(".txt");
  q.name = dot == std::string::npos ? stem : stem.substr(0, dot);
  return q;
}

struct AlgorithmSpec {
  std::string label;  // unique within a campaign
  SolverConfig config;
};

struct InstanceSpec {
  std::string path;
  std::optional<double> optimum;
};

struct CampaignSpec {
  std::vector<InstanceSpec> instances;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;  // empty: keep traces in memory only
  std::size_t threads = 1;
  std::string baseline;    // label compared against; default the first algorithm
  bool stop_at_optimum = true;
};

// {"instances": [{"path": ..., "optimum": ...}], "seeds": [...],
//  "algorithms": [{"label": ..., "algorithm": "ils_nds", "a": 2.5,
//                  "split_seed": 1, "max_fe": 1e6, ...}], ...}
inline CampaignSpec campaign_from_json(const nlohmann::json& j) {
  CampaignSpec s;
  for (const auto& i : j.at("instances")) {
    InstanceSpec is;
    if (i.is_string()) {
      is.path = i.get<std::string>();
    } else {
      is.path = i.at("path").get<std::string>();
      if (i.contains("optimum")) is.optimum = i.at("optimum").get<double>();
    }
    s.instances.push_back(is);
  }
  for (const auto& v : j.at("seeds")) s.seeds.push_back(v.get<std::uint64_t>());
  {
    auto sorted = s.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("campaign seeds must be distinct");
  }
  const auto def = j.value("defaults", nlohmann::json::object());
  auto get = [&](const nlohmann::json& a, const char* key) -> const nlohmann::json* {
    if (a.contains(key)) return &a.at(key);
    if (def.contains(key)) return &def.at(key);
    return nullptr;
  };
  std::set<std::string> labels;
  for (const auto& a : j.at("algorithms")) {
    AlgorithmSpec as;
    SolverConfig& c = as.config;
    c.algorithm = parse_algorithm(a.at("algorithm").get<std::string>());
    as.label = a.value("label", std::string(to_string(c.algorithm)));
    if (!labels.insert(as.label).second) throw std::invalid_argument("duplicate algorithm label " + as.label);
    if (auto* v = get(a, "max_fe")) c.max_fe = static_cast<std::uint64_t>(v->get<double>());
    if (auto* v = get(a, "max_wall_ms")) {
      c.max_wall = std::chrono::milliseconds(v->get<long long>());
      if (!get(a, "max_fe")) c.time_axis = true;
    }
    if (auto* v = get(a, "a")) c.split_params = SplitParams{v->get<double>(), 100.0, 1};
    if (c.split_params) {
      if (auto* v = get(a, "q_prime")) c.split_params->q_prime = v->get<double>();
      if (auto* v = get(a, "split_seed")) c.split_params->seed = v->get<std::uint64_t>();
    }
    if (needs_penalty(c.algorithm) || get(a, "T")) {
      PenaltyConfig p;
      if (auto* v = get(a, "T")) p.T = v->get<std::size_t>();
      if (auto* v = get(a, "k")) p.k = v->get<std::size_t>();
      if (auto* v = get(a, "c_tilde")) p.c_tilde = v->get<double>();
      c.penalty = p;
    }
    if (auto* v = get(a, "flip_fraction")) c.flip_fraction = v->get<double>();
    if (auto* v = get(a, "warmup_fraction")) c.warmup_fraction = v->get<double>();
    if (auto* v = get(a, "aspiration")) c.tabu.aspiration = v->get<bool>();
    if (auto* v = get(a, "lk_depth")) c.lk.max_depth = v->get<std::size_t>();
    if (auto* v = get(a, "neighbor_k")) c.neighbor_k = v->get<std::size_t>();
    s.algorithms.push_back(as);
  }
  s.output_dir = j.value("output_dir", std::string());
  s.threads = j.value("threads", std::size_t{1});
  s.baseline = j.value("baseline", s.algorithms.empty() ? std::string() : s.algorithms.front().label);
  s.stop_at_optimum = j.value("stop_at_optimum", true);
  return s;
}

struct CellResult {
  std::string instance, label;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double final_best = 0.0;
  double final_excess = std::numeric_limits<double>::quiet_NaN();
  RunTrace trace;
};

struct ExcessSummary {
  std::string instance, label;
  std::size_t runs = 0, failures = 0;
  double mean = 0.0, stdev = 0.0;
  std::vector<double> finals;  // per-seed excess, in seed order
  std::string verdict = "=";   // "-": significantly worse than the baseline
  double p_value = 1.0;
};

struct CampaignResult {
  std::vector<CellResult> cells;
  std::vector<ExcessSummary> summaries;
};

inline std::string summary_csv(const CampaignResult& r, const std::string& baseline,
                               const std::string& provenance = "") {
  std::ostringstream o;
  o.precision(10);
  o << "# ndsearch " << kVersion << "\n";
  if (!provenance.empty()) o << "# invocation: " << provenance << "\n";
  o << "instance,algorithm,runs,failures,mean_excess,std_excess,verdict_vs_" << baseline << ",p_value\n";
  for (const auto& s : r.summaries)
    o << s.instance << ',' << s.label << ',' << s.runs << ',' << s.failures << ',' << s.mean << ',' << s.stdev
      << ',' << s.verdict << ',' << s.p_value << '\n';
  return o.str();
}

// Every cell is a pure function of (spec, instance files); cells run on
// `spec.threads` workers and results are collected in cell order.
inline CampaignResult run_campaign(const CampaignSpec& spec, const std::string& provenance = "") {
  struct Loaded {
    std::optional<AnyInstance> inst;
    std::string name, error;
    std::optional<double> opt;
  };
  std::vector<Loaded> loaded;
  for (const auto& is : spec.instances) {
    Loaded l;
    try {
      l.inst = load_instance(is.path);
      l.name = instance_name(*l.inst);
      l.opt = is.optimum ? is.optimum : known_optimum(l.name);
    } catch (const std::exception& e) {
      l.name = std::filesystem::path(is.path).stem().string();
      l.error = e.what();
    }
    loaded.push_back(std::move(l));
  }

  CampaignResult out;
  for (const auto& l : loaded)
    for (const auto& a : spec.algorithms)
      for (auto seed : spec.seeds) out.cells.push_back({l.name, a.label, seed, false, l.error, 0.0, NAN, {}});

  const std::size_t per_inst = spec.algorithms.size() * spec.seeds.size();
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t k; (k = next.fetch_add(1)) < out.cells.size();) {
      CellResult& cell = out.cells[k];
      const Loaded& l = loaded[k / per_inst];
      if (!l.inst) continue;
      const auto& as = spec.algorithms[(k % per_inst) / spec.seeds.size()];
      SolverConfig c = as.config;
      c.seed = cell.seed;
      if (spec.stop_at_optimum && l.opt) c.target = *l.opt;
      try {
        cell.trace = std::visit([&](const auto& inst) { return run_solver(c, inst); }, *l.inst);
        cell.trace.algorithm = as.label;
        cell.final_best = cell.trace.final_best;
        if (l.opt) cell.final_excess = excess(cell.final_best, *l.opt);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(spec.threads, out.cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  if (!spec.output_dir.empty()) {
    std::filesystem::create_directories(spec.output_dir);
    for (const auto& cell : out.cells) {
      if (!cell.ok) continue;
      const auto file = std::filesystem::path(spec.output_dir) /
                        (cell.instance + "__" + cell.label + "__seed" + std::to_string(cell.seed) + ".csv");
      std::ofstream(file, std::ios::binary) << trace_to_csv(cell.trace, provenance);
    }
  }

  for (std::size_t li = 0; li < loaded.size(); ++li) {
    std::vector<ExcessSummary> group;
    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      ExcessSummary s;
      s.instance = loaded[li].name;
      s.label = spec.algorithms[ai].label;
      for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
        const auto& cell = out.cells[li * per_inst + ai * spec.seeds.size() + si];
        ++s.runs;
        if (!cell.ok || std::isnan(cell.final_excess)) {
          ++s.failures;
          continue;
        }
        s.finals.push_back(cell.final_excess);
      }
      if (!s.finals.empty()) {
        double sum = 0.0;
        for (double v : s.finals) sum += v;
        s.mean = sum / static_cast<double>(s.finals.size());
        double ss = 0.0;
        for (double v : s.finals) ss += (v - s.mean) * (v - s.mean);
        s.stdev = s.finals.size() > 1 ? std::sqrt(ss / static_cast<double>(s.finals.size() - 1)) : 0.0;
      } else {
        s.mean = s.stdev = std::numeric_limits<double>::quiet_NaN();
      }
      group.push_back(std::move(s));
    }
    const ExcessSummary* base = nullptr;
    for (const auto& g : group)
      if (g.label == spec.baseline) base = &g;
    for (auto& g : group) {
      if (base && &g != base && !g.finals.empty() && !base->finals.empty()) {
        const auto t = rank_sum_test(g.finals, base->finals);
        g.verdict = t.verdict;
        g.p_value = t.p_value;
      }
    }
    for (auto& g : group) out.summaries.push_back(std::move(g));
  }
  if (!spec.output_dir.empty())
    std::ofstream(std::filesystem::path(spec.output_dir) / "summary.csv", std::ios::binary)
        << summary_csv(out, spec.baseline, provenance);
  return out;
}

}  // namespace ndsearch
