// ndsearch command-line front end.
//
//   ndsearch decompose --instance eil51.tsp --a 2 --seed 1 -o split.json
//   ndsearch sweep-a   --instance eil51.tsp --a=-12,0,10
//   ndsearch analyze   --instance eil51.tsp --a=-12,2 --optima 200
//   ndsearch solve     --alg ils_nds --instance eil51.tsp --a=-12 --seed 7 --max-fe 1e6
//   ndsearch bench     --campaign campaign.json
//   ndsearch verify    --n 7 --seed 3
//
// Exit codes: 0 success, 2 usage or configuration error, 3 verification
// failure, 1 anything else.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "ndsearch/ndsearch.hpp"

using namespace ndsearch;

namespace {

constexpr int kUsage = 2;
constexpr int kVerifyFailed = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g_invocation;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

std::string csv_preamble(std::uint64_t seed) {
  return "# ndsearch " + std::string(kVersion) + "\n# invocation: " + g_invocation +
         "\n# seed=" + std::to_string(seed) + "\n";
}

std::uint64_t fe_count(double v) {
  if (!(v >= 0.0)) throw UsageError("--max-fe must be non-negative");
  if (v >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(v);
}

std::size_t default_threads() {
  if (const char* e = std::getenv("NDSEARCH_THREADS")) {
    const long v = std::strtol(e, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

struct DecomposeOpts {
  std::string instance, output;
  double a = 0.0, q_prime = 100.0;
  std::uint64_t seed = 1;
};

int run_decompose(const DecomposeOpts& o) {
  const auto inst = load_instance(o.instance);
  const SplitParams p{o.a, o.q_prime, o.seed};
  auto j = std::visit([&](const auto& i) { return split_to_json(sample_split(i, p)); }, inst);
  j["instance"] = instance_name(inst);
  j["ndsearch_version"] = kVersion;
  j["invocation"] = g_invocation;
  emit(o.output, j.dump() + "\n");
  std::cerr << "rho = " << j["rho"].get<double>() << "\n";
  return 0;
}

struct SweepOpts {
  std::string instance, output;
  std::vector<double> a;
  double q_prime = 100.0;
  std::uint64_t seed = 1;
};

int run_sweep(const SweepOpts& o) {
  const auto inst = load_instance(o.instance);
  const auto pts = std::visit([&](const auto& i) { return sweep_a(i, o.a, o.seed, o.q_prime); }, inst);
  std::string out = csv_preamble(o.seed) + "a,rho\n";
  for (const auto& p : pts) out += format_real(p.a) + "," + format_real(p.rho) + "\n";
  emit(o.output, out);
  return 0;
}

struct AnalyzeOpts {
  std::string instance, output;
  std::vector<double> a;
  double q_prime = 100.0;
  std::uint64_t seed = 1;
  std::size_t optima = 200;
};

int run_analyze(const AnalyzeOpts& o) {
  const auto inst = load_instance(o.instance);
  std::string out = csv_preamble(o.seed) + landscape_csv_header();
  std::visit(
      [&](const auto& i) {
        using I = std::decay_t<decltype(i)>;
        Rng rng(o.seed);
        const auto optima = collect_local_optima(i, o.optima, rng);
        for (double a : o.a) {
          const auto split = sample_split(i, SplitParams{a, o.q_prime, o.seed});
          std::vector<NeighborStats> per;
          double size = 0.0;
          if constexpr (std::is_same_v<I, TspInstance>) {
            const TwoOptNeighborhood nb(i, &split);
            for (const auto& x : optima) per.push_back(classify_neighbors(nb, x));
            size = static_cast<double>(two_opt_neighborhood_size(i.n));
          } else {
            const OneFlipNeighborhood nb(i, &split);
            for (const auto& x : optima) per.push_back(classify_neighbors(nb, x));
            size = static_cast<double>(i.n);
          }
          out += landscape_csv_row({i.name, a, split.rho, aggregate_stats(per), size});
        }
      },
      inst);
  emit(o.output, out);
  return 0;
}

struct SolveOpts {
  std::string instance, output, alg, split_file, format = "csv";
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> split_seed;
  double max_fe = 1e6;
  std::optional<long long> max_ms;
  std::optional<double> a, target;
  double q_prime = 100.0;
  PenaltyConfig penalty;
  double warmup = 0.2;
  std::size_t lk_depth = 10, neighbor_k = 20;
};

int run_solve(const SolveOpts& o) {
  SolverConfig c;
  try {
    c.algorithm = parse_algorithm(o.alg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.seed = o.seed;
  c.max_fe = fe_count(o.max_fe);
  if (o.max_ms) {
    c.max_wall = std::chrono::milliseconds(*o.max_ms);
    c.time_axis = true;
  }
  c.target = o.target;
  c.warmup_fraction = o.warmup;
  c.lk.max_depth = o.lk_depth;
  c.neighbor_k = o.neighbor_k;
  if (needs_penalty(c.algorithm)) c.penalty = o.penalty;
  const auto inst = load_instance(o.instance);
  if (!o.split_file.empty()) {
    const auto j = nlohmann::json::parse(read_file(o.split_file));
    const SymMatrix& orig =
        std::visit([](const auto& i) -> const SymMatrix& {
          if constexpr (std::is_same_v<std::decay_t<decltype(i)>, TspInstance>)
            return i.costs;
          else
            return i.q;
        }, inst);
    c.split = std::make_shared<const SplitCosts>(split_from_json(j, orig));
  } else if (o.a) {
    c.split_params = SplitParams{*o.a, o.q_prime, o.split_seed.value_or(o.seed)};
  } else if (needs_split(c.algorithm)) {
    throw UsageError(std::string(to_string(c.algorithm)) + " needs --a or --split");
  }
  const auto t = std::visit([&](const auto& i) { return run_solver(c, i); }, inst);
  if (o.format == "json")
    emit(o.output, trace_to_json(t, g_invocation).dump(1) + "\n");
  else
    emit(o.output, trace_to_csv(t, g_invocation));
  std::cerr << to_string(c.algorithm) << " " << t.instance << " seed " << t.seed << ": best " << format_real(t.final_best)
            << " after " << t.fe_used << " FE\n";
  return 0;
}

struct BenchOpts {
  std::string campaign, output_dir;
  std::optional<std::size_t> threads;
};

int run_bench(const BenchOpts& o) {
  const auto j = nlohmann::json::parse(read_file(o.campaign));
  auto spec = campaign_from_json(j);
  if (o.threads)
    spec.threads = *o.threads;
  else if (!j.contains("threads"))
    spec.threads = default_threads();
  if (!o.output_dir.empty()) spec.output_dir = o.output_dir;
  const auto r = run_campaign(spec, g_invocation);
  for (const auto& c : r.cells)
    if (!c.ok) std::cerr << "cell " << c.instance << "/" << c.label << "/seed" << c.seed << " failed: " << c.error << "\n";
  std::cout << summary_csv(r, spec.baseline, g_invocation);
  return 0;
}

// ---------------------------------------------------------------------------
// verify: brute-force oracles on a tiny random TSP and UBQP.

double exhaustive_tsp(const TspInstance& inst) {
  std::vector<int> rest(inst.n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<int> order(inst.n);
  double best = std::numeric_limits<double>::infinity();
  do {
    order[0] = 0;
    std::copy(rest.begin(), rest.end(), order.begin() + 1);
    best = std::min(best, tour_cost(inst.costs, order));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

double exhaustive_qubo(const QuboInstance& inst) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> z(inst.n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << inst.n); ++m) {
    for (std::size_t i = 0; i < inst.n; ++i) z[i] = (m >> i) & 1u;
    best = std::max(best, qubo_value(inst.q, z));
  }
  return best;
}

struct VerifyOpts {
  std::size_t n = 7;
  std::uint64_t seed = 3;
};

int run_verify(const VerifyOpts& o) {
  if (o.n < 5 || o.n > 10) throw UsageError("verify: --n must lie in [5, 10]");
  int failures = 0;
  auto check = [&](const std::string& what, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    failures += !ok;
  };
  std::cout << "# ndsearch " << kVersion << "\n# invocation: " << g_invocation << "\n";

  const auto tsp = random_tsp(o.n, o.seed);
  const double opt = exhaustive_tsp(tsp);
  const auto split = sample_split(tsp, {2.0, 100.0, o.seed});
  {
    Rng rng(o.seed);
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
      const auto t = random_tour(tsp, rng);
      const auto s = tour_cost(split, t);
      ok &= relative_close(s.f1 + s.f2, t.cached_cost);
    }
    check("tsp split sums to f on 100 random tours", ok);
  }
  {
    Rng rng(o.seed);
    const TwoOptNeighborhood nb(tsp, &split);
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
      Tour x = random_tour(tsp, rng);
      Budget b;
      descend(nb, x, b);
      ok &= is_local_optimum(nb, x) && x.cached_cost >= opt - 1e-9 * opt;
      Budget b1, b2;
      const auto rn = nds(nb, x, b1), re = ens(nb, x, b2);
      ok &= !rn.improved || (re.improved && rn.solution.cached_cost < x.cached_cost);
      ok &= rn.fe <= re.fe;
    }
    check("2-opt descent, NDS and ENS consistent", ok);
  }
  for (auto a : {Algorithm::ils, Algorithm::ils_ens, Algorithm::ils_nds, Algorithm::ilk, Algorithm::ilk_nde}) {
    SolverConfig c;
    c.algorithm = a;
    c.seed = o.seed;
    c.max_fe = 1000000;
    c.target = opt;
    if (needs_split(a)) c.split_params = SplitParams{2.0, 100.0, o.seed};
    if (needs_penalty(a)) c.penalty = PenaltyConfig{200, 3, 0.0};
    const auto t = run_solver(c, tsp);
    check(std::string(to_string(a)) + " reaches tsp optimum " + format_real(opt), relative_close(t.final_best, opt));
  }

  const auto q = random_qubo(2 * o.n, o.seed);
  const double qopt = exhaustive_qubo(q);
  {
    const auto qs = sample_split(q, {2.0, 100.0, o.seed});
    Rng rng(o.seed);
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
      const auto z = random_bitvector(q, rng);
      ok &= relative_close(qubo_value(qs.c1, z.bits) + qubo_value(qs.c2, z.bits), z.cached_value);
    }
    check("ubqp split sums to f on 100 random vectors", ok);
  }
  for (auto a : {Algorithm::ils, Algorithm::ils_nds, Algorithm::its, Algorithm::its_nds}) {
    SolverConfig c;
    c.algorithm = a;
    c.seed = o.seed;
    c.max_fe = 1000000;
    c.target = qopt;
    if (needs_split(a)) c.split_params = SplitParams{2.0, 100.0, o.seed};
    const auto t = run_solver(c, q);
    check(std::string(to_string(a)) + " reaches ubqp optimum " + format_real(qopt), t.final_best == qopt);
  }
  return failures ? kVerifyFailed : 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number in list: '" + tok + "'");
    }
  }
  if (out.empty()) throw UsageError("empty --a list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_invocation += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Objective decomposition and non-dominance escapes for TSP and UBQP"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DecomposeOpts dec;
  auto* s_dec = app.add_subcommand("decompose", "Sample a split and write its JSON sidecar with measured rho");
  s_dec->add_option("--instance", dec.instance, "TSPLIB or OR-Library file")->required();
  s_dec->add_option("--a", dec.a, "Shape parameter");
  s_dec->add_option("--q-prime", dec.q_prime, "UBQP sampling half-range");
  s_dec->add_option("--seed", dec.seed, "Split seed");
  s_dec->add_option("-o,--output", dec.output, "Output path (default stdout)");

  SweepOpts sw;
  std::string sweep_list = "-12,-3,0,2,10";
  auto* s_sw = app.add_subcommand("sweep-a", "Measured rho for a list of shape parameters");
  s_sw->add_option("--instance", sw.instance)->required();
  s_sw->add_option("--a", sweep_list, "Comma-separated a values");
  s_sw->add_option("--q-prime", sw.q_prime);
  s_sw->add_option("--seed", sw.seed);
  s_sw->add_option("-o,--output", sw.output);

  AnalyzeOpts an;
  std::string analyze_list = "-12,-3,0,2,10";
  auto* s_an = app.add_subcommand("analyze", "Neighborhood non-dominance statistics over sampled local optima");
  s_an->add_option("--instance", an.instance)->required();
  s_an->add_option("--a", analyze_list, "Comma-separated a values");
  s_an->add_option("--optima", an.optima, "Number of local optima");
  s_an->add_option("--q-prime", an.q_prime);
  s_an->add_option("--seed", an.seed);
  s_an->add_option("-o,--output", an.output);

  SolveOpts so;
  auto* s_so = app.add_subcommand("solve", "Run one driver and emit its trace");
  s_so->add_option("--alg", so.alg, "ils, ils_ens, ils_nds, its, its_nds, ilk, ilk_e, ilk_nde")->required();
  s_so->add_option("--instance", so.instance)->required();
  s_so->add_option("--seed", so.seed);
  s_so->add_option("--max-fe", so.max_fe, "Function-evaluation budget (accepts 1e6)");
  s_so->add_option("--max-ms", so.max_ms, "Wall-clock budget; switches the trace axis to ms");
  s_so->add_option("--a", so.a, "Shape parameter for the split");
  s_so->add_option("--q-prime", so.q_prime);
  s_so->add_option("--split-seed", so.split_seed, "Split seed (default --seed)");
  s_so->add_option("--split", so.split_file, "Split sidecar from `decompose`");
  s_so->add_option("--target", so.target, "Stop once the best value reaches this");
  s_so->add_option("--T", so.penalty.T, "Penalized LK budget per exploitation");
  s_so->add_option("--k", so.penalty.k, "Penalized edges per exploitation");
  s_so->add_option("--c-tilde", so.penalty.c_tilde, "Penalty (default: largest edge cost)");
  s_so->add_option("--warmup", so.warmup, "Budget share of plain ILK before exploitation");
  s_so->add_option("--lk-depth", so.lk_depth);
  s_so->add_option("--neighbor-k", so.neighbor_k);
  s_so->add_option("--format", so.format)->check(CLI::IsMember({"csv", "json"}));
  s_so->add_option("-o,--output", so.output);

  BenchOpts be;
  auto* s_be = app.add_subcommand("bench", "Run a multi-seed campaign from a JSON file");
  s_be->add_option("--campaign", be.campaign)->required();
  s_be->add_option("--threads", be.threads, "Worker threads (default NDSEARCH_THREADS or all cores)");
  s_be->add_option("--output-dir", be.output_dir, "Directory for traces and summary.csv");

  VerifyOpts ve;
  auto* s_ve = app.add_subcommand("verify", "Brute-force oracle checks on a tiny random instance");
  s_ve->add_option("--n", ve.n, "Cities (UBQP uses 2n variables)");
  s_ve->add_option("--seed", ve.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*s_dec) return run_decompose(dec);
    if (*s_sw) {
      sw.a = parse_list(sweep_list);
      return run_sweep(sw);
    }
    if (*s_an) {
      an.a = parse_list(analyze_list);
      return run_analyze(an);
    }
    if (*s_so) return run_solve(so);
    if (*s_be) return run_bench(be);
    if (*s_ve) return run_verify(ve);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "json error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
