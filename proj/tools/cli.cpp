#include "multimatch/cli.hpp"

#include <omp.h>
#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "multimatch/baselines.hpp"
#include "multimatch/errors.hpp"
#include "multimatch/eval.hpp"
#include "multimatch/greedy.hpp"
#include "multimatch/io.hpp"
#include "multimatch/mp_solver.hpp"
#include "multimatch/synthgen.hpp"

namespace multimatch {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("multimatch", sink);
  log->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("MULTIMATCH_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "debug") level = spdlog::level::debug;
    else if (v != "info") log->warn("ignoring MULTIMATCH_LOG={}; expected error, info or debug", v);
  }
  log->set_level(level);
  return log;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

// Collects what a command read and wrote; written last as manifest.json.
class Manifest {
 public:
  Manifest(std::string command, fs::path dir) : dir_(std::move(dir)), start_(Clock::now()) {
    doc_["command"] = std::move(command);
    doc_["config"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::array();
  }

  json& config() { return doc_["config"]; }
  json& summary() { return doc_["summary"]; }

  void input(const std::string& role, const fs::path& path) {
    doc_["inputs"][role] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  }

  void write(const std::string& name, const std::string& contents) {
    write_file_atomically(dir_ / name, contents);
    doc_["outputs"].push_back((dir_ / name).string());
  }

  void finish() {
    doc_["duration_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
    write_file_atomically(dir_ / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  Clock::time_point start_;
  json doc_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// A source given by name, or failing that by 1-based position.
SourceIndex resolve_source(const MultipartiteGraph& g, const std::string& token) {
  if (auto s = g.find_source(token)) return *s;
  std::size_t pos = 0;
  try {
    const unsigned long k = std::stoul(token, &pos);
    if (pos == token.size() && k >= 1 && k <= g.source_count()) return static_cast<SourceIndex>(k - 1);
  } catch (const std::exception&) {
  }
  throw UsageError("unknown source '" + token + "'");
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(text)) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v == 0) throw UsageError("grid values must be positive integers, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct MpFlags {
  std::size_t max_iters = MpConfig{}.max_iters;
  std::size_t starts = MpConfig{}.starts;
  std::size_t step_cap = MpConfig{}.step_cap;
  double damping = MpConfig{}.damping;
  double convergence = MpConfig{}.convergence_fraction;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--max-iters", max_iters, "Message-passing round limit")->check(CLI::PositiveNumber);
    cmd->add_option("--starts", starts, "Starting combinations per partner search")->check(CLI::PositiveNumber);
    cmd->add_option("--step-cap", step_cap, "Slot updates per start")->check(CLI::PositiveNumber);
    cmd->add_option("--damping", damping, "Message damping in [0,1)")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--convergence", convergence, "Stop once fewer than this share of messages change")
        ->check(CLI::Range(1e-12, 1.0));
  }

  MpConfig config() const {
    MpConfig c;
    c.max_iters = max_iters;
    c.starts = starts;
    c.step_cap = step_cap;
    c.damping = damping;
    c.convergence_fraction = convergence;
    return c;
  }

  json echo() const {
    return {{"max_iters", max_iters}, {"starts", starts}, {"step_cap", step_cap}, {"damping", damping},
            {"convergence", convergence}};
  }
};

std::string diagnostics_csv(const MpDiagnostics& d) {
  std::string out = "iteration,changed_fraction,total_weight\n";
  for (std::size_t i = 0; i < d.iterations_run; ++i)
    out += std::to_string(i + 1) + ',' + format_number(d.changed_fraction[i]) + ',' +
           format_number(d.total_weight[i]) + '\n';
  return out;
}

json diagnostics_json(const MpDiagnostics& d) {
  return {{"iterations", d.iterations_run},
          {"converged", d.converged},
          {"final_changed_fraction", d.changed_fraction.empty() ? 0.0 : d.changed_fraction.back()}};
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  SynthConfig synth;
  std::string out = ".";
};

void cmd_generate(const GenerateArgs& a, spdlog::logger& log) {
  fs::create_directories(a.out);
  Manifest manifest("generate", a.out);
  manifest.config() = {{"entities", a.synth.n}, {"sources", a.synth.m}, {"features", a.synth.k},
                       {"sigma", a.synth.sigma}, {"seed", a.synth.seed}};
  const SynthWorld world = generate(a.synth);
  std::ostringstream edges, truth;
  write_edges_csv(edges, world.graph);
  write_truth_csv(truth, world.graph, world.truth);
  manifest.write("edges.csv", edges.str());
  manifest.write("truth.csv", truth.str());
  manifest.write("world.json", world_metadata_json(a.synth));
  manifest.summary() = {{"edges", world.graph.edge_count()}, {"positives", world.truth.positives.size()}};
  manifest.finish();
  log.info("generated {} edges and {} truth pairs in {}", world.graph.edge_count(), world.truth.positives.size(),
           a.out);
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string algorithm;
  std::string edges;
  std::string truth;
  double threshold = 0.0;
  std::string order;
  std::string s1, s2;
  std::string metric = "real";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = ".";
  MpFlags mp;
};

AlgorithmOptions algorithm_options(const MultipartiteGraph& g, const MpFlags& mp, const std::string& order,
                                   const std::string& s1, const std::string& s2) {
  AlgorithmOptions opts;
  opts.mp = mp.config();
  for (const std::string& tok : split_list(order)) opts.order.push_back(resolve_source(g, tok));
  if (!opts.order.empty() && opts.order.size() != g.source_count())
    throw UsageError("--order must list all " + std::to_string(g.source_count()) + " sources");
  if (!s1.empty()) opts.s1 = resolve_source(g, s1);
  if (!s2.empty()) opts.s2 = resolve_source(g, s2);
  return opts;
}

Evaluator make_evaluator(const std::string& metric, TruthSet truth, const AlgorithmOptions& opts) {
  if (metric == "real") return Evaluator::real(std::move(truth), opts.s1, opts.s2);
  return Evaluator::synthetic(std::move(truth));
}

void require_two_sources(const MultipartiteGraph& g, const AlgorithmOptions& opts, Algorithm a) {
  if (a == Algorithm::ExactBipartite && (g.source_count() < 2 || opts.s1 == opts.s2 ||
                                         opts.s1 >= g.source_count() || opts.s2 >= g.source_count()))
    throw UsageError("exact-bipartite needs two distinct sources");
}

void cmd_solve(const SolveArgs& a, spdlog::logger& log) {
  const Algorithm alg = *parse_algorithm(a.algorithm);
  fs::create_directories(a.out);
  Manifest manifest("solve", a.out);
  manifest.config() = {{"algorithm", a.algorithm}, {"threshold", a.threshold}, {"order", a.order},
                       {"s1", a.s1},           {"s2", a.s2},               {"seed", a.seed},
                       {"metric", a.metric},   {"mp", a.mp.echo()}};
  const LoadedGraph loaded = load_graph_file(a.edges);
  manifest.input("edges", a.edges);
  if (loaded.duplicate_count) log.warn("{} duplicate edge records kept at their maximum score", loaded.duplicate_count);
  const MultipartiteGraph& g = loaded.graph;
  const AlgorithmOptions opts = algorithm_options(g, a.mp, a.order, a.s1, a.s2);
  require_two_sources(g, opts, alg);
  log.info("solving {} sources, {} entities, {} edges with {} at threshold {}", g.source_count(), g.total_entities(),
           g.edge_count(), a.algorithm, a.threshold);

  const Resolution r = run_algorithm(g, alg, a.threshold, opts);
  Matching written = r.matching;
  if (alg == Algorithm::ManyMany)
    for (const auto& [x, y] : r.pairs) written.cliques.push_back(Clique{{x, y}});
  std::ostringstream matching;
  write_matching_jsonl(matching, g, written, unmatched_entities(g, written));
  manifest.write("matching.jsonl", matching.str());
  json summary = {{"cliques", written.cliques.size()}, {"total_weight", r.total_weight}};
  if (r.diagnostics) {
    manifest.write("diagnostics.csv", diagnostics_csv(*r.diagnostics));
    summary["mp"] = diagnostics_json(*r.diagnostics);
    if (!r.diagnostics->converged) log.warn("message passing stopped after {} rounds without converging",
                                            r.diagnostics->iterations_run);
  }
  if (!a.truth.empty()) {
    TruthSet truth = load_truth_file(a.truth, g);
    manifest.input("truth", a.truth);
    const Evaluator eval = make_evaluator(a.metric, std::move(truth), opts);
    const PrecisionRecall pr = eval.evaluate(r.pairs);
    const PrPoint point{a.threshold, pr.precision, pr.recall, pr.f1, r.total_weight};
    std::ostringstream csv;
    csv << kPrHeader << '\n';
    write_pr_rows(csv, std::span(&point, 1), a.algorithm, eval.sources_label(g));
    manifest.write("pr.csv", csv.str());
    summary["precision"] = pr.precision;
    summary["recall"] = pr.recall;
    summary["f1"] = pr.f1;
  }
  manifest.summary() = summary;
  manifest.finish();
  log.info("{} cliques, total weight {}", written.cliques.size(), format_number(r.total_weight));
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string edges;
  std::string truth;
  std::string algorithms = "mp,greedy";
  double from = 0.51, to = 0.96, step = 0.03;
  std::string metric = "synthetic";
  std::string s1, s2;
  std::string order;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out = ".";
  MpFlags mp;
};

void cmd_sweep(const SweepArgs& a, spdlog::logger& log) {
  std::vector<Algorithm> algs;
  for (const std::string& name : split_list(a.algorithms)) {
    const auto alg = parse_algorithm(name);
    if (!alg) throw UsageError("unknown algorithm '" + name + "'");
    algs.push_back(*alg);
  }
  if (algs.empty()) throw UsageError("--algorithms is empty");
  if (a.to < a.from) throw UsageError("--to must not be below --from");
  fs::create_directories(a.out);
  Manifest manifest("sweep", a.out);
  manifest.config() = {{"algorithms", a.algorithms}, {"from", a.from},   {"to", a.to},     {"step", a.step},
                       {"metric", a.metric},         {"s1", a.s1},       {"s2", a.s2},     {"order", a.order},
                       {"seed", a.seed},             {"jobs", a.jobs},   {"mp", a.mp.echo()}};
  const LoadedGraph loaded = load_graph_file(a.edges);
  manifest.input("edges", a.edges);
  const MultipartiteGraph& g = loaded.graph;
  TruthSet truth = load_truth_file(a.truth, g);
  manifest.input("truth", a.truth);
  AlgorithmOptions opts = algorithm_options(g, a.mp, a.order, a.s1, a.s2);
  opts.mp.track_weight = false;  // pr.csv only needs the final matching
  const Evaluator eval = make_evaluator(a.metric, std::move(truth), opts);
  const auto thresholds = threshold_range(a.from, a.to, a.step);

  std::ostringstream csv;
  csv << kPrHeader << '\n';
  json best = json::object();
  for (Algorithm alg : algs) {
    require_two_sources(g, opts, alg);
    log.info("sweeping {} over {} thresholds", algorithm_name(alg), thresholds.size());
    const auto curve = pr_curve(g, alg, thresholds, eval, opts, a.jobs);
    write_pr_rows(csv, curve, algorithm_name(alg), eval.sources_label(g));
    best[std::string(algorithm_name(alg))] = best_f1(curve);
  }
  manifest.write("pr.csv", csv.str());
  manifest.summary() = {{"thresholds", thresholds.size()}, {"best_f1", best}};
  manifest.finish();
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string entities_grid = "200,400,600,800,1000";
  std::string sources_grid = "3";
  std::string algorithms = "greedy,mp";
  std::size_t features = 5;
  double sigma = 0.06;
  double threshold = 0.5;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out = ".";
  MpFlags mp;
};

void cmd_bench(const BenchArgs& a, spdlog::logger& log) {
  std::vector<Algorithm> algs;
  for (const std::string& name : split_list(a.algorithms)) {
    const auto alg = parse_algorithm(name);
    if (!alg) throw UsageError("unknown algorithm '" + name + "'");
    algs.push_back(*alg);
  }
  const auto ns = parse_grid(a.entities_grid);
  const auto ms = parse_grid(a.sources_grid);
  fs::create_directories(a.out);
  Manifest manifest("bench", a.out);
  manifest.config() = {{"entities_grid", a.entities_grid}, {"sources_grid", a.sources_grid},
                       {"algorithms", a.algorithms},       {"features", a.features},
                       {"sigma", a.sigma},                 {"threshold", a.threshold},
                       {"seed", a.seed},                   {"jobs", a.jobs},
                       {"mp", a.mp.echo()}};
  std::ostringstream csv;
  csv << "algorithm,m,n,seconds,iterations\n";
  AlgorithmOptions opts;
  opts.mp = a.mp.config();
  opts.mp.track_weight = false;  // time the solve alone
  std::size_t rows = 0;
  for (std::size_t m : ms)
    for (std::size_t n : ns) {
      SynthConfig sc;
      sc.n = n;
      sc.m = m;
      sc.k = a.features;
      sc.sigma = a.sigma;
      sc.seed = a.seed;
      const SynthWorld world = generate(sc);
      for (Algorithm alg : algs) {
        if (alg == Algorithm::ExactBipartite && m < 2) continue;
        const auto start = Clock::now();
        const Resolution r = run_algorithm(world.graph, alg, a.threshold, opts);
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        const std::size_t iterations = r.diagnostics ? r.diagnostics->iterations_run : 0;
        csv << algorithm_name(alg) << ',' << m << ',' << n << ',' << format_number(seconds) << ',' << iterations
            << '\n';
        ++rows;
        log.info("{} m={} n={}: {:.3f}s", algorithm_name(alg), m, n, seconds);
      }
    }
  manifest.write("bench.csv", csv.str());
  manifest.summary() = {{"rows", rows}};
  manifest.finish();
}

// ---------------------------------------------------------------- demo

MultipartiteGraph demo_graph() {
  GraphBuilder b;
  for (int s = 1; s <= 3; ++s) {
    const SourceIndex src = b.add_source(std::to_string(s));
    for (const char* l : {"a", "b", "c"}) b.add_entity(src, l + std::to_string(s));
  }
  for (EntityIndex i = 0; i < 3; ++i)
    for (EntityIndex j = 0; j < 3; ++j) {
      const double s12 = (i == 0 && j == 0) ? 0.5 : (i == 2 && j == 2) ? 1.0 : 0.6;
      b.add_edge({0, i}, {1, j}, s12);
      b.add_edge({0, i}, {2, j}, i == j ? 1.0 : 0.1);
      b.add_edge({1, i}, {2, j}, i == j ? 1.0 : 0.1);
    }
  return std::move(b).build();
}

std::string describe(const MultipartiteGraph& g, const Matching& m) {
  std::string out;
  for (const Clique& c : m.cliques) {
    out += out.empty() ? "{" : " {";
    for (std::size_t i = 0; i < c.members.size(); ++i) out += (i ? "," : "") + g.entity_name(c.members[i]);
    out += "}";
  }
  return out;
}

void cmd_demo(const std::string& out_dir, std::ostream& out) {
  const MultipartiteGraph g = demo_graph();
  const std::vector<SourceIndex> order{0, 1, 2};
  const std::vector<std::pair<std::string, Matching>> runs{
      {"mp", solve_mp(g, 0.05).matching},
      {"exact-brute", canonical(exact_multipartite_bruteforce(g, 0.0))},
      {"greedy", canonical(greedy_match(g, 0.05))},
      {"sequential", sequential_bipartite(g, order, 0.0)},
  };
  out << "tripartite example: 3 sources x 3 entities, 27 scored pairs\n";
  const auto rows = weight_report(g, runs);
  for (std::size_t i = 0; i < rows.size(); ++i)
    out << rows[i].name << ": weight " << format_number(rows[i].weight) << ", relative to mp "
        << format_number(rows[i].relative) << ", " << describe(g, runs[i].second) << '\n';
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ostringstream edges;
    write_edges_csv(edges, g);
    write_file_atomically(fs::path(out_dir) / "edges.csv", edges.str());
    out << "edges written to " << (fs::path(out_dir) / "edges.csv").string() << '\n';
  }
}

std::vector<std::string> algorithm_names() {
  return {"greedy", "mp", "manymany", "sequential", "exact-bipartite", "exact-brute"};
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Globally one-to-one entity matching across many sources"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic world: edges.csv, truth.csv, world.json");
  generate_cmd->add_option("--entities", gen.synth.n, "Entities per source")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--sources", gen.synth.m, "Number of sources")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--features", gen.synth.k, "Latent features per entity")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--sigma", gen.synth.sigma, "Observation noise standard deviation")
      ->check(CLI::NonNegativeNumber);
  generate_cmd->add_option("--seed", gen.synth.seed, "Random seed");
  generate_cmd->add_option("--out", gen.out, "Output directory");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Match one edge file and write matching.jsonl");
  solve_cmd->add_option("--algorithm", solve.algorithm, "Solver")->required()->check(CLI::IsMember(algorithm_names()));
  solve_cmd->add_option("--edges", solve.edges, "Edge CSV")->required();
  solve_cmd->add_option("--threshold", solve.threshold, "Discard pairs scoring below this")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--order", solve.order, "Sequential source order, names or 1-based positions");
  solve_cmd->add_option("--s1", solve.s1, "First source for exact-bipartite and the two-source metric");
  solve_cmd->add_option("--s2", solve.s2, "Second source for exact-bipartite and the two-source metric");
  solve_cmd->add_option("--truth", solve.truth, "Truth CSV; adds pr.csv");
  solve_cmd->add_option("--metric", solve.metric, "Evaluation protocol")
      ->check(CLI::IsMember({"real", "synthetic"}));
  solve_cmd->add_option("--seed", solve.seed, "Random seed (recorded; solvers are deterministic)");
  solve_cmd->add_option("--jobs", solve.jobs, "Worker threads")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", solve.out, "Output directory");
  solve.mp.add_to(solve_cmd);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Precision/recall over a threshold range; writes pr.csv");
  sweep_cmd->add_option("--edges", sweep.edges, "Edge CSV")->required();
  sweep_cmd->add_option("--truth", sweep.truth, "Truth CSV")->required();
  sweep_cmd->add_option("--algorithms", sweep.algorithms, "Comma-separated solvers");
  sweep_cmd->add_option("--from", sweep.from, "First threshold")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--to", sweep.to, "Last threshold")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--step", sweep.step, "Threshold increment")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--metric", sweep.metric, "Evaluation protocol")->check(CLI::IsMember({"real", "synthetic"}));
  sweep_cmd->add_option("--s1", sweep.s1, "First source of the two-source metric");
  sweep_cmd->add_option("--s2", sweep.s2, "Second source of the two-source metric");
  sweep_cmd->add_option("--order", sweep.order, "Sequential source order");
  sweep_cmd->add_option("--seed", sweep.seed, "Random seed (recorded)");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Thresholds solved concurrently")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out, "Output directory");
  sweep.mp.add_to(sweep_cmd);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time solvers on synthetic worlds; writes bench.csv");
  bench_cmd->add_option("--entities-grid", bench.entities_grid, "Comma-separated entities per source");
  bench_cmd->add_option("--sources-grid", bench.sources_grid, "Comma-separated source counts");
  bench_cmd->add_option("--algorithms", bench.algorithms, "Comma-separated solvers");
  bench_cmd->add_option("--features", bench.features, "Latent features")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--sigma", bench.sigma, "Noise")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--threshold", bench.threshold, "Solver threshold")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", bench.seed, "Random seed");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads for message passing")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench.mp.add_to(bench_cmd);

  std::string demo_out;
  auto* demo_cmd = app.add_subcommand("demo", "Sequential versus global matching on a 3x3 tripartite example");
  demo_cmd->add_option("--out", demo_out, "Also write the example's edge CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  auto log = make_logger(err);
  try {
    if (*generate_cmd) {
      cmd_generate(gen, *log);
    } else if (*solve_cmd) {
      omp_set_num_threads(solve.jobs);
      cmd_solve(solve, *log);
    } else if (*sweep_cmd) {
      omp_set_num_threads(1);
      cmd_sweep(sweep, *log);
    } else if (*bench_cmd) {
      omp_set_num_threads(bench.jobs);
      cmd_bench(bench, *log);
    } else if (*demo_cmd) {
      cmd_demo(demo_out, out);
    }
  } catch (const UsageError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const ContractError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    log->error("{}", e.what());
    return kExitResource;
  } catch (const DataError& e) {
    log->error("{}", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    log->error("{}", e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace multimatch
