#include "qimf/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qimf/problems.hpp"

namespace qimf::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError("bad " + what + " '" + text + "'");
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v))
    throw UsageError("bad " + what + " '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto k = text.find(sep, start);
    out.push_back(text.substr(start, k - start));
    if (k == std::string::npos) break;
    start = k + 1;
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt6(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

WeightDistribution distribution_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_distribution(text);
  } catch (const std::exception& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::size_t num_terms(const QuboInstance& inst) { return instance_hamiltonian(inst).num_terms(); }

std::optional<double> metadata_real(const QuboInstance& inst, const std::string& key) {
  const auto it = inst.metadata.find(key);
  if (it == inst.metadata.end()) return std::nullopt;
  double v = 0.0;
  const char* end = it->second.data() + it->second.size();
  auto [ptr, ec] = std::from_chars(it->second.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string kind;
  std::string blocks;
  double p_diag = 1.0;
  double p_off = 0.0;
  std::string w_diag = "norm:0,1";
  std::string w_off = "norm:0,1";
  std::uint64_t seed = 0;
  std::string output;
  std::string from_edges;
  std::string returns;
  std::optional<double> lambda;
};

void print_shot_suggestions(const QuboInstance& inst, std::ostream& out) {
  const std::size_t n_w = num_terms(inst);
  const std::size_t n_blocks = inst.num_blocks();
  out << "num_vars=" << inst.num_vars << " n_w=" << n_w << " blocks=" << n_blocks << "\n";
  out << "suggested n_s: simple=" << shot_count_simple(n_w, n_blocks);
  const auto p = metadata_real(inst, "p_off");
  const auto q = metadata_real(inst, "p_diag");
  if (p && q) {
    try {
      const auto sc = shot_count_block(n_w, n_blocks, *p, *q);
      out << " block=" << sc.n_s;
      if (sc.warning) out << " (" << *sc.warning << ")";
    } catch (const ValidationError& e) {
      out << " block=n/a (" << e.what() << ")";
    }
  } else {
    out << " block=n/a (no block probabilities recorded)";
  }
  out << "\n";
}

QuboInstance sample_wsbm(const GenerateArgs& a) {
  if (a.blocks.empty()) throw UsageError("--blocks is required unless --from-edges is given");
  const auto sizes = parse_blocks(a.blocks);
  const auto spec = WsbmSpec::two_level(sizes, a.p_diag, a.p_off,
                                        distribution_flag(a.w_diag, "--w-diag"),
                                        distribution_flag(a.w_off, "--w-off"));
  try {
    validate_spec(spec);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  auto inst = generate_wsbm(spec, a.seed);
  inst.metadata["blocks"] = a.blocks;
  inst.metadata["p_diag"] = format_double(a.p_diag);
  inst.metadata["p_off"] = format_double(a.p_off);
  inst.metadata["w_diag"] = to_string(spec.weights[0][0]);
  if (sizes.size() > 1) inst.metadata["w_off"] = to_string(spec.weights[0][1]);
  return inst;
}

void carry_block_info(const QuboInstance& from, QuboInstance& to) {
  to.block_labels = from.block_labels;
  for (const char* key : {"generator", "seed", "blocks", "p_diag", "p_off", "w_diag", "w_off"}) {
    const auto it = from.metadata.find(key);
    if (it != from.metadata.end()) to.metadata[key] = it->second;
  }
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  QuboInstance inst;
  if (a.kind == "wsbm") {
    if (!a.from_edges.empty()) throw UsageError("--from-edges applies to maxcut and ising only");
    inst = sample_wsbm(a);
    if (!a.returns.empty() || a.lambda) {
      if (a.returns.empty() || !a.lambda) throw UsageError("--returns and --lambda go together");
      if (!(*a.lambda >= 0.0 && *a.lambda <= 1.0)) throw UsageError("--lambda must lie in [0, 1]");
      const auto dist = distribution_flag(a.returns, "--returns");
      inst.linear = draw_values(dist, inst.num_vars, derive_seed(a.seed, "returns"));
      inst.metadata["lambda"] = format_double(*a.lambda);
      inst.metadata["returns"] = to_string(dist);
      inst.metadata["problem"] = "portfolio";
    }
  } else {
    if (!a.returns.empty() || a.lambda) throw UsageError("--returns/--lambda apply to wsbm only");
    const bool edges = !a.from_edges.empty();
    QuboInstance source;
    Graph g;
    if (edges) {
      g = read_edge_list(a.from_edges);
    } else {
      source = sample_wsbm(a);
      g = graph_from_instance(source);
    }
    if (a.kind == "maxcut") {
      inst = build_maxcut(g);
    } else {
      std::vector<Coupling> couplings;
      for (const auto& e : g.edges) couplings.emplace_back(e.u, e.v, e.w);
      std::vector<Field> fields;
      if (!edges) {
        for (const auto& [key, value] : source.entries) {
          if (key.first == key.second) fields.emplace_back(key.first, value);
        }
      }
      inst = ising_instance(build_ising(std::max<std::size_t>(g.num_nodes, 1), couplings, fields));
    }
    if (!edges) carry_block_info(source, inst);
  }
  save(inst, a.output);
  out << "wrote " << a.output << "\n";
  print_shot_suggestions(inst, out);
  return kExitOk;
}

// ------------------------------------------------------------ solve / bench

struct RunArgs {
  std::string instance;
  std::string algo = "qimf";
  std::size_t n_b = 40;
  std::size_t n_e = 1000;
  std::string n_s = "auto-simple";
  std::string estimator = "paper";
  std::uint64_t seed = 0;
  bool preprocess = false;
  std::string readout = "best";
  std::size_t checkpoint = 10;
  double learning_rate = 0.01;
  bool mean_baseline = false;
  double jitter = 0.0;
  std::optional<std::uint64_t> budget;
  std::optional<double> sa_t0;
};

std::size_t resolve_shots(const std::string& text, const QuboInstance& inst, std::size_t n_w,
                          std::ostream& err) {
  const std::size_t n_blocks = inst.num_blocks();
  if (text == "full") return std::max<std::size_t>(n_w, 1);
  if (text == "auto-simple") return shot_count_simple(n_w, n_blocks);
  if (text == "auto-block") {
    const auto p = metadata_real(inst, "p_off");
    const auto q = metadata_real(inst, "p_diag");
    if (!p || !q) throw UsageError("--ns auto-block needs p_diag/p_off in the instance metadata");
    const auto sc = shot_count_block(n_w, n_blocks, *p, *q);
    if (sc.warning) err << "warning: " << *sc.warning << "\n";
    return sc.n_s;
  }
  const auto v = parse_u64(text, "--ns");
  if (v == 0) throw UsageError("--ns must be at least 1");
  return static_cast<std::size_t>(v);
}

struct Prepared {
  QuboInstance instance;
  IsingHamiltonian hamiltonian;
  std::size_t n_w = 0;  // after preprocessing, when enabled
};

Prepared prepare(const RunArgs& a) {
  Prepared p;
  p.instance = load(a.instance);
  p.hamiltonian = instance_hamiltonian(p.instance);
  p.n_w = a.preprocess ? preprocess_dominant(p.hamiltonian).reduced.num_terms()
                       : p.hamiltonian.num_terms();
  return p;
}

SolverConfig base_config(const RunArgs& a, const Prepared& p, std::ostream& err) {
  SolverConfig cfg;
  try {
    cfg.algorithm = parse_algorithm(a.algo);
    cfg.estimator_mode = parse_estimator_mode(a.estimator);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  if (a.readout == "best")
    cfg.readout = Readout::BestSeen;
  else if (a.readout == "sample")
    cfg.readout = Readout::Sample;
  else
    throw UsageError("--readout must be 'best' or 'sample'");
  cfg.n_b = a.n_b;
  cfg.n_e = a.n_e;
  cfg.n_s = resolve_shots(a.n_s, p.instance, p.n_w, err);
  cfg.seed = a.seed;
  cfg.preprocess = a.preprocess;
  cfg.checkpoint_every = a.checkpoint;
  cfg.adam.learning_rate = a.learning_rate;
  cfg.mean_baseline = a.mean_baseline;
  cfg.init_jitter = a.jitter;
  cfg.sa_initial_temperature = a.sa_t0;
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

SolverConfig with_budget(SolverConfig cfg, std::optional<std::uint64_t> budget, std::size_t n_w) {
  if (!budget || cfg.algorithm == Algorithm::BruteForce) return cfg;
  return configure_for_budget(cfg, *budget, n_w);
}

void add_run_options(CLI::App* sub, RunArgs& a) {
  sub->add_option("instance", a.instance, "Instance JSON file")->required();
  sub->add_option("--nb", a.n_b, "Samples per epoch")->capture_default_str();
  sub->add_option("--ns", a.n_s, "Shots per cost: N, full, auto-simple or auto-block")
      ->capture_default_str();
  sub->add_option("--estimator", a.estimator, "paper or unbiased")->capture_default_str();
  sub->add_option("--readout", a.readout, "best or sample")->capture_default_str();
  sub->add_option("--checkpoint", a.checkpoint, "Epochs between exact QIMF checkpoints")
      ->capture_default_str();
  sub->add_option("--lr", a.learning_rate, "ADAM learning rate")->capture_default_str();
  sub->add_flag("--mean-baseline", a.mean_baseline, "Subtract the batch mean cost");
  sub->add_option("--jitter", a.jitter, "Std of initial logit noise")->capture_default_str();
  sub->add_option("--sa-t0", a.sa_t0, "SA initial temperature (default: estimated)");
  sub->add_flag("--preprocess", a.preprocess, "Fix diagonally dominant variables first");
  sub->add_option("--budget-queries", a.budget, "Total query budget; overrides --ne");
}

void summarize(const RunTrace& t, const SolverConfig& cfg, const QuboInstance& inst,
               std::ostream& out) {
  out << to_string(t.algorithm) << " seed=" << t.seed << " n_w=" << t.n_w << " n_s=" << t.n_s
      << " n_b=" << t.n_b << " n_e=" << cfg.n_e << " final_cost=" << format_double(t.final_cost)
      << " best_cost=" << format_double(t.best_cost())
      << " score=" << format_double(problem_score(inst, t.final_cost))
      << " queries=" << t.ledger.total << " oracle_queries=" << t.ledger.oracle;
  if (!t.fixed.empty()) out << " fixed=" << t.fixed.size();
  out << "\n";
}

int cmd_solve(const RunArgs& a, const std::string& trace_path, std::ostream& out,
              std::ostream& err) {
  const auto p = prepare(a);
  const auto cfg = with_budget(base_config(a, p, err), a.budget, p.n_w);
  const auto trace = solve(p.hamiltonian, cfg);
  if (!trace_path.empty()) write_text(trace_path, trace_csv(trace));
  summarize(trace, cfg, p.instance, out);
  return kExitOk;
}

struct BenchArgs {
  RunArgs run;
  std::string algos = "qimf,quamf,sa,greedy,oneplusone";
  std::string seeds = "1";
  std::vector<std::string> externs;
  std::string json;
  std::string trace_dir;
  std::size_t workers = 1;
};

struct Cell {
  Algorithm algo{};
  std::uint64_t seed = 0;
  SolverConfig cfg;
  std::optional<RunTrace> trace;
  std::string error;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_bench(const BenchArgs& b, std::ostream& out, std::ostream& err) {
  std::vector<Algorithm> algos;
  for (const auto& name : split(b.algos, ',')) {
    try {
      algos.push_back(parse_algorithm(name));
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
  }
  const auto seeds = parse_seeds(b.seeds);
  std::vector<std::pair<std::string, double>> externs;
  for (const auto& item : b.externs) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--extern expects name=value");
    externs.emplace_back(item.substr(0, eq), parse_real(item.substr(eq + 1), "--extern value"));
  }
  if (b.workers == 0) throw UsageError("--workers must be at least 1");

  const auto p = prepare(b.run);
  RunArgs qimf_args = b.run;
  qimf_args.algo = "qimf";
  const auto reference = base_config(qimf_args, p, err);
  // Shared budget: the explicit one, else what QIMF spends in n_e epochs.
  const std::uint64_t budget =
      b.run.budget.value_or(static_cast<std::uint64_t>(reference.n_e) * reference.n_s * reference.n_b);

  std::vector<Cell> cells;
  for (auto algo : algos) {
    for (auto seed : seeds) {
      Cell c;
      c.algo = algo;
      c.seed = seed;
      c.cfg = reference;
      c.cfg.algorithm = algo;
      c.cfg.seed = seed;
      cells.push_back(std::move(c));
    }
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      auto& c = cells[k];
      try {
        c.cfg = with_budget(c.cfg, budget, p.n_w);
        c.trace = solve(p.hamiltonian, c.cfg);
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(b.workers, cells.size());
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  bool failed = false;
  ordered_json runs = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json row;
    row["algo"] = to_string(c.algo);
    row["seed"] = c.seed;
    if (c.trace) {
      const auto& t = *c.trace;
      row["final_cost"] = t.final_cost;
      row["best_cost"] = t.best_cost();
      row["queries"] = t.ledger.total;
      row["seconds"] = t.seconds;
      row["score"] = problem_score(p.instance, t.final_cost);
      if (!b.trace_dir.empty()) {
        write_text(fs::path(b.trace_dir) / (to_string(c.algo) + "_seed" + std::to_string(c.seed) + ".csv"),
                   trace_csv(t));
      }
    } else {
      failed = true;
      row["failed"] = true;
      row["error"] = c.error;
      err << "error: " << to_string(c.algo) << " seed " << c.seed << ": " << c.error << "\n";
    }
    runs.push_back(std::move(row));
  }

  ordered_json aggregates = ordered_json::array();
  out << "budget_queries=" << budget << " n_w=" << p.n_w << " n_s=" << reference.n_s
      << " n_b=" << reference.n_b << " seeds=" << seeds.size() << "\n";
  out << std::left << std::setw(12) << "algo" << std::right << std::setw(4) << "n" << std::setw(16)
      << "mean score" << std::setw(14) << "std" << std::setw(16) << "best score" << std::setw(16)
      << "mean queries" << "\n";
  for (auto algo : algos) {
    std::vector<double> scores;
    double queries = 0.0;
    for (const auto& c : cells) {
      if (c.algo != algo || !c.trace) continue;
      scores.push_back(problem_score(p.instance, c.trace->final_cost));
      queries += static_cast<double>(c.trace->ledger.total);
    }
    ordered_json agg;
    agg["algo"] = to_string(algo);
    if (scores.empty()) {
      agg["mean"] = nullptr;
      agg["std"] = nullptr;
      agg["n"] = 0;
      out << std::left << std::setw(12) << to_string(algo) << std::right << std::setw(4) << 0
          << std::setw(16) << "failed" << "\n";
    } else {
      const bool maximize = problem_score(p.instance, 1.0) < 0.0;
      const double best = maximize ? *std::max_element(scores.begin(), scores.end())
                                   : *std::min_element(scores.begin(), scores.end());
      agg["mean"] = mean_of(scores);
      agg["std"] = std_of(scores);
      agg["n"] = scores.size();
      out << std::left << std::setw(12) << to_string(algo) << std::right << std::setw(4)
          << scores.size() << std::setw(16) << fmt6(mean_of(scores)) << std::setw(14)
          << fmt6(std_of(scores)) << std::setw(16) << fmt6(best) << std::setw(16)
          << fmt6(queries / static_cast<double>(scores.size())) << "\n";
    }
    aggregates.push_back(std::move(agg));
  }
  ordered_json ext = ordered_json::array();
  for (const auto& [name, value] : externs) {
    out << std::left << std::setw(12) << name << std::right << std::setw(4) << "-" << std::setw(16)
        << fmt6(value) << std::setw(14) << "(external)" << "\n";
    ext.push_back({{"name", name}, {"score", value}});
  }

  if (!b.json.empty()) {
    ordered_json doc;
    doc["runs"] = std::move(runs);
    doc["aggregates"] = std::move(aggregates);
    doc["extern"] = std::move(ext);
    doc["budget_queries"] = budget;
    write_text(b.json, doc.dump(2) + "\n");
  }
  return failed ? kExitFailure : kExitOk;
}

// ------------------------------------------------------ ingest / preprocess

struct IngestArgs {
  std::string prices;
  std::string sectors;
  double lambda = 0.5;
  double scale = 1.0;
  std::string output;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  if (!(a.lambda >= 0.0 && a.lambda <= 1.0)) throw UsageError("--lambda must lie in [0, 1]");
  if (!(a.scale > 0.0)) throw UsageError("--scale must be positive");
  const auto data = ingest_prices(a.prices, a.sectors, a.scale);
  auto inst = build_portfolio(data, a.lambda);
  inst.metadata["return_scale"] = format_double(a.scale);
  save(inst, a.output);
  out << "wrote " << a.output << ": " << data.tickers.size() << " tickers in " << data.sectors.size()
      << " sectors, " << data.num_returns << " returns\n";
  print_shot_suggestions(inst, out);
  return kExitOk;
}

struct PreprocessArgs {
  std::string instance;
  std::string output;
  std::string fixed;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const auto inst = load(a.instance);
  const auto h = instance_hamiltonian(inst);
  const auto pre = preprocess_dominant(h);

  QuboInstance reduced = inst;
  if (!pre.fixed.empty()) {
    if (pre.kept.empty()) throw std::runtime_error("every variable is fixed; nothing left to reduce");
    reduced = ising_to_qubo(pre.reduced);
    for (const auto& [k, v] : inst.metadata) {
      if (k != "offset" && !reduced.metadata.contains(k)) reduced.metadata[k] = v;
    }
    reduced.metadata.erase("lambda");  // the linear part is folded in
    if (inst.metadata.contains("lambda")) reduced.metadata["source_lambda"] = inst.metadata.at("lambda");
    reduced.metadata["reduced_from"] = std::to_string(inst.num_vars);
    if (inst.block_labels) {
      std::vector<int> labels;
      for (Index q : pre.kept) labels.push_back((*inst.block_labels)[q]);
      reduced.block_labels = labels;
    }
  }
  save(reduced, a.output);

  ordered_json doc;
  doc["num_vars"] = inst.num_vars;
  ordered_json fixed = ordered_json::array();
  for (const auto& [q, bit] : pre.fixed) fixed.push_back({q, static_cast<int>(bit)});
  doc["fixed"] = std::move(fixed);
  doc["kept"] = pre.kept;
  fs::path fixed_path = a.fixed;
  if (fixed_path.empty()) {
    fixed_path = a.output;
    fixed_path.replace_extension(".fixed.json");
  }
  write_text(fixed_path, doc.dump(2) + "\n");
  out << "fixed " << pre.fixed.size() << " of " << inst.num_vars << " variables; wrote "
      << a.output << " and " << fixed_path.string() << "\n";
  return kExitOk;
}

}  // namespace

std::vector<std::size_t> parse_blocks(const std::string& text) {
  std::vector<std::size_t> out;
  const auto x = text.find('x');
  if (x != std::string::npos) {
    const auto size = parse_u64(text.substr(0, x), "block size");
    const auto count = parse_u64(text.substr(x + 1), "block count");
    if (size == 0 || count == 0) throw UsageError("--blocks: sizes and counts must be positive");
    out.assign(count, size);
    return out;
  }
  for (const auto& part : split(text, ',')) {
    const auto v = parse_u64(part, "block size");
    if (v == 0) throw UsageError("--blocks: sizes must be positive");
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_u64(text.substr(0, dots), "seed");
    const auto hi = parse_u64(text.substr(dots + 2), "seed");
    if (hi < lo) throw UsageError("--seeds: empty range " + text);
    if (hi - lo >= 100000) throw UsageError("--seeds: range too large");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (const auto& part : split(text, ',')) out.push_back(parse_u64(part, "seed"));
  return out;
}

std::string trace_csv(const RunTrace& trace) {
  std::string s = "epoch,queries,mean_cost,best_cost\n";
  for (const auto& r : trace.records) {
    s += shortest(trace.epoch_axis(r.queries));
    s += ',';
    s += std::to_string(r.queries);
    s += ',';
    s += format_double(r.mean_cost);
    s += ',';
    s += format_double(r.best_cost);
    s += '\n';
  }
  return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field QUBO solver with shot-subsampled costs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a random or edge-list instance");
  g->add_option("kind", gen.kind, "wsbm, maxcut or ising")
      ->required()
      ->check(CLI::IsMember({"wsbm", "maxcut", "ising"}));
  g->add_option("--blocks", gen.blocks, "Block sizes: 10x5, 4 or 10,20,5");
  g->add_option("--p-diag", gen.p_diag, "Edge probability inside a block")->capture_default_str();
  g->add_option("--p-off", gen.p_off, "Edge probability across blocks")->capture_default_str();
  g->add_option("--w-diag", gen.w_diag, "Weight distribution inside a block")->capture_default_str();
  g->add_option("--w-off", gen.w_off, "Weight distribution across blocks")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--from-edges", gen.from_edges, "Edge list with `u v w` lines");
  g->add_option("--returns", gen.returns, "Return distribution (wsbm portfolio)");
  g->add_option("--lambda", gen.lambda, "Risk weight in [0,1] (wsbm portfolio)");
  g->add_option("-o,--output", gen.output, "Output instance file")->required();

  RunArgs sol;
  std::string trace_path;
  auto* s = app.add_subcommand("solve", "Run one solver on an instance");
  add_run_options(s, sol);
  s->add_option("--algo", sol.algo, "qimf, quamf, sa, greedy, oneplusone or brute")
      ->capture_default_str();
  s->add_option("--ne", sol.n_e, "Epochs (mean-field) or evaluations (baselines)")
      ->capture_default_str();
  s->add_option("--seed", sol.seed, "Random seed")->capture_default_str();
  s->add_option("--trace", trace_path, "Write the trace CSV here");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Compare solvers at a shared query budget");
  add_run_options(b, bench.run);
  b->add_option("--ne", bench.run.n_e, "QIMF epochs defining the budget when --budget-queries is absent")
      ->capture_default_str();
  b->add_option("--algos", bench.algos, "Comma-separated algorithms")->capture_default_str();
  b->add_option("--seeds", bench.seeds, "1..10 or 1,2,3")->capture_default_str();
  b->add_option("--extern", bench.externs, "Reference score name=value")->take_all();
  b->add_option("--json", bench.json, "Write the report JSON here");
  b->add_option("--trace-dir", bench.trace_dir, "Write one trace CSV per run here");
  b->add_option("--workers", bench.workers, "Parallel runs")->capture_default_str();

  IngestArgs ing;
  auto* i = app.add_subcommand("ingest", "Build a portfolio instance from price CSVs");
  i->add_option("--prices", ing.prices, "date,ticker,close CSV")->required();
  i->add_option("--sectors", ing.sectors, "ticker,sector CSV")->required();
  i->add_option("--lambda", ing.lambda, "Risk weight in [0,1]")->capture_default_str();
  i->add_option("--scale", ing.scale, "Multiplier for returns and covariance")->capture_default_str();
  i->add_option("-o,--output", ing.output, "Output instance file")->required();

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Fix diagonally dominant variables");
  p->add_option("instance", pre.instance, "Instance JSON file")->required();
  p->add_option("-o,--output", pre.output, "Reduced instance file")->required();
  p->add_option("--fixed", pre.fixed, "Fixed-variable JSON (default: <output>.fixed.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (s->parsed()) return cmd_solve(sol, trace_path, out, err);
    if (b->parsed()) return cmd_bench(bench, out, err);
    if (i->parsed()) return cmd_ingest(ing, out);
    if (p->parsed()) return cmd_preprocess(pre, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qimf");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qimf::cli
