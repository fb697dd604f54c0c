#include "qimf/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "solver_internal.hpp"

namespace qimf {

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::QIMF:
      return "qimf";
    case Algorithm::QUAMF:
      return "quamf";
    case Algorithm::SA:
      return "sa";
    case Algorithm::Greedy:
      return "greedy";
    case Algorithm::OnePlusOne:
      return "oneplusone";
    case Algorithm::BruteForce:
      return "brute";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  for (auto a : {Algorithm::QIMF, Algorithm::QUAMF, Algorithm::SA, Algorithm::Greedy,
                 Algorithm::OnePlusOne, Algorithm::BruteForce}) {
    if (text == to_string(a)) return a;
  }
  if (text == "bruteforce" || text == "brute-force") return Algorithm::BruteForce;
  if (text == "1+1" || text == "one-plus-one") return Algorithm::OnePlusOne;
  throw ValidationError("unknown algorithm '" + text + "'");
}

void SolverConfig::validate() const {
  if (n_b == 0) throw ValidationError("n_b must be at least 1");
  if (n_e == 0) throw ValidationError("n_e must be at least 1");
  if (algorithm == Algorithm::QIMF && n_s == 0) throw ValidationError("n_s must be at least 1");
  if (checkpoint_every == 0) throw ValidationError("checkpoint interval must be at least 1");
  if (!(adam.learning_rate > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0))
    throw ValidationError("invalid ADAM hyperparameters");
  if (sa_initial_temperature && !(*sa_initial_temperature >= 0.0))
    throw ValidationError("SA temperature must be >= 0");
  if (!(sa_final_ratio > 0.0 && sa_final_ratio <= 1.0))
    throw ValidationError("SA final temperature ratio must lie in (0, 1]");
}

double RunTrace::epoch_axis(std::uint64_t queries) const {
  const double unit = static_cast<double>(std::max<std::size_t>(n_s, 1) * std::max<std::size_t>(n_b, 1));
  return static_cast<double>(queries) / unit;
}

namespace detail {

TermIndex::TermIndex(const IsingHamiltonian& h) : h_(&h), by_qubit_(h.num_qubits) {
  for (std::size_t m = 0; m < h.terms.size(); ++m) {
    if (!h.terms[m].all_z()) throw UnsupportedTermError("solvers need a Z-only Hamiltonian");
    for (Index q : h.terms[m].support) by_qubit_[q].push_back(m);
  }
}

double TermIndex::flip_delta(const Assignment& x, Index i) const {
  double s = 0.0;
  for (std::size_t m : by_qubit_[i]) s += evaluate_term(h_->terms[m], x);
  return -2.0 * s;
}

std::vector<double> TermIndex::all_flip_deltas(const Assignment& x, double* cost) const {
  std::vector<double> acc(h_->num_qubits, 0.0);
  double total = h_->offset;
  for (const auto& t : h_->terms) {
    const double v = evaluate_term(t, x);
    total += v;
    for (Index q : t.support) acc[q] += v;
  }
  for (auto& a : acc) a *= -2.0;
  if (cost) *cost = total;
  return acc;
}

Assignment random_assignment(std::size_t n, Rng& rng) {
  Assignment x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
  return x;
}

void push_record(RunTrace& trace, std::size_t epoch, double mean_cost, double best_cost,
                 const Assignment& best_x) {
  trace.records.push_back(EpochRecord{epoch, trace.ledger.total, mean_cost, best_cost, best_x});
}

}  // namespace detail

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

using SampleCost = std::function<double(const Assignment&, std::size_t epoch, std::size_t k)>;

/// The shared mean-field loop. `exact_costs` says whether sample_cost
/// already returns evaluate_full, in which case the best is tracked every
/// epoch at no oracle cost.
RunTrace run_mean_field(const IsingHamiltonian& h, const SolverConfig& cfg, Algorithm algo,
                        std::uint64_t queries_per_eval, bool exact_costs,
                        const SampleCost& sample_cost) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t n = h.num_qubits;
  const std::uint64_t n_w = h.num_terms();

  RunTrace trace;
  trace.algorithm = algo;
  trace.estimator_mode = cfg.estimator_mode;
  trace.seed = cfg.seed;
  trace.n_w = n_w;
  trace.n_s = cfg.n_s;
  trace.n_b = cfg.n_b;
  trace.ledger.per_epoch = queries_per_eval * cfg.n_b;
  trace.records.reserve(cfg.n_e);

  auto model = MeanFieldModel::initial(n, cfg.init_jitter, cfg.seed);
  AdamState adam(n, cfg.adam);
  const std::uint64_t sample_seed = derive_seed(cfg.seed, "sample");

  double best = std::numeric_limits<double>::infinity();
  Assignment best_x;
  auto consider = [&](const Assignment& x, double exact) {
    if (exact < best || (exact == best && x < best_x)) {
      best = exact;
      best_x = x;
    }
  };

  for (std::size_t epoch = 0; epoch < cfg.n_e; ++epoch) {
    auto batch = sample_batch(model, cfg.n_b, derive_seed(sample_seed, epoch));
    batch.costs.resize(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const double c = sample_cost(batch.samples[k], epoch, k);
      if (!std::isfinite(c)) {
        throw std::runtime_error(to_string(algo) + ": non-finite cost at epoch " +
                                 std::to_string(epoch) + ", sample " + std::to_string(k));
      }
      batch.costs[k] = c;
    }
    const auto og = objective_and_grad(model, batch, cfg.mean_baseline);
    adam_step(model, adam, og.grad);
    trace.ledger.total += trace.ledger.per_epoch;

    const bool last = epoch + 1 == cfg.n_e;
    if (exact_costs) {
      for (std::size_t k = 0; k < batch.size(); ++k) consider(batch.samples[k], batch.costs[k]);
    } else if (epoch % cfg.checkpoint_every == 0 || last) {
      for (const auto& x : batch.samples) consider(x, evaluate_full(h, x));
      trace.ledger.oracle += n_w * batch.size();
    }
    if (last) {
      const auto mode = mode_assignment(model);
      consider(mode, evaluate_full(h, mode));
      trace.ledger.oracle += n_w;
    }
    detail::push_record(trace, epoch, og.objective, best, best_x);
  }

  if (cfg.readout == Readout::Sample) {
    const auto fresh = sample_batch(model, cfg.n_b, derive_seed(cfg.seed, "readout"));
    double fbest = std::numeric_limits<double>::infinity();
    for (const auto& x : fresh.samples) {
      const double c = evaluate_full(h, x);
      if (c < fbest || (c == fbest && x < trace.final_assignment)) {
        fbest = c;
        trace.final_assignment = x;
      }
    }
    trace.final_cost = fbest;
    trace.ledger.oracle += n_w * fresh.size();
  } else {
    trace.final_assignment = best_x;
    trace.final_cost = best;
  }
  trace.seconds = seconds_since(start);
  return trace;
}

}  // namespace

RunTrace solve_qimf(const IsingHamiltonian& h, const SolverConfig& cfg) {
  cfg.validate();
  const std::uint64_t shot_seed = derive_seed(cfg.seed, "shots");
  if (h.terms.empty()) {
    // Nothing to sample: every estimate is the offset.
    return run_mean_field(h, cfg, Algorithm::QIMF, cfg.n_s, false,
                          [&h](const Assignment&, std::size_t, std::size_t) { return h.offset; });
  }
  const ShotAllocator alloc(h);
  if (cfg.estimator_mode == EstimatorMode::PaperLiteral && cfg.n_s > alloc.support_size()) {
    throw ValidationError("n_s = " + std::to_string(cfg.n_s) + " exceeds the " +
                          std::to_string(alloc.support_size()) +
                          " terms available for sampling without replacement");
  }
  return run_mean_field(h, cfg, Algorithm::QIMF, cfg.n_s, false,
                        [&](const Assignment& x, std::size_t epoch, std::size_t k) {
                          Rng rng(derive_seed(shot_seed, epoch, k));
                          return cost_s(alloc, x, cfg.n_s, cfg.estimator_mode, rng);
                        });
}

RunTrace solve_quamf(const IsingHamiltonian& h, const SolverConfig& cfg) {
  return run_mean_field(h, cfg, Algorithm::QUAMF, h.num_terms(), true,
                        [&h](const Assignment& x, std::size_t, std::size_t) {
                          return evaluate_full(h, x);
                        });
}

std::pair<Assignment, double> brute_force(const IsingHamiltonian& h) {
  const std::size_t n = h.num_qubits;
  if (n > kBruteForceMaxQubits) {
    throw ValidationError("brute force refuses " + std::to_string(n) + " variables (limit " +
                          std::to_string(kBruteForceMaxQubits) + ")");
  }
  if (n == 0) return {Assignment{}, h.offset};

  // Gray-code walk with incremental costs; near-ties are rescored exactly
  // so that rounding drift cannot change the winner.
  const detail::TermIndex index(h);
  double scale = std::abs(h.offset);
  for (const auto& t : h.terms) scale += std::abs(t.coefficient);
  const double tol = 1e-9 * (1.0 + scale);

  Assignment x(n, 0);
  double cost = evaluate_full(h, x);
  double best_approx = cost;
  std::vector<std::uint32_t> candidates{0};
  auto code_of = [n](const Assignment& a) {
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c |= static_cast<std::uint32_t>(a[i]) << i;
    return c;
  };

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto bit = static_cast<Index>(std::countr_zero(step));
    cost += index.flip_delta(x, bit);
    x[bit] ^= 1u;
    if (cost < best_approx - tol) {
      best_approx = cost;
      candidates.clear();
      candidates.push_back(code_of(x));
    } else if (cost <= best_approx + tol) {
      best_approx = std::min(best_approx, cost);
      candidates.push_back(code_of(x));
    }
  }

  Assignment best_x;
  double best = std::numeric_limits<double>::infinity();
  Assignment y(n);
  for (std::uint32_t c : candidates) {
    for (std::size_t i = 0; i < n; ++i) y[i] = (c >> i) & 1u;
    const double exact = evaluate_full(h, y);
    if (exact < best || (exact == best && y < best_x)) {
      best = exact;
      best_x = y;
    }
  }
  return {best_x, best};
}

bool is_one_flip_optimal(const IsingHamiltonian& h, const Assignment& x, double tol) {
  const detail::TermIndex index(h);
  for (Index i = 0; i < h.num_qubits; ++i) {
    if (index.flip_delta(x, i) < -tol) return false;
  }
  return true;
}

namespace {

RunTrace brute_force_trace(const IsingHamiltonian& h, const SolverConfig& cfg) {
  const auto start = Clock::now();
  auto [x, cost] = brute_force(h);
  RunTrace trace;
  trace.algorithm = Algorithm::BruteForce;
  trace.seed = cfg.seed;
  trace.n_w = h.num_terms();
  trace.n_s = cfg.n_s;
  trace.n_b = cfg.n_b;
  trace.ledger.per_epoch = (std::uint64_t{1} << h.num_qubits) * h.num_terms();
  trace.ledger.total = trace.ledger.per_epoch;
  trace.final_assignment = x;
  trace.final_cost = cost;
  detail::push_record(trace, 0, cost, cost, x);
  trace.seconds = seconds_since(start);
  return trace;
}

RunTrace dispatch(const IsingHamiltonian& h, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::QIMF:
      return solve_qimf(h, cfg);
    case Algorithm::QUAMF:
      return solve_quamf(h, cfg);
    case Algorithm::SA:
      return simulated_annealing(h, cfg);
    case Algorithm::Greedy:
      return greedy_local_search(h, cfg);
    case Algorithm::OnePlusOne:
      return one_plus_one(h, cfg);
    case Algorithm::BruteForce:
      return brute_force_trace(h, cfg);
  }
  throw std::logic_error("unhandled algorithm");
}

}  // namespace

RunTrace solve(const IsingHamiltonian& h, const SolverConfig& cfg) {
  cfg.validate();
  if (!cfg.preprocess) return dispatch(h, cfg);

  const auto pre = preprocess_dominant(h);
  RunTrace trace;
  if (pre.kept.empty()) {
    trace.algorithm = cfg.algorithm;
    trace.estimator_mode = cfg.estimator_mode;
    trace.seed = cfg.seed;
    trace.n_s = cfg.n_s;
    trace.n_b = cfg.n_b;
    const Assignment x = pre.expand({});
    const double c = evaluate_full(h, x);
    trace.final_assignment = x;
    trace.final_cost = c;
    detail::push_record(trace, 0, c, c, x);
  } else {
    trace = dispatch(pre.reduced, cfg);
    for (auto& r : trace.records) {
      if (!r.best_assignment.empty()) r.best_assignment = pre.expand(r.best_assignment);
    }
    trace.final_assignment = pre.expand(trace.final_assignment);
    trace.final_cost = evaluate_full(h, trace.final_assignment);
  }
  trace.fixed = pre.fixed;
  return trace;
}

SolverConfig configure_for_budget(SolverConfig cfg, std::uint64_t budget_queries, std::size_t n_w) {
  const std::uint64_t w = std::max<std::size_t>(n_w, 1);
  std::uint64_t n_e = 0;
  switch (cfg.algorithm) {
    case Algorithm::QIMF:
      n_e = budget_queries / (std::max<std::size_t>(cfg.n_s, 1) * cfg.n_b);
      break;
    case Algorithm::QUAMF:
      n_e = budget_queries / (w * cfg.n_b);
      break;
    case Algorithm::SA: {
      const std::uint64_t evals = budget_queries / w;
      const std::uint64_t overhead =
          1 + (cfg.sa_initial_temperature ? 0 : static_cast<std::uint64_t>(cfg.sa_warmup));
      n_e = evals > overhead ? evals - overhead : 0;
      break;
    }
    case Algorithm::Greedy:
    case Algorithm::OnePlusOne:
    case Algorithm::BruteForce:
      n_e = budget_queries / w;
      break;
  }
  if (n_e == 0) {
    throw ValidationError("query budget " + std::to_string(budget_queries) + " is too small for " +
                          to_string(cfg.algorithm));
  }
  cfg.n_e = static_cast<std::size_t>(n_e);
  return cfg;
}

}  // namespace qimf
