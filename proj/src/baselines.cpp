// Classical baselines: simulated annealing, greedy local search, (1+1)-ES.
// Every exact evaluation (or equivalent full sweep) is charged n_w queries.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "qimf/solver.hpp"
#include "solver_internal.hpp"

namespace qimf {

namespace {

using Clock = std::chrono::steady_clock;

RunTrace start_trace(const IsingHamiltonian& h, const SolverConfig& cfg, Algorithm algo) {
  cfg.validate();
  RunTrace trace;
  trace.algorithm = algo;
  trace.estimator_mode = cfg.estimator_mode;
  trace.seed = cfg.seed;
  trace.n_w = h.num_terms();
  trace.n_s = cfg.n_s;
  trace.n_b = cfg.n_b;
  trace.ledger.per_epoch = h.num_terms();
  return trace;
}

void finish(RunTrace& trace, const IsingHamiltonian& h, const Assignment& best_x,
            Clock::time_point start) {
  trace.final_assignment = best_x;
  trace.final_cost = evaluate_full(h, best_x);
  trace.seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

double coefficient_scale(const IsingHamiltonian& h) {
  double s = std::abs(h.offset);
  for (const auto& t : h.terms) s += std::abs(t.coefficient);
  return s;
}

/// Keeps the running best and emits a record every `every` evaluations.
struct Recorder {
  RunTrace& trace;
  std::size_t every;
  double best = std::numeric_limits<double>::infinity();
  Assignment best_x;
  double window_sum = 0.0;
  std::size_t window_n = 0;

  Recorder(RunTrace& t, std::size_t e) : trace(t), every(e) {}

  void observe(const Assignment& x, double cost, bool exact) {
    window_sum += cost;
    ++window_n;
    if (exact && cost < best) {
      best = cost;
      best_x = x;
    }
  }
  void maybe_flush(bool force = false) {
    if (window_n == 0 || (!force && window_n < every)) return;
    detail::push_record(trace, trace.records.size(), window_sum / static_cast<double>(window_n),
                        best, best_x);
    window_sum = 0.0;
    window_n = 0;
  }
};

}  // namespace

RunTrace simulated_annealing(const IsingHamiltonian& h, const SolverConfig& cfg) {
  const auto start = Clock::now();
  RunTrace trace = start_trace(h, cfg, Algorithm::SA);
  const std::size_t n = h.num_qubits;
  const std::uint64_t n_w = h.num_terms();
  Rng rng(derive_seed(cfg.seed, "sa"));
  const detail::TermIndex index(h);

  Assignment x = detail::random_assignment(n, rng);
  double cost = evaluate_full(h, x);
  trace.ledger.total += n_w;

  double t0 = 0.0;
  if (cfg.sa_initial_temperature) {
    t0 = *cfg.sa_initial_temperature;
  } else if (cfg.sa_warmup > 0) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < cfg.sa_warmup; ++k) {
      const double c = evaluate_full(h, detail::random_assignment(n, rng));
      sum += c;
      sq += c * c;
      trace.ledger.total += n_w;
    }
    const double m = static_cast<double>(cfg.sa_warmup);
    if (m > 1.0) t0 = std::sqrt(std::max(0.0, (sq - sum * sum / m) / (m - 1.0)));
  }
  const double ratio =
      cfg.n_e > 1 ? std::pow(cfg.sa_final_ratio, 1.0 / static_cast<double>(cfg.n_e - 1)) : 1.0;

  Recorder rec(trace, cfg.n_b);
  rec.best = cost;
  rec.best_x = x;
  double temperature = t0;
  for (std::size_t k = 0; k < cfg.n_e; ++k) {
    if (n > 0) {
      const auto i = static_cast<Index>(rng.below(n));
      const double delta = index.flip_delta(x, i);
      const bool accept =
          delta <= 0.0 || (temperature > 0.0 && rng.uniform() < std::exp(-delta / temperature));
      if (accept) {
        x[i] ^= 1u;
        cost += delta;
        if (cost < rec.best) cost = evaluate_full(h, x);  // resync before it can become the best
      }
    }
    trace.ledger.total += n_w;
    rec.observe(x, cost, true);
    rec.maybe_flush();
    temperature *= ratio;
  }
  rec.maybe_flush(true);
  finish(trace, h, rec.best_x, start);
  return trace;
}

RunTrace greedy_local_search(const IsingHamiltonian& h, const SolverConfig& cfg) {
  const auto start = Clock::now();
  RunTrace trace = start_trace(h, cfg, Algorithm::Greedy);
  const std::size_t n = h.num_qubits;
  const std::uint64_t n_w = h.num_terms();
  Rng rng(derive_seed(cfg.seed, "greedy"));
  const detail::TermIndex index(h);
  const double tol = 1e-12 * (1.0 + coefficient_scale(h));

  Recorder rec(trace, 1);
  std::size_t sweeps = 0;
  for (std::size_t pass = 0;; ++pass) {
    if (pass > 0 && sweeps >= cfg.n_e) break;
    Assignment x = detail::random_assignment(n, rng);
    bool completed = false;
    while (true) {
      double cost = 0.0;
      const auto deltas = index.all_flip_deltas(x, &cost);
      ++sweeps;
      trace.ledger.total += n_w;
      const auto it = std::min_element(deltas.begin(), deltas.end());
      if (it == deltas.end() || *it >= -tol) {
        rec.observe(x, cost, true);
        rec.maybe_flush(true);
        completed = true;
        break;
      }
      x[static_cast<std::size_t>(it - deltas.begin())] ^= 1u;
      // Only the first pass may overrun the budget; later ones are abandoned.
      if (pass > 0 && sweeps >= cfg.n_e) break;
    }
    if (!completed) break;
  }
  finish(trace, h, rec.best_x, start);
  return trace;
}

RunTrace one_plus_one(const IsingHamiltonian& h, const SolverConfig& cfg) {
  const auto start = Clock::now();
  RunTrace trace = start_trace(h, cfg, Algorithm::OnePlusOne);
  const std::size_t n = h.num_qubits;
  const std::uint64_t n_w = h.num_terms();
  Rng rng(derive_seed(cfg.seed, "oneplusone"));

  Assignment x = detail::random_assignment(n, rng);
  double cost = evaluate_full(h, x);
  trace.ledger.total += n_w;
  Recorder rec(trace, cfg.n_b);
  rec.observe(x, cost, true);
  rec.maybe_flush();

  const double rate = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  for (std::size_t evals = 1; evals < cfg.n_e && n > 0; ++evals) {
    Assignment y = x;
    bool flipped = false;
    for (auto& b : y) {
      if (rng.uniform() < rate) {
        b ^= 1u;
        flipped = true;
      }
    }
    if (!flipped) y[rng.below(n)] ^= 1u;
    const double c = evaluate_full(h, y);
    trace.ledger.total += n_w;
    if (c <= cost) {
      x = std::move(y);
      cost = c;
    }
    rec.observe(x, cost, true);
    rec.maybe_flush();
  }
  rec.maybe_flush(true);
  finish(trace, h, rec.best_x, start);
  return trace;
}

}  // namespace qimf
