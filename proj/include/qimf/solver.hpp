#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qimf/estimator.hpp"
#include "qimf/hamiltonian.hpp"
#include "qimf/meanfield.hpp"

namespace qimf {

enum class Algorithm { QIMF, QUAMF, SA, Greedy, OnePlusOne, BruteForce };

std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& text);

/// How the final answer is read out of a trained mean-field model.
enum class Readout {
  BestSeen,  // best exactly scored assignment encountered, including the mode
  Sample,    // best of a fresh batch drawn from the final model
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::QIMF;
  std::size_t n_b = 40;
  std::size_t n_s = 1;
  /// Epochs for QIMF/QUAMF; exact-evaluation budget for SA, Greedy and
  /// OnePlusOne (SA spends it on proposals).
  std::size_t n_e = 1000;
  EstimatorMode estimator_mode = EstimatorMode::PaperLiteral;
  AdamConfig adam;
  std::uint64_t seed = 0;
  bool preprocess = false;

  std::size_t checkpoint_every = 10;
  Readout readout = Readout::BestSeen;
  bool mean_baseline = false;
  double init_jitter = 0.0;

  /// SA: T0 override (0 gives pure descent); otherwise estimated from the
  /// cost spread of `sa_warmup` random assignments.
  std::optional<double> sa_initial_temperature;
  std::size_t sa_warmup = 16;
  double sa_final_ratio = 1e-3;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::uint64_t queries = 0;  // cumulative, training queries only
  double mean_cost = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  Assignment best_assignment;
};

struct QueryLedger {
  std::uint64_t per_epoch = 0;
  std::uint64_t total = 0;
  std::uint64_t oracle = 0;  // exact checkpoint scoring, excluded from `total`
};

struct RunTrace {
  Algorithm algorithm = Algorithm::QIMF;
  EstimatorMode estimator_mode = EstimatorMode::PaperLiteral;
  std::uint64_t seed = 0;
  std::size_t n_w = 0;
  std::size_t n_s = 0;
  std::size_t n_b = 0;
  std::vector<EpochRecord> records;
  Assignment final_assignment;
  double final_cost = 0.0;
  QueryLedger ledger;
  FixedVars fixed;
  double seconds = 0.0;

  double best_cost() const { return records.empty() ? final_cost : records.back().best_cost; }

  /// Query count in units of one QIMF epoch (n_s * n_b), the common x axis.
  double epoch_axis(std::uint64_t queries) const;
};

RunTrace solve_qimf(const IsingHamiltonian& h, const SolverConfig& cfg);
RunTrace solve_quamf(const IsingHamiltonian& h, const SolverConfig& cfg);
RunTrace simulated_annealing(const IsingHamiltonian& h, const SolverConfig& cfg);
RunTrace greedy_local_search(const IsingHamiltonian& h, const SolverConfig& cfg);
RunTrace one_plus_one(const IsingHamiltonian& h, const SolverConfig& cfg);

inline constexpr std::size_t kBruteForceMaxQubits = 24;

/// Exact minimizer; ties resolve to the lexicographically smallest x.
std::pair<Assignment, double> brute_force(const IsingHamiltonian& h);

/// Dispatches on cfg.algorithm, applying preprocessing first when asked.
RunTrace solve(const IsingHamiltonian& h, const SolverConfig& cfg);

/// Sets cfg.n_e so the run's training ledger fits `budget_queries`
/// (n_s*n_b per QIMF epoch, n_w*n_b per QUAMF epoch, n_w per exact
/// evaluation otherwise).
SolverConfig configure_for_budget(SolverConfig cfg, std::uint64_t budget_queries, std::size_t n_w);

/// True if no single bit flip lowers the cost by more than `tol`.
bool is_one_flip_optimal(const IsingHamiltonian& h, const Assignment& x, double tol = 1e-12);

}  // namespace qimf
