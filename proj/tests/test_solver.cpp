#include <gtest/gtest.h>

#include <cmath>

#include "qimf/solver.hpp"
#include "test_util.hpp"

using namespace qimf;
using testutil::bits_of;

namespace {

IsingHamiltonian diag_qubo(std::vector<double> d) {
  QuboInstance q;
  q.num_vars = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) q.set(i, i, d[i]);
  return instance_hamiltonian(q);
}

SolverConfig config(Algorithm a, std::size_t n_b, std::size_t n_e, std::uint64_t seed = 0) {
  SolverConfig c;
  c.algorithm = a;
  c.n_b = n_b;
  c.n_e = n_e;
  c.seed = seed;
  return c;
}

void expect_monotone(const RunTrace& t) {
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_LE(t.records[k].best_cost, t.records[k - 1].best_cost) << k;
    EXPECT_LT(t.records[k - 1].queries, t.records[k].queries) << k;
  }
}

bool same_trace(const RunTrace& a, const RunTrace& b) {
  if (a.records.size() != b.records.size() || a.final_assignment != b.final_assignment ||
      a.final_cost != b.final_cost || a.ledger.total != b.ledger.total)
    return false;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const auto &x = a.records[k], &y = b.records[k];
    if (x.queries != y.queries || x.mean_cost != y.mean_cost || x.best_cost != y.best_cost ||
        x.best_assignment != y.best_assignment)
      return false;
  }
  return true;
}

IsingHamiltonian random_eight(std::uint64_t seed) {
  return instance_hamiltonian(testutil::random_qubo(8, 0.7, seed));
}

}  // namespace

TEST(Qimf, DiagonalToy) {
  const auto h = diag_qubo({-1.0, 2.0});
  auto cfg = config(Algorithm::QIMF, 20, 200);
  cfg.n_s = 1;
  for (auto mode : {EstimatorMode::PaperLiteral, EstimatorMode::Unbiased}) {
    cfg.estimator_mode = mode;
    const auto t = solve_qimf(h, cfg);
    EXPECT_EQ(t.final_assignment, (Assignment{1, 0}));
    EXPECT_EQ(t.final_cost, -1.0);
    EXPECT_EQ(t.ledger.total, 1u * 20 * 200);
    expect_monotone(t);
  }
}

TEST(Quamf, DiagonalToy) {
  const auto h = diag_qubo({-1.0, 2.0});
  auto cfg = config(Algorithm::QUAMF, 20, 200);
  cfg.n_s = 7;  // ignored
  const auto t = solve_quamf(h, cfg);
  EXPECT_EQ(t.final_assignment, (Assignment{1, 0}));
  EXPECT_EQ(t.final_cost, -1.0);
  EXPECT_EQ(t.ledger.total, h.num_terms() * 20 * 200);
  EXPECT_EQ(t.ledger.oracle, h.num_terms());  // the final mode only
  expect_monotone(t);
}

TEST(Qimf, ZeroHamiltonianKeepsUniformModel) {
  IsingHamiltonian h;
  h.num_qubits = 3;
  h.offset = 0.0;
  auto cfg = config(Algorithm::QIMF, 10, 30);
  const auto t = solve_qimf(h, cfg);
  EXPECT_EQ(t.final_cost, 0.0);
  for (const auto& r : t.records) EXPECT_EQ(r.mean_cost, 0.0);
  // Zero gradient: the mode is the all-zero tie-break and sampling stays fair.
  EXPECT_EQ(t.final_assignment.size(), 3u);
}

TEST(Qimf, NonFiniteCostAborts) {
  auto h = diag_qubo({1.0});
  h.terms[0].coefficient = INFINITY;
  auto cfg = config(Algorithm::QUAMF, 2, 2);
  EXPECT_THROW(solve_quamf(h, cfg), std::exception);
}

TEST(Qimf, RejectsTooManyDistinctShots) {
  const auto h = diag_qubo({1.0, -1.0});
  auto cfg = config(Algorithm::QIMF, 2, 2);
  cfg.n_s = 3;
  EXPECT_THROW(solve_qimf(h, cfg), ValidationError);
  cfg.estimator_mode = EstimatorMode::Unbiased;
  EXPECT_NO_THROW(solve_qimf(h, cfg));
}

TEST(Qimf, LedgerExactness) {
  const auto q = testutil::random_qubo(9, 0.5, 4, true);
  const auto h = instance_hamiltonian(q);
  auto cfg = config(Algorithm::QIMF, 7, 33, 5);
  cfg.n_s = 4;
  const auto t = solve_qimf(h, cfg);
  EXPECT_EQ(t.ledger.per_epoch, 4u * 7);
  EXPECT_EQ(t.ledger.total, 4u * 7 * 33);
  ASSERT_EQ(t.records.size(), 33u);
  for (std::size_t e = 0; e < 33; ++e) EXPECT_EQ(t.records[e].queries, 4u * 7 * (e + 1));
  // Checkpoints at epochs 0,10,20,30 and the last one, plus the mode.
  EXPECT_EQ(t.ledger.oracle, h.num_terms() * (5 * 7 + 1));
  cfg.algorithm = Algorithm::QUAMF;
  EXPECT_EQ(solve_quamf(h, cfg).ledger.total, h.num_terms() * 7 * 33);
}

TEST(Qimf, ExhaustiveShotsMatchQuamfMeans) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto h = instance_hamiltonian(testutil::random_qubo(7, 0.6, seed, seed % 2 == 1));
    auto cfg = config(Algorithm::QIMF, 12, 60, seed);
    cfg.n_s = h.num_terms();
    const auto a = solve_qimf(h, cfg);
    const auto b = solve_quamf(h, cfg);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t e = 0; e < a.records.size(); ++e) {
      EXPECT_EQ(a.records[e].mean_cost, b.records[e].mean_cost) << seed << " " << e;
      EXPECT_EQ(a.records[e].queries, b.records[e].queries);
    }
  }
}

TEST(Qimf, Deterministic) {
  const auto h = instance_hamiltonian(testutil::random_qubo(10, 0.5, 8, true));
  for (auto algo : {Algorithm::QIMF, Algorithm::QUAMF, Algorithm::SA, Algorithm::Greedy,
                    Algorithm::OnePlusOne}) {
    auto cfg = config(algo, 8, 120, 42);
    cfg.n_s = 5;
    cfg.estimator_mode = EstimatorMode::Unbiased;
    EXPECT_TRUE(same_trace(solve(h, cfg), solve(h, cfg))) << to_string(algo);
    auto other = cfg;
    other.seed = 43;
    EXPECT_FALSE(same_trace(solve(h, cfg), solve(h, other))) << to_string(algo);
  }
}

TEST(Qimf, SampleReadout) {
  const auto h = diag_qubo({-1.0, 2.0, -0.5});
  auto cfg = config(Algorithm::QUAMF, 20, 300, 2);
  cfg.readout = Readout::Sample;
  const auto t = solve(h, cfg);
  EXPECT_EQ(t.final_cost, evaluate_full(h, t.final_assignment));
  EXPECT_EQ(t.final_assignment, (Assignment{1, 0, 1}));
  EXPECT_EQ(t.ledger.oracle, h.num_terms() * (20 + 1));  // fresh batch plus the mode
}

TEST(Solver, BestCostMonotoneForAllAlgorithms) {
  const auto h = instance_hamiltonian(testutil::random_qubo(12, 0.4, 3, true));
  for (auto algo : {Algorithm::QIMF, Algorithm::QUAMF, Algorithm::SA, Algorithm::Greedy,
                    Algorithm::OnePlusOne}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto cfg = config(algo, 5, 400, seed);
      cfg.n_s = 6;
      const auto t = solve(h, cfg);
      expect_monotone(t);
      EXPECT_EQ(t.final_cost, evaluate_full(h, t.final_assignment));
      EXPECT_LE(t.final_cost, t.records.front().best_cost);
    }
  }
}

TEST(Solver, ConfigValidation) {
  const auto h = diag_qubo({1.0});
  auto cfg = config(Algorithm::QIMF, 0, 1);
  EXPECT_THROW(solve(h, cfg), ValidationError);
  cfg = config(Algorithm::QIMF, 1, 0);
  EXPECT_THROW(solve(h, cfg), ValidationError);
  cfg = config(Algorithm::QIMF, 1, 1);
  cfg.n_s = 0;
  EXPECT_THROW(solve(h, cfg), ValidationError);
  cfg.algorithm = Algorithm::QUAMF;
  EXPECT_NO_THROW(solve(h, cfg));
  EXPECT_THROW(parse_algorithm("gurobi"), ValidationError);
  EXPECT_EQ(parse_algorithm("sa"), Algorithm::SA);
}

TEST(Solver, PreprocessingExpandsAnswer) {
  const auto h = IsingHamiltonian::from_z_terms(
      4, {{{0}, -5.0}, {{0, 1}, 1.0}, {{0, 2}, 1.0}, {{0, 3}, 1.0}, {{1, 2}, 0.5}}, 0.0);
  auto cfg = config(Algorithm::QUAMF, 10, 100, 1);
  cfg.preprocess = true;
  const auto t = solve(h, cfg);
  EXPECT_EQ(t.fixed.size(), 1u);
  EXPECT_EQ(t.final_assignment.size(), 4u);
  EXPECT_EQ(t.final_assignment[0], 0);
  EXPECT_EQ(t.final_cost, brute_force(h).second);
}

TEST(Sa, SingleEdge) {
  QuboInstance q;
  q.num_vars = 2;
  q.set(0, 1, -1.0);
  const auto h = instance_hamiltonian(q);
  const auto t = simulated_annealing(h, config(Algorithm::SA, 10, 200, 3));
  EXPECT_EQ(t.final_assignment, (Assignment{1, 1}));
  EXPECT_EQ(t.final_cost, -2.0);
}

TEST(Sa, ZeroTemperatureIsDescent) {
  const auto h = instance_hamiltonian(testutil::random_qubo(10, 0.5, 6));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto cfg = config(Algorithm::SA, 1, 300, seed);
    cfg.sa_initial_temperature = 0.0;
    const auto t = simulated_annealing(h, cfg);
    // Each record is one proposal; with n_b = 1 its mean is the current cost.
    for (std::size_t k = 1; k < t.records.size(); ++k)
      EXPECT_LE(t.records[k].mean_cost, t.records[k - 1].mean_cost + 1e-12);
    EXPECT_EQ(t.ledger.total, h.num_terms() * 301);
  }
}

TEST(Sa, EightVariableOptimum) {
  int hits = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto h = random_eight(100);
    const double opt = brute_force(h).second;
    const auto t = simulated_annealing(h, config(Algorithm::SA, 100, 10000, s));
    if (t.final_cost <= opt + 1e-9) ++hits;
  }
  EXPECT_GE(hits, 8);
}

TEST(Sa, LedgerIncludesWarmup) {
  const auto h = random_eight(1);
  const auto t = simulated_annealing(h, config(Algorithm::SA, 10, 50));
  EXPECT_EQ(t.ledger.total, h.num_terms() * (1 + 16 + 50));
  EXPECT_EQ(t.records.size(), 5u);
}

TEST(Greedy, SeparableDescent) {
  const auto h = diag_qubo({-1.0, -1.0});
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto t = greedy_local_search(h, config(Algorithm::Greedy, 1, 10, s));
    EXPECT_EQ(t.final_assignment, (Assignment{1, 1}));
    EXPECT_EQ(t.final_cost, -2.0);
  }
}

TEST(Greedy, FrustratedTriangle) {
  QuboInstance q;
  q.num_vars = 3;
  for (Index i = 0; i < 3; ++i)
    for (Index j = i + 1; j < 3; ++j) q.set(i, j, 1.0);
  const auto h = instance_hamiltonian(q);
  const double opt = brute_force(h).second;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto t = greedy_local_search(h, config(Algorithm::Greedy, 1, 20, s));
    EXPECT_TRUE(is_one_flip_optimal(h, t.final_assignment));
    EXPECT_EQ(t.final_cost, opt);
  }
}

TEST(Greedy, ReturnsLocalOptima) {
  const auto h = instance_hamiltonian(testutil::random_qubo(14, 0.4, 12, true));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto t = greedy_local_search(h, config(Algorithm::Greedy, 1, 200, s));
    EXPECT_TRUE(is_one_flip_optimal(h, t.final_assignment));
    for (const auto& r : t.records) EXPECT_TRUE(is_one_flip_optimal(h, r.best_assignment));
  }
}

TEST(Greedy, BudgetOfOneSweepGivesOnePass) {
  const auto h = diag_qubo({-1.0, 2.0, 3.0});
  auto cfg = configure_for_budget(config(Algorithm::Greedy, 1, 1), h.num_terms(), h.num_terms());
  EXPECT_EQ(cfg.n_e, 1u);
  const auto t = greedy_local_search(h, cfg);
  EXPECT_EQ(t.records.size(), 1u);
}

TEST(OnePlusOne, SingleVariable) {
  const auto h = diag_qubo({-1.0});
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto t = one_plus_one(h, config(Algorithm::OnePlusOne, 1, 100, s));
    EXPECT_EQ(t.final_assignment, Assignment{1});
  }
}

TEST(OnePlusOne, EightVariableOptimum) {
  int hits = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto h = random_eight(100);
    const double opt = brute_force(h).second;
    const auto t = one_plus_one(h, config(Algorithm::OnePlusOne, 100, 10000, s));
    expect_monotone(t);
    if (t.final_cost <= opt + 1e-9) ++hits;
  }
  EXPECT_GE(hits, 7);
}

TEST(BruteForce, Examples) {
  const auto [x, c] = brute_force(diag_qubo({-1.0, 2.0}));
  EXPECT_EQ(x, (Assignment{1, 0}));
  EXPECT_EQ(c, -1.0);

  IsingHamiltonian zero;
  zero.num_qubits = 4;
  zero.offset = 2.5;
  const auto z = brute_force(zero);
  EXPECT_EQ(z.first, Assignment(4, 0));
  EXPECT_EQ(z.second, 2.5);

  const auto one = brute_force(IsingHamiltonian::from_z_terms(1, {{{0}, 0.75}}, 1.0));
  EXPECT_EQ(one.first, Assignment{1});
  EXPECT_EQ(one.second, 0.25);
}

TEST(BruteForce, MatchesDirectEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto q = testutil::random_qubo(3 + seed % 9, 0.6, seed, seed % 3 == 0);
    const auto o = testutil::enumerate(q);
    const auto [x, c] = brute_force(instance_hamiltonian(q));
    EXPECT_NEAR(c, o.cost, 1e-9);
    EXPECT_NE(std::find(o.argmins.begin(), o.argmins.end(), x), o.argmins.end());
  }
}

TEST(BruteForce, RefusesLargeInstances) {
  IsingHamiltonian h;
  h.num_qubits = 25;
  EXPECT_THROW(brute_force(h), ValidationError);
}

TEST(Budget, ConfigureForBudget) {
  SolverConfig c;
  c.n_b = 40;
  c.n_s = 29;
  c.algorithm = Algorithm::QIMF;
  EXPECT_EQ(configure_for_budget(c, 29 * 40 * 100, 143).n_e, 100u);
  c.algorithm = Algorithm::QUAMF;
  EXPECT_EQ(configure_for_budget(c, 143 * 40 * 7 + 5, 143).n_e, 7u);
  c.algorithm = Algorithm::SA;
  EXPECT_EQ(configure_for_budget(c, 143 * 100, 143).n_e, 100u - 17);
  c.algorithm = Algorithm::OnePlusOne;
  EXPECT_EQ(configure_for_budget(c, 143 * 100, 143).n_e, 100u);
  c.algorithm = Algorithm::QUAMF;
  EXPECT_THROW(configure_for_budget(c, 10, 143), ValidationError);
}

TEST(Budget, EpochAxis) {
  RunTrace t;
  t.n_s = 29;
  t.n_b = 40;
  EXPECT_EQ(t.epoch_axis(29 * 40 * 3), 3.0);
  EXPECT_EQ(t.epoch_axis(143 * 40), 143.0 / 29.0);
}

// Head-to-head on the five-block portfolio at equal training queries.
TEST(Qimf, BeatsAnnealingAtEqualQueries) {
  const auto q = testutil::five_block_portfolio(7);
  const auto h = instance_hamiltonian(q);
  const std::size_t n_s = (h.num_terms() + 4) / 5;
  int wins = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto cfg = config(Algorithm::QIMF, 40, 3000, s);
    cfg.n_s = n_s;
    cfg.estimator_mode = EstimatorMode::Unbiased;
    const auto qt = solve(h, cfg);
    auto sa = cfg;
    sa.algorithm = Algorithm::SA;
    sa = configure_for_budget(sa, qt.ledger.total, h.num_terms());
    const auto st = solve(h, sa);
    EXPECT_LE(st.ledger.total, qt.ledger.total);
    if (qt.final_cost <= st.final_cost + 1e-12) ++wins;
  }
  EXPECT_GE(wins, 7);
}
