#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qimf/hamiltonian.hpp"
#include "qimf/random.hpp"

namespace qimf {

/// num_vars x 2 matrix, one row per binary variable, column = bit value.
using RowMatrix = std::vector<std::array<double, 2>>;

/// Fully factorized softmax distribution over binary variables.
struct MeanFieldModel {
  RowMatrix alpha;

  MeanFieldModel() = default;
  explicit MeanFieldModel(std::size_t num_vars) : alpha(num_vars, {0.0, 0.0}) {}

  /// Zero logits plus optional N(0, jitter^2) noise.
  static MeanFieldModel initial(std::size_t num_vars, double jitter = 0.0, std::uint64_t seed = 0);

  std::size_t num_vars() const { return alpha.size(); }
};

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  RowMatrix m;
  RowMatrix v;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(std::size_t num_vars, AdamConfig cfg)
      : config(cfg), m(num_vars, {0.0, 0.0}), v(num_vars, {0.0, 0.0}) {}
};

struct SampleBatch {
  std::vector<Assignment> samples;
  std::vector<double> costs;  // filled by the caller, one per sample

  std::size_t size() const { return samples.size(); }
};

/// Row-wise softmax with max subtraction.
RowMatrix probs(const MeanFieldModel& model);

/// P(x_i = 1) for each variable.
std::vector<double> prob_one(const MeanFieldModel& model);

/// Draws one assignment; one uniform per variable.
Assignment sample_one(const std::vector<double>& p_one, Rng& rng);

/// n_b independent samples. Sample k uses its own stream derived from
/// (seed, k), so the batch can be produced in any order.
SampleBatch sample_batch(const MeanFieldModel& model, std::size_t n_b, std::uint64_t seed);
SampleBatch sample_batch(const MeanFieldModel& model, std::size_t n_b, Rng& rng);

/// d/d alpha_ij of ln P(x): indicator(j == x_i) - p_ij.
RowMatrix log_prob_grad(const MeanFieldModel& model, const Assignment& x);

struct ObjectiveGrad {
  double objective = 0.0;
  RowMatrix grad;
};

/// Batch mean cost and the score-function gradient
/// (1/n_b) sum_k (cost_k - baseline) * grad ln P(x_k), baseline = 0 unless
/// `mean_baseline` is set, in which case the batch mean cost is subtracted.
ObjectiveGrad objective_and_grad(const MeanFieldModel& model, const SampleBatch& batch,
                                 bool mean_baseline = false);

/// One bias-corrected ADAM descent step on alpha.
void adam_step(MeanFieldModel& model, AdamState& state, const RowMatrix& grad);

/// Per-variable argmax; ties go to bit 0.
Assignment mode_assignment(const MeanFieldModel& model);

}  // namespace qimf
