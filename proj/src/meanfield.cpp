#include "qimf/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qimf {

MeanFieldModel MeanFieldModel::initial(std::size_t num_vars, double jitter, std::uint64_t seed) {
  MeanFieldModel model(num_vars);
  if (jitter > 0.0) {
    Rng rng(derive_seed(seed, "init"));
    for (auto& row : model.alpha) {
      row[0] = rng.normal(0.0, jitter);
      row[1] = rng.normal(0.0, jitter);
    }
  }
  return model;
}

namespace {

std::array<double, 2> softmax_row(const std::array<double, 2>& a) {
  const double top = std::max(a[0], a[1]);
  const double e0 = std::exp(a[0] - top);
  const double e1 = std::exp(a[1] - top);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

void check_assignment(const MeanFieldModel& model, const Assignment& x) {
  if (x.size() != model.num_vars()) {
    throw ValidationError("assignment has " + std::to_string(x.size()) + " bits, model has " +
                          std::to_string(model.num_vars()) + " variables");
  }
}

}  // namespace

RowMatrix probs(const MeanFieldModel& model) {
  RowMatrix out(model.num_vars());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = softmax_row(model.alpha[i]);
  return out;
}

std::vector<double> prob_one(const MeanFieldModel& model) {
  std::vector<double> out(model.num_vars());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = softmax_row(model.alpha[i])[1];
  return out;
}

Assignment sample_one(const std::vector<double>& p_one, Rng& rng) {
  Assignment x(p_one.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform() < p_one[i] ? 1 : 0;
  return x;
}

SampleBatch sample_batch(const MeanFieldModel& model, std::size_t n_b, std::uint64_t seed) {
  if (n_b == 0) throw ValidationError("n_b must be at least 1");
  const auto p_one = prob_one(model);
  SampleBatch batch;
  batch.samples.reserve(n_b);
  for (std::size_t k = 0; k < n_b; ++k) {
    Rng rng(derive_seed(seed, k));
    batch.samples.push_back(sample_one(p_one, rng));
  }
  return batch;
}

SampleBatch sample_batch(const MeanFieldModel& model, std::size_t n_b, Rng& rng) {
  return sample_batch(model, n_b, rng());
}

RowMatrix log_prob_grad(const MeanFieldModel& model, const Assignment& x) {
  check_assignment(model, x);
  RowMatrix g(model.num_vars());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto p = softmax_row(model.alpha[i]);
    g[i][0] = (x[i] == 0 ? 1.0 : 0.0) - p[0];
    g[i][1] = (x[i] == 1 ? 1.0 : 0.0) - p[1];
  }
  return g;
}

ObjectiveGrad objective_and_grad(const MeanFieldModel& model, const SampleBatch& batch,
                                 bool mean_baseline) {
  if (batch.samples.empty()) throw ValidationError("objective_and_grad: empty batch");
  if (batch.costs.size() != batch.samples.size())
    throw ValidationError("objective_and_grad: every sample needs a cost");
  const double n_b = static_cast<double>(batch.size());

  double total = 0.0;
  for (double c : batch.costs) {
    if (!std::isfinite(c)) throw ValidationError("objective_and_grad: non-finite sample cost");
    total += c;
  }
  const double mean = total / n_b;
  const double baseline = mean_baseline ? mean : 0.0;

  // sum_k c_k (onehot(x_k) - p) = S - C p, with S_ij = sum of c_k over samples where x_ki = j.
  const std::size_t n = model.num_vars();
  RowMatrix hit(n, {0.0, 0.0});
  double weight_sum = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& x = batch.samples[k];
    check_assignment(model, x);
    const double c = batch.costs[k] - baseline;
    weight_sum += c;
    for (std::size_t i = 0; i < n; ++i) hit[i][x[i] & 1u] += c;
  }

  ObjectiveGrad out;
  out.objective = mean;
  out.grad.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = softmax_row(model.alpha[i]);
    out.grad[i][0] = (hit[i][0] - weight_sum * p[0]) / n_b;
    out.grad[i][1] = (hit[i][1] - weight_sum * p[1]) / n_b;
  }
  return out;
}

void adam_step(MeanFieldModel& model, AdamState& state, const RowMatrix& grad) {
  const std::size_t n = model.num_vars();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n)
    throw ValidationError("adam_step: shape mismatch");
  for (const auto& row : grad) {
    if (!std::isfinite(row[0]) || !std::isfinite(row[1]))
      throw ValidationError("adam_step: non-finite gradient");
  }
  const auto& cfg = state.config;
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double g = grad[i][j];
      double& m = state.m[i][j];
      double& v = state.v[i][j];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
      model.alpha[i][j] -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + cfg.epsilon);
    }
  }
}

Assignment mode_assignment(const MeanFieldModel& model) {
  Assignment x(model.num_vars());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = model.alpha[i][1] > model.alpha[i][0] ? 1 : 0;
  return x;
}

}  // namespace qimf
