#include "qimf/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace qimf {

std::string to_string(EstimatorMode mode) {
  return mode == EstimatorMode::PaperLiteral ? "paper" : "unbiased";
}

EstimatorMode parse_estimator_mode(const std::string& text) {
  if (text == "paper" || text == "paper-literal" || text == "PaperLiteral")
    return EstimatorMode::PaperLiteral;
  if (text == "unbiased" || text == "Unbiased") return EstimatorMode::Unbiased;
  throw ValidationError("unknown estimator mode '" + text + "' (expected paper or unbiased)");
}

namespace {

std::vector<double> amplitude_weights(const IsingHamiltonian& h) {
  std::vector<double> w;
  w.reserve(h.terms.size());
  for (const auto& t : h.terms) w.push_back(t.coefficient * t.coefficient);
  return w;
}

}  // namespace

ShotAllocator::ShotAllocator(IsingHamiltonian h) : h_(std::move(h)) {
  build(amplitude_weights(h_));
}

ShotAllocator::ShotAllocator(IsingHamiltonian h, std::vector<double> weights) : h_(std::move(h)) {
  build(std::move(weights));
}

ShotAllocator ShotAllocator::uniform(IsingHamiltonian h) {
  std::vector<double> w(h.terms.size(), 1.0);
  for (std::size_t m = 0; m < w.size(); ++m) {
    if (h.terms[m].coefficient == 0.0) w[m] = 0.0;
  }
  return ShotAllocator(std::move(h), std::move(w));
}

void ShotAllocator::build(std::vector<double> weights) {
  if (weights.size() != h_.terms.size())
    throw ValidationError("one proposal weight per term is required");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("proposal weights must be finite and >= 0");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0))
    throw ValidationError("cannot allocate shots: Hamiltonian has no nonzero term");

  const std::size_t n = weights.size();
  weights_ = weights;
  probs_.resize(n);
  cumulative_.resize(n);
  tree_.assign(n + 1, 0.0);
  double running = 0.0;
  support_size_ = 0;
  for (std::size_t m = 0; m < n; ++m) {
    probs_[m] = weights[m] / total;
    running += weights[m];
    cumulative_[m] = running;
    if (weights[m] > 0.0) ++support_size_;
    for (std::size_t k = m + 1; k <= n; k += k & (~k + 1)) tree_[k] += weights[m];
  }
}

std::size_t ShotAllocator::draw(Rng& rng) const {
  const double target = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // Only reachable through rounding at the very top; take the last live term.
    std::size_t m = cumulative_.size();
    while (m > 0 && probs_[m - 1] == 0.0) --m;
    return m - 1;
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::vector<std::size_t> ShotAllocator::draw_distinct(std::size_t n, Rng& rng) const {
  if (n > support_size_) {
    throw ValidationError("cannot draw " + std::to_string(n) + " distinct terms from " +
                          std::to_string(support_size_) + " with nonzero probability");
  }
  const std::size_t size = probs_.size();
  std::vector<double> tree = tree_;
  std::vector<bool> taken(size, false);
  double remaining = cumulative_.back();
  const std::size_t top = std::bit_floor(size);

  std::vector<std::size_t> out;
  out.reserve(n);
  while (out.size() < n) {
    double target = rng.uniform() * remaining;
    std::size_t pos = 0;
    for (std::size_t step = top; step > 0; step >>= 1) {
      if (pos + step <= size && tree[pos + step] <= target) {
        pos += step;
        target -= tree[pos];
      }
    }
    // Rounding residue of removed weights can, very rarely, land here.
    if (pos >= size || taken[pos] || probs_[pos] == 0.0) continue;
    taken[pos] = true;
    out.push_back(pos);
    remaining -= weights_[pos];
    for (std::size_t k = pos + 1; k <= size; k += k & (~k + 1)) tree[k] -= weights_[pos];
    if (!(remaining > 0.0) && out.size() < n) {
      remaining = 0.0;
      for (std::size_t m = 0; m < size; ++m) {
        if (!taken[m]) remaining += weights_[m];
      }
    }
  }
  return out;
}

ShotAllocator build_allocator(const IsingHamiltonian& h) { return ShotAllocator(h); }

std::vector<std::size_t> sample_terms(const ShotAllocator& alloc, std::size_t n_s,
                                      EstimatorMode mode, Rng& rng) {
  if (n_s == 0) throw ValidationError("n_s must be at least 1");
  if (mode == EstimatorMode::PaperLiteral) return alloc.draw_distinct(n_s, rng);
  std::vector<std::size_t> out(n_s);
  for (auto& m : out) m = alloc.draw(rng);
  return out;
}

double cost_s(const ShotAllocator& alloc, const Assignment& x, std::size_t n_s, EstimatorMode mode,
              Rng& rng) {
  const auto& h = alloc.hamiltonian();
  if (x.size() != h.num_qubits) throw ValidationError("assignment length does not match Hamiltonian");
  auto picks = sample_terms(alloc, n_s, mode, rng);
  if (mode == EstimatorMode::PaperLiteral) {
    // Stored term order, so exhausting every term reproduces evaluate_full bit for bit.
    std::sort(picks.begin(), picks.end());
    double total = h.offset;
    for (std::size_t m : picks) total += evaluate_term(h.terms[m], x);
    return total;
  }
  const auto& p = alloc.term_probs();
  double sum = 0.0;
  for (std::size_t m : picks) sum += evaluate_term(h.terms[m], x) / p[m];
  return h.offset + sum / static_cast<double>(n_s);
}

ShotCount shot_count_block(std::size_t n_w, std::size_t num_blocks, double p, double q) {
  if (num_blocks == 0) throw ValidationError("number of blocks must be at least 1");
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("p and q must be positive");
  if (p > q) throw ValidationError("shot_count_block assumes p <= q (denser diagonal blocks)");
  const double ratio = p / q;
  if (num_blocks > 1 && ratio >= 0.8) {
    return {n_w, "p/q = " + format_double(ratio) +
                     " is near-uniform; amplitude shot allocation gives no speedup, using n_w"};
  }
  const double exact =
      static_cast<double>(n_w) / (1.0 + static_cast<double>(num_blocks - 1) * ratio);
  const auto n_s = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
  return {std::max<std::size_t>(n_s, 1), std::nullopt};
}

std::size_t shot_count_simple(std::size_t n_w, std::size_t num_blocks) {
  if (num_blocks == 0) throw ValidationError("number of blocks must be at least 1");
  return std::max<std::size_t>((n_w + num_blocks - 1) / num_blocks, 1);
}

}  // namespace qimf
