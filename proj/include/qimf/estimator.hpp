#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qimf/hamiltonian.hpp"
#include "qimf/random.hpp"

namespace qimf {

/// How the shot-subsampled cost is formed from the sampled terms.
enum class EstimatorMode {
  /// offset + plain sum over n_s distinct terms drawn without replacement.
  PaperLiteral,
  /// offset + (1/n_s) sum of a_m lambda_m(x) / p_m over i.i.d. draws.
  Unbiased,
};

std::string to_string(EstimatorMode mode);
EstimatorMode parse_estimator_mode(const std::string& text);

/// Categorical distribution over Hamiltonian terms, p_m proportional to
/// |a_m|^2 by default. Immutable; safe to share across threads.
class ShotAllocator {
 public:
  /// Amplitude-squared proposal. Throws if every coefficient is zero.
  explicit ShotAllocator(IsingHamiltonian h);

  /// Arbitrary nonnegative proposal weights, one per term.
  ShotAllocator(IsingHamiltonian h, std::vector<double> weights);

  static ShotAllocator uniform(IsingHamiltonian h);

  const IsingHamiltonian& hamiltonian() const { return h_; }
  const std::vector<double>& term_probs() const { return probs_; }
  std::size_t support_size() const { return support_size_; }

  /// i.i.d. categorical draw.
  std::size_t draw(Rng& rng) const;

  /// n distinct indices by successive renormalized draws, in draw order.
  std::vector<std::size_t> draw_distinct(std::size_t n, Rng& rng) const;

 private:
  void build(std::vector<double> weights);

  IsingHamiltonian h_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<double> tree_;  // Fenwick tree over the raw weights
  std::size_t support_size_ = 0;
};

ShotAllocator build_allocator(const IsingHamiltonian& h);

/// PaperLiteral draws without replacement, Unbiased with replacement.
std::vector<std::size_t> sample_terms(const ShotAllocator& alloc, std::size_t n_s,
                                      EstimatorMode mode, Rng& rng);

/// Shot-subsampled cost of x. The offset is always added exactly.
double cost_s(const ShotAllocator& alloc, const Assignment& x, std::size_t n_s, EstimatorMode mode,
              Rng& rng);

struct ShotCount {
  std::size_t n_s = 0;
  std::optional<std::string> warning;
};

/// n_w / (1 + (N-1) p/q), rounded up. Returns n_w with a warning when
/// p/q >= 0.8, where intra- and inter-block terms are nearly equally likely.
ShotCount shot_count_block(std::size_t n_w, std::size_t num_blocks, double p, double q);

/// ceil(n_w / N).
std::size_t shot_count_simple(std::size_t n_w, std::size_t num_blocks);

}  // namespace qimf
