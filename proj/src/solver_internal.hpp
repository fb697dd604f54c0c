#pragma once

#include <vector>

#include "qimf/solver.hpp"

namespace qimf::detail {

/// Terms touching each qubit, for local flip deltas.
class TermIndex {
 public:
  explicit TermIndex(const IsingHamiltonian& h);

  /// cost(x with bit i flipped) - cost(x).
  double flip_delta(const Assignment& x, Index i) const;

  /// Every flip delta from one pass over the terms; optionally the cost too.
  std::vector<double> all_flip_deltas(const Assignment& x, double* cost = nullptr) const;

 private:
  const IsingHamiltonian* h_;
  std::vector<std::vector<std::size_t>> by_qubit_;
};

Assignment random_assignment(std::size_t n, Rng& rng);

void push_record(RunTrace& trace, std::size_t epoch, double mean_cost, double best_cost,
                 const Assignment& best_x);

}  // namespace qimf::detail
