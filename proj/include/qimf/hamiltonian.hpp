#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "qimf/instance.hpp"

namespace qimf {

/// Binary assignment x in {0,1}^n.
using Assignment = std::vector<std::uint8_t>;

/// Raised when a Z-only operation meets an X or Y letter.
class UnsupportedTermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Pauli : std::uint8_t { X, Y, Z };

char to_char(Pauli p);

/// coefficient * (tensor product of Pauli letters on `support`).
/// An empty `letters` vector means Z on every support index.
struct PauliTerm {
  double coefficient = 0.0;
  std::vector<Index> support;
  std::vector<Pauli> letters;

  Pauli letter(std::size_t k) const { return letters.empty() ? Pauli::Z : letters[k]; }
  bool all_z() const;

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

/// Diagonal Ising Hamiltonian: offset + sum of Z-string terms.
///
/// Spin convention: bit x maps to the Z eigenvalue (-1)^x, so bit 0 is +1.
struct IsingHamiltonian {
  std::size_t num_qubits = 0;
  std::vector<PauliTerm> terms;
  double offset = 0.0;

  std::size_t num_terms() const { return terms.size(); }

  /// Builds from Z-only terms, merging equal supports and dropping zeros.
  /// Terms come out sorted lexicographically by support.
  static IsingHamiltonian from_z_terms(std::size_t num_qubits,
                                       const std::map<std::vector<Index>, double>& terms,
                                       double offset);

  friend bool operator==(const IsingHamiltonian&, const IsingHamiltonian&) = default;
};

/// Exact Ising form of risk_weight * x^T V x - (1 - risk_weight) * linear^T x.
/// An empty `linear` is treated as zero.
IsingHamiltonian qubo_to_ising(const QuboInstance& instance, std::span<const double> linear = {},
                               double risk_weight = 1.0);

/// The Hamiltonian an instance file describes: uses `linear` with
/// metadata["lambda"] when present, and adds metadata["offset"].
IsingHamiltonian instance_hamiltonian(const QuboInstance& instance);

/// Inverse mapping for Z/ZZ Hamiltonians; the offset is kept in
/// metadata["offset"] so that instance_hamiltonian() restores the same costs.
QuboInstance ising_to_qubo(const IsingHamiltonian& h);

double evaluate_term(const PauliTerm& term, const Assignment& x);

/// offset + sum over terms, summed in stored term order.
double evaluate_full(const IsingHamiltonian& h, const Assignment& x);

bool qwc_check(const PauliTerm& a, const PauliTerm& b);

/// Greedy first-fit partition of term indices into qubit-wise commuting groups.
std::vector<std::vector<std::size_t>> group_qwc(const IsingHamiltonian& h);

using FixedVars = std::map<Index, std::uint8_t>;

struct PreprocessResult {
  FixedVars fixed;
  IsingHamiltonian reduced;   // over the kept variables, renumbered 0..k-1
  std::vector<Index> kept;    // original index of each reduced variable

  /// Full-length assignment from one over the reduced variables.
  Assignment expand(const Assignment& reduced_x) const;
  /// Reduced assignment (drops fixed variables).
  Assignment restrict(const Assignment& full_x) const;
};

/// Single-pass diagonal-dominance fixing.
///
/// Qubit i is fixed when its one-body coefficient c_i satisfies
/// |c_i| > sum |a_m| over the other terms touching i. It is set to 1 when
/// c_i > 0 (eigenvalue -1 lowers the cost) and to 0 otherwise.
PreprocessResult preprocess_dominant(const IsingHamiltonian& h);

}  // namespace qimf
