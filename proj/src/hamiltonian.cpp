#include "qimf/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace qimf {

char to_char(Pauli p) {
  switch (p) {
    case Pauli::X:
      return 'X';
    case Pauli::Y:
      return 'Y';
    case Pauli::Z:
      return 'Z';
  }
  return '?';
}

bool PauliTerm::all_z() const {
  return std::all_of(letters.begin(), letters.end(), [](Pauli p) { return p == Pauli::Z; });
}

IsingHamiltonian IsingHamiltonian::from_z_terms(std::size_t num_qubits,
                                                const std::map<std::vector<Index>, double>& terms,
                                                double offset) {
  IsingHamiltonian h;
  h.num_qubits = num_qubits;
  h.offset = offset;
  for (const auto& [support, coef] : terms) {
    if (support.empty()) {
      h.offset += coef;
      continue;
    }
    if (coef == 0.0) continue;
    h.terms.push_back(PauliTerm{coef, support, {}});
  }
  return h;
}

IsingHamiltonian qubo_to_ising(const QuboInstance& instance, std::span<const double> linear,
                               double risk_weight) {
  const std::size_t n = instance.num_vars;
  if (!linear.empty() && linear.size() != n) {
    throw ValidationError("linear term has " + std::to_string(linear.size()) +
                          " entries, instance has " + std::to_string(n) + " variables");
  }
  if (!(risk_weight >= 0.0 && risk_weight <= 1.0))
    throw ValidationError("risk_weight must lie in [0, 1]");

  // x = (1 - s) / 2 with s = (-1)^x.
  //   w x_i         -> w/2 - (w/2) s_i
  //   2w x_i x_j    -> w/2 (1 - s_i - s_j + s_i s_j)
  std::map<std::vector<Index>, double> acc;
  double offset = 0.0;
  for (const auto& [key, value] : instance.entries) {
    const auto [i, j] = key;
    if (i > j || j >= n) throw ValidationError("instance entry out of canonical range");
    const double w = risk_weight * value;
    if (i == j) {
      offset += 0.5 * w;
      acc[{i}] -= 0.5 * w;
    } else {
      offset += 0.5 * w;
      acc[{i}] -= 0.5 * w;
      acc[{j}] -= 0.5 * w;
      acc[{i, j}] += 0.5 * w;
    }
  }
  for (std::size_t i = 0; i < linear.size(); ++i) {
    const double w = -(1.0 - risk_weight) * linear[i];
    if (w == 0.0) continue;
    offset += 0.5 * w;
    acc[{i}] -= 0.5 * w;
  }
  return IsingHamiltonian::from_z_terms(n, acc, offset);
}

IsingHamiltonian instance_hamiltonian(const QuboInstance& instance) {
  IsingHamiltonian h;
  if (instance.linear) {
    const auto it = instance.metadata.find("lambda");
    if (it == instance.metadata.end())
      throw ValidationError("instance has a linear term but no metadata.lambda");
    h = qubo_to_ising(instance, *instance.linear, std::stod(it->second));
  } else {
    h = qubo_to_ising(instance);
  }
  if (const auto it = instance.metadata.find("offset"); it != instance.metadata.end()) {
    h.offset += std::stod(it->second);
  }
  return h;
}

QuboInstance ising_to_qubo(const IsingHamiltonian& h) {
  QuboInstance inst;
  inst.num_vars = std::max<std::size_t>(h.num_qubits, 1);
  std::map<EntryKey, double> acc;
  double offset = h.offset;
  for (const auto& t : h.terms) {
    if (!t.all_z()) throw UnsupportedTermError("ising_to_qubo: non-Z letter");
    const double c = t.coefficient;
    if (t.support.size() == 1) {
      const Index i = t.support[0];
      acc[{i, i}] -= 2.0 * c;
      offset += c;
    } else if (t.support.size() == 2) {
      const Index i = t.support[0], j = t.support[1];
      acc[{i, j}] += 2.0 * c;
      acc[{i, i}] -= 2.0 * c;
      acc[{j, j}] -= 2.0 * c;
      offset += c;
    } else if (!t.support.empty()) {
      throw UnsupportedTermError("ising_to_qubo: term acts on more than two qubits");
    } else {
      offset += c;
    }
  }
  for (const auto& [key, value] : acc) inst.set(key.first, key.second, value);
  if (offset != 0.0) inst.metadata["offset"] = format_double(offset);
  return inst;
}

double evaluate_term(const PauliTerm& term, const Assignment& x) {
  unsigned parity = 0;
  for (std::size_t k = 0; k < term.support.size(); ++k) {
    if (term.letter(k) != Pauli::Z)
      throw UnsupportedTermError(std::string("cannot evaluate ") + to_char(term.letter(k)) +
                                 " letter on a bitstring");
    const Index q = term.support[k];
    if (q >= x.size()) throw ValidationError("term support exceeds assignment length");
    parity ^= x[q] & 1u;
  }
  return parity ? -term.coefficient : term.coefficient;
}

double evaluate_full(const IsingHamiltonian& h, const Assignment& x) {
  if (x.size() != h.num_qubits) {
    throw ValidationError("assignment has " + std::to_string(x.size()) + " bits, Hamiltonian has " +
                          std::to_string(h.num_qubits) + " qubits");
  }
  double total = h.offset;
  for (const auto& t : h.terms) total += evaluate_term(t, x);
  return total;
}

bool qwc_check(const PauliTerm& a, const PauliTerm& b) {
  std::size_t i = 0, j = 0;
  while (i < a.support.size() && j < b.support.size()) {
    if (a.support[i] < b.support[j]) {
      ++i;
    } else if (b.support[j] < a.support[i]) {
      ++j;
    } else {
      if (a.letter(i) != b.letter(j)) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

std::vector<std::vector<std::size_t>> group_qwc(const IsingHamiltonian& h) {
  // A set of Pauli strings is pairwise QWC iff on every qubit all of its
  // non-identity letters agree, so each group keeps one letter per qubit.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::unordered_map<Index, Pauli>> letters;
  for (std::size_t m = 0; m < h.terms.size(); ++m) {
    const auto& t = h.terms[m];
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      bool fits = true;
      for (std::size_t k = 0; k < t.support.size() && fits; ++k) {
        const auto it = letters[g].find(t.support[k]);
        fits = it == letters[g].end() || it->second == t.letter(k);
      }
      if (fits) break;
    }
    if (g == groups.size()) {
      groups.emplace_back();
      letters.emplace_back();
    }
    groups[g].push_back(m);
    for (std::size_t k = 0; k < t.support.size(); ++k) letters[g].emplace(t.support[k], t.letter(k));
  }
  return groups;
}

Assignment PreprocessResult::expand(const Assignment& reduced_x) const {
  if (reduced_x.size() != kept.size()) throw ValidationError("reduced assignment length mismatch");
  Assignment full(kept.size() + fixed.size(), 0);
  for (const auto& [i, bit] : fixed) full[i] = bit;
  for (std::size_t k = 0; k < kept.size(); ++k) full[kept[k]] = reduced_x[k];
  return full;
}

Assignment PreprocessResult::restrict(const Assignment& full_x) const {
  Assignment out;
  out.reserve(kept.size());
  for (Index i : kept) out.push_back(full_x.at(i));
  return out;
}

PreprocessResult preprocess_dominant(const IsingHamiltonian& h) {
  const std::size_t n = h.num_qubits;
  std::vector<double> field(n, 0.0);
  std::vector<double> competing(n, 0.0);
  for (const auto& t : h.terms) {
    if (!t.all_z()) throw UnsupportedTermError("preprocess_dominant needs a Z-only Hamiltonian");
    if (t.support.size() == 1) {
      field[t.support[0]] += t.coefficient;
    } else {
      for (Index q : t.support) competing[q] += std::abs(t.coefficient);
    }
  }

  PreprocessResult out;
  std::vector<Index> new_index(n, 0);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(field[i]) > competing[i]) {
      out.fixed[i] = field[i] > 0.0 ? 1 : 0;
    } else {
      new_index[i] = out.kept.size();
      out.kept.push_back(i);
    }
  }

  std::map<std::vector<Index>, double> acc;
  double offset = h.offset;
  for (const auto& t : h.terms) {
    double coef = t.coefficient;
    std::vector<Index> support;
    for (Index q : t.support) {
      const auto it = out.fixed.find(q);
      if (it == out.fixed.end()) {
        support.push_back(new_index[q]);
      } else if (it->second) {
        coef = -coef;
      }
    }
    if (support.empty()) {
      offset += coef;
    } else {
      acc[support] += coef;
    }
  }
  out.reduced = IsingHamiltonian::from_z_terms(out.kept.size(), acc, offset);
  return out;
}

}  // namespace qimf
