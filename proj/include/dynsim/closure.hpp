#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>

#include "dynsim/derivation.hpp"

namespace dynsim {

/// What a closure generator stands for, so derivations can be rebuilt later.
struct Generator {
  enum class Source { HamiltonianTerm, Local, Coupling };
  PhasedPauli string;   // unsigned
  Source source = Source::Local;
  int index = -1;       // term index or coupling index
};

/// The commutator-closed set of unsigned Pauli strings generated by a set of
/// generators, with first-discovery provenance. Phases are quotiented out: a
/// Pauli commutator is a scalar times a single string, so the closed string
/// set is a basis of the spanned real algebra.
class ClosureResult {
 public:
  struct Element {
    PhasedPauli string;
    bool is_generator = false;
    int generator_index = -1;      // into generators()
    int parent_a = -1, parent_b = -1;  // element indices, discovery order
    int level = 0;                 // breadth-first round of discovery
  };

  int num_qubits() const { return num_qubits_; }
  size_t dimension() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Generator>& generators() const { return generators_; }

  std::optional<int> index_of(const PhasedPauli& string) const;
  bool contains(const PhasedPauli& string) const { return index_of(string).has_value(); }

  /// weight -> number of elements of that weight.
  std::map<int, size_t> weight_histogram() const;
  bool all_odd() const;

 private:
  friend ClosureResult close_over(std::vector<Generator>, int);

  int num_qubits_ = 0;
  std::vector<Element> elements_;
  std::vector<Generator> generators_;
  std::unordered_map<PhasedPauli, int, PauliStringHash, PauliStringEq> index_;
};

/// Breadth-first commutator fixpoint. Each round commutates the frontier
/// (in lexicographic order) against everything known at the round's start;
/// first discovery wins provenance. Deterministic.
ClosureResult close_over(std::vector<Generator> generators, int num_qubits);

/// Closure of the Hamiltonian's term strings, optionally together with all
/// 3n weight-1 strings (the free local-unitary resources).
ClosureResult close(const Hamiltonian& h, bool include_local_unitaries);

enum class AlgebraClass { Universal, Odd };

/// Universal: 4^n - 1. Odd: (4^n - (-2)^n) / 2, the number of odd-weight
/// strings, which is 2^(n-1)(2^n -+ 1) by the parity of n.
uint64_t algebra_dimension(int n, AlgebraClass cls);

/// Maps a generator to its DerivationTree leaf (or subtree).
using GeneratorFactory = std::function<DerivationPtr(const Generator&)>;

/// Replays the provenance chain of `target` into a commutator tree whose
/// leaves come from the factory. The result reproduces the target string with
/// a nonzero real coefficient. Throws if the target is not in the closure.
DerivationPtr extract_derivation(const ClosureResult& c, const PhasedPauli& target,
                                 const GeneratorFactory& factory);

/// Convenience for close(h, ...): leaves are Given terms and LocalPauli nodes.
DerivationPtr extract_derivation(const ClosureResult& c, const Hamiltonian& h,
                                 const PhasedPauli& target);

}  // namespace dynsim
