#pragma once

#include "dynsim/closure.hpp"

namespace dynsim {

/// Rewrites a derivation without changing its root string: commutators with a
/// weight-1 partner become single-qubit basis changes (an axis toggle), and
/// stacked conjugations merge. Scales may change; signs are repaired at the
/// root by the derive_* entry points.
DerivationPtr simplify_derivation(const DerivationPtr& root);

/// Wraps the root in one anticommuting single-qubit conjugation when its
/// (single-term) effective coefficient is negative.
DerivationPtr sign_fix(const DerivationPtr& root);

/// Inductive support peeling: conjugate the source to +X-form, then repeat
/// i[X^S, X X Y^(S minus two)] to drop two non-target qubits per level. The
/// result is a positive multiple of X on exactly target_support.
DerivationPtr reduce_odd_support(const DerivationPtr& source, const Support& target_support);
DerivationPtr reduce_odd_support(const Term& source, int term_index,
                                 const Support& target_support);

struct IsolatingSet {
  struct Coupling {
    Support support;
    DerivationPtr derivation;   // effective: positive multiple of X^support
    int source_term = -1;       // originating term of h
    bool reduced = false;       // true when derived via reduce_odd_support
  };
  std::vector<Coupling> couplings;
  int isolated_qubit = -1;
};

/// Walks the terms of an odd entangling Hamiltonian, reducing each extending
/// term to overlap the previous coupling on one (odd overlap) or two (even
/// overlap) qubits, until no term adds new coverage; remaining terms are
/// appended for coverage and connectivity. The isolated qubit lies in exactly
/// one coupling.
IsolatingSet find_isolating_set(const Hamiltonian& h);

/// Definitional check: supports cover and connect all qubits, every coupling
/// has odd size, and the isolated qubit appears in exactly one support.
bool validate_isolating_set(const IsolatingSet& iso, int num_qubits);

/// Theorem-2 synthesis: closure with provenance over the isolating-set
/// couplings plus weight-1 strings, then extraction, simplification and a
/// sign fix. Requires an odd entangling Hamiltonian and an odd-weight target.
DerivationPtr derive_odd_target(const Hamiltonian& h, const PhasedPauli& target);

/// Generic pipeline for a universal Hamiltonian (closure of its terms plus
/// locals reaches every non-identity string); dispatches to derive_odd_target
/// for odd entangling inputs.
DerivationPtr derive_target(const Hamiltonian& h, const PhasedPauli& target);

struct EncodedDerivation {
  DerivationPtr tree;             // acts on the relabeled system
  Hamiltonian relabeled;          // h after moving the isolated qubit last
  std::vector<int> permutation;   // original qubit q -> relabeled perm[q]
  int ancilla_original = -1;      // original index of the isolated qubit
  std::string directive;
};

/// Theorem-3 synthesis: relabels so the isolated qubit is last, then derives
/// target ⊗ I (odd target) or target ⊗ Z (even target). Every node of the
/// tree acts on the ancilla only by Z or I, so |0> stays fixed.
EncodedDerivation derive_encoded(const Hamiltonian& h, const PhasedPauli& target);

}  // namespace dynsim
