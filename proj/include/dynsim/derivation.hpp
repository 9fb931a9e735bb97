#pragma once

#include <memory>

#include "dynsim/schedule.hpp"

namespace dynsim {

struct DerivationNode;
using DerivationPtr = std::shared_ptr<const DerivationNode>;

/// A proof-carrying simulation recipe. Leaves are directly evolvable
/// resources (a term of the source Hamiltonian, or a weight-1 string); inner
/// nodes apply the composition identities: conjugation, i[.,.], linear
/// combination, rescaling, or a full conjugate-and-add schedule. Each node
/// caches its effective Hamiltonian; subtrees may be shared (the structure is
/// a DAG).
struct DerivationNode {
  enum class Kind { Given, LocalPauli, Conjugate, Commutator, Combine, Rescale, Isolate };

  Kind kind = Kind::Given;
  std::vector<DerivationPtr> children;

  int term_index = -1;          // Given
  Term term;                    // Given
  PhasedPauli local;            // LocalPauli
  CliffordLayer layer;          // Conjugate
  std::vector<double> weights;  // Combine
  double factor = 1.0;          // Rescale
  Schedule schedule;            // Isolate

  Hamiltonian effective;
};

DerivationPtr make_given(const Term& term, int term_index);
DerivationPtr make_local(const PhasedPauli& weight1_string);
DerivationPtr make_conjugate(DerivationPtr child, CliffordLayer layer);
DerivationPtr make_commutator(DerivationPtr left, DerivationPtr right);
DerivationPtr make_combine(std::vector<DerivationPtr> children, std::vector<double> weights);
DerivationPtr make_rescale(DerivationPtr child, double factor);
DerivationPtr make_isolate(DerivationPtr child, Schedule schedule);

/// Recomputes a node's effective Hamiltonian from its children.
Hamiltonian recompute_effective(const DerivationNode& node);

/// Recomputes every effective Hamiltonian bottom-up and compares against the
/// cached values (strings exactly, coefficients to tol). Returns the largest
/// coefficient deviation seen.
double replay(const DerivationPtr& root, double tol = 1e-12);

size_t node_count(const DerivationPtr& root);
/// Longest chain of Commutator nodes root-to-leaf.
int commutator_depth(const DerivationPtr& root);

/// Every node's effective Hamiltonian has only odd-weight terms.
bool all_nodes_odd(const DerivationPtr& root);

/// Every node's effective Hamiltonian carries only Z or I on `qubit`.
bool qubit_sees_only_z(const DerivationPtr& root, int qubit);

/// Same, but does not descend below the listed subtree roots (their own
/// effective Hamiltonians are still checked).
bool qubit_sees_only_z(const DerivationPtr& root, int qubit,
                       const std::vector<DerivationPtr>& stop_at);

std::string derivation_to_json(const DerivationPtr& root);
DerivationPtr derivation_from_json(const std::string& text);

}  // namespace dynsim
