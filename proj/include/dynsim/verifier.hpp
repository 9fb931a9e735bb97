#pragma once

#include <Eigen/Dense>
#include <utility>

#include "dynsim/derivation.hpp"

namespace dynsim {

using DenseOperator = Eigen::MatrixXcd;

/// Exact tensor-product construction, i^phase included. Capped at 8 qubits.
DenseOperator to_matrix(const PhasedPauli& p);
DenseOperator to_matrix(const Hamiltonian& h);

/// The 2x2 unitary (up to global phase) realizing the conjugation action.
Eigen::Matrix2cd clifford_matrix(const SingleQubitClifford& c);
DenseOperator layer_matrix(const CliffordLayer& layer);

/// e^{-iHt} by Hermitian eigendecomposition. Throws on non-Hermitian input.
DenseOperator evolve(const DenseOperator& hermitian, double t);

struct TrotterParams {
  double step = 0.01;   // Delta: first-order slice width for sums
  double comm = 0.01;   // delta: group-commutator cycle parameter
};

/// One primitive of a compiled simulation, in chronological order: a local
/// unitary layer (possibly inverted) or an evolution of a leaf resource.
struct CompiledStep {
  enum class Kind { Layer, Evolve };
  Kind kind = Kind::Evolve;
  CliffordLayer layer;
  bool adjoint = false;
  Hamiltonian hamiltonian;
  double duration = 0.0;
};

/// Recursive compilation of a derivation into layers and leaf evolutions:
/// Conjugate wraps its child, Combine slices first-order with width `step`,
/// Commutator realizes duration tau as ceil(tau/comm^2) four-exponential
/// cycles (the cycle parameter is shrunk to sqrt(tau/cycles) so the total
/// duration matches exactly), Isolate expands into its 2^m conjugated
/// segments. Cost grows exponentially with nested commutator depth.
std::vector<CompiledStep> compile(const DerivationPtr& tree, double t,
                                  const TrotterParams& params);

DenseOperator step_matrix(const CompiledStep& step);
DenseOperator compiled_product(const std::vector<CompiledStep>& steps, int num_qubits);

/// Operator 2-norm distance minimized over a global phase.
double phase_aligned_distance(const DenseOperator& a, const DenseOperator& b);

/// Distance between the compiled product and evolve(root effective, t).
double verify(const DerivationPtr& tree, double t, const TrotterParams& params);

/// Errors along a ladder that halves both step and comm per level.
std::vector<std::pair<double, double>> verify_ladder(const DerivationPtr& tree, double t,
                                                     const TrotterParams& params, int levels);

/// Defining-representation checks for the algebra generated by odd strings:
/// every odd-weight string passes the so (n even) or sp (n odd) conditions in
/// the rotated basis, and even-weight strings violate them (negative control).
struct LieEmbeddingReport {
  int n = 0;
  size_t odd_checked = 0;
  double max_residual = 0.0;     // worst condition residual over odd strings
  bool all_odd_pass = false;
  size_t even_checked = 0;
  double min_even_violation = 0.0;
};
LieEmbeddingReport check_lie_embedding(int n, double tol = 1e-12);

/// Average gate fidelity (|tr(target† actual)|^2 + d) / (d^2 + d).
double average_gate_fidelity(const DenseOperator& target, const DenseOperator& actual);

}  // namespace dynsim
