#pragma once

#include <cstdint>
#include <random>

#include "dynsim/hamiltonian.hpp"

namespace dynsim {

/// A conjugate-and-add program: first conjugate the whole Hamiltonian by
/// basis_change, then apply H <- L H L + H once per layer. Every layer is a
/// self-inverse Pauli-only conjugation; each application doubles the number
/// of evolution-time segments.
struct Schedule {
  CliffordLayer basis_change;
  std::vector<CliffordLayer> layers;

  int num_qubits() const { return basis_change.num_qubits(); }
  uint64_t segments() const { return uint64_t{1} << layers.size(); }
  void push_layer(CliffordLayer layer);
};

/// Exact symbolic result: terms commuting with a layer double, anticommuting
/// terms cancel. The result may be empty.
Hamiltonian apply_schedule_symbolic(const Hamiltonian& h, const Schedule& s);

/// The 2n - k + C(k,2) layer construction isolating one term: Z on every
/// qubit, X on each qubit outside the support, then X_p X_q for every support
/// pair. The basis change maps the target's axes to Z and absorbs the sign
/// fix, so the output is a single all-Z-form term with coefficient
/// 2^(2n - k + C(k,2)) * |c|.
Schedule deterministic_isolation_schedule(const Hamiltonian& h, int term_index);

/// Coefficient scale produced by the deterministic schedule.
double deterministic_isolation_scale(int num_qubits, int term_weight);

struct RandomizedIsolationParams {
  int num_layers = 1;           // m
  uint64_t seed = 0;
  int target_term = 0;
};

struct SampleStats {
  uint64_t accepted = 0;
  uint64_t rejected = 0;
  double acceptance_rate() const {
    uint64_t total = accepted + rejected;
    return total ? static_cast<double>(accepted) / static_cast<double>(total) : 0.0;
  }
};

/// Uniform Pauli-product layer conditioned, by rejection, on commuting with
/// the target string. Acceptance probability is 1/2 per draw.
CliffordLayer sample_commuting_layer(const PhasedPauli& target, std::mt19937_64& rng,
                                     SampleStats* stats = nullptr);

struct RandomizedIsolationResult {
  Schedule schedule;
  Hamiltonian result;
  bool success = false;
  SampleStats stats;
};

/// m sampled commuting layers applied symbolically; success iff the result is
/// exactly 2^m times the target term. Over random seeds the failure
/// probability is bounded by N / 2^m, N the number of other terms.
RandomizedIsolationResult randomized_isolation(const Hamiltonian& h,
                                               const RandomizedIsolationParams& params);

}  // namespace dynsim
