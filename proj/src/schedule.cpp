#include "dynsim/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace dynsim {

void Schedule::push_layer(CliffordLayer layer) {
  if (!layer.is_pauli_only()) {
    throw std::invalid_argument("schedule layers must be Pauli conjugations");
  }
  if (!layers.empty() && layer.num_qubits() != num_qubits()) {
    throw std::invalid_argument("layer qubit count mismatch");
  }
  layers.push_back(std::move(layer));
}

namespace {

Hamiltonian conjugate_all(const Hamiltonian& h, const CliffordLayer& layer) {
  std::vector<Term> terms;
  terms.reserve(h.size());
  for (const auto& t : h.terms()) terms.push_back(conjugate(t, layer));
  return Hamiltonian(h.num_qubits(), std::move(terms));
}

}  // namespace

Hamiltonian apply_schedule_symbolic(const Hamiltonian& h, const Schedule& s) {
  if (h.num_qubits() != s.num_qubits()) {
    throw std::invalid_argument("apply_schedule_symbolic: qubit-count mismatch");
  }
  Hamiltonian cur = conjugate_all(h, s.basis_change);
  for (const auto& layer : s.layers) {
    cur = conjugate_all(cur, layer) + cur;
  }
  return cur;
}

double deterministic_isolation_scale(int num_qubits, int term_weight) {
  int exponent = 2 * num_qubits - term_weight + term_weight * (term_weight - 1) / 2;
  return std::ldexp(1.0, exponent);
}

Schedule deterministic_isolation_schedule(const Hamiltonian& h, int term_index) {
  if (term_index < 0 || term_index >= static_cast<int>(h.size())) {
    throw std::out_of_range("term index out of range");
  }
  const Term& target = h.term(term_index);
  const int n = h.num_qubits();
  const Support support = target.pauli.support();

  Schedule s;
  s.basis_change = CliffordLayer(n);
  for (int q : support) {
    s.basis_change.at(q) =
        SingleQubitClifford::axis_map(axis_of(target.pauli.letter(q)), Axis::Z);
  }
  // The layers never change the all-Z-form target's sign, so a negative
  // coefficient after the basis change is repaired here: composing an
  // X-conjugation onto one support qubit flips Z there.
  Term image = conjugate(target, s.basis_change);
  if (image.coefficient < 0) {
    int q = support.front();
    s.basis_change.at(q) = SingleQubitClifford::compose(
        SingleQubitClifford::pauli_conj(PauliLetter::X), s.basis_change.at(q));
  }

  for (int q = 0; q < n; ++q) {
    CliffordLayer layer(n);
    layer.at(q) = SingleQubitClifford::pauli_conj(PauliLetter::Z);
    s.push_layer(std::move(layer));
  }
  for (int q = 0; q < n; ++q) {
    if (target.pauli.letter(q) != PauliLetter::I) continue;
    CliffordLayer layer(n);
    layer.at(q) = SingleQubitClifford::pauli_conj(PauliLetter::X);
    s.push_layer(std::move(layer));
  }
  for (size_t i = 0; i < support.size(); ++i) {
    for (size_t j = i + 1; j < support.size(); ++j) {
      CliffordLayer layer(n);
      layer.at(support[i]) = SingleQubitClifford::pauli_conj(PauliLetter::X);
      layer.at(support[j]) = SingleQubitClifford::pauli_conj(PauliLetter::X);
      s.push_layer(std::move(layer));
    }
  }
  return s;
}

CliffordLayer sample_commuting_layer(const PhasedPauli& target, std::mt19937_64& rng,
                                     SampleStats* stats) {
  const int n = target.num_qubits();
  std::uniform_int_distribution<int> dist(0, 3);
  while (true) {
    PhasedPauli p(n);
    for (int q = 0; q < n; ++q) p.set_letter(q, static_cast<PauliLetter>(dist(rng)));
    if (PhasedPauli::commutes(p, target)) {
      if (stats) ++stats->accepted;
      return CliffordLayer::from_pauli_string(p);
    }
    if (stats) ++stats->rejected;
  }
}

RandomizedIsolationResult randomized_isolation(const Hamiltonian& h,
                                               const RandomizedIsolationParams& params) {
  if (params.target_term < 0 || params.target_term >= static_cast<int>(h.size())) {
    throw std::out_of_range("target term index out of range");
  }
  if (params.num_layers < 1) throw std::invalid_argument("need at least one layer");

  const Term& target = h.term(params.target_term);
  std::mt19937_64 rng(params.seed);

  RandomizedIsolationResult out;
  out.schedule.basis_change = CliffordLayer(h.num_qubits());
  for (int i = 0; i < params.num_layers; ++i) {
    out.schedule.push_layer(sample_commuting_layer(target.pauli, rng, &out.stats));
  }
  out.result = apply_schedule_symbolic(h, out.schedule);

  double expected = std::ldexp(target.coefficient, params.num_layers);
  out.success = out.result.size() == 1 &&
                out.result.term(0).pauli.same_string(target.pauli) &&
                out.result.term(0).coefficient == expected;
  return out;
}

}  // namespace dynsim
