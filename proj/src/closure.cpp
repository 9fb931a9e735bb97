#include "dynsim/closure.hpp"

#include <algorithm>

namespace dynsim {

std::optional<int> ClosureResult::index_of(const PhasedPauli& string) const {
  auto it = index_.find(string.unsigned_string());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::map<int, size_t> ClosureResult::weight_histogram() const {
  std::map<int, size_t> hist;
  for (const auto& e : elements_) ++hist[e.string.weight()];
  return hist;
}

bool ClosureResult::all_odd() const {
  return std::all_of(elements_.begin(), elements_.end(),
                     [](const Element& e) { return e.string.weight() % 2 == 1; });
}

ClosureResult close_over(std::vector<Generator> generators, int num_qubits) {
  if (num_qubits <= 0) throw std::invalid_argument("num_qubits must be positive");
  if (num_qubits > 14) {
    throw std::invalid_argument("closure capped at 14 qubits (4^n growth)");
  }

  ClosureResult result;
  result.num_qubits_ = num_qubits;
  result.generators_ = std::move(generators);

  // Seed with the distinct generator strings, in lexicographic order.
  std::vector<int> gen_order(result.generators_.size());
  for (size_t i = 0; i < gen_order.size(); ++i) gen_order[i] = static_cast<int>(i);
  std::sort(gen_order.begin(), gen_order.end(), [&](int a, int b) {
    return PhasedPauli::string_less(result.generators_[a].string,
                                    result.generators_[b].string);
  });
  for (int gi : gen_order) {
    const Generator& g = result.generators_[gi];
    if (g.string.num_qubits() != num_qubits) {
      throw std::invalid_argument("generator qubit count mismatch");
    }
    if (g.string.is_identity_string()) {
      throw std::invalid_argument("identity string cannot generate");
    }
    PhasedPauli s = g.string.unsigned_string();
    if (result.index_.count(s)) continue;
    ClosureResult::Element e;
    e.string = s;
    e.is_generator = true;
    e.generator_index = gi;
    result.index_.emplace(s, static_cast<int>(result.elements_.size()));
    result.elements_.push_back(std::move(e));
  }
  if (result.elements_.empty()) throw std::invalid_argument("no generators");

  // Breadth-first rounds: frontier x everything known at round start. Pairs
  // inside older levels were already handled when the younger one was
  // frontier, so no pair is missed.
  size_t round_begin = 0;
  int level = 0;
  while (round_begin < result.elements_.size()) {
    size_t round_end = result.elements_.size();
    ++level;
    for (size_t fi = round_begin; fi < round_end; ++fi) {
      for (size_t bi = 0; bi < round_end; ++bi) {
        const PhasedPauli& a = result.elements_[fi].string;
        const PhasedPauli& b = result.elements_[bi].string;
        if (PhasedPauli::commutes(a, b)) continue;
        PhasedPauli c = PhasedPauli::mul(a, b).unsigned_string();
        if (result.index_.count(c)) continue;
        ClosureResult::Element e;
        e.string = c;
        e.parent_a = static_cast<int>(fi);
        e.parent_b = static_cast<int>(bi);
        e.level = level;
        result.index_.emplace(c, static_cast<int>(result.elements_.size()));
        result.elements_.push_back(std::move(e));
      }
    }
    // Keep the next frontier in lexicographic order for determinism.
    std::sort(result.elements_.begin() + round_end, result.elements_.end(),
              [](const ClosureResult::Element& x, const ClosureResult::Element& y) {
                return PhasedPauli::string_less(x.string, y.string);
              });
    for (size_t i = round_end; i < result.elements_.size(); ++i) {
      result.index_[result.elements_[i].string] = static_cast<int>(i);
    }
    round_begin = round_end;
  }
  return result;
}

ClosureResult close(const Hamiltonian& h, bool include_local_unitaries) {
  std::vector<Generator> gens;
  for (size_t i = 0; i < h.size(); ++i) {
    gens.push_back(Generator{h.term(i).pauli.unsigned_string(),
                             Generator::Source::HamiltonianTerm, static_cast<int>(i)});
  }
  if (include_local_unitaries) {
    for (int q = 0; q < h.num_qubits(); ++q) {
      for (PauliLetter p : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
        gens.push_back(Generator{PhasedPauli::single(h.num_qubits(), q, p),
                                 Generator::Source::Local, -1});
      }
    }
  }
  return close_over(std::move(gens), h.num_qubits());
}

uint64_t algebra_dimension(int n, AlgebraClass cls) {
  if (n < 1 || n > 31) throw std::invalid_argument("algebra_dimension: bad n");
  uint64_t four = uint64_t{1} << (2 * n);
  uint64_t two = uint64_t{1} << n;
  if (cls == AlgebraClass::Universal) return four - 1;
  return (n % 2 == 0) ? (four - two) / 2 : (four + two) / 2;
}

DerivationPtr extract_derivation(const ClosureResult& c, const PhasedPauli& target,
                                 const GeneratorFactory& factory) {
  auto idx = c.index_of(target);
  if (!idx) throw std::invalid_argument("target string is not in the closure");

  std::unordered_map<int, DerivationPtr> memo;
  std::function<DerivationPtr(int)> build = [&](int i) -> DerivationPtr {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    const auto& e = c.elements()[i];
    DerivationPtr node;
    if (e.is_generator) {
      node = factory(c.generators()[e.generator_index]);
      if (!node->effective.size() ||
          !node->effective.term(0).pauli.same_string(e.string) ||
          node->effective.size() != 1) {
        throw std::logic_error("generator factory produced a mismatched subtree");
      }
    } else {
      node = make_commutator(build(e.parent_a), build(e.parent_b));
    }
    memo[i] = node;
    return node;
  };
  return build(*idx);
}

DerivationPtr extract_derivation(const ClosureResult& c, const Hamiltonian& h,
                                 const PhasedPauli& target) {
  return extract_derivation(c, target, [&h](const Generator& g) -> DerivationPtr {
    switch (g.source) {
      case Generator::Source::HamiltonianTerm:
        return make_given(h.term(g.index), g.index);
      case Generator::Source::Local:
        return make_local(g.string);
      case Generator::Source::Coupling:
        break;
    }
    throw std::logic_error("coupling generators need a synthesis factory");
  });
}

}  // namespace dynsim
