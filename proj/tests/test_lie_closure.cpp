#include <doctest.h>

#include <set>

#include "dynsim/closure.hpp"
#include "test_util.hpp"

using namespace dynsim;

namespace {

PhasedPauli P(const char* s) { return PhasedPauli::from_string(s); }

std::set<std::string> element_strings(const ClosureResult& c) {
  std::set<std::string> out;
  for (const auto& e : c.elements()) out.insert(e.string.to_string());
  return out;
}

std::set<std::string> string_set(const std::vector<PhasedPauli>& v) {
  std::set<std::string> out;
  for (const auto& p : v) out.insert(p.to_string());
  return out;
}

}  // namespace

TEST_CASE("closure of XXX with locals is exactly the odd strings") {
  auto h = parse_hamiltonian("1 XXX\n").hamiltonian;
  ClosureResult c = close(h, true);
  CHECK(c.dimension() == 36);
  CHECK(c.all_odd());
  CHECK(element_strings(c) == string_set(testutil::odd_strings(3)));
}

TEST_CASE("closure of XXI+IXX with locals reaches everything") {
  auto h = parse_hamiltonian("1 XXI\n1 IXX\n").hamiltonian;
  ClosureResult c = close(h, true);
  CHECK(c.dimension() == 63);
  auto hist = c.weight_histogram();
  CHECK(hist[1] == 9);
  CHECK(hist[2] == 27);
  CHECK(hist[3] == 27);
}

TEST_CASE("locals alone stay weight one") {
  std::vector<Generator> gens;
  for (int q = 0; q < 2; ++q) {
    for (PauliLetter p : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
      gens.push_back(Generator{PhasedPauli::single(2, q, p), Generator::Source::Local, -1});
    }
  }
  ClosureResult c = close_over(std::move(gens), 2);
  CHECK(c.dimension() == 6);
  CHECK(element_strings(c) == string_set(testutil::odd_strings(2)));
}

TEST_CASE("algebra dimensions match the counting oracle") {
  CHECK(algebra_dimension(2, AlgebraClass::Odd) == 6);
  CHECK(algebra_dimension(3, AlgebraClass::Odd) == 36);
  CHECK(algebra_dimension(4, AlgebraClass::Odd) == 120);
  CHECK(algebra_dimension(5, AlgebraClass::Odd) == 528);
  CHECK(algebra_dimension(3, AlgebraClass::Universal) == 63);
  for (int n = 1; n <= 6; ++n) {
    CHECK(algebra_dimension(n, AlgebraClass::Odd) == testutil::odd_strings(n).size());
    CHECK(algebra_dimension(n, AlgebraClass::Universal) == testutil::all_strings(n).size() - 1);
  }
}

TEST_CASE("closure is commutator-closed with acyclic provenance") {
  auto h = parse_hamiltonian("1 XXX\n").hamiltonian;
  ClosureResult c = close(h, true);
  for (size_t i = 0; i < c.elements().size(); ++i) {
    const auto& e = c.elements()[i];
    if (e.is_generator) {
      CHECK(e.generator_index >= 0);
    } else {
      CHECK(e.parent_a < static_cast<int>(i));
      CHECK(e.parent_b < static_cast<int>(i));
      auto prod = PhasedPauli::mul(c.elements()[e.parent_a].string,
                                   c.elements()[e.parent_b].string);
      CHECK(prod.unsigned_string().same_string(e.string));
    }
  }
  // closed under commutation (exhaustive over the 36-element set)
  for (const auto& a : c.elements()) {
    for (const auto& b : c.elements()) {
      if (PhasedPauli::commutes(a.string, b.string)) continue;
      PhasedPauli prod = PhasedPauli::mul(a.string, b.string).unsigned_string();
      CHECK(c.contains(prod));
    }
  }
}

TEST_CASE("closure is deterministic") {
  auto h = parse_hamiltonian("1 XXI\n1 IXX\n").hamiltonian;
  ClosureResult a = close(h, true), b = close(h, true);
  REQUIRE(a.dimension() == b.dimension());
  for (size_t i = 0; i < a.elements().size(); ++i) {
    CHECK(a.elements()[i].string.same_string(b.elements()[i].string));
    CHECK(a.elements()[i].parent_a == b.elements()[i].parent_a);
    CHECK(a.elements()[i].parent_b == b.elements()[i].parent_b);
  }
}

TEST_CASE("classification cross-check for random Hamiltonians, n <= 4") {
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 4; ++n) {
    for (int i = 0; i < 6; ++i) {
      Hamiltonian hu = testutil::random_universal(n, rng);
      CHECK(close(hu, true).dimension() == algebra_dimension(n, AlgebraClass::Universal));
      if (n >= 3) {
        Hamiltonian ho = testutil::random_odd_entangling(n, rng);
        ClosureResult c = close(ho, true);
        CHECK(element_strings(c) == string_set(testutil::odd_strings(n)));
      }
    }
  }
}

TEST_CASE("non-entangling closure splits into per-component closures") {
  auto h = parse_hamiltonian("qubits: 3\n1 XXI\n").hamiltonian;
  ClosureResult c = close(h, true);
  // components {0,1} and {2}: every element lives inside one component
  for (const auto& e : c.elements()) {
    Support s = e.string.support();
    bool left = std::all_of(s.begin(), s.end(), [](int q) { return q <= 1; });
    bool right = std::all_of(s.begin(), s.end(), [](int q) { return q == 2; });
    CHECK((left || right));
  }
  CHECK(c.dimension() == 15 + 3);   // all strings on two qubits, locals on the third
}

TEST_CASE("extract_derivation replays provenance") {
  auto h = parse_hamiltonian("1 XXX\n").hamiltonian;
  ClosureResult c = close(h, true);

  // generator target: a single leaf
  DerivationPtr leaf = extract_derivation(c, h, P("XXX"));
  CHECK(leaf->kind == DerivationNode::Kind::Given);
  CHECK(node_count(leaf) == 1);

  // every element replays to its own string with a nonzero real scale
  for (const auto& e : c.elements()) {
    DerivationPtr tree = extract_derivation(c, h, e.string);
    replay(tree);
    REQUIRE(tree->effective.size() == 1);
    CHECK(tree->effective.term(0).pauli.same_string(e.string));
    CHECK(tree->effective.term(0).coefficient != 0.0);
  }

  CHECK_THROWS(extract_derivation(c, h, P("XXI")));   // even weight, not in closure
}

TEST_CASE("odd-generator closures never contain an even string") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 10; ++i) {
    Hamiltonian h = testutil::random_odd_entangling(4, rng);
    CHECK(close(h, true).all_odd());
  }
}
