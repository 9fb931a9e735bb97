#include <doctest.h>

#include <set>

#include "dynsim/schedule.hpp"
#include "test_util.hpp"

using namespace dynsim;

namespace {
PhasedPauli P(const char* s) { return PhasedPauli::from_string(s); }

// Dense conjugate-and-add oracle for a schedule. The basis change is applied
// term-wise through the (separately tested) single-qubit image map; each
// Pauli layer applies the numeric identity U H U + H with U the dense mask.
oracle::Mat dense_apply(const Hamiltonian& h, const Schedule& s) {
  oracle::Mat cur(1 << h.num_qubits());
  for (const auto& t : h.terms()) {
    cur = oracle::add(cur, oracle::dense(conjugate(t, s.basis_change)));
  }
  for (const auto& layer : s.layers) {
    oracle::Mat u = oracle::dense(P(layer.pauli_letters().c_str()));
    cur = oracle::add(oracle::mul(oracle::mul(u, cur), u), cur);
  }
  return cur;
}

}  // namespace

TEST_CASE("apply_schedule_symbolic basics") {
  auto h = parse_hamiltonian("qubits: 1\n1 X\n").hamiltonian;

  Schedule empty;
  empty.basis_change = CliffordLayer(1);
  CHECK(apply_schedule_symbolic(h, empty) == h);

  Schedule z;
  z.basis_change = CliffordLayer(1);
  z.push_layer(CliffordLayer::from_pauli_letters("Z"));
  CHECK(apply_schedule_symbolic(h, z).empty());   // ZXZ = -X cancels

  auto h2 = parse_hamiltonian("qubits: 1\n1 Z\n1 X\n").hamiltonian;
  Hamiltonian doubled = apply_schedule_symbolic(h2, z);
  REQUIRE(doubled.size() == 1);
  CHECK(doubled.term(0).pauli.to_string() == "Z");
  CHECK(doubled.term(0).coefficient == 2.0);
}

TEST_CASE("schedules reject non-Pauli layers") {
  Schedule s;
  s.basis_change = CliffordLayer(2);
  CliffordLayer hadamards(
      {SingleQubitClifford::axis_map(Axis::X, Axis::Z), SingleQubitClifford::identity()});
  CHECK_THROWS(s.push_layer(hadamards));
}

TEST_CASE("deterministic isolation of XXI in XXI+IXX") {
  auto h = parse_hamiltonian("1 XXI\n1 IXX\n").hamiltonian;
  int idx = h.find_term(P("XXI"));
  REQUIRE(idx >= 0);
  Schedule s = deterministic_isolation_schedule(h, idx);
  CHECK(s.layers.size() == 5);   // 3 + 1 + 1
  CHECK(s.segments() == 32);

  Hamiltonian out = apply_schedule_symbolic(h, s);
  REQUIRE(out.size() == 1);
  CHECK(out.term(0).pauli.to_string() == "ZZI");
  CHECK(out.term(0).coefficient == 32.0);
  CHECK(deterministic_isolation_scale(3, 2) == 32.0);

  // dense cross-check
  oracle::Mat want = dense_apply(h, s);
  CHECK(oracle::max_abs_diff(want, oracle::dense(out)) < 1e-9);
}

TEST_CASE("deterministic isolation of a full-support term") {
  auto h = parse_hamiltonian("1 XYZ\n").hamiltonian;
  Schedule s = deterministic_isolation_schedule(h, 0);
  CHECK(s.layers.size() == 6);   // 3 + 0 + 3
  Hamiltonian out = apply_schedule_symbolic(h, s);
  REQUIRE(out.size() == 1);
  CHECK(out.term(0).pauli.to_string() == "ZZZ");
  CHECK(out.term(0).coefficient == 64.0);
}

TEST_CASE("deterministic isolation repairs negative coefficients") {
  auto h = parse_hamiltonian("-0.75 XYI\n2 IYX\n").hamiltonian;
  int idx = h.find_term(P("XYI"));
  Schedule s = deterministic_isolation_schedule(h, idx);
  Hamiltonian out = apply_schedule_symbolic(h, s);
  REQUIRE(out.size() == 1);
  CHECK(out.term(0).coefficient == 0.75 * 32.0);
  CHECK(out.term(0).pauli.to_string() == "ZZI");
}

TEST_CASE("deterministic isolation on random Hamiltonians is exact") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    int n = 2 + static_cast<int>(rng() % 5);   // up to 6
    std::vector<Term> terms;
    int count = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < count; ++k) {
      terms.emplace_back(testutil::random_coefficient(rng), testutil::random_string(n, rng));
    }
    Hamiltonian h(n, std::move(terms));
    if (h.empty()) continue;
    int idx = static_cast<int>(rng() % h.size());
    int k = h.term(idx).pauli.weight();

    Schedule s = deterministic_isolation_schedule(h, idx);
    CHECK(static_cast<int>(s.layers.size()) == 2 * n - k + k * (k - 1) / 2);

    Hamiltonian out = apply_schedule_symbolic(h, s);
    REQUIRE(out.size() == 1);
    CHECK(out.term(0).coefficient ==
          deterministic_isolation_scale(n, k) * std::abs(h.term(idx).coefficient));
    // all-Z image on the original support
    CHECK(out.term(0).pauli.support() == h.term(idx).pauli.support());
    for (int q : out.term(0).pauli.support()) {
      CHECK(out.term(0).pauli.letter(q) == PauliLetter::Z);
    }
  }
}

TEST_CASE("sample_commuting_layer: n=1 target Z") {
  std::mt19937_64 rng(42);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    CliffordLayer l = sample_commuting_layer(P("Z"), rng);
    seen.insert(l.pauli_letters());
  }
  CHECK(seen == std::set<std::string>{"I", "Z"});
}

TEST_CASE("sample_commuting_layer: n=2 target ZZ has 8 acceptable layers") {
  // exhaustive: 8 of the 16 layers commute with ZZ
  int commuting = 0;
  for (const auto& p : testutil::all_strings(2)) {
    if (PhasedPauli::commutes(p, P("ZZ"))) ++commuting;
  }
  CHECK(commuting == 8);

  std::mt19937_64 rng(43);
  std::set<std::string> seen;
  for (int i = 0; i < 500; ++i) {
    seen.insert(sample_commuting_layer(P("ZZ"), rng).pauli_letters());
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("sample acceptance rate is one half") {
  std::mt19937_64 rng(44);
  SampleStats stats;
  PhasedPauli target = P("XXIZY");
  for (int i = 0; i < 10000; ++i) sample_commuting_layer(target, rng, &stats);
  CHECK(stats.accepted == 10000);
  double rate = stats.acceptance_rate();
  CHECK(rate > 0.48);
  CHECK(rate < 0.52);
}

TEST_CASE("randomized isolation invariants") {
  auto h = chain_family(8);
  RandomizedIsolationParams params;
  params.num_layers = 10;
  params.seed = 7;
  params.target_term = 3;
  auto r = randomized_isolation(h, params);

  const Term& target = h.term(3);
  // target always survives with coefficient 2^m
  int idx = r.result.find_term(target.pauli);
  REQUIRE(idx >= 0);
  CHECK(r.result.term(idx).coefficient == target.coefficient * 1024.0);
  // every layer commutes with the target; every surviving term commutes with
  // every layer
  for (const auto& layer : r.schedule.layers) {
    PhasedPauli mask = P(layer.pauli_letters().c_str());
    CHECK(PhasedPauli::commutes(mask, target.pauli));
    for (const auto& t : r.result.terms()) {
      CHECK(PhasedPauli::commutes(mask, t.pauli));
    }
  }
  CHECK(r.success == (r.result.size() == 1));

  // determinism: same seed, same schedule
  auto r2 = randomized_isolation(h, params);
  REQUIRE(r2.schedule.layers.size() == r.schedule.layers.size());
  for (size_t i = 0; i < r.schedule.layers.size(); ++i) {
    CHECK(r2.schedule.layers[i].pauli_letters() == r.schedule.layers[i].pauli_letters());
  }
}

TEST_CASE("randomized isolation succeeds with enough layers") {
  auto h = parse_hamiltonian("1 XXI\n1 IXX\n1 ZZZ\n").hamiltonian;
  int successes = 0;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RandomizedIsolationParams params;
    params.num_layers = 14;
    params.seed = seed;
    params.target_term = 0;
    auto r = randomized_isolation(h, params);
    if (r.success) {
      ++successes;
      CHECK(r.result.term(0).coefficient == std::ldexp(1.0, 14));
    }
  }
  // failure bound: 2 / 2^14 per trial; 50 trials essentially never all fail
  CHECK(successes >= 48);
}
