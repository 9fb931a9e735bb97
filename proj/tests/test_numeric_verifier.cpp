#include <doctest.h>

#include <algorithm>

#include "dynsim/synthesis.hpp"
#include "dynsim/verifier.hpp"
#include "test_util.hpp"

using namespace dynsim;

namespace {
PhasedPauli P(const char* s) { return PhasedPauli::from_string(s); }
constexpr std::complex<double> kI{0.0, 1.0};

double slope_fit(const std::vector<std::pair<double, double>>& points) {
  // least-squares slope of log2(err) against log2(x)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : points) {
    double lx = std::log2(x), ly = std::log2(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double m = static_cast<double>(points.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}
}  // namespace

TEST_CASE("to_matrix basics") {
  DenseOperator z = to_matrix(P("Z"));
  CHECK(std::abs(z(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(z(1, 1) + 1.0) < 1e-15);

  DenseOperator iy = to_matrix(P("+iY"));
  CHECK(std::abs(iy(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(iy(1, 0) + 1.0) < 1e-15);

  PhasedPauli big(9);
  CHECK_THROWS(to_matrix(big));
}

TEST_CASE("to_matrix agrees with the independent oracle") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 40; ++i) {
    int n = 1 + static_cast<int>(rng() % 4);
    PhasedPauli p = testutil::random_string(n, rng, 0);
    p.set_phase_exp(static_cast<int>(rng() % 4));
    DenseOperator m = to_matrix(p);
    oracle::Mat o = oracle::dense(p);
    double worst = 0;
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) worst = std::max(worst, std::abs(m(r, c) - o.at(r, c)));
    CHECK(worst < 1e-14);
  }
}

TEST_CASE("spectrum of XXI+IXX") {
  auto h = parse_hamiltonian("1 XXI\n1 IXX\n").hamiltonian;
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(to_matrix(h));
  std::vector<double> evs(es.eigenvalues().data(), es.eigenvalues().data() + 8);
  std::sort(evs.begin(), evs.end());
  std::vector<double> want = {-2, -2, 0, 0, 0, 0, 2, 2};
  for (int i = 0; i < 8; ++i) CHECK(std::abs(evs[i] - want[i]) < 1e-12);
}

TEST_CASE("evolve basics") {
  DenseOperator z = to_matrix(P("Z"));
  DenseOperator u = evolve(z, M_PI);
  CHECK((u + DenseOperator::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  DenseOperator x = to_matrix(P("X"));
  DenseOperator half = evolve(x, M_PI / 2);
  CHECK((half - (-kI) * x).cwiseAbs().maxCoeff() < 1e-12);

  CHECK((evolve(z, 0.0) - DenseOperator::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  // group property
  std::mt19937_64 rng(62);
  auto hh = parse_hamiltonian("0.7 XZ\n-0.3 YY\n1.1 ZI\n").hamiltonian;
  DenseOperator m = to_matrix(hh);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 5; ++i) {
    double s = dist(rng), t = dist(rng);
    CHECK((evolve(m, s) * evolve(m, t) - evolve(m, s + t)).cwiseAbs().maxCoeff() < 1e-9);
  }

  // unitarity
  DenseOperator u2 = evolve(m, 0.37);
  CHECK((u2 * u2.adjoint() - DenseOperator::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

  DenseOperator bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS(evolve(bad, 1.0));
}

TEST_CASE("clifford matrices realize their conjugation action") {
  std::vector<SingleQubitClifford> cases = {
      SingleQubitClifford::identity(),
      SingleQubitClifford::pauli_conj(PauliLetter::X),
      SingleQubitClifford::pauli_conj(PauliLetter::Y),
      SingleQubitClifford::pauli_conj(PauliLetter::Z),
      SingleQubitClifford::axis_map(Axis::X, Axis::Z),
      SingleQubitClifford::axis_map(Axis::Y, Axis::Z),
      SingleQubitClifford::axis_map(Axis::X, Axis::Y),
      SingleQubitClifford::axis_map(Axis::Y, Axis::X),
      SingleQubitClifford::axis_map(Axis::Z, Axis::Y),
      {{Axis::Z, true}, {Axis::X, false}},
      {{Axis::Y, true}, {Axis::Z, true}},
  };
  for (const auto& c : cases) {
    Eigen::Matrix2cd u = clifford_matrix(c);
    CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    for (PauliLetter p : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
      SignedAxis img = c.image(p);
      Eigen::Matrix2cd got = u * to_matrix(PhasedPauli::single(1, 0, p)) * u.adjoint();
      Eigen::Matrix2cd want =
          (img.negative ? -1.0 : 1.0) *
          DenseOperator(to_matrix(PhasedPauli::single(1, 0, letter_of(img.axis))));
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("symbolic conjugation agrees with dense conjugation") {
  std::mt19937_64 rng(63);
  for (int i = 0; i < 40; ++i) {
    int n = 1 + static_cast<int>(rng() % 3);
    PhasedPauli p = testutil::random_string(n, rng);
    CliffordLayer layer = testutil::random_layer(n, rng);
    DenseOperator u = layer_matrix(layer);
    DenseOperator want = u * to_matrix(p) * u.adjoint();
    DenseOperator got = to_matrix(conjugate(p, layer));
    CHECK((want - got).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("symbolic commutators agree with dense commutators, 500 pairs") {
  std::mt19937_64 rng(64);
  for (int i = 0; i < 500; ++i) {
    int n = 1 + static_cast<int>(rng() % 4);
    Term a(testutil::random_coefficient(rng), testutil::random_string(n, rng));
    Term b(testutil::random_coefficient(rng), testutil::random_string(n, rng));
    DenseOperator am = to_matrix(a.pauli) * a.coefficient;
    DenseOperator bm = to_matrix(b.pauli) * b.coefficient;
    DenseOperator want = kI * (am * bm - bm * am);
    auto c = commutator(a, b);
    DenseOperator got = c ? DenseOperator(to_matrix(c->pauli) * c->coefficient)
                          : DenseOperator(DenseOperator::Zero(am.rows(), am.cols()));
    CHECK((want - got).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("apply_schedule_symbolic agrees with dense conjugate-and-add") {
  std::mt19937_64 rng(65);
  for (int i = 0; i < 20; ++i) {
    int n = 2 + static_cast<int>(rng() % 3);
    std::vector<Term> terms;
    for (int k = 0; k < 3; ++k) {
      terms.emplace_back(testutil::random_coefficient(rng), testutil::random_string(n, rng));
    }
    Hamiltonian h(n, std::move(terms));
    if (h.empty()) continue;

    Schedule s;
    s.basis_change = testutil::random_layer(n, rng);
    for (int l = 0; l < 3; ++l) {
      s.push_layer(CliffordLayer::from_pauli_string(testutil::random_string(n, rng, 0)));
    }
    DenseOperator v = layer_matrix(s.basis_change);
    DenseOperator cur = v * to_matrix(h) * v.adjoint();
    for (const auto& layer : s.layers) {
      DenseOperator u = layer_matrix(layer);
      cur = u * cur * u.adjoint() + cur;
    }
    CHECK((cur - to_matrix(apply_schedule_symbolic(h, s))).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("compile shapes") {
  auto h = parse_hamiltonian("1 ZI\n1 IZ\n").hamiltonian;
  DerivationPtr z1 = make_given(h.term(0), 0);

  auto steps = compile(z1, 0.3, TrotterParams{});
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].kind == CompiledStep::Kind::Evolve);
  CHECK(steps[0].duration == 0.3);

  DerivationPtr sum = make_combine({make_given(h.term(0), 0), make_given(h.term(1), 1)},
                                   {1.0, 1.0});
  auto slices = compile(sum, 0.2, TrotterParams{0.01, 0.01});
  CHECK(slices.size() == 40);   // 20 slices, two evolutions each
}

TEST_CASE("commutator compilation approximates the commutator evolution") {
  // i[X, Y] = -2Z on one qubit
  Hamiltonian hx(1, {Term(1.0, P("X"))});
  Hamiltonian hy(1, {Term(1.0, P("Y"))});
  DerivationPtr tree = make_commutator(make_given(hx.term(0), 0), make_given(hy.term(0), 0));
  REQUIRE(tree->effective.size() == 1);
  CHECK(tree->effective.term(0).coefficient == -2.0);
  CHECK(tree->effective.term(0).pauli.to_string() == "Z");

  TrotterParams params{0.01, 0.01};
  auto steps = compile(tree, 0.1, params);
  CHECK(steps.size() == 4000);   // 1000 cycles of four exponentials
  DenseOperator u = compiled_product(steps, 1);
  DenseOperator target = evolve(to_matrix(tree->effective), 0.1);
  // leading error is ~2.8 * t * delta for this pair
  double err = phase_aligned_distance(u, target);
  CHECK(err < 5e-3);
  CHECK(err > 1e-4);

  CHECK(verify(tree, 0.1, params) < 5e-3);
  CHECK(verify(tree, 0.1, TrotterParams{0.002, 0.002}) < 1e-3);
}

TEST_CASE("exact nodes verify to numerical precision") {
  auto h = parse_hamiltonian("0.8 XYI\n").hamiltonian;
  CliffordLayer layer(3);
  layer.at(0) = SingleQubitClifford::axis_map(Axis::X, Axis::Z);
  layer.at(2) = SingleQubitClifford::axis_map(Axis::X, Axis::Y);
  DerivationPtr tree =
      make_rescale(make_conjugate(make_given(h.term(0), 0), layer), 2.5);
  CHECK(verify(tree, 0.7, TrotterParams{0.1, 0.1}) < 1e-9);
}

TEST_CASE("first-order combine slope is 2, cycle slope is 3") {
  // XZ and YZ anticommute, so neither approximation is exact
  auto h = parse_hamiltonian("1 XZ\n0.6 YZ\n").hamiltonian;
  DerivationPtr combined = make_combine({make_given(h.term(0), 0), make_given(h.term(1), 1)},
                                        {1.0, 1.0});
  std::vector<std::pair<double, double>> pts;
  for (double d : {0.08, 0.04, 0.02, 0.01}) {
    // one slice: local error
    pts.emplace_back(d, verify(combined, d, TrotterParams{d, d}));
  }
  double s = slope_fit(pts);
  CHECK(s > 1.6);
  CHECK(s < 2.4);

  DerivationPtr comm = make_commutator(make_given(h.term(0), 0), make_given(h.term(1), 1));
  REQUIRE(comm->effective.size() == 1);
  pts.clear();
  for (double d : {0.2, 0.1, 0.05, 0.025}) {
    // one cycle: duration d^2 with parameter d
    pts.emplace_back(d, verify(comm, d * d, TrotterParams{d, d}));
  }
  s = slope_fit(pts);
  CHECK(s > 2.5);
  CHECK(s < 3.5);
}

TEST_CASE("isolate nodes compile into conjugated segments") {
  // XXI and IYX anticommute, so the segment expansion carries Trotter error
  auto h = parse_hamiltonian("1 XXI\n1 IYX\n").hamiltonian;
  int idx = h.find_term(P("XXI"));
  Schedule s = deterministic_isolation_schedule(h, idx);
  DerivationPtr whole = make_combine({make_given(h.term(0), 0), make_given(h.term(1), 1)},
                                     {1.0, 1.0});
  DerivationPtr iso = make_isolate(whole, s);
  REQUIRE(iso->effective.size() == 1);
  CHECK(iso->effective.term(0).coefficient == 32.0);

  double t = 0.002;   // angle 0.064 after the 32x scale
  double err = verify(iso, t, TrotterParams{0.0005, 0.0005});
  CHECK(err < 5e-2);
  double err2 = verify(iso, t, TrotterParams{0.00025, 0.00025});
  CHECK(err2 < err);
}

TEST_CASE("ladder errors decrease") {
  auto h = parse_hamiltonian("1 XZ\n0.6 YZ\n").hamiltonian;
  DerivationPtr tree = make_combine({make_given(h.term(0), 0), make_given(h.term(1), 1)},
                                    {1.0, 0.5});
  auto ladder = verify_ladder(tree, 0.5, TrotterParams{0.05, 0.05}, 4);
  REQUIRE(ladder.size() == 4);
  for (size_t i = 1; i < ladder.size(); ++i) {
    CHECK(ladder[i].second < ladder[i - 1].second * 1.1);
  }
}

TEST_CASE("lie embedding checks") {
  auto r2 = check_lie_embedding(2);
  CHECK(r2.odd_checked == 6);
  CHECK(r2.all_odd_pass);
  CHECK(r2.max_residual <= 1e-12);
  CHECK(r2.even_checked == 9);   // 15 non-identity strings, 6 odd
  CHECK(r2.min_even_violation > 0.5);

  auto r3 = check_lie_embedding(3);
  CHECK(r3.odd_checked == 36);
  CHECK(r3.all_odd_pass);

  CHECK_THROWS(check_lie_embedding(1));
  CHECK_THROWS(check_lie_embedding(5));
}

TEST_CASE("average gate fidelity") {
  DenseOperator u = evolve(to_matrix(P("ZZ")), 0.3);
  CHECK(average_gate_fidelity(u, u) == doctest::Approx(1.0).epsilon(1e-12));
  DenseOperator v = evolve(to_matrix(P("ZZ")), 0.31);
  CHECK(average_gate_fidelity(u, v) < 1.0);
  CHECK(average_gate_fidelity(u, v) > 0.99);
}
