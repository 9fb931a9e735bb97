#include "dynsim/verifier.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace dynsim {

namespace {

using complexd = std::complex<double>;
constexpr complexd kI{0.0, 1.0};

Eigen::Matrix2cd pauli_matrix(PauliLetter p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case PauliLetter::I: m << 1, 0, 0, 1; break;
    case PauliLetter::X: m << 0, 1, 1, 0; break;
    case PauliLetter::Y: m << 0, -kI, kI, 0; break;
    case PauliLetter::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

void check_cap(int n, int cap, const char* what) {
  if (n > cap) {
    throw std::invalid_argument(std::string(what) + " capped at " + std::to_string(cap) +
                                " qubits");
  }
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
  DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// The 24 single-qubit Cliffords (mod phase), generated from H and S, keyed by
// their conjugation action.
const Eigen::Matrix2cd& clifford_table_lookup(const SingleQubitClifford& c) {
  struct Key {
    int ix, iz;
    bool operator<(const Key& o) const { return std::tie(ix, iz) < std::tie(o.ix, o.iz); }
  };
  auto key_of = [](const SingleQubitClifford& cl) {
    auto enc = [](SignedAxis s) { return static_cast<int>(s.axis) * 2 + (s.negative ? 1 : 0); };
    return Key{enc(cl.image_x), enc(cl.image_z)};
  };
  static const std::map<Key, Eigen::Matrix2cd> table = [&key_of]() {
    Eigen::Matrix2cd h, s;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    s << 1, 0, 0, kI;

    auto action_of = [](const Eigen::Matrix2cd& u) -> SingleQubitClifford {
      auto classify_image = [&u](PauliLetter p) -> SignedAxis {
        Eigen::Matrix2cd img = u * pauli_matrix(p) * u.adjoint();
        for (PauliLetter cand : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
          Eigen::Matrix2cd m = pauli_matrix(cand);
          if ((img - m).cwiseAbs().maxCoeff() < 1e-9) return {axis_of(cand), false};
          if ((img + m).cwiseAbs().maxCoeff() < 1e-9) return {axis_of(cand), true};
        }
        throw std::logic_error("matrix is not a Clifford");
      };
      return SingleQubitClifford{classify_image(PauliLetter::X), classify_image(PauliLetter::Z)};
    };

    std::map<Key, Eigen::Matrix2cd> out;
    std::vector<Eigen::Matrix2cd> frontier = {Eigen::Matrix2cd::Identity()};
    auto key_local = key_of;
    out[key_local(action_of(frontier[0]))] = frontier[0];
    while (!frontier.empty()) {
      std::vector<Eigen::Matrix2cd> next;
      for (const auto& u : frontier) {
        for (const auto& g : {h, s}) {
          Eigen::Matrix2cd v = g * u;
          Key k = key_local(action_of(v));
          if (!out.count(k)) {
            out[k] = v;
            next.push_back(v);
          }
        }
      }
      frontier = std::move(next);
    }
    if (out.size() != 24) throw std::logic_error("Clifford table generation failed");
    return out;
  }();
  auto it = table.find(key_of(c));
  if (it == table.end()) throw std::invalid_argument("invalid single-qubit Clifford");
  return it->second;
}

}  // namespace

DenseOperator to_matrix(const PhasedPauli& p) {
  check_cap(p.num_qubits(), 8, "to_matrix");
  DenseOperator m = DenseOperator::Identity(1, 1);
  for (int q = 0; q < p.num_qubits(); ++q) m = kron(m, pauli_matrix(p.letter(q)));
  complexd phase = std::pow(kI, p.phase_exp());
  return phase * m;
}

DenseOperator to_matrix(const Hamiltonian& h) {
  check_cap(h.num_qubits(), 8, "to_matrix");
  Eigen::Index dim = Eigen::Index{1} << h.num_qubits();
  DenseOperator m = DenseOperator::Zero(dim, dim);
  for (const auto& t : h.terms()) m += t.coefficient * to_matrix(t.pauli);
  return m;
}

Eigen::Matrix2cd clifford_matrix(const SingleQubitClifford& c) {
  return clifford_table_lookup(c);
}

DenseOperator layer_matrix(const CliffordLayer& layer) {
  check_cap(layer.num_qubits(), 8, "layer_matrix");
  DenseOperator m = DenseOperator::Identity(1, 1);
  for (int q = 0; q < layer.num_qubits(); ++q) {
    m = kron(m, DenseOperator(clifford_matrix(layer.at(q))));
  }
  return m;
}

DenseOperator evolve(const DenseOperator& hermitian, double t) {
  if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("evolve requires a Hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(hermitian);
  Eigen::VectorXcd phases =
      (-kI * t * es.eigenvalues().cast<complexd>().array()).exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

void compile_node(const DerivationPtr& node, double tau, const TrotterParams& params,
                  std::vector<CompiledStep>& out) {
  if (tau == 0.0) return;
  switch (node->kind) {
    case DerivationNode::Kind::Given:
    case DerivationNode::Kind::LocalPauli: {
      CompiledStep s;
      s.kind = CompiledStep::Kind::Evolve;
      s.hamiltonian = node->effective;
      s.duration = tau;
      out.push_back(std::move(s));
      return;
    }
    case DerivationNode::Kind::Conjugate: {
      // U e^{-iJt} U† applied chronologically: U† first.
      CompiledStep pre;
      pre.kind = CompiledStep::Kind::Layer;
      pre.layer = node->layer;
      pre.adjoint = true;
      out.push_back(pre);
      compile_node(node->children[0], tau, params, out);
      pre.adjoint = false;
      out.push_back(pre);
      return;
    }
    case DerivationNode::Kind::Commutator: {
      const DerivationPtr& first = tau > 0 ? node->children[0] : node->children[1];
      const DerivationPtr& second = tau > 0 ? node->children[1] : node->children[0];
      double mag = std::abs(tau);
      long cycles = static_cast<long>(std::ceil(mag / (params.comm * params.comm)));
      cycles = std::max(cycles, 1l);
      double delta = std::sqrt(mag / static_cast<double>(cycles));
      for (long i = 0; i < cycles; ++i) {
        // e^{-iJ1 d} e^{iJ2 d} e^{iJ1 d} e^{-iJ2 d}, rightmost applied first.
        compile_node(second, delta, params, out);
        compile_node(first, -delta, params, out);
        compile_node(second, -delta, params, out);
        compile_node(first, delta, params, out);
      }
      return;
    }
    case DerivationNode::Kind::Combine: {
      long slices = static_cast<long>(std::ceil(std::abs(tau) / params.step));
      slices = std::max(slices, 1l);
      double width = tau / static_cast<double>(slices);
      for (long i = 0; i < slices; ++i) {
        for (size_t c = 0; c < node->children.size(); ++c) {
          compile_node(node->children[c], node->weights[c] * width, params, out);
        }
      }
      return;
    }
    case DerivationNode::Kind::Rescale:
      compile_node(node->children[0], node->factor * tau, params, out);
      return;
    case DerivationNode::Kind::Isolate: {
      // H_result = sum_b U_b V H0 V† U_b†; first-order Trotter over the 2^m
      // conjugated segments.
      const Schedule& sched = node->schedule;
      std::vector<PhasedPauli> patterns = {PhasedPauli(sched.num_qubits())};
      for (const auto& layer : sched.layers) {
        PhasedPauli mask = PhasedPauli::from_string(layer.pauli_letters());
        size_t before = patterns.size();
        for (size_t i = 0; i < before; ++i) {
          patterns.push_back(PhasedPauli::mul(patterns[i], mask).unsigned_string());
        }
      }
      long slices = static_cast<long>(std::ceil(std::abs(tau) / params.step));
      slices = std::max(slices, 1l);
      double width = tau / static_cast<double>(slices);
      for (long i = 0; i < slices; ++i) {
        for (const auto& mask : patterns) {
          CliffordLayer combined = CliffordLayer::compose(
              CliffordLayer::from_pauli_string(mask), sched.basis_change);
          CompiledStep pre;
          pre.kind = CompiledStep::Kind::Layer;
          pre.layer = combined;
          pre.adjoint = true;
          out.push_back(pre);
          compile_node(node->children[0], width, params, out);
          pre.adjoint = false;
          out.push_back(pre);
        }
      }
      return;
    }
  }
  throw std::logic_error("bad node kind");
}

}  // namespace

std::vector<CompiledStep> compile(const DerivationPtr& tree, double t,
                                  const TrotterParams& params) {
  if (!(params.step > 0) || !(params.comm > 0)) {
    throw std::invalid_argument("Trotter parameters must be positive");
  }
  check_cap(tree->effective.num_qubits(), 6, "compile");
  std::vector<CompiledStep> out;
  compile_node(tree, t, params, out);
  return out;
}

DenseOperator step_matrix(const CompiledStep& step) {
  if (step.kind == CompiledStep::Kind::Layer) {
    DenseOperator m = layer_matrix(step.layer);
    return step.adjoint ? DenseOperator(m.adjoint()) : m;
  }
  return evolve(to_matrix(step.hamiltonian), step.duration);
}

DenseOperator compiled_product(const std::vector<CompiledStep>& steps, int num_qubits) {
  Eigen::Index dim = Eigen::Index{1} << num_qubits;
  DenseOperator u = DenseOperator::Identity(dim, dim);

  auto duration_bits = [](double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    return std::to_string(bits);
  };
  std::unordered_map<std::string, DenseOperator> cache;
  for (const auto& s : steps) {
    std::string key;
    if (s.kind == CompiledStep::Kind::Layer) {
      key = "L";
      for (int q = 0; q < s.layer.num_qubits(); ++q) {
        key += s.layer.at(q).image_x.to_string();
        key += s.layer.at(q).image_z.to_string();
      }
      key += s.adjoint ? "+" : "-";
    } else {
      key = "E" + s.hamiltonian.serialize() + duration_bits(s.duration);
    }
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, step_matrix(s)).first;
    u = it->second * u;
  }
  return u;
}

double phase_aligned_distance(const DenseOperator& a, const DenseOperator& b) {
  complexd tr = (b.adjoint() * a).trace();
  complexd phase = std::abs(tr) > 1e-14 ? tr / std::abs(tr) : complexd{1.0, 0.0};
  DenseOperator diff = a - phase * b;
  Eigen::JacobiSVD<DenseOperator> svd(diff);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double verify(const DerivationPtr& tree, double t, const TrotterParams& params) {
  auto steps = compile(tree, t, params);
  int n = tree->effective.num_qubits();
  DenseOperator compiled = compiled_product(steps, n);
  DenseOperator target = evolve(to_matrix(tree->effective), t);
  if ((compiled * compiled.adjoint() - DenseOperator::Identity(compiled.rows(), compiled.cols()))
          .cwiseAbs()
          .maxCoeff() > 1e-10) {
    throw std::runtime_error("compiled product lost unitarity");
  }
  return phase_aligned_distance(compiled, target);
}

std::vector<std::pair<double, double>> verify_ladder(const DerivationPtr& tree, double t,
                                                     const TrotterParams& params, int levels) {
  std::vector<std::pair<double, double>> out;
  TrotterParams p = params;
  for (int i = 0; i < levels; ++i) {
    out.emplace_back(p.step, verify(tree, t, p));
    p.step /= 2;
    p.comm /= 2;
  }
  return out;
}

LieEmbeddingReport check_lie_embedding(int n, double tol) {
  if (n < 2 || n > 4) throw std::invalid_argument("check_lie_embedding needs 2 <= n <= 4");

  const Eigen::Index dim = Eigen::Index{1} << n;
  PhasedPauli all_y(n);
  for (int q = 0; q < n; ++q) all_y.set_letter(q, PauliLetter::Y);
  DenseOperator y_all = to_matrix(all_y);

  DenseOperator u;
  DenseOperator j;
  if (n % 2 == 0) {
    u = (DenseOperator::Identity(dim, dim) - kI * y_all) / std::sqrt(2.0);
  } else {
    PhasedPauli inner_y(n - 1);
    for (int q = 0; q < n - 1; ++q) inner_y.set_letter(q, PauliLetter::Y);
    DenseOperator inner = to_matrix(inner_y);
    Eigen::Index half = dim / 2;
    DenseOperator u_inner =
        (DenseOperator::Identity(half, half) - kI * inner) / std::sqrt(2.0);
    u = kron(DenseOperator::Identity(2, 2), u_inner);
    j = to_matrix(PhasedPauli::single(n, 0, PauliLetter::Y));
  }

  LieEmbeddingReport report;
  report.n = n;
  report.min_even_violation = 1e300;

  PhasedPauli p(n);
  std::vector<int> digits(n, 0);
  while (true) {
    for (int q = 0; q < n; ++q) p.set_letter(q, static_cast<PauliLetter>(digits[q]));
    if (!p.is_identity_string()) {
      PhasedPauli a_sym = p;
      a_sym.set_phase_exp(1);   // A = i * sigma
      DenseOperator a = to_matrix(a_sym);
      double fa_residual = (y_all * a.transpose() * y_all + a).cwiseAbs().maxCoeff();
      DenseOperator b = u.adjoint() * a * u;
      double anti_hermitian = (b.adjoint() + b).cwiseAbs().maxCoeff();
      double defining;
      if (n % 2 == 0) {
        defining = (b.transpose() + b).cwiseAbs().maxCoeff();
      } else {
        defining = (j.adjoint() * b.transpose() * j + b).cwiseAbs().maxCoeff();
      }
      if (p.weight() % 2 == 1) {
        ++report.odd_checked;
        report.max_residual =
            std::max({report.max_residual, fa_residual, anti_hermitian, defining});
      } else {
        ++report.even_checked;
        report.min_even_violation = std::min(report.min_even_violation, defining);
      }
    }
    int q = 0;
    while (q < n && ++digits[q] == 4) digits[q++] = 0;
    if (q == n) break;
  }
  report.all_odd_pass = report.max_residual <= tol;
  return report;
}

double average_gate_fidelity(const DenseOperator& target, const DenseOperator& actual) {
  double d = static_cast<double>(target.rows());
  complexd tr = (target.adjoint() * actual).trace();
  return (std::norm(tr) + d) / (d * d + d);
}

}  // namespace dynsim
