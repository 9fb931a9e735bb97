#include "dynsim/derivation.hpp"

#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "dynsim/serialize.hpp"

namespace dynsim {

namespace {

using json = nlohmann::ordered_json;

int child_qubits(const DerivationPtr& c) { return c->effective.num_qubits(); }

}  // namespace

ordered_json layer_to_json(const CliffordLayer& layer) {
  ordered_json arr = ordered_json::array();
  for (int q = 0; q < layer.num_qubits(); ++q) {
    arr.push_back({layer.at(q).image_x.to_string(), layer.at(q).image_z.to_string()});
  }
  return arr;
}

CliffordLayer layer_from_json(const ordered_json& arr) {
  std::vector<SingleQubitClifford> entries;
  for (const auto& e : arr) {
    SingleQubitClifford c{SignedAxis::parse(e.at(0).get<std::string>()),
                          SignedAxis::parse(e.at(1).get<std::string>())};
    if (!c.valid()) throw std::runtime_error("invalid Clifford in JSON");
    entries.push_back(c);
  }
  return CliffordLayer(std::move(entries));
}

ordered_json schedule_to_json(const Schedule& s) {
  ordered_json j;
  j["basis_change"] = layer_to_json(s.basis_change);
  ordered_json layers = ordered_json::array();
  for (const auto& l : s.layers) layers.push_back(l.pauli_letters());
  j["layers"] = layers;
  j["segments"] = s.segments();
  return j;
}

Schedule schedule_from_json(const ordered_json& j) {
  Schedule s;
  s.basis_change = layer_from_json(j.at("basis_change"));
  for (const auto& l : j.at("layers")) {
    s.push_layer(CliffordLayer::from_pauli_letters(l.get<std::string>()));
  }
  return s;
}

ordered_json hamiltonian_to_json(const Hamiltonian& h) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : h.terms()) arr.push_back({t.coefficient, t.pauli.to_string()});
  return arr;
}

Hamiltonian recompute_effective(const DerivationNode& node) {
  switch (node.kind) {
    case DerivationNode::Kind::Given:
      return Hamiltonian(node.term.pauli.num_qubits(), {node.term});
    case DerivationNode::Kind::LocalPauli:
      return Hamiltonian(node.local.num_qubits(), {Term(1.0, node.local)});
    case DerivationNode::Kind::Conjugate: {
      const Hamiltonian& h = node.children.at(0)->effective;
      std::vector<Term> terms;
      terms.reserve(h.size());
      for (const auto& t : h.terms()) terms.push_back(conjugate(t, node.layer));
      return Hamiltonian(h.num_qubits(), std::move(terms));
    }
    case DerivationNode::Kind::Commutator: {
      const Hamiltonian& a = node.children.at(0)->effective;
      const Hamiltonian& b = node.children.at(1)->effective;
      std::vector<Term> terms;
      for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
          if (auto c = commutator(ta, tb)) terms.push_back(*c);
        }
      }
      return Hamiltonian(a.num_qubits(), std::move(terms));
    }
    case DerivationNode::Kind::Combine: {
      Hamiltonian sum(child_qubits(node.children.at(0)));
      for (size_t i = 0; i < node.children.size(); ++i) {
        sum = sum + node.children[i]->effective.scaled(node.weights.at(i));
      }
      return sum;
    }
    case DerivationNode::Kind::Rescale:
      return node.children.at(0)->effective.scaled(node.factor);
    case DerivationNode::Kind::Isolate:
      return apply_schedule_symbolic(node.children.at(0)->effective, node.schedule);
  }
  throw std::logic_error("bad node kind");
}

namespace {

DerivationPtr finish(std::shared_ptr<DerivationNode> n) {
  n->effective = recompute_effective(*n);
  return n;
}

}  // namespace

DerivationPtr make_given(const Term& term, int term_index) {
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::Given;
  n->term = term;
  n->term_index = term_index;
  return finish(std::move(n));
}

DerivationPtr make_local(const PhasedPauli& weight1_string) {
  if (weight1_string.weight() != 1 || weight1_string.phase_exp() != 0) {
    throw std::invalid_argument("LocalPauli leaf needs an unsigned weight-1 string");
  }
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::LocalPauli;
  n->local = weight1_string;
  return finish(std::move(n));
}

DerivationPtr make_conjugate(DerivationPtr child, CliffordLayer layer) {
  if (child_qubits(child) != layer.num_qubits()) {
    throw std::invalid_argument("conjugate node: qubit-count mismatch");
  }
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::Conjugate;
  n->children = {std::move(child)};
  n->layer = std::move(layer);
  return finish(std::move(n));
}

DerivationPtr make_commutator(DerivationPtr left, DerivationPtr right) {
  if (child_qubits(left) != child_qubits(right)) {
    throw std::invalid_argument("commutator node: qubit-count mismatch");
  }
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::Commutator;
  n->children = {std::move(left), std::move(right)};
  return finish(std::move(n));
}

DerivationPtr make_combine(std::vector<DerivationPtr> children, std::vector<double> weights) {
  if (children.empty() || children.size() != weights.size()) {
    throw std::invalid_argument("combine node: children/weights mismatch");
  }
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::Combine;
  n->children = std::move(children);
  n->weights = std::move(weights);
  return finish(std::move(n));
}

DerivationPtr make_rescale(DerivationPtr child, double factor) {
  if (!(factor > 0)) throw std::invalid_argument("rescale factor must be positive");
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::Rescale;
  n->children = {std::move(child)};
  n->factor = factor;
  return finish(std::move(n));
}

DerivationPtr make_isolate(DerivationPtr child, Schedule schedule) {
  if (child_qubits(child) != schedule.num_qubits()) {
    throw std::invalid_argument("isolate node: qubit-count mismatch");
  }
  auto n = std::make_shared<DerivationNode>();
  n->kind = DerivationNode::Kind::Isolate;
  n->children = {std::move(child)};
  n->schedule = std::move(schedule);
  return finish(std::move(n));
}

namespace {

template <typename Fn>
void visit_unique(const DerivationPtr& root, Fn&& fn) {
  std::unordered_set<const DerivationNode*> seen;
  std::vector<DerivationPtr> stack = {root};
  while (!stack.empty()) {
    DerivationPtr n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.get()).second) continue;
    fn(n);
    for (const auto& c : n->children) stack.push_back(c);
  }
}

}  // namespace

double replay(const DerivationPtr& root, double tol) {
  double worst = 0.0;
  std::unordered_map<const DerivationNode*, bool> done;
  std::vector<std::pair<DerivationPtr, bool>> stack = {{root, false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (done.count(n.get())) continue;
    if (!expanded) {
      stack.push_back({n, true});
      for (const auto& c : n->children) stack.push_back({c, false});
      continue;
    }
    done[n.get()] = true;
    Hamiltonian fresh = recompute_effective(*n);
    const Hamiltonian& cached = n->effective;
    if (fresh.size() != cached.size() || fresh.num_qubits() != cached.num_qubits()) {
      throw std::runtime_error("replay: cached effective Hamiltonian has wrong shape");
    }
    for (size_t i = 0; i < fresh.size(); ++i) {
      if (!fresh.term(i).pauli.same_string(cached.term(i).pauli)) {
        throw std::runtime_error("replay: cached Pauli string mismatch");
      }
      double dev = std::abs(fresh.term(i).coefficient - cached.term(i).coefficient);
      worst = std::max(worst, dev);
      if (dev > tol) throw std::runtime_error("replay: coefficient deviates beyond tolerance");
    }
  }
  return worst;
}

size_t node_count(const DerivationPtr& root) {
  size_t count = 0;
  visit_unique(root, [&count](const DerivationPtr&) { ++count; });
  return count;
}

int commutator_depth(const DerivationPtr& root) {
  std::unordered_map<const DerivationNode*, int> depth;
  std::function<int(const DerivationPtr&)> go = [&](const DerivationPtr& n) -> int {
    auto it = depth.find(n.get());
    if (it != depth.end()) return it->second;
    int best = 0;
    for (const auto& c : n->children) best = std::max(best, go(c));
    if (n->kind == DerivationNode::Kind::Commutator) ++best;
    depth[n.get()] = best;
    return best;
  };
  return go(root);
}

bool all_nodes_odd(const DerivationPtr& root) {
  bool ok = true;
  visit_unique(root, [&ok](const DerivationPtr& n) {
    for (const auto& t : n->effective.terms()) {
      if (t.pauli.weight() % 2 == 0) ok = false;
    }
  });
  return ok;
}

bool qubit_sees_only_z(const DerivationPtr& root, int qubit) {
  return qubit_sees_only_z(root, qubit, {});
}

bool qubit_sees_only_z(const DerivationPtr& root, int qubit,
                       const std::vector<DerivationPtr>& stop_at) {
  std::unordered_set<const DerivationNode*> stops;
  for (const auto& s : stop_at) stops.insert(s.get());

  bool ok = true;
  std::unordered_set<const DerivationNode*> seen;
  std::vector<DerivationPtr> stack = {root};
  while (!stack.empty()) {
    DerivationPtr n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.get()).second) continue;
    for (const auto& t : n->effective.terms()) {
      PauliLetter l = t.pauli.letter(qubit);
      if (l != PauliLetter::I && l != PauliLetter::Z) ok = false;
    }
    if (stops.count(n.get())) continue;
    for (const auto& c : n->children) stack.push_back(c);
  }
  return ok;
}

namespace {

const char* kind_name(DerivationNode::Kind k) {
  switch (k) {
    case DerivationNode::Kind::Given: return "given";
    case DerivationNode::Kind::LocalPauli: return "local";
    case DerivationNode::Kind::Conjugate: return "conjugate";
    case DerivationNode::Kind::Commutator: return "commutator";
    case DerivationNode::Kind::Combine: return "combine";
    case DerivationNode::Kind::Rescale: return "rescale";
    case DerivationNode::Kind::Isolate: return "isolate";
  }
  return "?";
}

}  // namespace

std::string derivation_to_json(const DerivationPtr& root) {
  // Nodes in a child-before-parent order so the loader can rebuild in one pass.
  std::vector<DerivationPtr> order;
  std::unordered_map<const DerivationNode*, int> index;
  std::function<void(const DerivationPtr&)> topo = [&](const DerivationPtr& n) {
    if (index.count(n.get())) return;
    for (const auto& c : n->children) topo(c);
    index[n.get()] = static_cast<int>(order.size());
    order.push_back(n);
  };
  topo(root);

  json nodes = json::array();
  for (const auto& n : order) {
    json jn;
    jn["kind"] = kind_name(n->kind);
    switch (n->kind) {
      case DerivationNode::Kind::Given:
        jn["term_index"] = n->term_index;
        jn["coefficient"] = n->term.coefficient;
        jn["pauli"] = n->term.pauli.to_string();
        break;
      case DerivationNode::Kind::LocalPauli:
        jn["pauli"] = n->local.to_string();
        break;
      case DerivationNode::Kind::Conjugate:
        jn["child"] = index[n->children[0].get()];
        jn["layer"] = layer_to_json(n->layer);
        break;
      case DerivationNode::Kind::Commutator:
        jn["left"] = index[n->children[0].get()];
        jn["right"] = index[n->children[1].get()];
        break;
      case DerivationNode::Kind::Combine: {
        json ch = json::array();
        for (const auto& c : n->children) ch.push_back(index[c.get()]);
        jn["children"] = ch;
        jn["weights"] = n->weights;
        break;
      }
      case DerivationNode::Kind::Rescale:
        jn["child"] = index[n->children[0].get()];
        jn["factor"] = n->factor;
        break;
      case DerivationNode::Kind::Isolate:
        jn["child"] = index[n->children[0].get()];
        jn["schedule"] = schedule_to_json(n->schedule);
        break;
    }
    jn["effective"] = hamiltonian_to_json(n->effective);
    nodes.push_back(std::move(jn));
  }

  json j;
  j["num_qubits"] = root->effective.num_qubits();
  j["root"] = index[root.get()];
  j["nodes"] = std::move(nodes);
  return j.dump(2);
}

DerivationPtr derivation_from_json(const std::string& text) {
  json j = json::parse(text);
  int n = j.at("num_qubits").get<int>();
  std::vector<DerivationPtr> built;
  for (const auto& jn : j.at("nodes")) {
    std::string kind = jn.at("kind").get<std::string>();
    DerivationPtr node;
    if (kind == "given") {
      Term t(jn.at("coefficient").get<double>(),
             PhasedPauli::from_string(jn.at("pauli").get<std::string>()));
      node = make_given(t, jn.at("term_index").get<int>());
    } else if (kind == "local") {
      node = make_local(PhasedPauli::from_string(jn.at("pauli").get<std::string>()));
    } else if (kind == "conjugate") {
      node = make_conjugate(built.at(jn.at("child").get<int>()),
                            layer_from_json(jn.at("layer")));
    } else if (kind == "commutator") {
      node = make_commutator(built.at(jn.at("left").get<int>()),
                             built.at(jn.at("right").get<int>()));
    } else if (kind == "combine") {
      std::vector<DerivationPtr> ch;
      for (const auto& c : jn.at("children")) ch.push_back(built.at(c.get<int>()));
      node = make_combine(std::move(ch), jn.at("weights").get<std::vector<double>>());
    } else if (kind == "rescale") {
      node = make_rescale(built.at(jn.at("child").get<int>()), jn.at("factor").get<double>());
    } else if (kind == "isolate") {
      node = make_isolate(built.at(jn.at("child").get<int>()),
                          schedule_from_json(jn.at("schedule")));
    } else {
      throw std::runtime_error("unknown derivation node kind: " + kind);
    }
    // The file's cached effectives must agree with what the builders recomputed.
    Hamiltonian cached(n);
    {
      std::vector<Term> terms;
      for (const auto& e : jn.at("effective")) {
        terms.emplace_back(e.at(0).get<double>(),
                           PhasedPauli::from_string(e.at(1).get<std::string>()));
      }
      cached = Hamiltonian(n, std::move(terms));
    }
    if (!(cached == node->effective)) {
      throw std::runtime_error("derivation JSON: cached effective Hamiltonian mismatch");
    }
    built.push_back(std::move(node));
  }
  return built.at(j.at("root").get<int>());
}

}  // namespace dynsim
