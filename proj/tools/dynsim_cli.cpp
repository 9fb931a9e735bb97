#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include "dynsim/serialize.hpp"
#include "dynsim/synthesis.hpp"
#include "dynsim/verifier.hpp"

using namespace dynsim;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

ParseResult load_or_die(const std::string& path) {
  try {
    return load_hamiltonian(path);
  } catch (const ParseError& e) {
    std::cerr << path << ": parse error at " << e.what() << "\n";
    std::exit(1);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    std::exit(1);
  }
}

uint64_t resolve_seed(bool seed_given, uint64_t seed) {
  if (seed_given) return seed;
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

int thread_count() {
  if (const char* env = std::getenv("DYNSIM_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

ordered_json classification_json(const Classification& c) {
  ordered_json j;
  switch (c.kind) {
    case Classification::Kind::Universal: j["kind"] = "universal"; break;
    case Classification::Kind::OddEntangling: j["kind"] = "odd_entangling"; break;
    case Classification::Kind::NotEntangling: j["kind"] = "not_entangling"; break;
  }
  if (c.kind == Classification::Kind::OddEntangling) {
    j["algebra"] = c.algebra == Classification::Algebra::Sp ? "sp" : "so";
  }
  if (c.kind != Classification::Kind::NotEntangling) {
    j["dimension"] = c.dimension;
  } else {
    ordered_json comps = ordered_json::array();
    for (const auto& comp : c.components) {
      ordered_json one = ordered_json::array();
      for (int q : comp) one.push_back(q + 1);
      comps.push_back(one);
    }
    j["components"] = comps;
  }
  return j;
}

int cmd_classify(const std::string& file, const std::string& json_path) {
  ParseResult parsed = load_or_die(file);
  const Hamiltonian& h = parsed.hamiltonian;
  Classification c = classify(h);

  size_t odd_terms = 0;
  for (const auto& t : h.terms()) {
    if (t.pauli.weight() % 2 == 1) ++odd_terms;
  }

  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << c.describe() << "\n";
  std::cout << "qubits: " << h.num_qubits() << ", terms: " << h.size()
            << " (odd " << odd_terms << ", even " << h.size() - odd_terms << ")\n";

  if (!json_path.empty()) {
    ordered_json j;
    j["file"] = file;
    j["num_qubits"] = h.num_qubits();
    j["terms"] = h.size();
    j["odd_terms"] = odd_terms;
    j["even_terms"] = h.size() - odd_terms;
    j["classification"] = classification_json(c);
    j["warnings"] = parsed.warnings;
    write_output(json_path, j.dump(2) + "\n");
  }

  switch (c.kind) {
    case Classification::Kind::Universal: return 0;
    case Classification::Kind::OddEntangling: return 2;
    case Classification::Kind::NotEntangling: return 3;
  }
  return 1;
}

int cmd_closure(const std::string& file, bool no_locals, bool dump,
                const std::string& json_path) {
  ParseResult parsed = load_or_die(file);
  const Hamiltonian& h = parsed.hamiltonian;
  ClosureResult c = close(h, !no_locals);
  Classification cls = classify(h);

  std::cout << "closure dimension: " << c.dimension() << "\n";
  std::cout << "classification: " << cls.describe() << "\n";
  std::cout << "weight histogram:\n";
  for (auto [w, count] : c.weight_histogram()) {
    std::cout << "  weight " << w << ": " << count << "\n";
  }
  if (dump) {
    for (const auto& e : c.elements()) std::cout << e.string.to_string() << "\n";
  }

  if (!json_path.empty()) {
    ordered_json j;
    j["file"] = file;
    j["include_local_unitaries"] = !no_locals;
    j["dimension"] = c.dimension();
    j["classification"] = classification_json(cls);
    ordered_json hist;
    for (auto [w, count] : c.weight_histogram()) hist[std::to_string(w)] = count;
    j["weight_histogram"] = hist;
    if (dump) {
      ordered_json elems = ordered_json::array();
      for (const auto& e : c.elements()) elems.push_back(e.string.to_string());
      j["elements"] = elems;
    }
    write_output(json_path, j.dump(2) + "\n");
  }
  return 0;
}

int resolve_term(const Hamiltonian& h, const std::string& term) {
  if (!term.empty() && term.find_first_not_of("0123456789") == std::string::npos) {
    int idx = std::atoi(term.c_str());
    if (idx < 0 || idx >= static_cast<int>(h.size())) {
      throw std::runtime_error("term index out of range");
    }
    return idx;
  }
  int idx = h.find_term(PhasedPauli::from_string(term));
  if (idx < 0) throw std::runtime_error("no term with string " + term);
  return idx;
}

int cmd_isolate(const std::string& file, const std::string& term, const std::string& method,
                int m, bool seed_given, uint64_t seed, const std::string& json_path) {
  ParseResult parsed = load_or_die(file);
  const Hamiltonian& h = parsed.hamiltonian;
  int idx = resolve_term(h, term);

  ordered_json j;
  j["file"] = file;
  j["term_index"] = idx;
  j["term"] = {h.term(idx).coefficient, h.term(idx).pauli.to_string()};
  j["method"] = method;

  if (method == "det") {
    Schedule s = deterministic_isolation_schedule(h, idx);
    Hamiltonian out = apply_schedule_symbolic(h, s);
    double scale = out.term(0).coefficient / std::abs(h.term(idx).coefficient);
    std::cout << "deterministic isolation of term " << idx << " ("
              << h.term(idx).pauli.to_string() << ")\n";
    std::cout << "layers: " << s.layers.size() << ", segments: " << s.segments()
              << ", scale: " << format_double(scale) << "\n";
    std::cout << "result: " << format_double(out.term(0).coefficient) << " "
              << out.term(0).pauli.to_string() << "\n";
    ordered_json sj = schedule_to_json(s);
    sj["scale"] = scale;
    j["schedule"] = sj;
    j["result"] = hamiltonian_to_json(out);
  } else if (method == "rand") {
    RandomizedIsolationParams params;
    params.num_layers = m;
    params.seed = resolve_seed(seed_given, seed);
    params.target_term = idx;
    auto r = randomized_isolation(h, params);
    std::cout << "randomized isolation of term " << idx << " with m = " << m
              << ", seed = " << params.seed << "\n";
    std::cout << (r.success ? "success" : "failure") << "; surviving terms: "
              << r.result.size() << "; acceptance rate: "
              << format_double(r.stats.acceptance_rate()) << "\n";
    ordered_json sj = schedule_to_json(r.schedule);
    sj["scale"] = std::ldexp(1.0, m);
    j["seed"] = params.seed;
    j["m"] = m;
    j["success"] = r.success;
    j["acceptance_rate"] = r.stats.acceptance_rate();
    j["schedule"] = sj;
    j["result"] = hamiltonian_to_json(r.result);
  } else {
    throw std::runtime_error("method must be det or rand");
  }

  if (!json_path.empty()) write_output(json_path, j.dump(2) + "\n");
  return 0;
}

int cmd_synthesize(const std::string& file, const std::string& target, bool encoded,
                   const std::string& dump_tree, const std::string& json_path) {
  ParseResult parsed = load_or_die(file);
  const Hamiltonian& h = parsed.hamiltonian;

  DerivationPtr tree;
  ordered_json j;
  j["file"] = file;
  j["target"] = target;
  j["encoded"] = encoded;
  if (encoded) {
    EncodedDerivation enc = derive_encoded(h, PhasedPauli::from_string(target));
    tree = enc.tree;
    std::cout << "encoded derivation; ancilla is original qubit "
              << enc.ancilla_original + 1 << ", relabeled last\n";
    std::cout << enc.directive << "\n";
    ordered_json perm = ordered_json::array();
    for (int q : enc.permutation) perm.push_back(q);
    j["ancilla_original"] = enc.ancilla_original;
    j["permutation"] = perm;
    j["directive"] = enc.directive;
    j["relabeled_hamiltonian"] = hamiltonian_to_json(enc.relabeled);
  } else {
    tree = derive_target(h, PhasedPauli::from_string(target));
  }

  replay(tree);
  const Term& root = tree->effective.term(0);
  std::cout << "derived " << root.pauli.to_string() << " with scale "
            << format_double(root.coefficient) << "\n";
  std::cout << "nodes: " << node_count(tree)
            << ", commutator depth: " << commutator_depth(tree) << "\n";
  j["root"] = {root.coefficient, root.pauli.to_string()};
  j["nodes"] = node_count(tree);
  j["commutator_depth"] = commutator_depth(tree);

  if (!dump_tree.empty()) write_output(dump_tree, derivation_to_json(tree) + "\n");
  if (!json_path.empty()) write_output(json_path, j.dump(2) + "\n");
  return 0;
}

int cmd_verify(const std::string& derivation_path, double t, double delta, double dd,
               int ladder, const std::string& out_path) {
  std::ifstream in(derivation_path);
  if (!in) throw std::runtime_error("cannot open " + derivation_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  DerivationPtr tree = derivation_from_json(ss.str());

  TrotterParams params;
  params.step = delta;
  params.comm = dd > 0 ? dd : delta;
  auto rows = verify_ladder(tree, t, params, ladder);

  std::string csv = "delta,error\n";
  for (auto [d, err] : rows) {
    csv += format_double(d) + "," + format_double(err) + "\n";
  }
  write_output(out_path, csv);
  return 0;
}

int cmd_sweep(const std::string& family, int n, int m, int trials, bool seed_given,
              uint64_t seed, int target_term, const std::string& out_path) {
  Hamiltonian h = family == "chain" ? chain_family(n) : subsets_family(n);
  if (target_term < 0 || target_term >= static_cast<int>(h.size())) {
    throw std::runtime_error("target term out of range");
  }
  uint64_t base_seed = resolve_seed(seed_given, seed);
  size_t big_n = h.size();
  double bound = static_cast<double>(big_n) / std::ldexp(1.0, m);

  std::atomic<long> failures{0};
  std::atomic<uint64_t> accepted{0}, rejected{0};
  int threads = thread_count();
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      RandomizedIsolationParams params;
      params.num_layers = m;
      params.seed = base_seed + static_cast<uint64_t>(i);   // per-trial derived seed
      params.target_term = target_term;
      auto r = randomized_isolation(h, params);
      if (!r.success) ++failures;
      accepted += r.stats.accepted;
      rejected += r.stats.rejected;
    }
  };
  if (threads <= 1) {
    work(0, trials);
  } else {
    std::vector<std::future<void>> futs;
    int chunk = (trials + threads - 1) / threads;
    for (int t0 = 0; t0 < trials; t0 += chunk) {
      futs.push_back(std::async(std::launch::async, work, t0, std::min(trials, t0 + chunk)));
    }
    for (auto& f : futs) f.get();
  }

  double rate = static_cast<double>(accepted) /
                static_cast<double>(accepted + rejected);
  std::cerr << "family " << family << ", n = " << n << ", N = " << big_n << ", m = " << m
            << ", seed = " << base_seed << "\n";
  std::cerr << "failures: " << failures << "/" << trials
            << ", bound N/2^m = " << format_double(bound)
            << ", layer acceptance rate = " << format_double(rate) << "\n";

  std::string csv = "n,N,m,trials,failures,bound\n";
  csv += std::to_string(n) + "," + std::to_string(big_n) + "," + std::to_string(m) + "," +
         std::to_string(trials) + "," + std::to_string(failures.load()) + "," +
         format_double(bound) + "\n";
  write_output(out_path, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli-product Hamiltonian classification, Lie closure and "
               "simulation-schedule synthesis"};
  app.require_subcommand(1);

  std::string file, json_path, term, method = "det", target, dump_tree;
  std::string derivation_path, out_path = "-", family = "chain";
  bool no_locals = false, dump = false, encoded = false;
  int m = 12, ladder = 1, n = 8, trials = 100, target_term = 0;
  uint64_t seed = 0;
  double t = 0.1, delta = 0.01, dd = 0.0;

  auto* classify_cmd = app.add_subcommand("classify", "classify a Hamiltonian file");
  classify_cmd->add_option("file", file)->required();
  classify_cmd->add_option("--json", json_path, "write a JSON report (path or -)");

  auto* closure_cmd = app.add_subcommand("closure", "commutator closure report");
  closure_cmd->add_option("file", file)->required();
  closure_cmd->add_flag("--no-locals", no_locals, "exclude the weight-1 generators");
  closure_cmd->add_flag("--dump", dump, "dump every element, one string per line");
  closure_cmd->add_option("--json", json_path);

  auto* isolate_cmd = app.add_subcommand("isolate", "term-isolation schedules");
  isolate_cmd->add_option("file", file)->required();
  isolate_cmd->add_option("--term", term, "term index or Pauli string")->required();
  isolate_cmd->add_option("--method", method)->check(CLI::IsMember({"det", "rand"}));
  isolate_cmd->add_option("--m", m, "number of random layers");
  auto* iso_seed = isolate_cmd->add_option("--seed", seed);
  isolate_cmd->add_option("--json", json_path);

  auto* synth_cmd = app.add_subcommand("synthesize", "derive a target coupling");
  synth_cmd->add_option("file", file)->required();
  synth_cmd->add_option("--target", target)->required();
  synth_cmd->add_flag("--encoded", encoded, "target acts on n-1 logical qubits");
  synth_cmd->add_option("--dump-tree", dump_tree, "write the derivation JSON");
  synth_cmd->add_option("--json", json_path);

  auto* verify_cmd = app.add_subcommand("verify", "compile a derivation and measure error");
  verify_cmd->add_option("--derivation", derivation_path)->required();
  verify_cmd->add_option("--time", t);
  verify_cmd->add_option("--delta", delta);
  verify_cmd->add_option("--dd", dd, "commutator cycle parameter (defaults to delta)");
  verify_cmd->add_option("--ladder", ladder, "number of delta-halving levels");
  verify_cmd->add_option("--out", out_path, "CSV output (path or -)");

  auto* sweep_cmd = app.add_subcommand("sweep", "randomized-isolation failure-rate sweep");
  sweep_cmd->add_option("--family", family)->check(CLI::IsMember({"chain", "subsets"}));
  sweep_cmd->add_option("--n", n)->required();
  sweep_cmd->add_option("--m", m);
  sweep_cmd->add_option("--trials", trials);
  auto* sweep_seed = sweep_cmd->add_option("--seed", seed);
  sweep_cmd->add_option("--target-term", target_term);
  sweep_cmd->add_option("--out", out_path, "CSV output (path or -)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return cmd_classify(file, json_path);
    if (closure_cmd->parsed()) return cmd_closure(file, no_locals, dump, json_path);
    if (isolate_cmd->parsed()) {
      return cmd_isolate(file, term, method, m, !iso_seed->empty(), seed, json_path);
    }
    if (synth_cmd->parsed()) {
      return cmd_synthesize(file, target, encoded, dump_tree, json_path);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(derivation_path, t, delta, dd, ladder, out_path);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(family, n, m, trials, !sweep_seed->empty(), seed, target_term, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
