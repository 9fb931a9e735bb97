#include "dynsim/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dynsim {

namespace {

// Union-find over qubit indices.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Hamiltonian::Hamiltonian(int num_qubits, std::vector<Term> terms)
    : num_qubits_(num_qubits), terms_(std::move(terms)) {
  if (num_qubits <= 0) throw std::invalid_argument("num_qubits must be positive");
  for (const auto& t : terms_) {
    if (t.pauli.num_qubits() != num_qubits_) {
      throw std::invalid_argument("term qubit count does not match Hamiltonian");
    }
  }
  canonicalize();
}

void Hamiltonian::canonicalize() {
  std::stable_sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return PhasedPauli::string_less(a.pauli, b.pauli);
  });
  std::vector<Term> merged;
  for (const auto& t : terms_) {
    if (t.pauli.is_identity_string()) continue;
    if (!merged.empty() && merged.back().pauli.same_string(t.pauli)) {
      merged.back().coefficient += t.coefficient;
    } else {
      merged.push_back(t);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) {
                                return std::abs(t.coefficient) < kCoefficientEpsilon;
                              }),
               merged.end());
  terms_ = std::move(merged);
}

int Hamiltonian::find_term(const PhasedPauli& str) const {
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].pauli.same_string(str)) return static_cast<int>(i);
  }
  return -1;
}

void Hamiltonian::add(const Term& t) {
  if (t.pauli.num_qubits() != num_qubits_) {
    throw std::invalid_argument("term qubit count does not match Hamiltonian");
  }
  terms_.push_back(t);
  canonicalize();
}

void Hamiltonian::add(double coefficient, const PhasedPauli& pauli) {
  add(Term(coefficient, pauli));
}

Hamiltonian Hamiltonian::operator+(const Hamiltonian& other) const {
  if (num_qubits_ != other.num_qubits_) {
    throw std::invalid_argument("Hamiltonian sum: qubit-count mismatch");
  }
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return Hamiltonian(num_qubits_, std::move(all));
}

Hamiltonian Hamiltonian::scaled(double factor) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coefficient *= factor;
  return Hamiltonian(num_qubits_, std::move(out));
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Hamiltonian::serialize() const {
  std::string out = "qubits: " + std::to_string(num_qubits_) + "\n";
  for (const auto& t : terms_) {
    out += format_double(t.coefficient);
    out += " ";
    out += t.pauli.to_string();
    out += "\n";
  }
  return out;
}

bool Hamiltonian::operator==(const Hamiltonian& other) const {
  if (num_qubits_ != other.num_qubits_ || terms_.size() != other.terms_.size()) {
    return false;
  }
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (!terms_[i].pauli.same_string(other.terms_[i].pauli)) return false;
    if (terms_[i].coefficient != other.terms_[i].coefficient) return false;
  }
  return true;
}

ParseResult parse_hamiltonian(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int num_qubits = 0;
  std::vector<Term> terms;
  std::vector<std::string> warnings;
  bool declared = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    size_t end = line.find_last_not_of(" \t\r");
    std::string body = line.substr(begin, end - begin + 1);

    if (!declared && terms.empty() && body.rfind("qubits:", 0) == 0) {
      std::string value = body.substr(7);
      int n = 0;
      auto res = std::from_chars(value.data() + value.find_first_not_of(" \t"),
                                 value.data() + value.size(), n);
      if (res.ec != std::errc{} || n <= 0) {
        throw ParseError(line_no, static_cast<int>(begin) + 8, "invalid qubit count");
      }
      num_qubits = n;
      declared = true;
      continue;
    }

    size_t sp = body.find_first_of(" \t");
    if (sp == std::string::npos) {
      throw ParseError(line_no, static_cast<int>(begin) + 1,
                       "expected \"<coefficient> <pauli string>\"");
    }
    std::string coeff_str = body.substr(0, sp);
    double coeff = 0.0;
    auto res = std::from_chars(coeff_str.data(), coeff_str.data() + coeff_str.size(), coeff);
    if (res.ec != std::errc{} || res.ptr != coeff_str.data() + coeff_str.size()) {
      throw ParseError(line_no, static_cast<int>(begin) + 1,
                       "unparsable coefficient \"" + coeff_str + "\"");
    }

    size_t ps = body.find_first_not_of(" \t", sp);
    std::string pauli_str = body.substr(ps);
    int col0 = static_cast<int>(begin + ps) + 1;
    for (size_t i = 0; i < pauli_str.size(); ++i) {
      char c = pauli_str[i];
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw ParseError(line_no, col0 + static_cast<int>(i),
                         std::string("invalid character '") + c + "' in Pauli string");
      }
    }
    int len = static_cast<int>(pauli_str.size());
    if (num_qubits == 0) {
      num_qubits = len;
    } else if (len != num_qubits) {
      throw ParseError(line_no, col0,
                       "Pauli string length " + std::to_string(len) +
                           " does not match qubit count " + std::to_string(num_qubits));
    }

    PhasedPauli p = PhasedPauli::from_string(pauli_str);
    if (p.is_identity_string()) {
      warnings.push_back("line " + std::to_string(line_no) +
                         ": identity term dropped (contributes only a global phase)");
      continue;
    }
    terms.emplace_back(coeff, p);
  }

  if (num_qubits == 0) throw ParseError(line_no, 1, "no terms found");
  Hamiltonian h(num_qubits, std::move(terms));
  if (h.empty()) {
    throw ParseError(line_no, 1, "Hamiltonian is empty after canonicalization");
  }
  return ParseResult{std::move(h), std::move(warnings)};
}

ParseResult load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_hamiltonian(ss.str());
}

std::vector<std::vector<int>> connected_components(const Hamiltonian& h) {
  UnionFind uf(h.num_qubits());
  for (const auto& t : h.terms()) {
    Support s = t.pauli.support();
    if (s.size() < 2) continue;   // weight-1 terms couple nothing
    for (size_t i = 1; i < s.size(); ++i) uf.unite(s[0], s[i]);
  }
  std::vector<std::vector<int>> comps;
  std::vector<int> root_to_comp(h.num_qubits(), -1);
  for (int q = 0; q < h.num_qubits(); ++q) {
    int r = uf.find(q);
    if (root_to_comp[r] < 0) {
      root_to_comp[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[root_to_comp[r]].push_back(q);
  }
  return comps;
}

bool is_entangling(const Hamiltonian& h) { return connected_components(h).size() == 1; }

namespace {

uint64_t pow_u64(uint64_t base, int exp) {
  uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

Classification classify(const Hamiltonian& h) {
  Classification c;
  c.num_qubits = h.num_qubits();
  auto comps = connected_components(h);
  if (comps.size() != 1) {
    c.kind = Classification::Kind::NotEntangling;
    c.components = std::move(comps);
    return c;
  }
  int n = h.num_qubits();
  bool has_even = std::any_of(h.terms().begin(), h.terms().end(),
                              [](const Term& t) { return t.pauli.weight() % 2 == 0; });
  if (has_even) {
    c.kind = Classification::Kind::Universal;
    c.dimension = pow_u64(4, n) - 1;
  } else {
    c.kind = Classification::Kind::OddEntangling;
    c.algebra = (n % 2 == 0) ? Classification::Algebra::So : Classification::Algebra::Sp;
    // (4^n - (-2)^n) / 2
    uint64_t four = pow_u64(4, n), two = pow_u64(2, n);
    c.dimension = (n % 2 == 0) ? (four - two) / 2 : (four + two) / 2;
  }
  return c;
}

std::string Classification::describe() const {
  std::string dim_str = std::to_string(1ull << num_qubits);
  switch (kind) {
    case Kind::Universal:
      return "Universal, su(" + dim_str + "), dim " + std::to_string(dimension);
    case Kind::OddEntangling:
      return "OddEntangling, " + std::string(algebra == Algebra::Sp ? "sp" : "so") +
             "(" + dim_str + "), dim " + std::to_string(dimension);
    case Kind::NotEntangling: {
      std::string s = "NotEntangling, components";
      for (const auto& comp : components) {
        s += " {";
        for (size_t i = 0; i < comp.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(comp[i] + 1);
        }
        s += "}";
      }
      return s;
    }
  }
  return "";
}

void for_each_coupling(const Support& support, int num_qubits,
                       const std::function<void(const PhasedPauli&)>& fn) {
  if (support.empty()) throw std::invalid_argument("empty support");
  for (int q : support) {
    if (q < 0 || q >= num_qubits) throw std::out_of_range("support qubit index");
  }
  PhasedPauli p(num_qubits);
  const PauliLetter letters[3] = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
  std::vector<int> digits(support.size(), 0);
  while (true) {
    for (size_t i = 0; i < support.size(); ++i) p.set_letter(support[i], letters[digits[i]]);
    fn(p);
    size_t i = 0;
    while (i < digits.size() && ++digits[i] == 3) digits[i++] = 0;
    if (i == digits.size()) break;
  }
}

std::vector<PhasedPauli> enumerate_coupling_set(const Support& support, int num_qubits) {
  std::vector<PhasedPauli> out;
  for_each_coupling(support, num_qubits, [&out](const PhasedPauli& p) { out.push_back(p); });
  return out;
}

PhasedPauli permute_qubits(const PhasedPauli& p, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != p.num_qubits()) {
    throw std::invalid_argument("permutation size mismatch");
  }
  PhasedPauli out(p.num_qubits());
  for (int q = 0; q < p.num_qubits(); ++q) out.set_letter(perm[q], p.letter(q));
  out.set_phase_exp(p.phase_exp());
  return out;
}

Hamiltonian permute_qubits(const Hamiltonian& h, const std::vector<int>& perm) {
  std::vector<Term> terms;
  terms.reserve(h.size());
  for (const auto& t : h.terms()) {
    terms.emplace_back(t.coefficient, permute_qubits(t.pauli, perm));
  }
  return Hamiltonian(h.num_qubits(), std::move(terms));
}

Hamiltonian subsets_family(int n) {
  if (n < 2 || n > 20) throw std::invalid_argument("subsets family needs 2 <= n <= 20");
  std::vector<Term> terms;
  for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
    if (std::popcount(mask) < 2) continue;
    PhasedPauli p(n);
    for (int q = 0; q < n; ++q) {
      if ((mask >> q) & 1) p.set_letter(q, PauliLetter::X);
    }
    terms.emplace_back(1.0, p);
  }
  return Hamiltonian(n, std::move(terms));
}

Hamiltonian chain_family(int n) {
  if (n < 2) throw std::invalid_argument("chain family needs n >= 2");
  std::vector<Term> terms;
  for (int i = 0; i + 1 < n; ++i) {
    PhasedPauli p(n);
    p.set_letter(i, PauliLetter::X);
    p.set_letter(i + 1, PauliLetter::X);
    terms.emplace_back(1.0, p);
  }
  for (int i = 0; i + 2 < n; ++i) {
    PhasedPauli p(n);
    p.set_letter(i, PauliLetter::X);
    p.set_letter(i + 1, PauliLetter::X);
    p.set_letter(i + 2, PauliLetter::X);
    terms.emplace_back(1.0, p);
  }
  return Hamiltonian(n, std::move(terms));
}

}  // namespace dynsim
