#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynsim/pauli.hpp"

namespace dynsim {

/// Sorted set of qubit indices acted on non-trivially by a term.
using Support = std::vector<int>;

inline constexpr double kCoefficientEpsilon = 1e-12;

/// Canonical sum of real-weighted Pauli products: terms sorted by string,
/// duplicates merged, near-zero coefficients and identity strings pruned.
class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits <= 0) throw std::invalid_argument("num_qubits must be positive");
  }
  Hamiltonian(int num_qubits, std::vector<Term> terms);

  int num_qubits() const { return num_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const Term& term(size_t i) const { return terms_.at(i); }

  /// Index of the term with this string, or -1.
  int find_term(const PhasedPauli& str) const;

  void add(const Term& t);
  void add(double coefficient, const PhasedPauli& pauli);

  Hamiltonian operator+(const Hamiltonian& other) const;
  Hamiltonian scaled(double factor) const;

  /// Canonical text form (round-trips bit-exactly through the parser).
  std::string serialize() const;

  bool operator==(const Hamiltonian& other) const;

 private:
  void canonicalize();

  int num_qubits_ = 0;
  std::vector<Term> terms_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct ParseResult {
  Hamiltonian hamiltonian;
  std::vector<std::string> warnings;
};

/// Text format: optional header "qubits: <n>"; one term per line as
/// "<decimal coefficient> <pauli string>"; '#' starts a comment; blank lines
/// ignored. Identity terms are dropped with a warning; an empty result after
/// canonicalization is an error.
ParseResult parse_hamiltonian(const std::string& text);
ParseResult load_hamiltonian(const std::string& path);

/// Decimal shortest-round-trip form of a double.
std::string format_double(double v);

struct Classification {
  enum class Kind { NotEntangling, OddEntangling, Universal };
  enum class Algebra { So, Sp };

  Kind kind = Kind::NotEntangling;
  int num_qubits = 0;
  std::vector<std::vector<int>> components;  // NotEntangling only (0-based)
  Algebra algebra = Algebra::So;             // OddEntangling only
  uint64_t dimension = 0;                    // generated-algebra dimension

  std::string describe() const;
};

/// Partition of qubits under the term-support hypergraph. Weight-1 terms
/// contribute no edges; an untouched qubit is its own component.
std::vector<std::vector<int>> connected_components(const Hamiltonian& h);
bool is_entangling(const Hamiltonian& h);

/// Theorem-style trichotomy: disconnected, odd entangling (so/sp by qubit
/// parity), or universal (some even-weight term).
Classification classify(const Hamiltonian& h);

/// All 3^|support| strings that are non-identity exactly on the support.
void for_each_coupling(const Support& support, int num_qubits,
                       const std::function<void(const PhasedPauli&)>& fn);
std::vector<PhasedPauli> enumerate_coupling_set(const Support& support, int num_qubits);

/// Relabels qubits: qubit q of the input becomes perm[q] of the output.
Hamiltonian permute_qubits(const Hamiltonian& h, const std::vector<int>& perm);
PhasedPauli permute_qubits(const PhasedPauli& p, const std::vector<int>& perm);

/// The two coupling families used by the efficiency sweeps: "subsets" has an
/// X-product on every subset of size >= 2 (2^n - n - 1 terms), "chain" is the
/// 3-local family X_i X_{i+1} + X_i X_{i+1} X_{i+2} (2n - 3 terms).
Hamiltonian subsets_family(int n);
Hamiltonian chain_family(int n);

}  // namespace dynsim
