#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynsim {

enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliLetter p);
PauliLetter letter_from_char(char c);

/// An n-qubit Pauli product with a quarter phase: i^phase_exp * (p_1 ⊗ ... ⊗ p_n).
/// Stored in binary symplectic form: qubit q carries X if x-bit set, Z if z-bit
/// set, Y if both, I if neither. Qubit 0 is the leftmost letter in text form.
class PhasedPauli {
 public:
  PhasedPauli() = default;
  explicit PhasedPauli(int num_qubits);

  /// Parses "XXI" or "+iXYZ" / "-ZZ" (optional phase prefix).
  static PhasedPauli from_string(std::string_view text);

  /// Weight-1 string: the given letter on one qubit, identity elsewhere.
  static PhasedPauli single(int num_qubits, int qubit, PauliLetter p);

  int num_qubits() const { return num_qubits_; }
  int phase_exp() const { return phase_; }
  void set_phase_exp(int e) { phase_ = static_cast<uint8_t>(((e % 4) + 4) % 4); }

  bool x_bit(int q) const;
  bool z_bit(int q) const;
  PauliLetter letter(int q) const;
  void set_letter(int q, PauliLetter p);

  int weight() const;
  bool odd_weight() const { return weight() % 2 == 1; }
  bool is_identity_string() const;
  std::vector<int> support() const;

  /// Same masks, phase forced to 0.
  PhasedPauli unsigned_string() const;

  std::string to_string(bool with_phase = false) const;

  /// Exact matrix product a*b with the phase tracked mod 4.
  static PhasedPauli mul(const PhasedPauli& a, const PhasedPauli& b);

  /// True iff ab = ba; the symplectic inner product of the masks is even.
  static bool commutes(const PhasedPauli& a, const PhasedPauli& b);

  /// Ignores phase; compares masks only.
  bool same_string(const PhasedPauli& other) const;

  bool operator==(const PhasedPauli& other) const;
  bool operator!=(const PhasedPauli& other) const { return !(*this == other); }

  /// Lexicographic order on the letter string (I < X < Y < Z), phase ignored.
  static bool string_less(const PhasedPauli& a, const PhasedPauli& b);

  size_t string_hash() const;

  const std::vector<uint64_t>& x_words() const { return x_; }
  const std::vector<uint64_t>& z_words() const { return z_; }

 private:
  int num_qubits_ = 0;
  std::vector<uint64_t> x_, z_;
  uint8_t phase_ = 0;
};

struct PauliStringHash {
  size_t operator()(const PhasedPauli& p) const { return p.string_hash(); }
};
struct PauliStringEq {
  bool operator()(const PhasedPauli& a, const PhasedPauli& b) const {
    return a.same_string(b);
  }
};

/// A real-weighted Pauli product; the pauli carries phase_exp 0.
struct Term {
  double coefficient = 0.0;
  PhasedPauli pauli;

  Term() = default;
  Term(double c, PhasedPauli p);
  std::string to_string() const;
};

/// i[a, b] = i(a b - b a). Empty when the terms commute. The result is
/// Hermitian with real coefficient 2 c_a c_b (±1): anticommuting Pauli
/// products multiply to a ±i phase, which the leading i makes real.
std::optional<Term> commutator(const Term& a, const Term& b);

enum class Axis : uint8_t { X = 0, Y = 1, Z = 2 };

Axis axis_of(PauliLetter p);          // p must be non-identity
PauliLetter letter_of(Axis a);
char to_char(Axis a);

struct SignedAxis {
  Axis axis = Axis::X;
  bool negative = false;

  bool operator==(const SignedAxis& o) const {
    return axis == o.axis && negative == o.negative;
  }
  std::string to_string() const;           // "+X", "-Z", ...
  static SignedAxis parse(std::string_view s);
};

/// A single-qubit Clifford given by its conjugation action on X and Z.
/// The image of Y is determined: C Y C† = i (C X C†)(C Z C†).
struct SingleQubitClifford {
  SignedAxis image_x{Axis::X, false};
  SignedAxis image_z{Axis::Z, false};

  bool valid() const { return image_x.axis != image_z.axis; }
  SignedAxis image_y() const;
  SignedAxis image(PauliLetter p) const;   // p non-identity

  /// True when the action is conjugation by I, X, Y or Z.
  bool is_pauli_conj() const;

  /// Composition: (b ∘ a)(σ) = b(a(σ)).
  static SingleQubitClifford compose(const SingleQubitClifford& b,
                                     const SingleQubitClifford& a);

  static SingleQubitClifford identity();
  static SingleQubitClifford pauli_conj(PauliLetter p);   // conjugation by p
  /// A fixed table entry mapping `from` to `to` exactly (+ sign on `to`);
  /// identity when from == to.
  static SingleQubitClifford axis_map(Axis from, Axis to);

  bool operator==(const SingleQubitClifford& o) const {
    return image_x == o.image_x && image_z == o.image_z;
  }
};

/// One single-qubit Clifford per qubit (identity allowed).
class CliffordLayer {
 public:
  CliffordLayer() = default;
  explicit CliffordLayer(int num_qubits);
  CliffordLayer(std::vector<SingleQubitClifford> entries);

  /// Layer of Pauli conjugations described by a letter string, e.g. "ZIZ".
  static CliffordLayer from_pauli_string(const PhasedPauli& p);
  static CliffordLayer from_pauli_letters(std::string_view letters);

  int num_qubits() const { return static_cast<int>(entries_.size()); }
  const SingleQubitClifford& at(int q) const { return entries_.at(q); }
  SingleQubitClifford& at(int q) { return entries_.at(q); }

  bool is_identity() const;
  bool is_pauli_only() const;
  /// Letter string for a Pauli-only layer; throws otherwise.
  std::string pauli_letters() const;

  /// Per-qubit composition (b ∘ a).
  static CliffordLayer compose(const CliffordLayer& b, const CliffordLayer& a);

 private:
  std::vector<SingleQubitClifford> entries_;
};

/// L p L† with exact phase tracking.
PhasedPauli conjugate(const PhasedPauli& p, const CliffordLayer& layer);

/// Conjugates the term's string, folding the resulting ±1 into the coefficient.
Term conjugate(const Term& t, const CliffordLayer& layer);

}  // namespace dynsim
