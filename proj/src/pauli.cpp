#include "dynsim/pauli.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

namespace dynsim {

namespace {

constexpr int kWordBits = 64;

int word_count(int num_qubits) { return (num_qubits + kWordBits - 1) / kWordBits; }

// Phase exponent t of sigma_a * sigma_b = i^t * sigma_(a xor b), indexed by
// code = x | (z << 1): 0 = I, 1 = X, 2 = Z, 3 = Y. Cyclic products (XY, YZ, ZX)
// pick up +i, anticyclic ones -i.
constexpr std::array<std::array<uint8_t, 4>, 4> kMulPhase = {{
    // b:   I  X  Z  Y
    /*I*/ {{0, 0, 0, 0}},
    /*X*/ {{0, 0, 3, 1}},   // XZ = -iY, XY = iZ
    /*Z*/ {{0, 1, 0, 3}},   // ZX = iY,  ZY = -iX
    /*Y*/ {{0, 3, 1, 0}},   // YX = -iZ, YZ = iX
}};

int code_of(bool x, bool z) { return (x ? 1 : 0) | (z ? 2 : 0); }

}  // namespace

char to_char(PauliLetter p) {
  switch (p) {
    case PauliLetter::I: return 'I';
    case PauliLetter::X: return 'X';
    case PauliLetter::Y: return 'Y';
    case PauliLetter::Z: return 'Z';
  }
  throw std::logic_error("bad PauliLetter");
}

PauliLetter letter_from_char(char c) {
  switch (c) {
    case 'I': return PauliLetter::I;
    case 'X': return PauliLetter::X;
    case 'Y': return PauliLetter::Y;
    case 'Z': return PauliLetter::Z;
    default:
      throw std::invalid_argument(std::string("invalid Pauli character '") + c + "'");
  }
}

PhasedPauli::PhasedPauli(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits <= 0) throw std::invalid_argument("num_qubits must be positive");
  x_.assign(word_count(num_qubits), 0);
  z_.assign(word_count(num_qubits), 0);
}

PhasedPauli PhasedPauli::from_string(std::string_view text) {
  int phase = 0;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    bool neg = text[0] == '-';
    text.remove_prefix(1);
    bool imag = !text.empty() && text[0] == 'i';
    if (imag) text.remove_prefix(1);
    phase = imag ? (neg ? 3 : 1) : (neg ? 2 : 0);
  }
  if (text.empty()) throw std::invalid_argument("empty Pauli string");
  PhasedPauli p(static_cast<int>(text.size()));
  for (size_t q = 0; q < text.size(); ++q) {
    p.set_letter(static_cast<int>(q), letter_from_char(text[q]));
  }
  p.set_phase_exp(phase);
  return p;
}

PhasedPauli PhasedPauli::single(int num_qubits, int qubit, PauliLetter p) {
  PhasedPauli s(num_qubits);
  s.set_letter(qubit, p);
  return s;
}

bool PhasedPauli::x_bit(int q) const { return (x_[q / kWordBits] >> (q % kWordBits)) & 1; }
bool PhasedPauli::z_bit(int q) const { return (z_[q / kWordBits] >> (q % kWordBits)) & 1; }

PauliLetter PhasedPauli::letter(int q) const {
  bool x = x_bit(q), z = z_bit(q);
  if (x && z) return PauliLetter::Y;
  if (x) return PauliLetter::X;
  if (z) return PauliLetter::Z;
  return PauliLetter::I;
}

void PhasedPauli::set_letter(int q, PauliLetter p) {
  if (q < 0 || q >= num_qubits_) throw std::out_of_range("qubit index");
  uint64_t mask = uint64_t{1} << (q % kWordBits);
  bool x = p == PauliLetter::X || p == PauliLetter::Y;
  bool z = p == PauliLetter::Z || p == PauliLetter::Y;
  if (x) x_[q / kWordBits] |= mask; else x_[q / kWordBits] &= ~mask;
  if (z) z_[q / kWordBits] |= mask; else z_[q / kWordBits] &= ~mask;
}

int PhasedPauli::weight() const {
  int w = 0;
  for (size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
  return w;
}

bool PhasedPauli::is_identity_string() const {
  for (size_t i = 0; i < x_.size(); ++i) {
    if (x_[i] | z_[i]) return false;
  }
  return true;
}

std::vector<int> PhasedPauli::support() const {
  std::vector<int> s;
  for (int q = 0; q < num_qubits_; ++q) {
    if (letter(q) != PauliLetter::I) s.push_back(q);
  }
  return s;
}

PhasedPauli PhasedPauli::unsigned_string() const {
  PhasedPauli p = *this;
  p.phase_ = 0;
  return p;
}

std::string PhasedPauli::to_string(bool with_phase) const {
  std::string s;
  if (with_phase) {
    static const char* prefix[4] = {"+", "+i", "-", "-i"};
    s += prefix[phase_];
  }
  for (int q = 0; q < num_qubits_; ++q) s += to_char(letter(q));
  return s;
}

PhasedPauli PhasedPauli::mul(const PhasedPauli& a, const PhasedPauli& b) {
  if (a.num_qubits_ != b.num_qubits_) {
    throw std::invalid_argument("pauli_mul: qubit-count mismatch");
  }
  PhasedPauli r(a.num_qubits_);
  int phase = a.phase_ + b.phase_;
  for (int q = 0; q < a.num_qubits_; ++q) {
    phase += kMulPhase[code_of(a.x_bit(q), a.z_bit(q))][code_of(b.x_bit(q), b.z_bit(q))];
  }
  for (size_t i = 0; i < r.x_.size(); ++i) {
    r.x_[i] = a.x_[i] ^ b.x_[i];
    r.z_[i] = a.z_[i] ^ b.z_[i];
  }
  r.set_phase_exp(phase);
  return r;
}

bool PhasedPauli::commutes(const PhasedPauli& a, const PhasedPauli& b) {
  if (a.num_qubits_ != b.num_qubits_) {
    throw std::invalid_argument("commutes: qubit-count mismatch");
  }
  int parity = 0;
  for (size_t i = 0; i < a.x_.size(); ++i) {
    parity ^= std::popcount(a.x_[i] & b.z_[i]) & 1;
    parity ^= std::popcount(a.z_[i] & b.x_[i]) & 1;
  }
  return parity == 0;
}

bool PhasedPauli::same_string(const PhasedPauli& other) const {
  return num_qubits_ == other.num_qubits_ && x_ == other.x_ && z_ == other.z_;
}

bool PhasedPauli::operator==(const PhasedPauli& other) const {
  return same_string(other) && phase_ == other.phase_;
}

bool PhasedPauli::string_less(const PhasedPauli& a, const PhasedPauli& b) {
  if (a.num_qubits_ != b.num_qubits_) return a.num_qubits_ < b.num_qubits_;
  for (int q = 0; q < a.num_qubits_; ++q) {
    char ca = to_char(a.letter(q)), cb = to_char(b.letter(q));
    if (ca != cb) return ca < cb;
  }
  return false;
}

size_t PhasedPauli::string_hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  };
  for (uint64_t w : x_) mix(w);
  for (uint64_t w : z_) mix(w ^ 0x9e3779b97f4a7c15ull);
  return static_cast<size_t>(h);
}

Term::Term(double c, PhasedPauli p) : coefficient(c), pauli(std::move(p)) {
  if (pauli.phase_exp() == 2) {
    coefficient = -coefficient;
    pauli.set_phase_exp(0);
  } else if (pauli.phase_exp() != 0) {
    throw std::invalid_argument("Term requires a Hermitian Pauli (phase 0 or 2)");
  }
}

std::string Term::to_string() const {
  std::string s = coefficient < 0 ? "-" : "+";
  s += std::to_string(std::abs(coefficient));
  s += " ";
  s += pauli.to_string();
  return s;
}

std::optional<Term> commutator(const Term& a, const Term& b) {
  if (a.pauli.num_qubits() != b.pauli.num_qubits()) {
    throw std::invalid_argument("commutator: qubit-count mismatch");
  }
  if (PhasedPauli::commutes(a.pauli, b.pauli)) return std::nullopt;
  PhasedPauli prod = PhasedPauli::mul(a.pauli, b.pauli);
  // i(ab - ba) = 2 i^(t+1) sigma for anticommuting inputs, t = phase of ab.
  int t = prod.phase_exp();
  double sign = (t == 1) ? -1.0 : 1.0;   // i^2 = -1, i^4 = +1
  prod.set_phase_exp(0);
  return Term(2.0 * a.coefficient * b.coefficient * sign, prod);
}

Axis axis_of(PauliLetter p) {
  switch (p) {
    case PauliLetter::X: return Axis::X;
    case PauliLetter::Y: return Axis::Y;
    case PauliLetter::Z: return Axis::Z;
    case PauliLetter::I: break;
  }
  throw std::invalid_argument("identity has no axis");
}

PauliLetter letter_of(Axis a) {
  switch (a) {
    case Axis::X: return PauliLetter::X;
    case Axis::Y: return PauliLetter::Y;
    case Axis::Z: return PauliLetter::Z;
  }
  throw std::logic_error("bad Axis");
}

char to_char(Axis a) { return to_char(letter_of(a)); }

std::string SignedAxis::to_string() const {
  return std::string(negative ? "-" : "+") + to_char(axis);
}

SignedAxis SignedAxis::parse(std::string_view s) {
  if (s.size() != 2 || (s[0] != '+' && s[0] != '-')) {
    throw std::invalid_argument("signed axis must look like \"+X\"");
  }
  return SignedAxis{axis_of(letter_from_char(s[1])), s[0] == '-'};
}

SignedAxis SingleQubitClifford::image_y() const {
  // C Y C† = i (C X C†)(C Z C†): multiply the two signed single-qubit Paulis.
  PauliLetter a = letter_of(image_x.axis), b = letter_of(image_z.axis);
  PhasedPauli pa = PhasedPauli::single(1, 0, a);
  PhasedPauli pb = PhasedPauli::single(1, 0, b);
  PhasedPauli prod = PhasedPauli::mul(pa, pb);
  int phase = (1 + prod.phase_exp()) % 4;  // leading i
  if (phase != 0 && phase != 2) throw std::logic_error("invalid Clifford images");
  bool neg = (phase == 2) ^ image_x.negative ^ image_z.negative;
  return SignedAxis{axis_of(prod.letter(0)), neg};
}

SignedAxis SingleQubitClifford::image(PauliLetter p) const {
  switch (p) {
    case PauliLetter::X: return image_x;
    case PauliLetter::Y: return image_y();
    case PauliLetter::Z: return image_z;
    case PauliLetter::I: break;
  }
  throw std::invalid_argument("no image for identity");
}

bool SingleQubitClifford::is_pauli_conj() const {
  return image_x.axis == Axis::X && image_z.axis == Axis::Z;
}

SingleQubitClifford SingleQubitClifford::compose(const SingleQubitClifford& b,
                                                 const SingleQubitClifford& a) {
  auto apply = [&b](SignedAxis s) {
    SignedAxis out = b.image(letter_of(s.axis));
    out.negative = out.negative ^ s.negative;
    return out;
  };
  SingleQubitClifford r{apply(a.image_x), apply(a.image_z)};
  if (!r.valid()) throw std::logic_error("composition produced invalid Clifford");
  return r;
}

SingleQubitClifford SingleQubitClifford::identity() {
  return SingleQubitClifford{{Axis::X, false}, {Axis::Z, false}};
}

SingleQubitClifford SingleQubitClifford::pauli_conj(PauliLetter p) {
  switch (p) {
    case PauliLetter::I: return identity();
    case PauliLetter::X: return {{Axis::X, false}, {Axis::Z, true}};
    case PauliLetter::Y: return {{Axis::X, true}, {Axis::Z, true}};
    case PauliLetter::Z: return {{Axis::X, true}, {Axis::Z, false}};
  }
  throw std::logic_error("bad PauliLetter");
}

SingleQubitClifford SingleQubitClifford::axis_map(Axis from, Axis to) {
  if (from == to) return identity();
  // One designated Clifford per (from, to) pair; signs are fixed by the table
  // and tracked exactly by conjugation.
  if (from == Axis::X && to == Axis::Z) return {{Axis::Z, false}, {Axis::X, false}};  // Hadamard
  if (from == Axis::Z && to == Axis::X) return {{Axis::Z, false}, {Axis::X, false}};
  if (from == Axis::Y && to == Axis::Z) return {{Axis::X, false}, {Axis::Y, true}};   // e^{-i pi/4 X}
  if (from == Axis::Z && to == Axis::Y) return {{Axis::X, false}, {Axis::Y, false}};
  if (from == Axis::X && to == Axis::Y) return {{Axis::Y, false}, {Axis::Z, false}};  // phase gate S
  if (from == Axis::Y && to == Axis::X) return {{Axis::Y, true}, {Axis::Z, false}};
  throw std::logic_error("unreachable");
}

CliffordLayer::CliffordLayer(int num_qubits)
    : entries_(num_qubits, SingleQubitClifford::identity()) {
  if (num_qubits <= 0) throw std::invalid_argument("num_qubits must be positive");
}

CliffordLayer::CliffordLayer(std::vector<SingleQubitClifford> entries)
    : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!e.valid()) throw std::invalid_argument("invalid single-qubit Clifford");
  }
}

CliffordLayer CliffordLayer::from_pauli_string(const PhasedPauli& p) {
  CliffordLayer layer(p.num_qubits());
  for (int q = 0; q < p.num_qubits(); ++q) {
    layer.entries_[q] = SingleQubitClifford::pauli_conj(p.letter(q));
  }
  return layer;
}

CliffordLayer CliffordLayer::from_pauli_letters(std::string_view letters) {
  return from_pauli_string(PhasedPauli::from_string(letters));
}

bool CliffordLayer::is_identity() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) {
    return e == SingleQubitClifford::identity();
  });
}

bool CliffordLayer::is_pauli_only() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const auto& e) { return e.is_pauli_conj(); });
}

std::string CliffordLayer::pauli_letters() const {
  std::string s;
  for (const auto& e : entries_) {
    if (!e.is_pauli_conj()) throw std::logic_error("layer is not Pauli-only");
    bool fx = e.image_x.negative, fz = e.image_z.negative;
    if (!fx && !fz) s += 'I';
    else if (!fx && fz) s += 'X';   // conjugation by X flips Z only
    else if (fx && fz) s += 'Y';
    else s += 'Z';
  }
  return s;
}

CliffordLayer CliffordLayer::compose(const CliffordLayer& b, const CliffordLayer& a) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("layer composition: qubit-count mismatch");
  }
  std::vector<SingleQubitClifford> out(a.entries_.size());
  for (size_t q = 0; q < out.size(); ++q) {
    out[q] = SingleQubitClifford::compose(b.entries_[q], a.entries_[q]);
  }
  return CliffordLayer(std::move(out));
}

PhasedPauli conjugate(const PhasedPauli& p, const CliffordLayer& layer) {
  if (p.num_qubits() != layer.num_qubits()) {
    throw std::invalid_argument("conjugate: qubit-count mismatch");
  }
  PhasedPauli r(p.num_qubits());
  int flips = 0;
  for (int q = 0; q < p.num_qubits(); ++q) {
    PauliLetter l = p.letter(q);
    if (l == PauliLetter::I) continue;
    SignedAxis img = layer.at(q).image(l);
    r.set_letter(q, letter_of(img.axis));
    flips ^= img.negative ? 1 : 0;
  }
  r.set_phase_exp(p.phase_exp() + (flips ? 2 : 0));
  return r;
}

Term conjugate(const Term& t, const CliffordLayer& layer) {
  return Term(t.coefficient, conjugate(t.pauli, layer));
}

}  // namespace dynsim
