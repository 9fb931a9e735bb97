#pragma once

// Worked commutator identities, normalized to the i[A,B] = i(AB - BA)
// convention. `order_ambiguous` marks the two identities whose printed sign
// corresponds to the reversed argument order i[B,A]; magnitude and string
// are unambiguous.
struct WorkedIdentity {
  const char* lhs;
  const char* rhs;
  double coefficient;   // of `result` under i[lhs, rhs]
  const char* result;
  bool order_ambiguous;
};

inline constexpr WorkedIdentity kWorkedIdentities[] = {
    {"XXX", "YXX", -2.0, "ZII", false},
    {"XXXX", "ZXXI", +2.0, "YIIX", true},
    {"XXXX", "YXXI", -2.0, "ZIIX", false},
    {"XXXX", "YYYX", +2.0, "ZZZI", false},
    {"XXXXX", "IIIYX", -2.0, "XXXZI", false},
    {"XXII", "IYYY", -2.0, "XZYY", false},
    {"XXXXX", "XXYYY", +2.0, "IIZZZ", true},
};

// Pauli-basis expansions of the GHZ projector Hamiltonians (unit
// coefficients; the identity term is dropped by the parser).
inline constexpr const char* kGhzText =
    "1 III\n1 ZZI\n1 ZIZ\n1 IZZ\n-1 XYY\n-1 YXY\n-1 YYX\n";

inline constexpr const char* kGhzPrimeText =
    "1 III\n1 ZII\n1 IZI\n1 IIZ\n1 ZZI\n1 ZIZ\n1 IZZ\n1 ZZZ\n-1 XXX\n";
