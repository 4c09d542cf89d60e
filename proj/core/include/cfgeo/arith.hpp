// Exact integer/rational arithmetic: 2x2 unimodular matrices over mpz,
// canonical rationals, and deterministic integer factorization.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cfgeo {

using Int = mpz_class;
using Rat = mpq_class;  // kept canonical: gcd(num, den) = 1, den > 0

// Canonical rational from a fraction; throws std::invalid_argument on zero denominator.
Rat make_rat(const Int& num, const Int& den);

// Multiset of prime factors, primes strictly increasing, exponents >= 1.
using FactorMultiset = std::vector<std::pair<Int, unsigned>>;

// ---------------------------------------------------------------------------
// Mat2: 2x2 integer matrix. Public construction enforces det = +1; the
// unchecked factory is the relaxed path for callers that compose determinant
// -1 factors internally (single continued-fraction generators) and is not
// part of the stable surface.
// ---------------------------------------------------------------------------
struct Mat2 {
  Int a, b, c, d;  // row major: [[a, b], [c, d]]

  Mat2() : a(1), b(0), c(0), d(1) {}
  Mat2(Int aa, Int bb, Int cc, Int dd);  // throws unless det = +1

  static Mat2 unchecked(Int aa, Int bb, Int cc, Int dd);

  Int det() const { return a * d - b * c; }
  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }

  bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  bool operator!=(const Mat2& o) const { return !(*this == o); }

  std::string str() const;
};

Mat2 mat_mul(const Mat2& x, const Mat2& y);
Mat2 mat_inverse(const Mat2& m);  // exact inverse of a det +1 matrix
Mat2 transpose(const Mat2& m);
Mat2 gram(const Mat2& m);  // m^T m; symmetric, det +1, trace = frobenius_sq(m)

Int frobenius_sq(const Mat2& m);  // a^2 + b^2 + c^2 + d^2
Int trace(const Mat2& m);

// ---------------------------------------------------------------------------
// Factorization. Deterministic: trial division by primes below 10^6, then
// Brent's rho with a fixed parameter schedule. Primality testing is
// deterministic Miller-Rabin below 2^64 and GMP's BPSW + Miller-Rabin above
// (GMP derives its Miller-Rabin bases from the input, so results are
// reproducible). Intended input range is below 2^128.
// ---------------------------------------------------------------------------
bool is_prime(const Int& n);
FactorMultiset factorize(const Int& n);  // n >= 1; factorize(1) = {}; throws on n <= 0
Int eval_factors(const FactorMultiset& f);
bool is_squarefree(const FactorMultiset& f);

// True when t^2 - 4 is squarefree (t >= 3). Even t always gives false since
// then 4 divides t^2 - 4; odd t splits as coprime halves (t-2)(t+2).
bool is_squarefree_disc(const Int& t);

// Fundamental discriminant test: D ≡ 1 (mod 4) and squarefree, or D = 4m with
// m squarefree and m ≡ 2 or 3 (mod 4). D must be positive and non-square.
bool is_fundamental_disc(const Int& D);

// Primes below bound, increasing. Cached internally for the common bounds.
const std::vector<std::uint32_t>& primes_below(std::uint32_t bound);

}  // namespace cfgeo
