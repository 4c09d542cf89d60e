// Brute-force exact computations over SL2(Z/q) for squarefree q: local
// densities, the fluctuation function and its mean, the signed orthogonal
// subgroup, correlation sums, and the sieve density.
#pragma once

#include <cstdint>
#include <vector>

#include "cfgeo/arith.hpp"

namespace cfgeo {

// Matrix over Z/q with determinant 1, entries reduced to [0, q).
struct ModMat {
  std::uint32_t q{1};
  std::uint32_t a{1}, b{0}, c{0}, d{1};
  bool operator==(const ModMat&) const = default;
};

ModMat mod_reduce(const Mat2& g, std::uint32_t q);
ModMat mod_mul(const ModMat& x, const ModMat& y);
ModMat mod_transpose(const ModMat& m);
std::uint32_t mod_frob(const ModMat& m);  // a^2+b^2+c^2+d^2 mod q

// |SL2(Z/q)| for squarefree q, multiplicative: p(p-1)(p+1) per prime.
Int sl2_size(std::uint32_t q);

// Full element list; brute force, capped at q <= 60 squarefree.
std::vector<ModMat> sl2_enumerate(std::uint32_t q);

// #{(x,y) mod p : x^2 + y^2 = ell}, p an odd prime. By direct count.
std::uint64_t sum_two_squares_count(std::uint32_t p, std::uint32_t ell);

// Density of frob = +-2 in SL2(Z/q), squarefree q, multiplicative. Closed
// form per prime: 1/3 at 2, (2p-1)/(p(p+1)) for p = 1 mod 4, 1/(p(p-1)) for
// p = 3 mod 4. The brute-force version counts matrices directly and is
// independent of the sign choice.
Rat local_density(std::uint32_t q);
Rat local_density_bruteforce(std::uint32_t p, int eps);

// Fluctuation of the divisibility indicator around its density:
// product over p | q of (1{n = 0 mod p} - local_density(p)).
Rat density_fluctuation(std::uint32_t q, const Int& n);

// Average of density_fluctuation(p, frob(g*omega) - 2*eps) over g in
// SL2(Z/p). Exactly zero for every coset omega and sign.
Rat fluctuation_mean(std::uint32_t p, const ModMat& omega, int eps);

// Signed orthogonal group: k in SL2(Z/p) with transpose(k)*k = +-I.
bool in_signed_orthogonal(const ModMat& k);
std::vector<ModMat> signed_orthogonal(std::uint32_t p);

// Exact correlation of two fluctuation factors over the full group:
// (1/|SL2|) * sum_g Xi(p; frob(g*omega) - 2*eps) * Xi(p; frob(g*omega2) - 2*eps2).
Rat fluctuation_correlation(std::uint32_t p, const ModMat& omega, const ModMat& omega2,
                            int eps, int eps2);

// Sieve density: 1/3 at p=2, twice the local density at odd p, multiplicative.
Rat sieve_density(std::uint32_t q);

// prod_{w <= p < z} (1 - sieve_density(p))^{-1} against the Mertens-style
// comparator (log z / log w)^2.
struct SieveProduct {
  double product{1.0};
  double comparator{1.0};
  double ratio{1.0};
};
SieveProduct sieve_product(std::uint32_t w, std::uint32_t z);

}  // namespace cfgeo
