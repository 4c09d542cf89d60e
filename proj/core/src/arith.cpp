#include "cfgeo/arith.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cfgeo {

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// ---- Mat2 -----------------------------------------------------------------

Mat2::Mat2(Int aa, Int bb, Int cc, Int dd)
    : a(std::move(aa)), b(std::move(bb)), c(std::move(cc)), d(std::move(dd)) {
  if (det() != 1) throw std::invalid_argument("Mat2: determinant must be +1, got " + det().get_str());
}

Mat2 Mat2::unchecked(Int aa, Int bb, Int cc, Int dd) {
  Mat2 m;
  m.a = std::move(aa);
  m.b = std::move(bb);
  m.c = std::move(cc);
  m.d = std::move(dd);
  return m;
}

std::string Mat2::str() const {
  std::ostringstream os;
  os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
  return os.str();
}

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  return Mat2::unchecked(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                         x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d);
}

Mat2 mat_inverse(const Mat2& m) {
  if (m.det() != 1) throw std::invalid_argument("mat_inverse: determinant must be +1");
  return Mat2::unchecked(m.d, -m.b, -m.c, m.a);
}

Mat2 transpose(const Mat2& m) { return Mat2::unchecked(m.a, m.c, m.b, m.d); }

Mat2 gram(const Mat2& m) {
  return Mat2::unchecked(m.a * m.a + m.c * m.c, m.a * m.b + m.c * m.d,
                         m.a * m.b + m.c * m.d, m.b * m.b + m.d * m.d);
}

Int frobenius_sq(const Mat2& m) { return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d; }

Int trace(const Mat2& m) { return m.a + m.d; }

// ---- prime sieve ----------------------------------------------------------

const std::vector<std::uint32_t>& primes_below(std::uint32_t bound) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::vector<std::uint32_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(bound);
  if (it != cache.end()) return it->second;

  std::vector<bool> comp(bound, false);
  std::vector<std::uint32_t> ps;
  for (std::uint64_t i = 2; i < bound; ++i) {
    if (comp[i]) continue;
    ps.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j < bound; j += i) comp[j] = true;
  }
  return cache.emplace(bound, std::move(ps)).first->second;
}

// ---- primality ------------------------------------------------------------

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod_u64(u64 x, u64 y, u64 m) { return static_cast<u64>((u128)x * y % m); }

u64 powmod_u64(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for n < 2^64 (first twelve primes as bases cover
// well past that range).
bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod_u64(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

bool fits_u64(const Int& n) { return n.fits_ulong_p() || mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

u64 to_u64(const Int& n) {
  u64 lo = mpz_getlimbn(n.get_mpz_t(), 0);
  return lo;
}

// Brent's cycle-finding rho with deterministic constants. n must be composite,
// odd, > 1, and free of factors below the trial division bound.
Int rho_split(const Int& n) {
  for (unsigned long c = 1;; ++c) {
    Int x = 2, y = 2, q = 1, g = 1, xs = 0;
    unsigned long r = 1, m = 128;
    auto step = [&](Int& v) { v = (v * v + c) % n; };
    while (g == 1) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) step(y);
      for (unsigned long k = 0; k < r && g == 1; k += m) {
        xs = y;
        unsigned long lim = std::min(m, r - k);
        for (unsigned long i = 0; i < lim; ++i) {
          step(y);
          Int diff = x - y;
          if (diff < 0) diff = -diff;
          q = q * diff % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      r *= 2;
    }
    if (g == n) {
      // backtrack one step at a time
      g = 1;
      y = xs;
      while (g == 1) {
        step(y);
        Int diff = x - y;
        if (diff < 0) diff = -diff;
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      }
    }
    if (g != n) return g;
    // rare: whole cycle collapsed, retry with the next constant
  }
}

void factor_rec(const Int& n, std::map<Int, unsigned>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out[n] += 1;
    return;
  }
  // perfect power short-circuit keeps rho off squares
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    for (unsigned k = 2; k <= mpz_sizeinbase(n.get_mpz_t(), 2); ++k) {
      Int root;
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) {
        std::map<Int, unsigned> sub;
        factor_rec(root, sub);
        for (auto& [p, e] : sub) out[p] += e * k;
        return;
      }
    }
  }
  Int g = rho_split(n);
  factor_rec(g, out);
  factor_rec(n / g, out);
}

}  // namespace

bool is_prime(const Int& n) {
  if (n < 2) return false;
  if (fits_u64(n)) return is_prime_u64(to_u64(n));
  // BPSW + extra Miller-Rabin rounds; GMP seeds the bases from n itself, so
  // the answer is reproducible run to run.
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

FactorMultiset factorize(const Int& n) {
  if (n <= 0) throw std::invalid_argument("factorize: input must be positive");
  FactorMultiset out;
  if (n == 1) return out;

  Int rem = n;
  const auto& ps = primes_below(1000000);
  for (std::uint32_t p : ps) {
    if (Int(p) * p > rem) break;
    if (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
        rem /= p;
        ++e;
      }
      out.emplace_back(Int(p), e);
    }
  }
  if (rem > 1) {
    if (Int(999983) * 999983 > rem || is_prime(rem)) {
      // remainder below the square of the trial bound is prime by exhaustion
      out.emplace_back(rem, 1);
    } else {
      std::map<Int, unsigned> big;
      factor_rec(rem, big);
      for (auto& [p, e] : big) out.emplace_back(p, e);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

Int eval_factors(const FactorMultiset& f) {
  Int n = 1;
  for (const auto& [p, e] : f) {
    for (unsigned i = 0; i < e; ++i) n *= p;
  }
  return n;
}

bool is_squarefree(const FactorMultiset& f) {
  return std::all_of(f.begin(), f.end(), [](const auto& pe) { return pe.second == 1; });
}

bool is_squarefree_disc(const Int& t) {
  if (t < 3) throw std::invalid_argument("is_squarefree_disc: trace must be >= 3");
  if (mpz_even_p(t.get_mpz_t())) return false;  // 4 | t^2 - 4
  // gcd(t-2, t+2) divides 4, and both are odd, so the halves are coprime.
  return is_squarefree(factorize(t - 2)) && is_squarefree(factorize(t + 2));
}

bool is_fundamental_disc(const Int& D) {
  if (D <= 0) throw std::invalid_argument("is_fundamental_disc: D must be positive");
  if (mpz_perfect_square_p(D.get_mpz_t())) throw std::invalid_argument("is_fundamental_disc: D must be non-square");
  long r = mpz_fdiv_ui(D.get_mpz_t(), 4);
  if (r == 1) return is_squarefree(factorize(D));
  if (r == 0) {
    Int m = D / 4;
    long rm = mpz_fdiv_ui(m.get_mpz_t(), 4);
    if (rm != 2 && rm != 3) return false;
    return is_squarefree(factorize(m));
  }
  return false;  // D ≡ 2, 3 (mod 4) is not a discriminant of any form
}

}  // namespace cfgeo
