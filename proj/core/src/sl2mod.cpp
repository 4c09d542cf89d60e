#include "cfgeo/sl2mod.hpp"

#include <cmath>
#include <stdexcept>

namespace cfgeo {

namespace {

constexpr std::uint32_t kEnumerationCap = 60;

void require_squarefree_modulus(std::uint32_t q) {
  if (q < 1) throw std::invalid_argument("modulus must be positive");
  if (!is_squarefree(factorize(Int(q)))) throw std::invalid_argument("modulus must be squarefree");
}

std::vector<std::uint32_t> prime_factors_u32(std::uint32_t q) {
  std::vector<std::uint32_t> ps;
  for (std::uint32_t p = 2; static_cast<std::uint64_t>(p) * p <= q; ++p) {
    if (q % p == 0) {
      ps.push_back(p);
      while (q % p == 0) q /= p;
    }
  }
  if (q > 1) ps.push_back(q);
  return ps;
}

void require_sign(int eps) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("sign must be +1 or -1");
}

void require_odd_prime(std::uint32_t p) {
  if (p == 2 || !is_prime(Int(p))) throw std::invalid_argument("need an odd prime");
}

Rat local_density_prime(std::uint32_t p) {
  if (p == 2) return make_rat(1, 3);
  if (p % 4 == 1) return make_rat(2 * Int(p) - 1, Int(p) * (p + 1));
  return make_rat(1, Int(p) * (p - 1));
}

}  // namespace

ModMat mod_reduce(const Mat2& g, std::uint32_t q) {
  if (q < 1) throw std::invalid_argument("modulus must be positive");
  auto red = [&](const Int& v) {
    Int r = v % q;
    if (r < 0) r += q;
    return static_cast<std::uint32_t>(r.get_ui());
  };
  return ModMat{q, red(g.a), red(g.b), red(g.c), red(g.d)};
}

ModMat mod_mul(const ModMat& x, const ModMat& y) {
  if (x.q != y.q) throw std::invalid_argument("modulus mismatch");
  const std::uint64_t q = x.q;
  auto r = [&](std::uint64_t v) { return static_cast<std::uint32_t>(v % q); };
  return ModMat{x.q,
                r(std::uint64_t(x.a) * y.a + std::uint64_t(x.b) * y.c),
                r(std::uint64_t(x.a) * y.b + std::uint64_t(x.b) * y.d),
                r(std::uint64_t(x.c) * y.a + std::uint64_t(x.d) * y.c),
                r(std::uint64_t(x.c) * y.b + std::uint64_t(x.d) * y.d)};
}

ModMat mod_transpose(const ModMat& m) { return ModMat{m.q, m.a, m.c, m.b, m.d}; }

std::uint32_t mod_frob(const ModMat& m) {
  const std::uint64_t q = m.q;
  std::uint64_t s = (std::uint64_t(m.a) * m.a + std::uint64_t(m.b) * m.b) % q;
  s = (s + std::uint64_t(m.c) * m.c) % q;
  s = (s + std::uint64_t(m.d) * m.d) % q;
  return static_cast<std::uint32_t>(s);
}

Int sl2_size(std::uint32_t q) {
  require_squarefree_modulus(q);
  Int n = 1;
  for (auto p : prime_factors_u32(q)) n *= Int(p) * (p - 1) * (p + 1);
  return n;
}

std::vector<ModMat> sl2_enumerate(std::uint32_t q) {
  require_squarefree_modulus(q);
  if (q < 2 || q > kEnumerationCap)
    throw std::invalid_argument("enumeration supported for 2 <= q <= 60 only");
  std::vector<ModMat> out;
  const std::uint64_t qq = q;
  for (std::uint32_t a = 0; a < q; ++a)
    for (std::uint32_t b = 0; b < q; ++b)
      for (std::uint32_t c = 0; c < q; ++c)
        for (std::uint32_t d = 0; d < q; ++d) {
          if ((std::uint64_t(a) * d + qq * qq - std::uint64_t(b) * c) % qq == 1)
            out.push_back(ModMat{q, a, b, c, d});
        }
  return out;
}

std::uint64_t sum_two_squares_count(std::uint32_t p, std::uint32_t ell) {
  require_odd_prime(p);
  std::uint64_t n = 0;
  for (std::uint64_t x = 0; x < p; ++x)
    for (std::uint64_t y = 0; y < p; ++y)
      if ((x * x + y * y) % p == ell % p) ++n;
  return n;
}

Rat local_density(std::uint32_t q) {
  require_squarefree_modulus(q);
  Rat v = 1;
  for (auto p : prime_factors_u32(q)) v *= local_density_prime(p);
  return v;
}

Rat local_density_bruteforce(std::uint32_t p, int eps) {
  require_sign(eps);
  if (!is_prime(Int(p))) throw std::invalid_argument("brute-force density needs a prime");
  const auto group = sl2_enumerate(p);
  const std::uint32_t target = static_cast<std::uint32_t>(((2 * eps) % int(p) + p) % p);
  std::uint64_t hits = 0;
  for (const auto& g : group)
    if (mod_frob(g) == target) ++hits;
  return make_rat(Int(hits), Int(group.size()));
}

Rat density_fluctuation(std::uint32_t q, const Int& n) {
  require_squarefree_modulus(q);
  Rat v = 1;
  for (auto p : prime_factors_u32(q)) {
    Rat term = (n % p == 0) ? Rat(1) : Rat(0);
    term -= local_density_prime(p);
    v *= term;
  }
  return v;
}

Rat fluctuation_mean(std::uint32_t p, const ModMat& omega, int eps) {
  require_sign(eps);
  if (omega.q != p) throw std::invalid_argument("coset modulus mismatch");
  const auto group = sl2_enumerate(p);
  const std::uint32_t target = static_cast<std::uint32_t>(((2 * eps) % int(p) + p) % p);
  std::uint64_t hits = 0;
  for (const auto& g : group)
    if (mod_frob(mod_mul(g, omega)) == target) ++hits;
  // Sum of (indicator - rho) over the group, divided by the order.
  return make_rat(Int(hits), Int(group.size())) - local_density_prime(p);
}

bool in_signed_orthogonal(const ModMat& k) {
  const std::uint32_t q = k.q;
  ModMat kk = mod_mul(mod_transpose(k), k);
  const bool plus = kk.a == 1 % q && kk.d == 1 % q && kk.b == 0 && kk.c == 0;
  const std::uint32_t m1 = (q - 1) % q;
  const bool minus = kk.a == m1 && kk.d == m1 && kk.b == 0 && kk.c == 0;
  return plus || minus;
}

std::vector<ModMat> signed_orthogonal(std::uint32_t p) {
  require_odd_prime(p);
  std::vector<ModMat> out;
  for (const auto& k : sl2_enumerate(p))
    if (in_signed_orthogonal(k)) out.push_back(k);
  return out;
}

Rat fluctuation_correlation(std::uint32_t p, const ModMat& omega, const ModMat& omega2,
                            int eps, int eps2) {
  require_sign(eps);
  require_sign(eps2);
  if (omega.q != p || omega2.q != p) throw std::invalid_argument("coset modulus mismatch");
  const auto group = sl2_enumerate(p);
  const std::uint32_t t1 = static_cast<std::uint32_t>(((2 * eps) % int(p) + p) % p);
  const std::uint32_t t2 = static_cast<std::uint32_t>(((2 * eps2) % int(p) + p) % p);
  // Tally the four indicator combinations, then combine exactly.
  std::uint64_t n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (const auto& g : group) {
    const bool h1 = mod_frob(mod_mul(g, omega)) == t1;
    const bool h2 = mod_frob(mod_mul(g, omega2)) == t2;
    if (h1 && h2)
      ++n11;
    else if (h1)
      ++n10;
    else if (h2)
      ++n01;
    else
      ++n00;
  }
  const Rat rho = local_density_prime(p);
  const Rat one_m = Rat(1) - rho;
  Rat sum = Rat(Int(n11)) * one_m * one_m;
  sum -= Rat(Int(n10) + Int(n01)) * one_m * rho;
  sum += Rat(Int(n00)) * rho * rho;
  return sum / Rat(Int(group.size()));
}

Rat sieve_density(std::uint32_t q) {
  require_squarefree_modulus(q);
  Rat v = 1;
  for (auto p : prime_factors_u32(q)) {
    Rat term = local_density_prime(p);
    if (p != 2) term *= 2;
    v *= term;
  }
  return v;
}

SieveProduct sieve_product(std::uint32_t w, std::uint32_t z) {
  if (w < 2 || z <= w) throw std::invalid_argument("need 2 <= w < z");
  SieveProduct r;
  for (std::uint32_t p = w; p < z; ++p) {
    if (!is_prime(Int(p))) continue;
    Rat f = Rat(1) - sieve_density(p);
    r.product *= 1.0 / f.get_d();
  }
  const double lw = std::log(static_cast<double>(w));
  const double lz = std::log(static_cast<double>(z));
  r.comparator = (lz / lw) * (lz / lw);
  r.ratio = r.product / r.comparator;
  return r;
}

}  // namespace cfgeo
