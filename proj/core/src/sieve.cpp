#include "cfgeo/sieve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cfgeo {

namespace {

std::int64_t isqrt64(std::int64_t n) {
  if (n < 0) return -1;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::int64_t trace_to_i64(const Int& t) {
  if (!t.fits_slong_p()) throw std::overflow_error("trace exceeds 64 bits");
  return static_cast<std::int64_t>(t.get_si());
}

bool squarefree_u64(std::uint64_t n) {
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return false;
    }
  }
  return true;
}

void require_squarefree_u64(std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("modulus must be positive");
  if (!squarefree_u64(q)) throw std::invalid_argument("modulus must be squarefree");
}

std::vector<std::uint64_t> prime_factors_u64(std::uint64_t q) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 2; p * p <= q; ++p) {
    if (q % p == 0) {
      ps.push_back(p);
      while (q % p == 0) q /= p;
    }
  }
  if (q > 1) ps.push_back(q);
  return ps;
}

}  // namespace

std::uint64_t SiftHistogram::total() const {
  std::uint64_t n = 0;
  for (const auto& [t, c] : by_trace) n += c;
  return n;
}

Int SiftHistogram::value_of(std::int64_t t) { return Int(t) * Int(t) - 4; }

SiftHistogram sift_sequence(const ProductSet& pi) {
  return sift_sequence_shard(pi, 1, 0);
}

SiftHistogram sift_sequence_shard(const ProductSet& pi, unsigned shard_count,
                                  unsigned shard_index) {
  SiftHistogram h;
  pi.for_each_shard(shard_count, shard_index, [&](const Mat2& m) {
    ++h.by_trace[trace_to_i64(frobenius_sq(m))];
  });
  return h;
}

void merge_histogram(SiftHistogram& into, const SiftHistogram& part) {
  for (const auto& [t, c] : part.by_trace) into.by_trace[t] += c;
}

Int count_multiples(const SiftHistogram& h, std::uint64_t q) {
  require_squarefree_u64(q);
  if (q == 1) return Int(static_cast<unsigned long>(h.total()));
  const auto qi = static_cast<std::int64_t>(q);
  Int n = 0;
  for (const auto& [t, c] : h.by_trace) {
    const std::int64_t r = ((t % qi) + qi) % qi;
    if ((r * r - 4) % qi == 0) n += static_cast<unsigned long>(c);
  }
  return n;
}

Rat remainder_term(const SiftHistogram& h, std::uint64_t q) {
  const Rat expected = sieve_density(static_cast<std::uint32_t>(q)) *
                       Rat(Int(static_cast<unsigned long>(h.total())));
  Rat r = Rat(count_multiples(h, q)) - expected;
  r.canonicalize();
  return r;
}

DispersionSplit dispersion_split(const SiftHistogram& h, std::uint64_t modulus,
                                 std::uint64_t q0) {
  require_squarefree_u64(modulus);
  if (modulus > 1000000) throw std::invalid_argument("dispersion modulus too large");
  const auto mi = static_cast<std::int64_t>(modulus);

  // Residue profile of the trace multiset mod the full modulus.
  std::vector<std::uint64_t> residue_count(modulus, 0);
  for (const auto& [t, c] : h.by_trace) residue_count[((t % mi) + mi) % mi] += c;

  // Square roots of 4 mod the modulus.
  std::vector<std::int64_t> taus;
  for (std::int64_t tau = 0; tau < mi; ++tau)
    if ((tau * tau - 4) % mi == 0) taus.push_back(tau);

  // All divisors of the squarefree modulus.
  const auto primes = prime_factors_u64(modulus);
  std::vector<std::uint64_t> divisors{1};
  for (auto p : primes) {
    const std::size_t n = divisors.size();
    for (std::size_t i = 0; i < n; ++i) divisors.push_back(divisors[i] * p);
  }
  std::sort(divisors.begin(), divisors.end());

  DispersionSplit split;
  for (auto q : divisors) {
    const auto qi = static_cast<std::int64_t>(q);
    // Collapse the residue profile from the modulus down to q.
    std::vector<std::uint64_t> coarse(q, 0);
    for (std::uint64_t r = 0; r < modulus; ++r) coarse[r % q] += residue_count[r];
    // Fluctuation weights only depend on the class of t - tau mod q.
    std::vector<Rat> weight(q);
    for (std::int64_t m = 0; m < qi; ++m)
      weight[static_cast<std::size_t>(m)] =
          density_fluctuation(static_cast<std::uint32_t>(q), Int(m));
    const Rat rho_rest = local_density(static_cast<std::uint32_t>(modulus / q));
    Rat stratum = 0;
    for (auto tau : taus) {
      for (std::int64_t r = 0; r < qi; ++r) {
        const std::uint64_t c = coarse[static_cast<std::size_t>(r)];
        if (c == 0) continue;
        const std::int64_t m = ((r - tau) % qi + qi) % qi;
        stratum += weight[static_cast<std::size_t>(m)] *
                   Rat(Int(static_cast<unsigned long>(c)));
      }
    }
    stratum *= rho_rest;
    stratum.canonicalize();
    if (q == 1 || q < q0)
      split.main_term += stratum;
    else
      split.remainder += stratum;
  }
  split.main_term.canonicalize();
  split.remainder.canonicalize();
  return split;
}

Rat remainder_sum(const SiftHistogram& h, std::uint64_t q_max) {
  Rat sum = 0;
  for (std::uint64_t q = 2; q <= q_max; ++q) {
    if (!squarefree_u64(q)) continue;
    sum += abs(remainder_term(h, q));
  }
  sum.canonicalize();
  return sum;
}

std::vector<TrendRow> remainder_trend(unsigned alphabet,
                                      const std::vector<TrendSpec>& ladder,
                                      std::uint64_t q_max) {
  std::vector<TrendRow> rows;
  rows.reserve(ladder.size());
  for (const auto& spec : ladder) {
    const ProductSet pi = build_product_set(alphabet, spec.x_sq, spec.y_sq, spec.z_sq);
    const SiftHistogram h = sift_sequence(pi);
    TrendRow row;
    row.spec = spec;
    row.total = h.total();
    row.remainder = remainder_sum(h, q_max).get_d();
    row.normalized = row.total == 0 ? 0.0 : row.remainder / static_cast<double>(row.total);
    rows.push_back(row);
  }
  return rows;
}

Int sift_small_primes(const SiftHistogram& h, std::uint64_t z) {
  const auto primes = primes_below(z + 1);
  Int n = 0;
  for (const auto& [t, c] : h.by_trace) {
    bool survives = true;
    for (std::uint32_t p : primes) {
      const auto pi = static_cast<std::int64_t>(p);
      if (pi == 2) {
        // t^2 - 4 is even exactly when t is.
        if (t % 2 == 0) survives = false;
      } else {
        const std::int64_t r = ((t % pi) + pi) % pi;
        if (r == 2 || r == pi - 2) survives = false;
      }
      if (!survives) break;
    }
    if (survives) n += static_cast<unsigned long>(c);
  }
  return n;
}

namespace {

struct ModCounter {
  std::vector<ModMat> group;
  std::map<std::array<std::uint32_t, 4>, std::size_t> index;
  std::vector<std::uint64_t> counts;

  explicit ModCounter(std::vector<ModMat> g) : group(std::move(g)) {
    counts.assign(group.size(), 0);
    for (std::size_t i = 0; i < group.size(); ++i)
      index[{group[i].a, group[i].b, group[i].c, group[i].d}] = i;
  }

  void add(const ModMat& m) {
    auto it = index.find({m.a, m.b, m.c, m.d});
    if (it == index.end()) throw std::logic_error("reduction left the mod group");
    ++counts[it->second];
  }

  DiscrepancyReport report() const {
    DiscrepancyReport rep;
    rep.group_order = group.size();
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    rep.total = Int(static_cast<unsigned long>(total));
    rep.surjective = true;
    double worst = 0.0;
    for (auto c : counts) {
      if (c == 0) rep.surjective = false;
      const double dev =
          total == 0 ? 0.0
                     : std::abs(static_cast<double>(c) * static_cast<double>(group.size()) /
                                    static_cast<double>(total) -
                                1.0);
      worst = std::max(worst, dev);
    }
    rep.normalized_max = total == 0 ? 0.0 : worst;
    return rep;
  }
};

// Determinant-one matrices mod q for arbitrary q >= 2, by direct scan.
std::vector<ModMat> all_unimodular(std::uint32_t q) {
  if (q < 2 || q > 64) throw std::invalid_argument("modulus out of scan range");
  std::vector<ModMat> out;
  for (std::uint32_t a = 0; a < q; ++a)
    for (std::uint32_t b = 0; b < q; ++b)
      for (std::uint32_t c = 0; c < q; ++c)
        for (std::uint32_t d = 0; d < q; ++d) {
          const std::uint64_t det =
              (static_cast<std::uint64_t>(a) * d + static_cast<std::uint64_t>(q) * q -
               static_cast<std::uint64_t>(b) * c % (static_cast<std::uint64_t>(q) * q)) %
              q;
          if (det == 1 % q) out.push_back(ModMat{q, a, b, c, d});
        }
  return out;
}

}  // namespace

DiscrepancyReport slice_discrepancy(const BallSlice& slice, std::uint32_t q) {
  ModCounter counter(sl2_enumerate(q));
  for (const auto& w : slice.words)
    counter.add(mod_reduce(word_to_matrix(w, slice.alphabet), q));
  return counter.report();
}

DiscrepancyReport ball_discrepancy(unsigned alphabet, const Int& norm_sq,
                                   std::uint32_t q) {
  ModCounter counter(all_unimodular(q));
  scan_ball(alphabet, norm_sq,
            [&](const Word&, const Mat2& m) { counter.add(mod_reduce(m, q)); });
  return counter.report();
}

void scan_integer_ball(std::int64_t frob_bound,
                       const std::function<void(const Mat2&)>& fn) {
  if (frob_bound < 1) throw std::invalid_argument("need a positive norm bound");
  if (frob_bound > 4000000) throw std::invalid_argument("integer ball bound too large");

  // Smallest prime factor table for fast divisor lists of |ad - 1|.
  const auto cap = static_cast<std::size_t>(frob_bound) + 2;
  std::vector<std::uint32_t> spf(cap, 0);
  for (std::size_t i = 2; i < cap; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j < cap; j += i)
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
  }

  const std::int64_t amax = isqrt64(frob_bound - 1);
  std::vector<std::int64_t> divisors;
  for (std::int64_t a = -amax; a <= amax; ++a) {
    for (std::int64_t d = -amax; d <= amax; ++d) {
      const std::int64_t rem = frob_bound - a * a - d * d;
      if (rem <= 0) continue;
      const std::int64_t m = a * d - 1;
      if (m == 0) {
        const std::int64_t cmax = isqrt64(rem - 1);
        for (std::int64_t c = -cmax; c <= cmax; ++c)
          fn(Mat2::unchecked(Int(a), Int(0), Int(c), Int(d)));
        for (std::int64_t b = -cmax; b <= cmax; ++b)
          if (b != 0) fn(Mat2::unchecked(Int(a), Int(b), Int(0), Int(d)));
        continue;
      }
      std::int64_t mm = std::abs(m);
      divisors.assign(1, 1);
      while (mm > 1) {
        const std::int64_t p = spf[static_cast<std::size_t>(mm)];
        unsigned e = 0;
        while (mm % p == 0) {
          mm /= p;
          ++e;
        }
        const std::size_t n = divisors.size();
        std::int64_t pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
          pk *= p;
          for (std::size_t i = 0; i < n; ++i) divisors.push_back(divisors[i] * pk);
        }
      }
      std::sort(divisors.begin(), divisors.end());
      for (auto u : divisors) {
        const std::int64_t v = m / u;
        if (u * u + v * v < rem) {
          fn(Mat2::unchecked(Int(a), Int(u), Int(v), Int(d)));
          fn(Mat2::unchecked(Int(a), Int(-u), Int(-v), Int(d)));
        }
      }
    }
  }
}

std::uint64_t trace_multiplicity(std::int64_t t) {
  if (t < 0) return 0;
  std::uint64_t count = 0;
  const std::int64_t amax = isqrt64(t);
  for (std::int64_t a = -amax; a <= amax; ++a) {
    for (std::int64_t d = -amax; d <= amax; ++d) {
      const std::int64_t s = t - a * a - d * d;
      if (s < 0) continue;
      const std::int64_t m = a * d - 1;
      const std::int64_t ksq = s + 2 * m;
      const std::int64_t jsq = s - 2 * m;
      if (ksq < 0 || jsq < 0) continue;
      const std::int64_t k = isqrt64(ksq);
      const std::int64_t j = isqrt64(jsq);
      if (k * k != ksq || j * j != jsq) continue;
      if (((k ^ j) & 1) != 0) continue;
      count += static_cast<std::uint64_t>(k > 0 ? 2 : 1) *
               static_cast<std::uint64_t>(j > 0 ? 2 : 1);
    }
  }
  return count;
}

ExponentPlan exponent_plan(double delta, double theta, double cconst, double eta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  if (!(theta > 0.0)) throw std::domain_error("theta must be positive");
  if (!(cconst > 0.0)) throw std::domain_error("the constant must be positive");
  if (!(eta > 0.0 && eta < 1.0 / 36.0))
    throw std::domain_error("eta must lie in (0,1/36)");

  ExponentPlan plan;
  plan.delta = delta;
  plan.theta = theta;
  plan.cconst = cconst;
  plan.eta = eta;
  plan.alpha = 1.0 / 18.0 - eta;
  plan.x = 8.0 / 9.0 - eta;
  plan.y = 2.0 * eta;
  plan.z = 1.0 / 9.0 - eta;
  plan.alpha0 = theta * eta / cconst;
  plan.level_exponent = plan.alpha / 4.0;

  const double leak = (1.0 - delta) * (plan.x + plan.z);
  if (!(cconst * plan.alpha0 < theta * plan.y)) plan.violated.push_back("y");
  if (!(4.0 * plan.alpha + leak < plan.x / 4.0)) plan.violated.push_back("x");
  if (!(leak < plan.alpha0 / 2.0)) plan.violated.push_back("alpha0");
  if (!(plan.alpha / 2.0 + leak < plan.z / 4.0)) plan.violated.push_back("z");
  const double delta_floor = 1.0 - (theta * eta / (2.0 * cconst)) / (1.0 - 2.0 * eta);
  if (!(delta > delta_floor)) plan.violated.push_back("delta");
  plan.feasible = plan.violated.empty();
  return plan;
}

}  // namespace cfgeo
