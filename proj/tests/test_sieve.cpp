#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cfgeo/sieve.hpp"
#include "oracles.hpp"

using namespace cfgeo;

namespace {

// Moebius function of a squarefree modulus, by trial division.
int mu_squarefree(std::uint64_t n) {
  int primes = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      ++primes;
    }
  }
  if (n > 1) ++primes;
  return primes % 2 == 0 ? 1 : -1;
}

// Direct trial-division route for the small-prime sift.
Int sift_oracle(const SiftHistogram& h, std::uint64_t z) {
  Int n = 0;
  for (const auto& [t, c] : h.by_trace) {
    std::int64_t v = t * t - 4;
    bool survives = true;
    for (std::uint64_t p = 2; p <= z && survives; ++p) {
      bool prime = p > 1;
      for (std::uint64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) prime = false;
      if (prime && v % static_cast<std::int64_t>(p) == 0) survives = false;
    }
    if (survives) n += static_cast<unsigned long>(c);
  }
  return n;
}

SiftHistogram singleton_hist() {
  SiftHistogram h;
  h.by_trace[15] = 1;
  return h;
}

std::uint64_t tau_count(std::uint64_t q) {
  std::uint64_t n = 0;
  for (std::uint64_t tau = 0; tau < q; ++tau)
    if ((tau * tau) % q == 4 % q) ++n;
  return n;
}

}  // namespace

// --- histogram -------------------------------------------------------------------

TEST_CASE("shifted values and the parity invariant") {
  CHECK(SiftHistogram::value_of(15) == 221);
  CHECK(SiftHistogram::value_of(3) == 5);
  const ProductSet pi = build_product_set(2, 400, 50, 400);
  const SiftHistogram h = sift_sequence(pi);
  CHECK(h.total() == pi.size().get_ui());
  for (const auto& [t, c] : h.by_trace) {
    CHECK(c > 0);
    const Int n = SiftHistogram::value_of(t);
    if (t % 2 == 0)
      CHECK(n % 4 == 0);
    else
      CHECK(n % 8 == 5);
  }
}

TEST_CASE("a one-word product set sifts to a single trace") {
  BallSlice one{2, 50, 2, {{1, 2}}};
  BallSlice two{2, 50, 2, {{1, 1}}};
  BallSlice three{2, 50, 2, {{2, 1}}};
  const ProductSet pi{one, two, three};
  const SiftHistogram h = sift_sequence(pi);
  REQUIRE(h.total() == 1);
  const Mat2 m = word_to_matrix({1, 2, 1, 1, 2, 1}, 2);
  CHECK(h.by_trace.count(frobenius_sq(m).get_si()) == 1);
}

TEST_CASE("sharded sift merges to the full histogram") {
  const ProductSet pi = build_product_set(2, 900, 50, 900);
  const SiftHistogram whole = sift_sequence(pi);
  SiftHistogram merged;
  for (unsigned i = 0; i < 8; ++i)
    merge_histogram(merged, sift_sequence_shard(pi, 8, i));
  CHECK(merged.by_trace == whole.by_trace);
}

// --- multiples and remainders -------------------------------------------------------

TEST_CASE("multiple counts on the singleton histogram") {
  const SiftHistogram h = singleton_hist();  // value 221 = 13 * 17
  CHECK(count_multiples(h, 1) == 1);
  CHECK(count_multiples(h, 13) == 1);
  CHECK(count_multiples(h, 17) == 1);
  CHECK(count_multiples(h, 221) == 1);
  CHECK(count_multiples(h, 5) == 0);
  CHECK(count_multiples(h, 2) == 0);
  CHECK_THROWS_AS(count_multiples(h, 9), std::invalid_argument);
  CHECK_THROWS_AS(count_multiples(h, 0), std::invalid_argument);
}

TEST_CASE("remainder terms on the singleton histogram") {
  const SiftHistogram h = singleton_hist();
  CHECK(remainder_term(h, 1) == 0);
  CHECK(remainder_term(h, 13) == Rat(1) - Rat(25, 91));
  CHECK(remainder_term(h, 5) == Rat(-3, 5));
}

TEST_CASE("multiple counts against a direct residue scan") {
  const ProductSet pi = build_product_set(2, 2500, 50, 2500);
  const SiftHistogram h = sift_sequence(pi);
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 13ull, 30ull}) {
    Int direct = 0;
    for (const auto& [t, c] : h.by_trace) {
      const Int n = SiftHistogram::value_of(t);
      if (n % static_cast<unsigned long>(q) == 0) direct += static_cast<unsigned long>(c);
    }
    CHECK(count_multiples(h, q) == direct);
  }
}

// --- dispersion -----------------------------------------------------------------------

TEST_CASE("dispersion strata recombine exactly") {
  const ProductSet pi = build_product_set(2, 2500, 50, 2500);
  const SiftHistogram h = sift_sequence(pi);
  for (std::uint64_t q : {2ull, 3ull, 5ull, 6ull, 7ull, 10ull, 13ull, 15ull, 21ull, 26ull, 30ull}) {
    for (std::uint64_t q0 : {1ull, 3ull, 10ull}) {
      const DispersionSplit split = dispersion_split(h, q, q0);
      CHECK(split.main_term + split.remainder == Rat(count_multiples(h, q)));
    }
  }
  CHECK_THROWS_AS(dispersion_split(h, 12, 1), std::invalid_argument);
}

TEST_CASE("level one keeps only the density stratum") {
  const ProductSet pi = build_product_set(2, 900, 50, 900);
  const SiftHistogram h = sift_sequence(pi);
  for (std::uint64_t q : {6ull, 15ull, 30ull}) {
    const DispersionSplit split = dispersion_split(h, q, 1);
    const Rat expect = local_density(static_cast<std::uint32_t>(q)) *
                       Rat(static_cast<long>(tau_count(q))) *
                       Rat(static_cast<long>(h.total()));
    CHECK(split.main_term == expect);
  }
}

TEST_CASE("a prime modulus has a single nontrivial stratum") {
  const ProductSet pi = build_product_set(2, 900, 50, 900);
  const SiftHistogram h = sift_sequence(pi);
  const DispersionSplit at_p = dispersion_split(h, 13, 13);
  const DispersionSplit above_p = dispersion_split(h, 13, 14);
  CHECK(at_p.main_term + at_p.remainder == above_p.main_term);
  CHECK(above_p.remainder == 0);
  CHECK(at_p.remainder != 0);
}

TEST_CASE("remainder sums use the inclusive squarefree range") {
  const SiftHistogram h = singleton_hist();
  CHECK(remainder_sum(h, 2) == abs(remainder_term(h, 2)));
  CHECK(remainder_sum(h, 4) ==
        abs(remainder_term(h, 2)) + abs(remainder_term(h, 3)));  // 4 is skipped
  CHECK(remainder_sum(h, 1) == 0);
}

// --- small-prime sift -------------------------------------------------------------------

TEST_CASE("legendre identity at tiny sieving limits") {
  const ProductSet pi = build_product_set(2, 2500, 50, 2500);
  const SiftHistogram h = sift_sequence(pi);
  for (std::uint64_t z : {2ull, 3ull, 5ull, 7ull}) {
    // Product of the primes up to z.
    std::uint64_t primorial = 1;
    for (std::uint64_t p = 2; p <= z; ++p) {
      bool prime = true;
      for (std::uint64_t q = 2; q * q <= p; ++q)
        if (p % q == 0) prime = false;
      if (prime) primorial *= p;
    }
    Rat total = 0;
    for (std::uint64_t d = 1; d <= primorial; ++d)
      if (primorial % d == 0) total += Rat(mu_squarefree(d)) * Rat(count_multiples(h, d));
    CHECK(Rat(sift_small_primes(h, z)) == total);
  }
}

TEST_CASE("sifting agrees with trial division and shrinks with z") {
  const ProductSet pi = build_product_set(2, 2500, 50, 2500);
  const SiftHistogram h = sift_sequence(pi);
  Int prev = Int(static_cast<unsigned long>(h.total()));
  for (std::uint64_t z : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    const Int s = sift_small_primes(h, z);
    CHECK(s == sift_oracle(h, z));
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("odd shifted values survive the parity sieve") {
  SiftHistogram h;
  h.by_trace[15] = 3;
  h.by_trace[20] = 5;
  CHECK(sift_small_primes(h, 2) == 3);
}

// --- trends ---------------------------------------------------------------------------

TEST_CASE("the normalized remainder shrinks along a ladder") {
  const std::vector<TrendSpec> ladder{{Int(50), Int(50), Int(50)},
                                      {Int(800), Int(50), Int(800)},
                                      {Int(12000), Int(50), Int(12000)}};
  const auto rows = remainder_trend(2, ladder, 10);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].total < rows[1].total);
  CHECK(rows[1].total < rows[2].total);
  CHECK(rows[2].normalized < rows[0].normalized);
}

// --- discrepancy ----------------------------------------------------------------------

TEST_CASE("slice counts partition the slice") {
  const BallSlice s = pigeonhole_slice(2, 50);
  const DiscrepancyReport rep = slice_discrepancy(s, 2);
  CHECK(rep.total == 4);
  CHECK(rep.group_order == 6);
  CHECK_FALSE(rep.surjective);  // four words cannot cover six classes
}

TEST_CASE("slice discrepancy decays as the slice grows") {
  double first = -1, last = -1;
  for (const Int& bound : {Int(400), Int(6400), Int(102400)}) {
    const BallSlice s = pigeonhole_slice(2, bound);
    const DiscrepancyReport rep = slice_discrepancy(s, 5);
    if (first < 0) first = rep.normalized_max;
    last = rep.normalized_max;
    CHECK(rep.total == Int(s.words.size()));
  }
  CHECK(last < first);
}

TEST_CASE("ball discrepancy decays and covers the group") {
  const DiscrepancyReport small = ball_discrepancy(2, 2500, 3);
  const DiscrepancyReport big = ball_discrepancy(2, 90000, 3);
  CHECK(big.normalized_max < small.normalized_max);
  CHECK(big.surjective);
  CHECK(big.total == count_ball(2, 90000));
  CHECK_THROWS_AS(ball_discrepancy(2, 100, 1), std::invalid_argument);
}

// --- integer ball -----------------------------------------------------------------------

TEST_CASE("integer ball scan matches the four-loop brute force") {
  for (std::int64_t bound : {2LL, 10LL, 50LL, 600LL}) {
    std::multiset<std::string> brute;
    for (const auto& m : oracle::integer_ball_bruteforce(bound)) brute.insert(m.str());
    std::multiset<std::string> fast;
    scan_integer_ball(bound, [&](const Mat2& m) {
      CHECK(m.det() == 1);
      CHECK(frobenius_sq(m) < bound);
      fast.insert(m.str());
    });
    CHECK(fast == brute);
  }
  CHECK_THROWS_AS(scan_integer_ball(0, [](const Mat2&) {}), std::invalid_argument);
}

TEST_CASE("trace multiplicities at hand-checked points") {
  CHECK(trace_multiplicity(0) == 0);
  CHECK(trace_multiplicity(1) == 0);
  CHECK(trace_multiplicity(2) == 4);
  CHECK(trace_multiplicity(3) == 16);
}

TEST_CASE("trace multiplicities match the ball layer counts") {
  std::map<std::int64_t, std::uint64_t> layer;
  scan_integer_ball(301, [&](const Mat2& m) { ++layer[frobenius_sq(m).get_si()]; });
  for (std::int64_t t = 0; t <= 300; ++t) {
    const auto it = layer.find(t);
    CHECK(trace_multiplicity(t) == (it == layer.end() ? 0 : it->second));
  }
}

TEST_CASE("trace multiplicities grow slower than any small power") {
  double worst = 0;
  for (std::int64_t t = 100; t <= 10000; ++t)
    worst = std::max(worst, trace_multiplicity(t) / std::pow(t, 0.45));
  CHECK(worst < 12.0);
}

// --- exponent plan ----------------------------------------------------------------------

TEST_CASE("the reference parameters fail exactly two constraints") {
  const ExponentPlan plan = exponent_plan(0.999, 0.1, 10.0, 0.01);
  CHECK_FALSE(plan.feasible);
  CHECK(plan.violated == std::vector<std::string>{"alpha0", "delta"});
  CHECK(plan.alpha == doctest::Approx(1.0 / 18.0 - 0.01));
  CHECK(plan.x == doctest::Approx(8.0 / 9.0 - 0.01));
  CHECK(plan.y == doctest::Approx(0.02));
  CHECK(plan.z == doctest::Approx(1.0 / 9.0 - 0.01));
  CHECK(plan.alpha0 == doctest::Approx(1e-4));
  CHECK(plan.level_exponent == doctest::Approx(plan.alpha / 4.0));
}

TEST_CASE("an expansion close to one is feasible") {
  const ExponentPlan plan = exponent_plan(0.99999, 0.1, 10.0, 0.01);
  CHECK(plan.feasible);
  CHECK(plan.violated.empty());
}

TEST_CASE("weak expansion violates the delta floor") {
  const ExponentPlan plan = exponent_plan(0.5, 0.1, 10.0, 0.01);
  CHECK_FALSE(plan.feasible);
  CHECK(std::find(plan.violated.begin(), plan.violated.end(), "delta") !=
        plan.violated.end());
  CHECK(std::find(plan.violated.begin(), plan.violated.end(), "y") ==
        plan.violated.end());
}

TEST_CASE("the level exponent approaches one seventy-second") {
  const ExponentPlan plan = exponent_plan(0.99999, 0.1, 10.0, 0.0001);
  CHECK(plan.level_exponent == doctest::Approx(1.0 / 72.0).epsilon(0.002));
}

TEST_CASE("plan domain validation") {
  CHECK_THROWS_AS(exponent_plan(0.0, 0.1, 10.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(exponent_plan(1.0, 0.1, 10.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(exponent_plan(0.9, 0.0, 10.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(exponent_plan(0.9, 0.1, 0.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(exponent_plan(0.9, 0.1, 10.0, 0.05), std::domain_error);
  CHECK_THROWS_AS(exponent_plan(0.9, 0.1, 10.0, 0.0), std::domain_error);
}
