#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cfgeo/arith.hpp"
#include "cfgeo/semigroup.hpp"
#include "cfgeo/sl2mod.hpp"

namespace cfgeo {

// Multiset of Frobenius traces t collected from a product set. The sifted
// value attached to a trace is the shifted discriminant t^2 - 4.
struct SiftHistogram {
  std::map<std::int64_t, std::uint64_t> by_trace;

  std::uint64_t total() const;
  static Int value_of(std::int64_t t);
};

SiftHistogram sift_sequence(const ProductSet& pi);
SiftHistogram sift_sequence_shard(const ProductSet& pi, unsigned shard_count,
                                  unsigned shard_index);
void merge_histogram(SiftHistogram& into, const SiftHistogram& part);

// a_q: how many sequence members have q dividing t^2 - 4. q squarefree, q = 1
// counts everything.
Int count_multiples(const SiftHistogram& h, std::uint64_t q);

// r(q) = a_q - beta(q) * |sequence|, kept exact.
Rat remainder_term(const SiftHistogram& h, std::uint64_t q);

// Dispersion decomposition of a_q at level q0: strata with divisor 1 or with
// divisor below q0 form the main term, the rest is the remainder. The two
// parts always recombine to a_q exactly.
struct DispersionSplit {
  Rat main_term = 0;
  Rat remainder = 0;
};
DispersionSplit dispersion_split(const SiftHistogram& h, std::uint64_t modulus,
                                 std::uint64_t q0);

// Sum of |r(q)| over squarefree q with 2 <= q <= q_max.
Rat remainder_sum(const SiftHistogram& h, std::uint64_t q_max);

struct TrendSpec {
  Int x_sq = 0;
  Int y_sq = 0;
  Int z_sq = 0;
};
struct TrendRow {
  TrendSpec spec;
  std::uint64_t total = 0;
  double remainder = 0.0;
  double normalized = 0.0;
};
std::vector<TrendRow> remainder_trend(unsigned alphabet,
                                      const std::vector<TrendSpec>& ladder,
                                      std::uint64_t q_max);

// How many sequence members have t^2 - 4 free of prime factors <= z.
Int sift_small_primes(const SiftHistogram& h, std::uint64_t z);

// Distribution of a family over the mod-q group: worst relative deviation
// from uniform, whether every class is hit, and the family size.
struct DiscrepancyReport {
  double normalized_max = 0.0;
  bool surjective = false;
  Int total = 0;
  std::uint64_t group_order = 0;
};
DiscrepancyReport slice_discrepancy(const BallSlice& slice, std::uint32_t q);
DiscrepancyReport ball_discrepancy(unsigned alphabet, const Int& norm_sq,
                                   std::uint32_t q);

// All integer determinant-one matrices with squared Frobenius norm below the
// bound, visited in a fixed deterministic order.
void scan_integer_ball(std::int64_t frob_bound,
                       const std::function<void(const Mat2&)>& fn);

// Number of integer determinant-one matrices whose squared Frobenius norm is
// exactly t.
std::uint64_t trace_multiplicity(std::int64_t t);

// Exponent bookkeeping for the sieve levels. All exponents are relative to
// the ball radius; feasible records whether the five constraints hold.
struct ExponentPlan {
  double delta = 0.0;
  double theta = 0.0;
  double cconst = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double alpha0 = 0.0;
  double level_exponent = 0.0;
  bool feasible = false;
  std::vector<std::string> violated;
};
ExponentPlan exponent_plan(double delta, double theta, double cconst, double eta);

}  // namespace cfgeo
