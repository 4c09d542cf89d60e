// Indefinite binary quadratic forms: Gauss reduction cycles as conjugacy
// class identifiers, reciprocity and primitivity tests, trace censuses, and
// re-verifiable geodesic certificates.
#pragma once

#include <cstdint>
#include <vector>

#include "cfgeo/arith.hpp"
#include "cfgeo/semigroup.hpp"

namespace cfgeo {

// A x^2 + B xy + C y^2 with positive nonsquare discriminant B^2 - 4AC.
struct QForm {
  std::int64_t a{0}, b{0}, c{0};
  QForm() = default;
  QForm(std::int64_t A, std::int64_t B, std::int64_t C);
  std::int64_t disc() const;
  bool operator==(const QForm&) const = default;
  bool operator<(const QForm& o) const;
  std::string str() const;
};

QForm negate(const QForm& f);
std::int64_t content(const QForm& f);

// Reduced: 0 < B < sqrt(D) and sqrt(D) - B < 2|A| < sqrt(D) + B.
bool is_reduced(const QForm& f);

// One reduction step (A,B,C) -> (C, B*, (B*^2 - D)/(4C)); on reduced forms
// this walks the cycle. reduce() iterates until reduced.
QForm reduction_step(const QForm& f);
QForm reduce(QForm f);

// Full reduction cycle through reduce(f), rotated so the lexicographically
// least member comes first. Length is always even (the sign of A alternates).
using Cycle = std::vector<QForm>;
Cycle cycle(const QForm& f);
bool equivalent(const QForm& f, const QForm& g);

// All reduction cycles of discriminant D (every content, not only primitive
// forms), sorted by their canonical first member.
std::vector<Cycle> classes_of_disc(std::int64_t D);

// Fixed-point form of a hyperbolic matrix: (c, d-a, -b), discriminant
// trace^2 - 4. No sign normalization: negating the form switches the
// orientation and is exactly what distinguishes a class from its inverse.
QForm form_of(const Mat2& g);

// [gamma] = [gamma^{-1}] as cycles; form side: cycle(f) = cycle(-f).
bool is_reciprocal(const Mat2& g);
bool is_reciprocal_cycle(const Cycle& cyc);

// Word-level class tools. Conjugacy rotates words by even offsets only
// (odd offsets conjugate by a determinant -1 generator).
Word reversed_word(const Word& w);
Word canonical_even_rotation(const Word& w);
bool is_reciprocal_word(const Word& w, unsigned alphabet);

// Word is primitive iff it is not a power of a shorter even word: with p the
// least cyclic period, the least even period is p for even p and 2p for odd
// p, and primitivity means the length equals it.
bool is_primitive(const Word& w);

// The geodesic's continued-fraction period is the digit word itself; the
// low-lying flag records that every digit is within the alphabet bound.
struct PeriodCheck {
  Word period;
  bool low_lying{false};
};
PeriodCheck low_lying_period(const Word& w, unsigned alphabet);

// Census over traces t in [3, X): number of reduction cycles of t^2 - 4,
// how many are reciprocal, and the primitive counts after removing powers.
struct CensusRow {
  std::int64_t t{0};
  std::int64_t disc{0};
  std::uint64_t cycles{0};             // all classes of trace t
  std::uint64_t reciprocal_cycles{0};  // reciprocal among them
  std::uint64_t primitive{0};          // classes that are not proper powers
  std::uint64_t reciprocal{0};         // reciprocal and primitive
};

// Raw per-trace class counts; shards round-robin over t and merge by
// concatenation + sort. finish_census fills the primitive columns by
// removing k-th powers (trace s with p_k(s) = t, Chebyshev-style recursion).
std::vector<CensusRow> count_trace_classes(std::int64_t t_bound, unsigned shard_count = 1,
                                           unsigned shard_index = 0);
void finish_census(std::vector<CensusRow>& rows);
std::vector<CensusRow> census_rows(std::int64_t t_bound, unsigned shard_count = 1);

std::uint64_t census_all(std::int64_t t_bound);
std::uint64_t census_reciprocal(std::int64_t t_bound);

// One fully re-verifiable low-lying fundamental reciprocal geodesic.
struct Certificate {
  unsigned alphabet{0};
  Word word;          // gamma = word_to_matrix(word)
  Mat2 gamma;
  Mat2 gram_mat;      // S = transpose(gamma) * gamma, word rev(w).w
  Int trace;          // frobenius_sq(gamma) = trace(S)
  Int disc;           // trace^2 - 4, squarefree by construction
  FactorMultiset disc_factors;
  bool reciprocal{false};
  bool fundamental{false};
  bool primitive{false};
  bool low_lying{false};
  QForm cycle_id;     // canonical first member of cycle(form_of(S))
};

// Scan the alphabet ball, keep gram matrices with squarefree trace
// discriminant and primitive period, deduplicate by the canonical even
// rotation of rev(w).w, sort by (trace, word), truncate to max_count
// (0 = no limit). Every returned certificate passes verify_certificate.
std::vector<Certificate> find_certificates(unsigned alphabet, const Int& norm_sq,
                                           std::size_t max_count, unsigned shard_count = 1);

// Re-derive every field from (alphabet, word) alone.
bool verify_certificate(const Certificate& cert, std::string* why = nullptr);

}  // namespace cfgeo
