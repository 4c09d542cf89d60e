// Bounded-alphabet continued-fraction semigroups inside SL2(Z): even digit
// words, Frobenius-ball enumeration, pigeonhole slices, product sets, and
// Hausdorff dimension estimators.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cfgeo/arith.hpp"

namespace cfgeo {

// Digit string over {1..alphabet}. Semigroup elements are the nonempty
// even-length words; the word-to-matrix map is injective at fixed parity.
using Word = std::vector<std::uint32_t>;

void validate_word(const Word& w, unsigned alphabet);  // throws on odd/empty/out-of-range
Mat2 word_to_matrix(const Word& w, unsigned alphabet);

struct BallPoint {
  Word word;
  Mat2 mat;
};

// Depth-first scan of all even nonempty words whose matrix has
// frobenius_sq < norm_sq, emitted in lexicographic word order. The squared
// Frobenius norm strictly increases under digit appends, which makes the
// prefix pruning sound.
void scan_ball(unsigned alphabet, const Int& norm_sq,
               const std::function<void(const Word&, const Mat2&)>& emit);

// Shard by the first two digits (round-robin over prefix rank). The union of
// all shards equals the unsharded scan; each shard is itself in lex order.
void scan_ball_shard(unsigned alphabet, const Int& norm_sq, unsigned shard_count,
                     unsigned shard_index,
                     const std::function<void(const Word&, const Mat2&)>& emit);

std::vector<BallPoint> enumerate_ball(unsigned alphabet, const Int& norm_sq);
std::vector<BallPoint> enumerate_ball_shard(unsigned alphabet, const Int& norm_sq,
                                            unsigned shard_count, unsigned shard_index);
// Deterministic lex merge of per-shard outputs; equals the unsharded result.
std::vector<BallPoint> merge_ball_shards(std::vector<std::vector<BallPoint>> shards);

Int count_ball(unsigned alphabet, const Int& norm_sq);

// All members of one word length drawn from a Frobenius ball.
struct BallSlice {
  unsigned alphabet{2};
  Int norm_sq{0};
  std::size_t word_len{0};
  std::vector<Word> words;  // lex sorted
};

// Largest single-length slice of the ball (at least count/max_len of the
// ball by pigeonhole); ties resolve toward the smaller length.
BallSlice pigeonhole_slice(unsigned alphabet, const Int& norm_sq);

// Triple product set: left and right slices over the working alphabet, the
// middle slice over the alphabet {1,2}. Fixed per-factor word lengths make
// concatenation positional, so all |left|*|middle|*|right| members are
// distinct semigroup elements.
struct ProductSet {
  BallSlice left, middle, right;

  Int size() const;
  Word word_at(std::size_t i, std::size_t j, std::size_t k) const;

  // Left-major, then middle, then right; matrices are the concatenation
  // products. for_each_shard partitions the left index round-robin; any
  // order-independent accumulation over shards reproduces the full pass.
  void for_each(const std::function<void(const Mat2&)>& fn) const;
  void for_each_shard(unsigned shard_count, unsigned shard_index,
                      const std::function<void(const Mat2&)>& fn) const;
};

ProductSet build_product_set(unsigned alphabet, const Int& x_sq, const Int& y_sq,
                             const Int& z_sq);

// Least-squares slope of log(count) against log(N), halved. Wants at least
// three increasing N values and rejects degenerate (constant) counts.
double dimension_by_counting(unsigned alphabet, const std::vector<long>& n_values);

// Root of sum_w q_w^(-2s) = 1 over all depth-k digit words, where q_w is the
// continuant denominator (lower-left plus lower-right matrix entry).
// Bisection on [0,1] to 1e-9. Alphabet 1 returns 0 exactly.
double dimension_by_pressure(unsigned alphabet, unsigned depth);

}  // namespace cfgeo
