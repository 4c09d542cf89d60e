#include "cfgeo/semigroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace cfgeo {

namespace {

// Right-multiply by the digit generator [[a,1],[1,0]] in place.
void append_digit(const std::array<Int, 4>& m, std::uint32_t a, std::array<Int, 4>& out) {
  out[0] = m[0] * a + m[1];
  out[1] = m[0];
  out[2] = m[2] * a + m[3];
  out[3] = m[2];
}

Int frob_sq(const std::array<Int, 4>& m) {
  return m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
}

struct BallScan {
  unsigned alphabet;
  const Int* bound;
  const std::function<void(const Word&, const Mat2&)>* emit;
  Word digits;
  std::vector<std::array<Int, 4>> mats;  // mats[d] is the product of digits[0..d)

  void run_from(std::size_t depth) {
    if (mats.size() <= depth + 1) mats.resize(depth + 2);
    for (std::uint32_t a = 1; a <= alphabet; ++a) {
      append_digit(mats[depth], a, mats[depth + 1]);
      // Entries grow with the digit value, so once the norm bound trips we
      // can drop the remaining digits at this level too.
      if (frob_sq(mats[depth + 1]) >= *bound) break;
      digits.push_back(a);
      if (digits.size() % 2 == 0) {
        const auto& m = mats[depth + 1];
        (*emit)(digits, Mat2::unchecked(m[0], m[1], m[2], m[3]));
      }
      run_from(depth + 1);
      digits.pop_back();
    }
  }
};

// Rank of a length-2 prefix in lex order, for round-robin sharding.
std::size_t prefix_rank(std::uint32_t d0, std::uint32_t d1, unsigned alphabet) {
  return static_cast<std::size_t>(d0 - 1) * alphabet + (d1 - 1);
}

}  // namespace

void validate_word(const Word& w, unsigned alphabet) {
  if (alphabet < 1) throw std::invalid_argument("alphabet must be at least 1");
  if (w.empty()) throw std::invalid_argument("empty word is not a semigroup element");
  if (w.size() % 2 != 0) throw std::invalid_argument("semigroup words have even length");
  for (auto d : w) {
    if (d < 1 || d > alphabet)
      throw std::invalid_argument("word digit outside alphabet range");
  }
}

Mat2 word_to_matrix(const Word& w, unsigned alphabet) {
  validate_word(w, alphabet);
  // Consume digits in pairs; (a,b) contributes [[ab+1,a],[b,1]], determinant 1.
  Mat2 acc;
  for (std::size_t i = 0; i < w.size(); i += 2) {
    Int a = w[i], b = w[i + 1];
    acc = mat_mul(acc, Mat2(a * b + 1, a, b, 1));
  }
  return acc;
}

void scan_ball(unsigned alphabet, const Int& norm_sq,
               const std::function<void(const Word&, const Mat2&)>& emit) {
  if (alphabet < 1) throw std::invalid_argument("alphabet must be at least 1");
  if (norm_sq <= 0) throw std::invalid_argument("norm bound must be positive");
  BallScan scan;
  scan.alphabet = alphabet;
  scan.bound = &norm_sq;
  scan.emit = &emit;
  scan.mats.assign(1, {Int(1), Int(0), Int(0), Int(1)});
  scan.run_from(0);
}

void scan_ball_shard(unsigned alphabet, const Int& norm_sq, unsigned shard_count,
                     unsigned shard_index,
                     const std::function<void(const Word&, const Mat2&)>& emit) {
  if (shard_count < 1) throw std::invalid_argument("shard count must be positive");
  if (shard_index >= shard_count) throw std::invalid_argument("shard index out of range");
  if (shard_count == 1) {
    scan_ball(alphabet, norm_sq, emit);
    return;
  }
  scan_ball(alphabet, norm_sq, [&](const Word& w, const Mat2& m) {
    if (prefix_rank(w[0], w[1], alphabet) % shard_count == shard_index) emit(w, m);
  });
}

std::vector<BallPoint> enumerate_ball(unsigned alphabet, const Int& norm_sq) {
  std::vector<BallPoint> out;
  scan_ball(alphabet, norm_sq,
            [&](const Word& w, const Mat2& m) { out.push_back({w, m}); });
  return out;
}

std::vector<BallPoint> enumerate_ball_shard(unsigned alphabet, const Int& norm_sq,
                                            unsigned shard_count, unsigned shard_index) {
  std::vector<BallPoint> out;
  scan_ball_shard(alphabet, norm_sq, shard_count, shard_index,
                  [&](const Word& w, const Mat2& m) { out.push_back({w, m}); });
  return out;
}

std::vector<BallPoint> merge_ball_shards(std::vector<std::vector<BallPoint>> shards) {
  std::vector<BallPoint> all;
  std::size_t total = 0;
  for (const auto& s : shards) total += s.size();
  all.reserve(total);
  for (auto& s : shards)
    for (auto& p : s) all.push_back(std::move(p));
  std::sort(all.begin(), all.end(),
            [](const BallPoint& x, const BallPoint& y) { return x.word < y.word; });
  return all;
}

Int count_ball(unsigned alphabet, const Int& norm_sq) {
  Int n = 0;
  scan_ball(alphabet, norm_sq, [&](const Word&, const Mat2&) { ++n; });
  return n;
}

BallSlice pigeonhole_slice(unsigned alphabet, const Int& norm_sq) {
  std::unordered_map<std::size_t, std::size_t> by_len;
  scan_ball(alphabet, norm_sq,
            [&](const Word& w, const Mat2&) { ++by_len[w.size()]; });
  if (by_len.empty()) throw std::domain_error("ball is empty, no slice to take");
  std::size_t best_len = 0, best_count = 0;
  for (const auto& [len, count] : by_len) {
    if (count > best_count || (count == best_count && len < best_len)) {
      best_len = len;
      best_count = count;
    }
  }
  BallSlice slice;
  slice.alphabet = alphabet;
  slice.norm_sq = norm_sq;
  slice.word_len = best_len;
  slice.words.reserve(best_count);
  scan_ball(alphabet, norm_sq, [&](const Word& w, const Mat2&) {
    if (w.size() == best_len) slice.words.push_back(w);
  });
  return slice;
}

Int ProductSet::size() const {
  return Int(left.words.size()) * Int(middle.words.size()) * Int(right.words.size());
}

Word ProductSet::word_at(std::size_t i, std::size_t j, std::size_t k) const {
  const Word& a = left.words.at(i);
  const Word& b = middle.words.at(j);
  const Word& c = right.words.at(k);
  Word w;
  w.reserve(a.size() + b.size() + c.size());
  w.insert(w.end(), a.begin(), a.end());
  w.insert(w.end(), b.begin(), b.end());
  w.insert(w.end(), c.begin(), c.end());
  return w;
}

namespace {

std::vector<Mat2> slice_matrices(const BallSlice& s) {
  std::vector<Mat2> mats;
  mats.reserve(s.words.size());
  for (const auto& w : s.words) mats.push_back(word_to_matrix(w, s.alphabet));
  return mats;
}

}  // namespace

void ProductSet::for_each(const std::function<void(const Mat2&)>& fn) const {
  for_each_shard(1, 0, fn);
}

void ProductSet::for_each_shard(unsigned shard_count, unsigned shard_index,
                                const std::function<void(const Mat2&)>& fn) const {
  if (shard_count < 1) throw std::invalid_argument("shard count must be positive");
  if (shard_index >= shard_count) throw std::invalid_argument("shard index out of range");
  const auto lm = slice_matrices(left);
  const auto mm = slice_matrices(middle);
  const auto rm = slice_matrices(right);
  for (std::size_t i = shard_index; i < lm.size(); i += shard_count) {
    for (const auto& m : mm) {
      Mat2 partial = mat_mul(lm[i], m);
      for (const auto& r : rm) fn(mat_mul(partial, r));
    }
  }
}

ProductSet build_product_set(unsigned alphabet, const Int& x_sq, const Int& y_sq,
                             const Int& z_sq) {
  if (alphabet < 2) throw std::invalid_argument("product set needs alphabet at least 2");
  ProductSet p;
  p.left = pigeonhole_slice(alphabet, x_sq);
  p.middle = pigeonhole_slice(2, y_sq);
  p.right = pigeonhole_slice(alphabet, z_sq);
  return p;
}

double dimension_by_counting(unsigned alphabet, const std::vector<long>& n_values) {
  if (n_values.size() < 3)
    throw std::invalid_argument("need at least three radii for a counting fit");
  for (std::size_t i = 0; i + 1 < n_values.size(); ++i) {
    if (n_values[i] >= n_values[i + 1])
      throw std::invalid_argument("radii must be strictly increasing");
  }
  if (n_values.front() < 2) throw std::invalid_argument("radii must be at least 2");

  std::vector<double> xs, ys;
  for (long n : n_values) {
    Int c = count_ball(alphabet, Int(n) * n);
    if (c == 0) throw std::domain_error("empty ball in counting fit");
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(c.get_d()));
  }
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= xs.size();
  ybar /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
  }
  if (ys.front() == ys.back())
    throw std::domain_error("counts do not grow over the radius list");
  return sxy / sxx / 2.0;
}

double dimension_by_pressure(unsigned alphabet, unsigned depth) {
  if (alphabet < 1) throw std::invalid_argument("alphabet must be at least 1");
  if (depth < 2) throw std::invalid_argument("pressure depth must be at least 2");
  if (alphabet == 1) return 0.0;

  // The cylinder weights q*(q+q') need to fit in a 64-bit product, and the
  // word count needs to stay enumerable.
  if (depth * std::log2(alphabet + 1.0) > 31.0)
    throw std::invalid_argument("continuants overflow 64 bits at this depth");
  if (std::pow(static_cast<double>(alphabet), static_cast<double>(depth)) > double(1 << 24))
    throw std::invalid_argument("too many words at this alphabet and depth");

  // Continuant recursion: appending digit a maps (q, q') to (a*q+q', q),
  // starting from the empty prefix (1, 0). The cylinder of a depth-k word has
  // exact length 1/(q*(q+q')), so we collect multiplicities of that product.
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  std::function<void(std::uint64_t, std::uint64_t, unsigned)> walk =
      [&](std::uint64_t q, std::uint64_t q1, unsigned left) {
        if (left == 0) {
          ++counts[q * (q + q1)];
          return;
        }
        for (std::uint32_t a = 1; a <= alphabet; ++a) walk(q * a + q1, q, left - 1);
      };
  walk(1, 0, depth);

  std::vector<std::pair<double, double>> terms;  // (log weight, multiplicity)
  terms.reserve(counts.size());
  for (const auto& [w, n] : counts)
    terms.emplace_back(std::log(static_cast<double>(w)), static_cast<double>(n));
  std::sort(terms.begin(), terms.end());

  auto pressure = [&](double s) {
    double total = 0;
    for (const auto& [lw, n] : terms) total += n * std::exp(-s * lw);
    return total;
  };

  // At s=0 the sum is the word count (>1); at s=1 it is strictly below 1
  // because the cylinders are disjoint subintervals of the unit interval.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-9) {
    double mid = (lo + hi) / 2;
    if (pressure(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace cfgeo
