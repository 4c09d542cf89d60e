#include "cfgeo/quadforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cfgeo {

namespace {

using i128 = __int128;

std::int64_t isqrt64(std::int64_t n) {
  if (n < 0) throw std::domain_error("isqrt of negative value");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && i128(r) * r > n) --r;
  while (i128(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square64(std::int64_t n) {
  if (n < 0) return false;
  std::int64_t r = isqrt64(n);
  return r * r == n;
}

std::int64_t checked_disc(std::int64_t a, std::int64_t b, std::int64_t c) {
  const i128 d = i128(b) * b - i128(4) * a * c;
  if (d > std::numeric_limits<std::int64_t>::max() ||
      d < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("form discriminant exceeds 64 bits");
  return static_cast<std::int64_t>(d);
}

// Emits (|A|, B) for every reduced form of discriminant D with A > 0; the
// mirror (-|A|, B, -C) is reduced too. Divisibility B^2 = D (mod 4a) is
// tracked incrementally so the inner loop has no division.
template <class F>
void scan_reduced_ab(std::int64_t D, F&& hit) {
  const std::int64_t r = isqrt64(D);
  const std::int64_t parity = D & 1;
  for (std::int64_t a = 1; a <= r; ++a) {
    const std::int64_t m = 4 * a;
    std::int64_t lo = std::max({r - 2 * a + 1, 2 * a - r, std::int64_t(1)});
    if ((lo & 1) != parity) ++lo;
    if (lo > r) continue;
    std::int64_t s = static_cast<std::int64_t>((i128(lo) * lo - D) % m);
    if (s < 0) s += m;
    std::int64_t inc = (4 * (lo % m) + 4) % m;
    for (std::int64_t B = lo; B <= r; B += 2) {
      if (s == 0) hit(a, B);
      s += inc;
      if (s >= m) s -= m;
      inc += 8;
      while (inc >= m) inc -= m;
    }
  }
}

std::vector<QForm> reduced_forms_of_disc(std::int64_t D) {
  std::vector<QForm> out;
  scan_reduced_ab(D, [&](std::int64_t a, std::int64_t B) {
    const auto C = static_cast<std::int64_t>((i128(B) * B - D) / (4 * a));
    out.push_back(QForm(a, B, C));
    out.push_back(QForm(-a, B, -C));
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t index_of(const std::vector<QForm>& sorted, const QForm& f) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), f);
  if (it == sorted.end() || !(*it == f))
    throw std::logic_error("reduction step left the reduced-form list");
  return static_cast<std::size_t>(it - sorted.begin());
}

// Walks every rho-cycle over the full sorted reduced list. The callback gets
// the walk in rho order plus whether the cycle equals that of its negative.
template <class F>
void for_each_cycle(const std::vector<QForm>& forms, F&& fn) {
  std::vector<char> seen(forms.size(), 0);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> walk;
    std::size_t j = i;
    do {
      seen[j] = 1;
      walk.push_back(j);
      j = index_of(forms, reduction_step(forms[j]));
    } while (j != i);
    const std::size_t mirror = index_of(forms, reduce(negate(forms[i])));
    auto sorted_walk = walk;
    std::sort(sorted_walk.begin(), sorted_walk.end());
    const bool reciprocal =
        std::binary_search(sorted_walk.begin(), sorted_walk.end(), mirror);
    fn(walk, reciprocal);
  }
}

Cycle rotate_canonical(const std::vector<QForm>& forms,
                       const std::vector<std::size_t>& walk) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < walk.size(); ++k)
    if (forms[walk[k]] < forms[walk[best]]) best = k;
  Cycle cyc;
  cyc.reserve(walk.size());
  for (std::size_t k = 0; k < walk.size(); ++k)
    cyc.push_back(forms[walk[(best + k) % walk.size()]]);
  return cyc;
}

std::int64_t to_i64(const Int& v, const char* what) {
  if (!v.fits_slong_p()) throw std::overflow_error(std::string(what) + " exceeds 64 bits");
  return static_cast<std::int64_t>(v.get_si());
}

}  // namespace

QForm::QForm(std::int64_t A, std::int64_t B, std::int64_t C) : a(A), b(B), c(C) {
  const std::int64_t d = checked_disc(A, B, C);
  if (d <= 0) throw std::domain_error("form is not indefinite");
  if (is_square64(d)) throw std::domain_error("square discriminant is degenerate");
}

std::int64_t QForm::disc() const { return checked_disc(a, b, c); }

bool QForm::operator<(const QForm& o) const {
  if (a != o.a) return a < o.a;
  if (b != o.b) return b < o.b;
  return c < o.c;
}

std::string QForm::str() const {
  std::ostringstream os;
  os << "(" << a << "," << b << "," << c << ")";
  return os.str();
}

QForm negate(const QForm& f) { return QForm(-f.a, -f.b, -f.c); }

std::int64_t content(const QForm& f) {
  Int g = gcd(gcd(Int(f.a), Int(f.b)), Int(f.c));
  return to_i64(g, "form content");
}

bool is_reduced(const QForm& f) {
  const std::int64_t D = f.disc();
  if (f.b <= 0) return false;
  if (i128(f.b) * f.b >= D) return false;
  const std::int64_t twoa = 2 * std::abs(f.a);
  // sqrt(D) < 2|A| + B and 2|A| - B < sqrt(D), compared via squares.
  if (i128(twoa + f.b) * (twoa + f.b) <= D) return false;
  if (twoa - f.b > 0 && i128(twoa - f.b) * (twoa - f.b) >= D) return false;
  return true;
}

QForm reduction_step(const QForm& f) {
  const std::int64_t D = f.disc();
  const std::int64_t cmag = std::abs(f.c);
  const std::int64_t m = 2 * cmag;
  const std::int64_t r = isqrt64(D);
  std::int64_t bstar;
  if (cmag > r) {
    // Center the new middle coefficient in (-|C|, |C|].
    std::int64_t v = ((-f.b) % m + m) % m;
    bstar = (v <= cmag) ? v : v - m;
  } else {
    // Place it in (sqrt(D) - 2|C|, sqrt(D)).
    bstar = r - ((r + f.b) % m + m) % m;
  }
  const i128 num = i128(bstar) * bstar - D;
  const i128 den = i128(4) * f.c;
  if (num % den != 0) throw std::logic_error("reduction step divisibility failed");
  const i128 cnew = num / den;
  if (cnew > std::numeric_limits<std::int64_t>::max() ||
      cnew < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("reduction step overflow");
  return QForm(f.c, bstar, static_cast<std::int64_t>(cnew));
}

QForm reduce(QForm f) {
  for (int guard = 0; guard < 20000; ++guard) {
    if (is_reduced(f)) return f;
    f = reduction_step(f);
  }
  throw std::logic_error("reduction did not terminate");
}

Cycle cycle(const QForm& f) {
  const QForm f0 = reduce(f);
  Cycle walk;
  QForm g = f0;
  do {
    walk.push_back(g);
    g = reduction_step(g);
    if (walk.size() > 10000000)
      throw std::overflow_error("reduction cycle unreasonably long");
  } while (!(g == f0));
  if (walk.size() % 2 != 0) throw std::logic_error("odd reduction cycle");
  std::size_t best = 0;
  for (std::size_t k = 1; k < walk.size(); ++k)
    if (walk[k] < walk[best]) best = k;
  std::rotate(walk.begin(), walk.begin() + best, walk.end());
  return walk;
}

bool equivalent(const QForm& f, const QForm& g) {
  if (f.disc() != g.disc()) return false;
  const Cycle cf = cycle(f);
  const QForm g0 = reduce(g);
  return std::find(cf.begin(), cf.end(), g0) != cf.end();
}

std::vector<Cycle> classes_of_disc(std::int64_t D) {
  if (D <= 0) throw std::domain_error("discriminant must be positive");
  if (is_square64(D)) throw std::domain_error("square discriminant is degenerate");
  const std::int64_t rem = D % 4;
  if (rem != 0 && rem != 1) throw std::domain_error("discriminant must be 0 or 1 mod 4");
  const auto forms = reduced_forms_of_disc(D);
  std::vector<Cycle> out;
  for_each_cycle(forms, [&](const std::vector<std::size_t>& walk, bool) {
    out.push_back(rotate_canonical(forms, walk));
  });
  std::sort(out.begin(), out.end(),
            [](const Cycle& x, const Cycle& y) { return x.front() < y.front(); });
  return out;
}

QForm form_of(const Mat2& g) {
  const Int t = trace(g);
  if (abs(t) <= 2) throw std::domain_error("matrix is not hyperbolic");
  return QForm(to_i64(g.c, "form coefficient"), to_i64(Int(g.d - g.a), "form coefficient"),
               to_i64(Int(-g.b), "form coefficient"));
}

bool is_reciprocal(const Mat2& g) {
  const QForm f = form_of(g);
  const Cycle cyc = cycle(f);
  const QForm target = reduce(negate(f));
  return std::find(cyc.begin(), cyc.end(), target) != cyc.end();
}

bool is_reciprocal_cycle(const Cycle& cyc) {
  if (cyc.empty()) throw std::invalid_argument("empty cycle");
  const QForm target = reduce(negate(cyc.front()));
  return std::find(cyc.begin(), cyc.end(), target) != cyc.end();
}

Word reversed_word(const Word& w) { return Word(w.rbegin(), w.rend()); }

Word canonical_even_rotation(const Word& w) {
  if (w.empty() || w.size() % 2 != 0)
    throw std::invalid_argument("need a nonempty even-length word");
  Word best = w;
  Word rot = w;
  for (std::size_t k = 2; k < w.size(); k += 2) {
    std::rotate(rot.begin(), rot.begin() + 2, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

bool is_reciprocal_word(const Word& w, unsigned alphabet) {
  validate_word(w, alphabet);
  return canonical_even_rotation(reversed_word(w)) == canonical_even_rotation(w);
}

bool is_primitive(const Word& w) {
  if (w.empty() || w.size() % 2 != 0)
    throw std::invalid_argument("need a nonempty even-length word");
  const std::size_t n = w.size();
  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = w[i] == w[i % p];
    if (ok) {
      period = p;
      break;
    }
  }
  const std::size_t even_period = (period % 2 == 0) ? period : 2 * period;
  return n == even_period;
}

PeriodCheck low_lying_period(const Word& w, unsigned alphabet) {
  if (w.empty() || w.size() % 2 != 0)
    throw std::invalid_argument("need a nonempty even-length word");
  PeriodCheck pc;
  pc.period = w;
  pc.low_lying = true;
  for (auto d : w) {
    if (d < 1 || d > alphabet) pc.low_lying = false;
  }
  return pc;
}

std::vector<CensusRow> count_trace_classes(std::int64_t t_bound, unsigned shard_count,
                                           unsigned shard_index) {
  if (t_bound < 4) throw std::invalid_argument("census needs a trace bound of at least 4");
  if (t_bound > 3000000000LL) throw std::overflow_error("census bound too large");
  if (shard_count < 1 || shard_index >= shard_count)
    throw std::invalid_argument("bad shard specification");
  std::vector<CensusRow> rows;
  for (std::int64_t t = 3; t < t_bound; ++t) {
    if ((t - 3) % shard_count != shard_index) continue;
    CensusRow row;
    row.t = t;
    row.disc = t * t - 4;
    const auto forms = reduced_forms_of_disc(row.disc);
    for_each_cycle(forms, [&](const std::vector<std::size_t>&, bool reciprocal) {
      ++row.cycles;
      if (reciprocal) ++row.reciprocal_cycles;
    });
    rows.push_back(row);
  }
  return rows;
}

void finish_census(std::vector<CensusRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const CensusRow& x, const CensusRow& y) { return x.t < y.t; });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].t != 3 + static_cast<std::int64_t>(i))
      throw std::invalid_argument("census rows must cover every trace from 3");
  }
  if (rows.empty()) return;
  const std::int64_t bound = rows.back().t + 1;
  // Traces of proper powers: p_k(s) with p_1 = s, p_2 = s^2 - 2, and
  // p_{k+1} = s * p_k - p_{k-1}. Each primitive class of trace s contributes
  // one k-th power class at trace p_k(s), and powers of reciprocal classes
  // are exactly the reciprocal power classes.
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> sources;
  for (std::int64_t s = 3; s * s - 2 < bound; ++s) {
    std::int64_t prev = 2, cur = s;
    while (true) {
      const std::int64_t next = s * cur - prev;
      if (next >= bound) break;
      sources[next].push_back(s);
      prev = cur;
      cur = next;
    }
  }
  for (auto& row : rows) {
    std::uint64_t imp = 0, imp_rec = 0;
    auto it = sources.find(row.t);
    if (it != sources.end()) {
      for (auto s : it->second) {
        const auto& base = rows[static_cast<std::size_t>(s - 3)];
        imp += base.primitive;
        imp_rec += base.reciprocal;
      }
    }
    row.primitive = row.cycles - imp;
    row.reciprocal = row.reciprocal_cycles - imp_rec;
  }
}

std::vector<CensusRow> census_rows(std::int64_t t_bound, unsigned shard_count) {
  std::vector<CensusRow> rows;
  for (unsigned shard = 0; shard < shard_count; ++shard) {
    auto part = count_trace_classes(t_bound, shard_count, shard);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  finish_census(rows);
  return rows;
}

std::uint64_t census_all(std::int64_t t_bound) {
  std::uint64_t n = 0;
  for (const auto& row : census_rows(t_bound)) n += row.primitive;
  return n;
}

std::uint64_t census_reciprocal(std::int64_t t_bound) {
  std::uint64_t n = 0;
  for (const auto& row : census_rows(t_bound)) n += row.reciprocal;
  return n;
}

namespace {

Certificate build_certificate(unsigned alphabet, const Word& w) {
  Certificate cert;
  cert.alphabet = alphabet;
  cert.word = w;
  cert.gamma = word_to_matrix(w, alphabet);
  cert.gram_mat = gram(cert.gamma);
  cert.trace = frobenius_sq(cert.gamma);
  cert.disc = cert.trace * cert.trace - 4;
  cert.disc_factors = factorize(cert.disc);
  Word period = reversed_word(w);
  period.insert(period.end(), w.begin(), w.end());
  cert.reciprocal = is_reciprocal(cert.gram_mat);
  cert.fundamental = is_fundamental_disc(cert.disc);
  cert.primitive = is_primitive(period);
  cert.low_lying = low_lying_period(period, alphabet).low_lying;
  cert.cycle_id = cycle(form_of(cert.gram_mat)).front();
  return cert;
}

}  // namespace

std::vector<Certificate> find_certificates(unsigned alphabet, const Int& norm_sq,
                                           std::size_t max_count, unsigned shard_count) {
  if (alphabet < 2) throw std::invalid_argument("certificates need alphabet at least 2");
  // Dedup key: canonical rotation of the geodesic period rev(w).w. Keep the
  // lexicographically least witness word per class.
  std::map<Word, Word> witness_by_class;
  for (unsigned shard = 0; shard < shard_count; ++shard) {
    scan_ball_shard(alphabet, norm_sq, shard_count, shard,
                    [&](const Word& w, const Mat2& m) {
                      const Int t = frobenius_sq(m);
                      if (t % 2 == 0) return;  // 4 divides t^2-4
                      if (!is_squarefree_disc(t)) return;
                      Word period = reversed_word(w);
                      period.insert(period.end(), w.begin(), w.end());
                      // Squarefree discriminant already rules out proper
                      // powers; the explicit check keeps the filter honest.
                      if (!is_primitive(period)) return;
                      const Word key = canonical_even_rotation(period);
                      auto [it, fresh] = witness_by_class.try_emplace(key, w);
                      if (!fresh && w < it->second) it->second = w;
                    });
  }
  std::vector<std::pair<Int, Word>> order;
  order.reserve(witness_by_class.size());
  for (const auto& [key, w] : witness_by_class)
    order.emplace_back(frobenius_sq(word_to_matrix(w, alphabet)), w);
  std::sort(order.begin(), order.end());
  if (max_count > 0 && order.size() > max_count) order.resize(max_count);

  std::vector<Certificate> certs;
  certs.reserve(order.size());
  for (const auto& [t, w] : order) {
    Certificate cert = build_certificate(alphabet, w);
    std::string why;
    if (!verify_certificate(cert, &why))
      throw std::logic_error("certificate failed self-verification: " + why);
    certs.push_back(std::move(cert));
  }
  return certs;
}

bool verify_certificate(const Certificate& cert, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (cert.alphabet < 2) return fail("alphabet below 2");
  try {
    validate_word(cert.word, cert.alphabet);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  const Mat2 gamma = word_to_matrix(cert.word, cert.alphabet);
  if (!(gamma == cert.gamma)) return fail("matrix does not match word");
  const Mat2 s = gram(gamma);
  if (!(s == cert.gram_mat)) return fail("gram matrix mismatch");
  const Int t = frobenius_sq(gamma);
  if (t != cert.trace) return fail("trace mismatch");
  if (trace(s) != cert.trace) return fail("gram trace mismatch");
  if (cert.disc != t * t - 4) return fail("discriminant mismatch");
  const FactorMultiset factors = factorize(cert.disc);
  if (factors != cert.disc_factors) return fail("factorization mismatch");
  for (const auto& [p, e] : factors)
    if (e > 1) return fail("discriminant is not squarefree");
  Word period = reversed_word(cert.word);
  period.insert(period.end(), cert.word.begin(), cert.word.end());
  if (is_reciprocal(s) != cert.reciprocal) return fail("reciprocal flag mismatch");
  if (is_fundamental_disc(cert.disc) != cert.fundamental)
    return fail("fundamental flag mismatch");
  if (is_primitive(period) != cert.primitive) return fail("primitive flag mismatch");
  if (low_lying_period(period, cert.alphabet).low_lying != cert.low_lying)
    return fail("low-lying flag mismatch");
  if (!(cycle(form_of(s)).front() == cert.cycle_id)) return fail("cycle id mismatch");
  return true;
}

}  // namespace cfgeo
