#include "cfgeo/serialize.hpp"

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cfgeo {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parse_i64(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in integer: " + s);
  return v;
}

Int parse_int(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer field");
  return Int(s);  // throws on malformed digits
}

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::invalid_argument("flag must be 0 or 1, got: " + s);
}

std::string rat_str(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string mat_fields(const Mat2& m) {
  return m.a.get_str() + "," + m.b.get_str() + "," + m.c.get_str() + "," + m.d.get_str();
}

Mat2 parse_mat(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 4) throw std::invalid_argument("matrix needs 4 entries: " + s);
  return Mat2(parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2]),
              parse_int(parts[3]));
}

std::string factors_str(const FactorMultiset& f) {
  if (f.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ",";
    out += f[i].first.get_str() + "^" + std::to_string(f[i].second);
  }
  return out;
}

FactorMultiset parse_factors(const std::string& s) {
  FactorMultiset f;
  if (s == "1") return f;
  for (const auto& part : split(s, ',')) {
    const auto caret = part.find('^');
    if (caret == std::string::npos)
      throw std::invalid_argument("factor needs prime^exponent: " + part);
    const Int p = parse_int(part.substr(0, caret));
    const long long e = parse_i64(part.substr(caret + 1));
    if (e < 1) throw std::invalid_argument("exponent must be positive: " + part);
    f.emplace_back(p, static_cast<unsigned>(e));
  }
  return f;
}

}  // namespace

std::string word_str(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(w[i]);
  }
  return out;
}

Word parse_word(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty word");
  Word w;
  for (const auto& part : split(s, ',')) {
    const std::int64_t d = parse_i64(part);
    if (d < 1 || d > 0xffffffffLL) throw std::invalid_argument("digit out of range: " + part);
    w.push_back(static_cast<std::uint32_t>(d));
  }
  return w;
}

std::string ball_record(const BallPoint& p) {
  std::ostringstream os;
  os << word_str(p.word) << " " << p.mat.a << " " << p.mat.b << " " << p.mat.c << " "
     << p.mat.d << " " << frobenius_sq(p.mat);
  return os.str();
}

void write_ball_records(std::ostream& os, const std::vector<BallPoint>& pts) {
  for (const auto& p : pts) os << ball_record(p) << "\n";
}

std::string certificate_record(const Certificate& c) {
  std::ostringstream os;
  os << "alphabet=" << c.alphabet << " word=" << word_str(c.word) << " gamma="
     << mat_fields(c.gamma) << " gram=" << mat_fields(c.gram_mat) << " trace=" << c.trace
     << " disc=" << c.disc << " factors=" << factors_str(c.disc_factors)
     << " reciprocal=" << (c.reciprocal ? 1 : 0) << " fundamental="
     << (c.fundamental ? 1 : 0) << " primitive=" << (c.primitive ? 1 : 0)
     << " lowlying=" << (c.low_lying ? 1 : 0) << " cycle=" << c.cycle_id.a << ","
     << c.cycle_id.b << "," << c.cycle_id.c;
  return os.str();
}

Certificate parse_certificate(const std::string& line) {
  static const char* kKeys[] = {"alphabet", "word",       "gamma",      "gram",
                                "trace",    "disc",       "factors",    "reciprocal",
                                "fundamental", "primitive", "lowlying", "cycle"};
  const auto tokens = split(line, ' ');
  if (tokens.size() != 12)
    throw std::invalid_argument("certificate line needs 12 fields");
  std::vector<std::string> values;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos || tokens[i].substr(0, eq) != kKeys[i])
      throw std::invalid_argument("bad certificate field: " + tokens[i]);
    values.push_back(tokens[i].substr(eq + 1));
  }
  Certificate c;
  const std::int64_t alpha = parse_i64(values[0]);
  if (alpha < 2 || alpha > 0xffffffffLL)
    throw std::invalid_argument("alphabet out of range");
  c.alphabet = static_cast<unsigned>(alpha);
  c.word = parse_word(values[1]);
  c.gamma = parse_mat(values[2]);
  c.gram_mat = parse_mat(values[3]);
  c.trace = parse_int(values[4]);
  c.disc = parse_int(values[5]);
  c.disc_factors = parse_factors(values[6]);
  c.reciprocal = parse_flag(values[7]);
  c.fundamental = parse_flag(values[8]);
  c.primitive = parse_flag(values[9]);
  c.low_lying = parse_flag(values[10]);
  const auto cyc = split(values[11], ',');
  if (cyc.size() != 3) throw std::invalid_argument("cycle needs 3 coefficients");
  c.cycle_id = QForm(parse_i64(cyc[0]), parse_i64(cyc[1]), parse_i64(cyc[2]));
  return c;
}

void write_certificates(std::ostream& os, const std::vector<Certificate>& cs) {
  for (const auto& c : cs) os << certificate_record(c) << "\n";
}

std::vector<Certificate> read_certificates(std::istream& is) {
  std::vector<Certificate> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(parse_certificate(line));
  }
  return out;
}

void write_sieve_csv(std::ostream& os, const SiftHistogram& h,
                     const std::vector<std::uint64_t>& moduli) {
  os << "q,a_q,beta_num,beta_den,r\n";
  for (auto q : moduli) {
    const Rat beta = sieve_density(static_cast<std::uint32_t>(q));
    os << q << "," << count_multiples(h, q) << "," << beta.get_num() << ","
       << beta.get_den() << "," << rat_str(remainder_term(h, q)) << "\n";
  }
}

void write_census_csv(std::ostream& os, const std::vector<CensusRow>& rows) {
  os << "t,disc,cycles,primitive,reciprocal\n";
  for (const auto& row : rows)
    os << row.t << "," << row.disc << "," << row.cycles << "," << row.primitive << ","
       << row.reciprocal << "\n";
}

void write_histogram_csv(std::ostream& os, const SiftHistogram& h) {
  os << "n,count\n";
  for (const auto& [t, c] : h.by_trace)
    os << SiftHistogram::value_of(t) << "," << c << "\n";
}

std::string plan_json(const ExponentPlan& plan) {
  nlohmann::ordered_json j;
  j["delta"] = plan.delta;
  j["theta"] = plan.theta;
  j["c"] = plan.cconst;
  j["eta"] = plan.eta;
  j["alpha"] = plan.alpha;
  j["x"] = plan.x;
  j["y"] = plan.y;
  j["z"] = plan.z;
  j["alpha0"] = plan.alpha0;
  j["level_exponent"] = plan.level_exponent;
  j["feasible"] = plan.feasible;
  j["violated"] = plan.violated;
  return j.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  j["params"] = params;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.outputs) outputs[k] = v;
  j["outputs"] = outputs;
  j["wall_ms"] = m.wall_ms;
  return j.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace cfgeo
