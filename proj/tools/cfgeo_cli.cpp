// Command line front end. Every subcommand that produces files writes them
// into --out together with a JSON manifest; rerunning with the same flags
// reproduces the files byte for byte, and only the manifest's wall_ms may
// differ. Shard counts change the work split, never the output bytes.
//
// Exit codes: 0 success, 1 failed internal verification, 2 bad configuration.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cfgeo/arith.hpp"
#include "cfgeo/quadforms.hpp"
#include "cfgeo/semigroup.hpp"
#include "cfgeo/serialize.hpp"
#include "cfgeo/sieve.hpp"
#include "cfgeo/sl2mod.hpp"

namespace {

using namespace cfgeo;
using Clock = std::chrono::steady_clock;

#ifndef CFGEO_VERSION
#define CFGEO_VERSION "0.0.0"
#endif

// Gathers the output files of one run, then writes <command>.manifest.json.
struct Sink {
  std::string dir;
  RunManifest manifest;
  Clock::time_point start = Clock::now();

  Sink(std::string command, std::string out_dir) : dir(std::move(out_dir)) {
    manifest.command = std::move(command);
    manifest.params.emplace_back("version", CFGEO_VERSION);
  }

  template <typename T>
  void param(const std::string& key, const T& value) {
    std::ostringstream os;
    os << value;
    manifest.params.emplace_back(key, os.str());
  }

  void write(const std::string& name, const std::string& bytes) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << bytes;
    manifest.outputs.emplace_back(name, fnv1a_hex(bytes));
  }

  void finish() {
    manifest.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/" + manifest.command + ".manifest.json", std::ios::binary);
    out << manifest_json(manifest) << "\n";
  }
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int run_enumerate(unsigned alphabet, std::uint64_t radius, unsigned shards,
                  const std::string& out) {
  Sink sink("enumerate", out);
  const Int norm_sq = Int(radius) * Int(radius);
  std::vector<std::vector<BallPoint>> parts;
  parts.reserve(shards);
  for (unsigned i = 0; i < shards; ++i)
    parts.push_back(enumerate_ball_shard(alphabet, norm_sq, shards, i));
  const std::vector<BallPoint> pts = merge_ball_shards(std::move(parts));

  std::ostringstream body;
  write_ball_records(body, pts);
  sink.param("alphabet", alphabet);
  sink.param("radius", radius);
  sink.param("shards", shards);
  sink.param("points", pts.size());
  sink.write("ball.txt", body.str());
  sink.finish();
  std::cout << "ball.txt: " << pts.size() << " words over alphabet " << alphabet
            << " with squared frobenius norm below " << norm_sq << "\n";
  return 0;
}

int run_dimension(unsigned alphabet, unsigned depth, std::vector<long> radii, bool no_counting,
                  const std::string& out) {
  Sink sink("dimension", out);
  std::sort(radii.begin(), radii.end());
  std::ostringstream csv;
  csv << "method,parameter,value\n";

  const double pressure = dimension_by_pressure(alphabet, depth);
  csv << "pressure," << depth << "," << fixed6(pressure) << "\n";
  std::cout << "pressure estimate (depth " << depth << "): " << fixed6(pressure) << "\n";

  if (!no_counting) {
    const double counting = dimension_by_counting(alphabet, radii);
    csv << "counting," << radii.back() << "," << fixed6(counting) << "\n";
    std::cout << "counting estimate (radius " << radii.back() << "): " << fixed6(counting)
              << "\n";
  }

  sink.param("alphabet", alphabet);
  sink.param("depth", depth);
  {
    std::ostringstream rs;
    for (std::size_t i = 0; i < radii.size(); ++i) rs << (i ? "," : "") << radii[i];
    sink.param("radii", no_counting ? std::string("none") : rs.str());
  }
  sink.write("dimension.csv", csv.str());
  sink.finish();
  return 0;
}

int run_localdensity(std::uint32_t p_max, const std::string& out) {
  Sink sink("localdensity", out);
  std::ostringstream csv;
  csv << "p,statement,expected,computed,pass\n";
  bool all_pass = true;
  std::size_t rows = 0;
  for (std::uint32_t p : primes_below(p_max + 1)) {
    const Rat expected = local_density(p);
    for (int eps : {+1, -1}) {
      const Rat computed = local_density_bruteforce(p, eps);
      const bool pass = computed == expected;
      all_pass = all_pass && pass;
      ++rows;
      csv << p << "," << (eps > 0 ? "trace_plus_two" : "trace_minus_two") << "," << expected
          << "," << computed << "," << (pass ? 1 : 0) << "\n";
    }
  }
  sink.param("p_max", p_max);
  sink.param("rows", rows);
  sink.param("all_pass", all_pass ? 1 : 0);
  sink.write("localdensity.csv", csv.str());
  sink.finish();
  std::cout << (all_pass ? "all " : "FAILURES among ") << rows << " density rows"
            << (all_pass ? " pass" : "") << " (p <= " << p_max << ")\n";
  return all_pass ? 0 : 1;
}

int run_sieve(unsigned alphabet, std::uint64_t x_sq, std::uint64_t y_sq, std::uint64_t z_sq,
              std::vector<std::uint64_t> moduli, std::uint64_t q0, std::uint64_t sift_z,
              unsigned shards, const std::string& out) {
  Sink sink("sieve", out);
  const ProductSet pi = build_product_set(alphabet, Int(x_sq), Int(y_sq), Int(z_sq));
  SiftHistogram hist;
  for (unsigned i = 0; i < shards; ++i) merge_histogram(hist, sift_sequence_shard(pi, shards, i));

  // The dispersion strata must recombine to the raw count for every modulus;
  // a mismatch means the decomposition itself is broken.
  for (std::uint64_t q : moduli) {
    const DispersionSplit split = dispersion_split(hist, q, q0);
    if (split.main_term + split.remainder != Rat(count_multiples(hist, q))) {
      std::cerr << "dispersion strata for q=" << q << " do not recombine\n";
      return 1;
    }
  }

  std::ostringstream sieve_csv, hist_csv;
  write_sieve_csv(sieve_csv, hist, moduli);
  write_histogram_csv(hist_csv, hist);

  sink.param("alphabet", alphabet);
  sink.param("x_sq", x_sq);
  sink.param("y_sq", y_sq);
  sink.param("z_sq", z_sq);
  sink.param("left_len", pi.left.word_len);
  sink.param("middle_len", pi.middle.word_len);
  sink.param("right_len", pi.right.word_len);
  sink.param("members", pi.size());
  sink.param("q0", q0);
  sink.param("shards", shards);
  std::cout << "product set: " << pi.size() << " members, word lengths " << pi.left.word_len
            << "+" << pi.middle.word_len << "+" << pi.right.word_len << "\n";
  if (sift_z >= 2) {
    const Int survivors = sift_small_primes(hist, sift_z);
    sink.param("sift_z", sift_z);
    sink.param("survivors", survivors);
    std::cout << "survivors with t^2-4 free of primes <= " << sift_z << ": " << survivors
              << "\n";
  }
  sink.write("sieve.csv", sieve_csv.str());
  sink.write("histogram.csv", hist_csv.str());
  sink.finish();
  return 0;
}

int run_census(std::int64_t t_bound, unsigned shards, const std::string& out) {
  Sink sink("census", out);
  const std::vector<CensusRow> rows = census_rows(t_bound, shards);
  std::uint64_t primitive = 0, reciprocal = 0;
  for (const CensusRow& r : rows) {
    primitive += r.primitive;
    reciprocal += r.reciprocal;
  }
  std::ostringstream csv;
  write_census_csv(csv, rows);
  sink.param("t_bound", t_bound);
  sink.param("shards", shards);
  sink.param("primitive", primitive);
  sink.param("reciprocal", reciprocal);
  sink.write("census.csv", csv.str());
  sink.finish();
  std::cout << "traces in [3," << t_bound << "): " << primitive << " primitive classes, "
            << reciprocal << " reciprocal\n";
  return 0;
}

int run_certify(unsigned alphabet, std::uint64_t radius, std::size_t max_count, unsigned shards,
                const std::string& out) {
  Sink sink("certify", out);
  const Int norm_sq = Int(radius) * Int(radius);
  const std::vector<Certificate> certs = find_certificates(alphabet, norm_sq, max_count, shards);
  for (const Certificate& c : certs) {
    std::string why;
    if (!verify_certificate(c, &why)) {
      std::cerr << "generated certificate failed verification: " << why << "\n";
      return 1;
    }
  }
  std::ostringstream body;
  write_certificates(body, certs);
  sink.param("alphabet", alphabet);
  sink.param("radius", radius);
  sink.param("max_count", max_count);
  sink.param("shards", shards);
  sink.param("certificates", certs.size());
  sink.write("certificates.txt", body.str());
  sink.finish();
  std::cout << "certificates.txt: " << certs.size() << " verified certificates\n";
  return 0;
}

int run_plan(double delta, double theta, double cconst, double eta, const std::string& out) {
  Sink sink("plan", out);
  const ExponentPlan plan = exponent_plan(delta, theta, cconst, eta);
  const std::string body = plan_json(plan);
  sink.param("delta", fixed6(delta));
  sink.param("theta", fixed6(theta));
  sink.param("cconst", fixed6(cconst));
  sink.param("eta", fixed6(eta));
  sink.write("plan.json", body + "\n");
  sink.finish();
  std::cout << body << "\n";
  return 0;
}

int run_verify(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  std::string line;
  std::size_t line_no = 0, total = 0, bad = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++total;
    try {
      const Certificate cert = parse_certificate(line);
      std::string why;
      if (!verify_certificate(cert, &why)) {
        ++bad;
        std::cout << "line " << line_no << ": " << why << "\n";
      }
    } catch (const std::exception& e) {
      ++bad;
      std::cout << "line " << line_no << ": unparseable record (" << e.what() << ")\n";
    }
  }
  if (bad > 0) {
    std::cout << bad << " of " << total << " certificates failed verification\n";
    return 1;
  }
  std::cout << total << " certificates verified\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thin continued-fraction semigroups, local densities, and geodesic certificates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key-value config file; command line flags win");

  // enumerate
  unsigned en_alpha = 2;
  std::uint64_t en_radius = 100;
  unsigned en_shards = 1;
  std::string en_out = ".";
  auto* en = app.add_subcommand("enumerate", "list all ball members as word + matrix records");
  en->add_option("-A,--alphabet", en_alpha, "digit alphabet size")
      ->check(CLI::Range(1u, 100000u))
      ->capture_default_str();
  en->add_option("-N,--radius", en_radius, "frobenius norm bound (ball is norm < N)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  en->add_option("--shards", en_shards, "work shards; merged output is shard independent")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str();
  en->add_option("-o,--out", en_out, "output directory")->capture_default_str();

  // dimension
  unsigned dim_alpha = 2;
  unsigned dim_depth = 12;
  std::vector<long> dim_radii = {100, 300, 1000, 3000, 10000};
  bool dim_no_counting = false;
  std::string dim_out = ".";
  auto* dim = app.add_subcommand("dimension", "estimate the limit-set dimension two ways");
  dim->add_option("-A,--alphabet", dim_alpha, "digit alphabet size")
      ->check(CLI::Range(1u, 100000u))
      ->capture_default_str();
  dim->add_option("--depth", dim_depth, "cylinder depth for the pressure estimate")
      ->check(CLI::Range(1u, 64u))
      ->capture_default_str();
  dim->add_option("--radii", dim_radii, "counting radii (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  dim->add_flag("--no-counting", dim_no_counting, "skip the ball-counting estimate");
  dim->add_option("-o,--out", dim_out, "output directory")->capture_default_str();

  // localdensity
  std::uint32_t ld_pmax = 40;
  std::string ld_out = ".";
  auto* ld = app.add_subcommand("localdensity",
                                "check brute-force trace densities against the closed forms");
  ld->add_option("-p,--pmax", ld_pmax, "check all primes up to this bound")
      ->check(CLI::Range(2u, 200u))
      ->capture_default_str();
  ld->add_option("-o,--out", ld_out, "output directory")->capture_default_str();

  // sieve
  unsigned sv_alpha = 2;
  std::uint64_t sv_x = 10000, sv_y = 50, sv_z = 10000;
  std::vector<std::uint64_t> sv_moduli = {2, 3, 5, 7, 13};
  std::uint64_t sv_q0 = 1, sv_sift_z = 0;
  unsigned sv_shards = 1;
  std::string sv_out = ".";
  auto* sv = app.add_subcommand("sieve", "sift t^2-4 over a triple product set");
  sv->add_option("-A,--alphabet", sv_alpha, "digit alphabet size")
      ->check(CLI::Range(2u, 100000u))
      ->capture_default_str();
  sv->add_option("--x-sq", sv_x, "squared norm bound for the left slice")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sv->add_option("--y-sq", sv_y, "squared norm bound for the middle slice")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sv->add_option("--z-sq", sv_z, "squared norm bound for the right slice")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sv->add_option("-q,--moduli", sv_moduli, "moduli for the sieve table (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sv->add_option("--q0", sv_q0, "dispersion level splitting main term from remainder")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sv->add_option("-z,--sift-z", sv_sift_z, "also count members with t^2-4 free of primes <= z")
      ->capture_default_str();
  sv->add_option("--shards", sv_shards, "work shards; merged output is shard independent")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str();
  sv->add_option("-o,--out", sv_out, "output directory")->capture_default_str();

  // census
  std::int64_t cs_bound = 1000;
  unsigned cs_shards = 1;
  std::string cs_out = ".";
  auto* cs = app.add_subcommand("census", "class counts per trace t in [3, bound)");
  cs->add_option("-X,--t-bound", cs_bound, "exclusive trace bound")
      ->check(CLI::Range(std::int64_t{4}, std::int64_t{100000000}))
      ->capture_default_str();
  cs->add_option("--shards", cs_shards, "work shards; merged output is shard independent")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str();
  cs->add_option("-o,--out", cs_out, "output directory")->capture_default_str();

  // certify
  unsigned cf_alpha = 3;
  std::uint64_t cf_radius = 1000;
  std::size_t cf_max = 0;
  unsigned cf_shards = 1;
  std::string cf_out = ".";
  auto* cf = app.add_subcommand("certify",
                                "emit verified low-lying fundamental reciprocal certificates");
  cf->add_option("-A,--alphabet", cf_alpha, "digit alphabet size")
      ->check(CLI::Range(1u, 100000u))
      ->capture_default_str();
  cf->add_option("-N,--radius", cf_radius, "frobenius norm bound for the ball scan")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cf->add_option("-m,--max", cf_max, "keep at most this many certificates (0 = all)")
      ->capture_default_str();
  cf->add_option("--shards", cf_shards, "work shards; merged output is shard independent")
      ->check(CLI::Range(1u, 4096u))
      ->capture_default_str();
  cf->add_option("-o,--out", cf_out, "output directory")->capture_default_str();

  // plan
  double pl_delta = 0.999, pl_theta = 0.1, pl_cconst = 10.0, pl_eta = 0.01;
  std::string pl_out = ".";
  auto* pl = app.add_subcommand("plan", "evaluate the sieve exponent plan");
  pl->add_option("--delta", pl_delta, "dimension lower bound, in (0,1)")->capture_default_str();
  pl->add_option("--theta", pl_theta, "spectral gap exponent, positive")->capture_default_str();
  pl->add_option("--cconst", pl_cconst, "absolute constant in the alpha0 constraint")
      ->capture_default_str();
  pl->add_option("--eta", pl_eta, "slack parameter, in (0,1/36)")->capture_default_str();
  pl->add_option("-o,--out", pl_out, "output directory")->capture_default_str();

  // verify
  std::string vf_path;
  auto* vf = app.add_subcommand("verify", "re-derive every field of a certificate file");
  vf->add_option("file", vf_path, "certificate file to verify")
      ->required()
      ->check(CLI::ExistingFile);

  for (CLI::App* sub : {en, dim, ld, sv, cs, cf, pl, vf}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (en->parsed()) return run_enumerate(en_alpha, en_radius, en_shards, en_out);
    if (dim->parsed())
      return run_dimension(dim_alpha, dim_depth, dim_radii, dim_no_counting, dim_out);
    if (ld->parsed()) return run_localdensity(ld_pmax, ld_out);
    if (sv->parsed())
      return run_sieve(sv_alpha, sv_x, sv_y, sv_z, sv_moduli, sv_q0, sv_sift_z, sv_shards,
                       sv_out);
    if (cs->parsed()) return run_census(cs_bound, cs_shards, cs_out);
    if (cf->parsed()) return run_certify(cf_alpha, cf_radius, cf_max, cf_shards, cf_out);
    if (pl->parsed()) return run_plan(pl_delta, pl_theta, pl_cconst, pl_eta, pl_out);
    if (vf->parsed()) return run_verify(vf_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
