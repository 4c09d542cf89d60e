#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cfgeo/arith.hpp"
#include "cfgeo/quadforms.hpp"
#include "cfgeo/semigroup.hpp"
#include "cfgeo/sieve.hpp"

namespace cfgeo {

// Line and CSV formats are fixed: they are the reproducibility surface, so
// every writer here is deterministic given its inputs.

std::string word_str(const Word& w);         // "1,2"
Word parse_word(const std::string& s);       // strict inverse of word_str

std::string ball_record(const BallPoint& p); // "digits a b c d frob"
void write_ball_records(std::ostream& os, const std::vector<BallPoint>& pts);

std::string certificate_record(const Certificate& c);
Certificate parse_certificate(const std::string& line);
void write_certificates(std::ostream& os, const std::vector<Certificate>& cs);
std::vector<Certificate> read_certificates(std::istream& is);

// q,a_q,beta_num,beta_den,r with r printed as num/den.
void write_sieve_csv(std::ostream& os, const SiftHistogram& h,
                     const std::vector<std::uint64_t>& moduli);

// t,disc,cycles,primitive,reciprocal
void write_census_csv(std::ostream& os, const std::vector<CensusRow>& rows);

// n,count keyed by the shifted value n = t^2 - 4.
void write_histogram_csv(std::ostream& os, const SiftHistogram& h);

std::string plan_json(const ExponentPlan& plan);

// Small run manifest. wall_ms is the only field allowed to differ between
// byte-identical runs; comparisons should strip it first.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;   // ordered
  std::vector<std::pair<std::string, std::string>> outputs;  // name -> digest
  std::int64_t wall_ms = 0;
};
std::string manifest_json(const RunManifest& m);

// FNV-1a over the bytes, rendered as 16 hex digits. Used for manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace cfgeo
