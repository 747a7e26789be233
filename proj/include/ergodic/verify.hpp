#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergodic/generators.hpp"
#include "ergodic/word.hpp"

namespace ergodic {

// Algebraic normal form: XOR of monomials, each a bit mask over variables
// 0..vars-1. The empty mask is the constant 1.
class AnfTable {
 public:
  AnfTable(unsigned vars, std::vector<std::uint32_t> monomials);

  unsigned variables() const noexcept { return vars_; }
  const std::vector<std::uint32_t>& monomials() const noexcept { return monomials_; }
  bool contains(std::uint32_t monomial) const;
  bool has_full_monomial() const { return contains(vars_ == 32 ? ~0U : (1U << vars_) - 1); }
  unsigned degree() const;
  bool evaluate(std::uint32_t point) const;
  // e.g. "1 + x_0 + x_0*x_1", "0" when empty.
  std::string to_string(const std::string& prefix = "x_") const;

 private:
  unsigned vars_;
  std::vector<std::uint32_t> monomials_;  // sorted ascending
};

inline constexpr unsigned kMaxAnfVariables = 24;

// Moebius transform of a truth table of 2^i entries (each 0 or 1), i <= 24.
AnfTable anf(std::span<const std::uint8_t> truth_table);

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
  std::optional<WordN> witness;
};

class VerificationReport {
 public:
  explicit VerificationReport(std::string subject) : subject_(std::move(subject)) {}

  void add(CheckResult r) { checks_.push_back(std::move(r)); }
  void append(const VerificationReport& other);
  void add_bound(std::string name, std::uint64_t value) { bounds_.emplace_back(std::move(name), value); }

  const std::string& subject() const noexcept { return subject_; }
  const std::vector<CheckResult>& checks() const noexcept { return checks_; }
  const std::vector<std::pair<std::string, std::uint64_t>>& bounds() const noexcept { return bounds_; }
  bool passed() const;

  // One line per check: "PASS name: detail" or "FAIL name: detail; witness=0x..".
  std::string to_text() const;

 private:
  std::string subject_;
  std::vector<CheckResult> checks_;
  std::vector<std::pair<std::string, std::uint64_t>> bounds_;
};

inline constexpr unsigned kMaxOracleWidth = 20;
inline constexpr unsigned kMaxOrbitBits = 24;

// Ergodicity criterion at width k: compatibility, the triangular form
// t_i = x_i + phi_i(x_0..x_{i-1}), phi_0 = 1 and odd weight of every phi_i,
// cross-checked against the presence of the full monomial in anf(phi_i).
VerificationReport check_ergodic_anf(const WordFn& T, unsigned k, const std::string& subject = "T");

// T mod 2^i is a bijection for every i <= k.
VerificationReport check_measure_preserving(const WordFn& T, unsigned k, const std::string& subject = "T");

struct CycleOptions {
  bool check_bijective = false;
};

struct OrbitResult {
  enum class Outcome { single_cycle, short_cycle, not_permutation };
  Outcome outcome;
  std::uint64_t length;  // steps until the start recurred (or the step limit)
  std::uint64_t witness;
};

// Walks the orbit of `start` under step over a domain of 2^bits points.
OrbitResult walk_orbit(const std::function<std::uint64_t(std::uint64_t)>& step, unsigned bits,
                       std::uint64_t start = 0, CycleOptions options = {});

// T mod 2^k as a permutation of 2^k points, bits <= 24.
VerificationReport check_single_cycle(const WordFn& T, unsigned k, CycleOptions options = {},
                                      const std::string& subject = "T");
// T on (Z/2^k)^m, m*k <= 24, components applied at width k.
VerificationReport check_single_cycle(const MultiFn& T, unsigned m, unsigned k, CycleOptions options = {},
                                      const std::string& subject = "T");

// Multivariate compatibility at component width k (m*k <= 20): reducing the
// input modulo 2^i component-wise determines the output modulo 2^i.
VerificationReport check_compatible_multivariate(const MultiFn& T, unsigned m, unsigned k,
                                                 const std::string& subject = "T");

// Least p <= size/2 with seq[t+p] = seq[t] for every valid t; nullopt when
// the sequence has no period within the window.
template <class T>
std::optional<std::size_t> least_period(std::span<const T> seq) {
  const std::size_t len = seq.size();
  if (len == 0) return std::nullopt;
  // Prefix function: len - border(len) is the least period of the whole window.
  std::vector<std::size_t> border(len + 1, 0);
  for (std::size_t i = 1, k = 0; i < len; ++i) {
    while (k > 0 && !(seq[i] == seq[k])) k = border[k];
    if (seq[i] == seq[k]) ++k;
    border[i + 1] = k;
  }
  const std::size_t p = len - border[len];
  if (2 * p > len) return std::nullopt;
  return p;
}

std::optional<std::size_t> bit_period(std::span<const std::uint8_t> seq);

class Census {
 public:
  Census(unsigned m, unsigned n, std::vector<std::uint32_t> counts, std::uint64_t samples);

  std::uint32_t count(const StateVector& v) const { return counts_.at(v.pack()); }
  const std::vector<std::uint32_t>& counts() const noexcept { return counts_; }
  std::uint64_t samples() const noexcept { return samples_; }
  std::uint32_t min_count() const;
  std::uint32_t max_count() const;
  // Counts are not all equal: the window is not a whole number of periods.
  bool partial() const { return min_count() != max_count(); }

 private:
  unsigned m_, n_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t samples_;
};

inline constexpr unsigned kMaxCensusBits = 20;

// Counts output vectors over `period` steps of a clone of gen.
Census occurrence_census(const KeystreamGenerator& gen, std::uint64_t period);

// Bit s of component j of each vector in a sequence.
std::vector<std::uint8_t> coordinate_bits(std::span<const StateVector> seq, unsigned component, unsigned bit);

}  // namespace ergodic
