#include "ergodic/verify.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "ergodic/tfunc.hpp"

namespace ergodic {

// --- ANF ---

AnfTable::AnfTable(unsigned vars, std::vector<std::uint32_t> monomials)
    : vars_(vars), monomials_(std::move(monomials)) {
  std::sort(monomials_.begin(), monomials_.end());
}

bool AnfTable::contains(std::uint32_t monomial) const {
  return std::binary_search(monomials_.begin(), monomials_.end(), monomial);
}

unsigned AnfTable::degree() const {
  unsigned d = 0;
  for (auto mono : monomials_) d = std::max<unsigned>(d, std::popcount(mono));
  return d;
}

bool AnfTable::evaluate(std::uint32_t point) const {
  bool v = false;
  for (auto mono : monomials_) v ^= (mono & point) == mono;
  return v;
}

std::string AnfTable::to_string(const std::string& prefix) const {
  if (monomials_.empty()) return "0";
  std::string out;
  for (auto mono : monomials_) {
    if (!out.empty()) out += " + ";
    if (mono == 0) {
      out += "1";
      continue;
    }
    bool first = true;
    for (unsigned v = 0; v < vars_; ++v) {
      if (!((mono >> v) & 1U)) continue;
      if (!first) out += "*";
      out += prefix + std::to_string(v);
      first = false;
    }
  }
  return out;
}

AnfTable anf(std::span<const std::uint8_t> truth_table) {
  const std::size_t len = truth_table.size();
  if (len == 0 || !std::has_single_bit(len)) throw std::invalid_argument("truth table length must be a power of two");
  const unsigned vars = static_cast<unsigned>(std::countr_zero(len));
  if (vars > kMaxAnfVariables) throw std::invalid_argument("truth table exceeds 24 variables");
  std::vector<std::uint8_t> a(truth_table.begin(), truth_table.end());
  for (auto& v : a) v &= 1U;
  for (unsigned i = 0; i < vars; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t x = 0; x < len; ++x) {
      if (x & bit) a[x] ^= a[x ^ bit];
    }
  }
  std::vector<std::uint32_t> monomials;
  for (std::size_t x = 0; x < len; ++x) {
    if (a[x]) monomials.push_back(static_cast<std::uint32_t>(x));
  }
  return AnfTable(vars, std::move(monomials));
}

// --- reports ---

void VerificationReport::append(const VerificationReport& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  bounds_.insert(bounds_.end(), other.bounds_.begin(), other.bounds_.end());
}

bool VerificationReport::passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.pass; });
}

std::string VerificationReport::to_text() const {
  std::string out;
  for (const auto& c : checks_) {
    out += c.pass ? "PASS " : "FAIL ";
    out += c.name;
    if (!c.detail.empty()) out += ": " + c.detail;
    if (c.witness) out += (c.detail.empty() ? ": " : "; ") + std::string("witness=0x") + c.witness->to_hex();
    out += '\n';
  }
  return out;
}

namespace {

void require_oracle_width(unsigned k, unsigned cap, const char* what) {
  if (k < 1 || k > cap) {
    throw std::invalid_argument(std::string(what) + " supports widths 1.." + std::to_string(cap) + ", got " +
                                std::to_string(k));
  }
}

std::vector<std::uint64_t> tabulate(const WordFn& T, unsigned k) {
  const std::uint64_t size = std::uint64_t{1} << k;
  std::vector<std::uint64_t> table(size);
  for (std::uint64_t x = 0; x < size; ++x) table[x] = T(WordN(k, x)).resized(k).low64();
  return table;
}

std::string label(const std::string& check, const std::string& subject) { return check + "[" + subject + "]"; }

}  // namespace

VerificationReport check_ergodic_anf(const WordFn& T, unsigned k, const std::string& subject) {
  require_oracle_width(k, kMaxOracleWidth, "check_ergodic_anf");
  VerificationReport report(subject);
  report.add_bound("anf_width", k);
  const std::vector<std::uint64_t> table = tabulate(T, k);

  const auto bad = find_incompatibility([&](const WordN& x) { return WordN(k, table[x.low64()]); }, k);
  if (bad) {
    report.add({label("compatible", subject), false,
                "outputs differ mod 2^" + std::to_string(bad->level) + " for inputs congruent mod 2^" +
                    std::to_string(bad->level) + " (other input 0x" + WordN(k, bad->y).to_hex() + ")",
                WordN(k, bad->x)});
    return report;
  }
  report.add({label("compatible", subject), true, "width " + std::to_string(k), std::nullopt});

  auto rho = [&](std::uint64_t x, unsigned i) -> std::uint8_t { return ((table[x] ^ x) >> i) & 1U; };

  std::optional<std::pair<unsigned, std::uint64_t>> triangular_fail;
  std::optional<unsigned> parity_fail, anf_fail;
  bool phi0 = rho(0, 0) == 1;
  std::vector<std::uint8_t> phi;
  for (unsigned i = 0; i < k; ++i) {
    const std::uint64_t below = std::uint64_t{1} << i;
    if (!triangular_fail) {
      for (std::uint64_t x = below; x < 2 * below; ++x) {
        if (rho(x, i) != rho(x - below, i)) {
          triangular_fail = {i, x};
          break;
        }
      }
    }
    phi.resize(below);
    unsigned parity = 0;
    for (std::uint64_t x = 0; x < below; ++x) {
      phi[x] = rho(x, i);
      parity ^= phi[x];
    }
    if (parity != 1 && !parity_fail) parity_fail = i;
    if (anf(phi).has_full_monomial() != (parity == 1) && !anf_fail) anf_fail = i;
  }

  if (triangular_fail) {
    report.add({label("triangular-form", subject), false,
                "bit " + std::to_string(triangular_fail->first) + " of T(x) xor x depends on bit " +
                    std::to_string(triangular_fail->first) + " of x",
                WordN(k, triangular_fail->second)});
  } else {
    report.add({label("triangular-form", subject), true, "t_i = x_i + phi_i(x_0..x_{i-1}) for i < " + std::to_string(k),
                std::nullopt});
  }
  if (phi0) {
    report.add({label("phi_0", subject), true, "phi_0 = 1", std::nullopt});
  } else {
    report.add({label("phi_0", subject), false, "phi_0 = 0", WordN(k, 0)});
  }
  if (parity_fail) {
    report.add({label("odd-weight", subject), false, "phi_" + std::to_string(*parity_fail) + " has even weight",
                WordN(k, *parity_fail)});
  } else {
    report.add({label("odd-weight", subject), true, "phi_i has odd weight for i < " + std::to_string(k), std::nullopt});
  }
  if (anf_fail) {
    report.add({label("anf-full-monomial", subject), false,
                "weight parity and full monomial disagree for phi_" + std::to_string(*anf_fail),
                WordN(k, *anf_fail)});
  } else {
    report.add({label("anf-full-monomial", subject), true, "odd weight <=> x_0*...*x_{i-1} present", std::nullopt});
  }
  return report;
}

VerificationReport check_measure_preserving(const WordFn& T, unsigned k, const std::string& subject) {
  require_oracle_width(k, kMaxOracleWidth, "check_measure_preserving");
  VerificationReport report(subject);
  report.add_bound("bijection_width", k);
  const std::vector<std::uint64_t> table = tabulate(T, k);
  std::vector<std::int64_t> preimage;
  for (unsigned i = 1; i <= k; ++i) {
    const std::uint64_t size = std::uint64_t{1} << i;
    preimage.assign(size, -1);
    for (std::uint64_t x = 0; x < size; ++x) {
      const std::uint64_t y = table[x] & (size - 1);
      if (preimage[y] >= 0) {
        report.add({label("bijective", subject), false,
                    "mod 2^" + std::to_string(i) + ": 0x" + WordN(k, static_cast<std::uint64_t>(preimage[y])).to_hex() +
                        " and the witness share an image",
                    WordN(k, x)});
        return report;
      }
      preimage[y] = static_cast<std::int64_t>(x);
    }
  }
  report.add({label("bijective", subject), true, "mod 2^i for every i <= " + std::to_string(k), std::nullopt});
  return report;
}

OrbitResult walk_orbit(const std::function<std::uint64_t(std::uint64_t)>& step, unsigned bits, std::uint64_t start,
                       CycleOptions options) {
  if (bits > kMaxOrbitBits) throw std::invalid_argument("orbit domain exceeds 2^24 points");
  const std::uint64_t size = std::uint64_t{1} << bits;
  if (options.check_bijective) {
    std::vector<bool> hit(size, false);
    for (std::uint64_t x = 0; x < size; ++x) {
      const std::uint64_t y = step(x);
      if (y >= size || hit[y]) return {OrbitResult::Outcome::not_permutation, 0, x};
      hit[y] = true;
    }
  }
  std::uint64_t x = start;
  for (std::uint64_t len = 1; len <= size; ++len) {
    x = step(x);
    if (x == start) {
      return {len == size ? OrbitResult::Outcome::single_cycle : OrbitResult::Outcome::short_cycle, len, start};
    }
  }
  // A permutation returns to its start within `size` steps.
  return {OrbitResult::Outcome::not_permutation, size, start};
}

namespace {

CheckResult orbit_check(const OrbitResult& r, const std::string& name, unsigned bits, unsigned width) {
  const std::uint64_t size = std::uint64_t{1} << bits;
  switch (r.outcome) {
    case OrbitResult::Outcome::single_cycle:
      return {name, true, "orbit length " + std::to_string(r.length) + " = 2^" + std::to_string(bits), std::nullopt};
    case OrbitResult::Outcome::short_cycle:
      return {name, false, "orbit length " + std::to_string(r.length) + " < " + std::to_string(size),
              WordN(width, r.witness)};
    case OrbitResult::Outcome::not_permutation:
      return {name, false, "not a permutation", WordN(width, r.witness)};
  }
  return {name, false, "?", std::nullopt};
}

}  // namespace

VerificationReport check_single_cycle(const WordFn& T, unsigned k, CycleOptions options, const std::string& subject) {
  require_oracle_width(k, kMaxOrbitBits, "check_single_cycle");
  VerificationReport report(subject);
  report.add_bound("orbit_bits", k);
  auto step = [&](std::uint64_t x) { return T(WordN(k, x)).resized(k).low64(); };
  report.add(orbit_check(walk_orbit(step, k, 0, options), label("single-cycle", subject) + " mod 2^" + std::to_string(k),
                         k, k));
  return report;
}

VerificationReport check_single_cycle(const MultiFn& T, unsigned m, unsigned k, CycleOptions options,
                                      const std::string& subject) {
  if (m < 1 || k < 1 || m * k > kMaxOrbitBits) throw std::invalid_argument("multivariate orbit needs 1 <= m*k <= 24");
  VerificationReport report(subject);
  report.add_bound("orbit_bits", m * k);
  auto step = [&](std::uint64_t p) { return T(StateVector::unpack(p, m, k)).resized(k).pack(); };
  report.add(orbit_check(walk_orbit(step, m * k, 0, options),
                         label("single-cycle", subject) + " on (Z/2^" + std::to_string(k) + ")^" + std::to_string(m),
                         m * k, m * k));
  return report;
}

VerificationReport check_compatible_multivariate(const MultiFn& T, unsigned m, unsigned k, const std::string& subject) {
  if (m < 1 || k < 1 || m * k > kMaxOracleWidth) throw std::invalid_argument("multivariate compatibility needs m*k <= 20");
  VerificationReport report(subject);
  const unsigned bits = m * k;
  const std::uint64_t size = std::uint64_t{1} << bits;
  std::vector<std::uint64_t> table(size);
  for (std::uint64_t p = 0; p < size; ++p) table[p] = T(StateVector::unpack(p, m, k)).resized(k).pack();
  for (unsigned i = 1; i < k; ++i) {
    std::uint64_t cm = 0;
    for (unsigned j = 0; j < m; ++j) cm |= ((std::uint64_t{1} << i) - 1) << (j * k);
    for (std::uint64_t p = 0; p < size; ++p) {
      if (((table[p] ^ table[p & cm]) & cm) != 0) {
        report.add({label("compatible", subject), false,
                    "outputs differ mod 2^" + std::to_string(i) + " for inputs congruent mod 2^" + std::to_string(i) +
                        " (packed input)",
                    WordN(bits, p)});
        return report;
      }
    }
  }
  report.add({label("compatible", subject), true, "component width " + std::to_string(k), std::nullopt});
  return report;
}

std::optional<std::size_t> bit_period(std::span<const std::uint8_t> seq) { return least_period(seq); }

// --- census ---

Census::Census(unsigned m, unsigned n, std::vector<std::uint32_t> counts, std::uint64_t samples)
    : m_(m), n_(n), counts_(std::move(counts)), samples_(samples) {}

std::uint32_t Census::min_count() const { return *std::min_element(counts_.begin(), counts_.end()); }
std::uint32_t Census::max_count() const { return *std::max_element(counts_.begin(), counts_.end()); }

Census occurrence_census(const KeystreamGenerator& gen, std::uint64_t period) {
  const unsigned m = gen.m(), n = gen.n();
  if (m * n > kMaxCensusBits) throw std::invalid_argument("occurrence census supports m*n <= 20");
  auto g = gen.clone();
  std::vector<std::uint32_t> counts(std::size_t{1} << (m * n), 0);
  for (std::uint64_t i = 0; i < period; ++i) ++counts[g->next().pack()];
  return Census(m, n, std::move(counts), period);
}

std::vector<std::uint8_t> coordinate_bits(std::span<const StateVector> seq, unsigned component, unsigned bit) {
  std::vector<std::uint8_t> out;
  out.reserve(seq.size());
  for (const auto& v : seq) out.push_back(v[component].bit(bit) ? 1 : 0);
  return out;
}

}  // namespace ergodic
