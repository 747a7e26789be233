#include "ergodic/word.hpp"

#include <algorithm>
#include <stdexcept>

namespace ergodic {

namespace {

void check_width(unsigned width) {
  if (width < 1 || width > kMaxWidth) {
    throw std::invalid_argument("word width must be in [1, 512], got " + std::to_string(width));
  }
}

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

void WordN::throw_bad_width(unsigned width) { check_width(width); throw std::logic_error("unreachable"); }

WordN WordN::from_limbs(unsigned width, std::span<const std::uint64_t> limbs) {
  WordN w(width);
  std::copy_n(limbs.begin(), std::min<std::size_t>(limbs.size(), w.limb_count()), w.limbs_.begin());
  w.normalize();
  return w;
}

WordN WordN::parse(std::string_view text, unsigned width) {
  check_width(width);
  unsigned base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  if (text.empty()) throw std::invalid_argument("empty integer literal");
  // Accumulate at full precision; reduction mod 2^512 commutes with reduction mod 2^width.
  Limbs acc{};
  for (char c : text) {
    int d = digit_value(c);
    if (d < 0 || static_cast<unsigned>(d) >= base) {
      throw std::invalid_argument("invalid digit '" + std::string(1, c) + "' in integer literal");
    }
    unsigned __int128 carry = static_cast<unsigned>(d);
    for (auto& limb : acc) {
      unsigned __int128 t = static_cast<unsigned __int128>(limb) * base + carry;
      limb = static_cast<std::uint64_t>(t);
      carry = t >> 64;
    }
  }
  return from_limbs(width, acc);
}

WordN WordN::all_ones(unsigned width) {
  WordN w(width);
  w.limbs_.fill(~std::uint64_t{0});
  w.normalize();
  return w;
}

WordN WordN::high_mask(unsigned width, unsigned from) {
  WordN w = all_ones(width);
  for (unsigned i = 0; i < std::min(from, width); ++i) w.set_bit(i, false);
  return w;
}

bool WordN::bit(unsigned i) const {
  if (i >= width_) throw std::out_of_range("bit index " + std::to_string(i) + " outside width " + std::to_string(width_));
  return (limbs_[i / 64] >> (i % 64)) & 1U;
}

void WordN::set_bit(unsigned i, bool value) {
  if (i >= width_) throw std::out_of_range("bit index " + std::to_string(i) + " outside width " + std::to_string(width_));
  const std::uint64_t m = std::uint64_t{1} << (i % 64);
  if (value) {
    limbs_[i / 64] |= m;
  } else {
    limbs_[i / 64] &= ~m;
  }
}

bool WordN::is_zero() const noexcept {
  return std::all_of(limbs_.begin(), limbs_.begin() + limb_count(), [](std::uint64_t l) { return l == 0; });
}

bool WordN::fits_u64() const noexcept {
  return std::all_of(limbs_.begin() + 1, limbs_.begin() + limb_count(), [](std::uint64_t l) { return l == 0; });
}

WordN WordN::resized(unsigned width) const {
  WordN w(width);
  std::copy_n(limbs_.begin(), std::min(limb_count(), w.limb_count()), w.limbs_.begin());
  w.normalize();
  return w;
}

std::string WordN::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = limb_count() * 16; i-- > 0;) {
    unsigned nibble = (limbs_[i / 16] >> (4 * (i % 16))) & 0xF;
    if (out.empty() && nibble == 0) continue;
    out.push_back(kDigits[nibble]);
  }
  return out.empty() ? "0" : out;
}

void WordN::normalize() noexcept {
  const unsigned n = limb_count();
  for (unsigned i = n; i < kLimbs; ++i) limbs_[i] = 0;
  if (width_ % 64 != 0) limbs_[n - 1] &= (std::uint64_t{1} << (width_ % 64)) - 1;
}

void WordN::require_same_width(const WordN& o) const {
  if (o.width_ != width_) {
    throw std::invalid_argument("word width mismatch: " + std::to_string(width_) + " vs " + std::to_string(o.width_));
  }
}

WordN& WordN::add_wide(const WordN& o) {
  require_same_width(o);
  const unsigned n = limb_count();
  if (n == 1) {
    limbs_[0] += o.limbs_[0];
  } else {
    unsigned char carry = 0;
    for (unsigned i = 0; i < n; ++i) {
      unsigned __int128 t = static_cast<unsigned __int128>(limbs_[i]) + o.limbs_[i] + carry;
      limbs_[i] = static_cast<std::uint64_t>(t);
      carry = static_cast<unsigned char>(t >> 64);
    }
  }
  normalize();
  return *this;
}

WordN& WordN::sub_wide(const WordN& o) {
  require_same_width(o);
  const unsigned n = limb_count();
  if (n == 1) {
    limbs_[0] -= o.limbs_[0];
  } else {
    std::uint64_t borrow = 0;
    for (unsigned i = 0; i < n; ++i) {
      std::uint64_t a = limbs_[i];
      std::uint64_t d = a - o.limbs_[i] - borrow;
      borrow = (a < o.limbs_[i]) || (a - o.limbs_[i] < borrow) ? 1 : 0;
      limbs_[i] = d;
    }
  }
  normalize();
  return *this;
}

WordN& WordN::mul_wide(const WordN& o) {
  require_same_width(o);
  const unsigned n = limb_count();
  if (n == 1) {
    limbs_[0] *= o.limbs_[0];
  } else {
    Limbs r{};
    for (unsigned i = 0; i < n; ++i) {
      std::uint64_t carry = 0;
      for (unsigned j = 0; i + j < n; ++j) {
        unsigned __int128 t =
            static_cast<unsigned __int128>(limbs_[i]) * o.limbs_[j] + r[i + j] + carry;
        r[i + j] = static_cast<std::uint64_t>(t);
        carry = static_cast<std::uint64_t>(t >> 64);
      }
    }
    limbs_ = r;
  }
  normalize();
  return *this;
}

WordN& WordN::and_wide(const WordN& o) {
  require_same_width(o);
  for (unsigned i = 0; i < limb_count(); ++i) limbs_[i] &= o.limbs_[i];
  return *this;
}

WordN& WordN::or_wide(const WordN& o) {
  require_same_width(o);
  for (unsigned i = 0; i < limb_count(); ++i) limbs_[i] |= o.limbs_[i];
  return *this;
}

WordN& WordN::xor_wide(const WordN& o) {
  require_same_width(o);
  for (unsigned i = 0; i < limb_count(); ++i) limbs_[i] ^= o.limbs_[i];
  return *this;
}

WordN& WordN::shl_wide(unsigned s) {
  if (s >= width_) {
    limbs_.fill(0);
    return *this;
  }
  const unsigned n = limb_count();
  if (n == 1) {
    limbs_[0] <<= s;
  } else {
    const unsigned whole = s / 64, part = s % 64;
    for (unsigned i = n; i-- > 0;) {
      std::uint64_t v = 0;
      if (i >= whole) {
        v = limbs_[i - whole] << part;
        if (part != 0 && i > whole) v |= limbs_[i - whole - 1] >> (64 - part);
      }
      limbs_[i] = v;
    }
  }
  normalize();
  return *this;
}

WordN WordN::not_wide() const {
  WordN r = *this;
  for (unsigned i = 0; i < limb_count(); ++i) r.limbs_[i] = ~r.limbs_[i];
  r.normalize();
  return r;
}

bool operator==(const WordN& a, const WordN& b) noexcept {
  return a.width_ == b.width_ && a.limbs_ == b.limbs_;
}

std::strong_ordering operator<=>(const WordN& a, const WordN& b) noexcept {
  if (auto c = a.width_ <=> b.width_; c != 0) return c;
  for (unsigned i = WordN::kLimbs; i-- > 0;) {
    if (auto c = a.limbs_[i] <=> b.limbs_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// --- StateVector ---

StateVector::StateVector(unsigned m, unsigned n) : width_(n) {
  if (m < 1) throw std::invalid_argument("state vector needs at least one component");
  if (static_cast<unsigned long>(m) * n > kMaxWidth) {
    throw std::invalid_argument("m*n = " + std::to_string(m * n) + " exceeds 512");
  }
  components_.assign(m, WordN(n));
}

StateVector::StateVector(std::vector<WordN> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("state vector needs at least one component");
  width_ = components_.front().width();
  for (const auto& c : components_) {
    if (c.width() != width_) throw std::invalid_argument("state vector components must share one width");
  }
  if (components_.size() * width_ > kMaxWidth) {
    throw std::invalid_argument("m*n = " + std::to_string(components_.size() * width_) + " exceeds 512");
  }
}

StateVector StateVector::from_values(unsigned n, std::span<const std::uint64_t> values) {
  std::vector<WordN> comps;
  comps.reserve(values.size());
  for (auto v : values) comps.emplace_back(n, v);
  return StateVector(std::move(comps));
}

void StateVector::set(std::size_t i, WordN value) {
  if (value.width() != width_) throw std::invalid_argument("component width mismatch");
  components_.at(i) = std::move(value);
}

StateVector StateVector::resized(unsigned width) const {
  std::vector<WordN> comps;
  comps.reserve(components_.size());
  for (const auto& c : components_) comps.push_back(c.resized(width));
  return StateVector(std::move(comps));
}

std::uint64_t StateVector::pack() const {
  if (size() * width_ > 64) throw std::invalid_argument("pack requires m*n <= 64");
  std::uint64_t packed = 0;
  for (unsigned j = 0; j < size(); ++j) packed |= components_[j].low64() << (j * width_);
  return packed;
}

StateVector StateVector::unpack(std::uint64_t packed, unsigned m, unsigned n) {
  if (m * n > 64) throw std::invalid_argument("unpack requires m*n <= 64");
  std::vector<WordN> comps;
  comps.reserve(m);
  for (unsigned j = 0; j < m; ++j) comps.emplace_back(n, n == 64 ? packed : packed >> (j * n));
  return StateVector(std::move(comps));
}

// --- interleaving ---

WordN interleave(const StateVector& v) {
  const unsigned m = v.size(), n = v.width();
  WordN out(m * n);
  if (m == 1) return v[0];
  if (m * n <= 64) {
    std::uint64_t x = 0;
    for (unsigned r = 0; r < m; ++r) {
      std::uint64_t c = v[r].low64();
      for (unsigned l = 0; l < n; ++l) x |= ((c >> l) & 1U) << (l * m + r);
    }
    return WordN(m * n, x);
  }
  for (unsigned r = 0; r < m; ++r) {
    auto limbs = v[r].limbs();
    for (unsigned l = 0; l < n; ++l) {
      if ((limbs[l / 64] >> (l % 64)) & 1U) out.set_bit(l * m + r, true);
    }
  }
  return out;
}

StateVector deinterleave(const WordN& x, unsigned m, unsigned n) {
  if (m < 1 || static_cast<unsigned long>(m) * n != x.width()) {
    throw std::invalid_argument("deinterleave: word width " + std::to_string(x.width()) +
                                " does not equal m*n = " + std::to_string(m * n));
  }
  if (m == 1) return StateVector(std::vector<WordN>{x});
  std::vector<WordN> comps;
  comps.reserve(m);
  if (m * n <= 64) {
    const std::uint64_t bits = x.low64();
    for (unsigned r = 0; r < m; ++r) {
      std::uint64_t c = 0;
      for (unsigned l = 0; l < n; ++l) c |= ((bits >> (l * m + r)) & 1U) << l;
      comps.emplace_back(n, c);
    }
    return StateVector(std::move(comps));
  }
  auto limbs = x.limbs();
  for (unsigned r = 0; r < m; ++r) {
    WordN c(n);
    for (unsigned l = 0; l < n; ++l) {
      const unsigned k = l * m + r;
      if ((limbs[k / 64] >> (k % 64)) & 1U) c.set_bit(l, true);
    }
    comps.push_back(std::move(c));
  }
  return StateVector(std::move(comps));
}

}  // namespace ergodic
