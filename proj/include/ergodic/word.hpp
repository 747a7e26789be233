#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ergodic {

inline constexpr unsigned kMaxWidth = 512;

// Residue modulo 2^width, 1 <= width <= 512. Bits are numbered LSB-first.
// Every arithmetic result is reduced modulo 2^width; operands of a binary
// operation must share a width.
class WordN {
 public:
  static constexpr unsigned kLimbs = kMaxWidth / 64;
  using Limbs = std::array<std::uint64_t, kLimbs>;

  explicit WordN(unsigned width, std::uint64_t value = 0) : width_(static_cast<std::uint16_t>(width)) {
    if (width - 1 >= kMaxWidth) throw_bad_width(width);
    limbs_[0] = width < 64 ? value & low_mask() : value;
  }

  static WordN from_limbs(unsigned width, std::span<const std::uint64_t> limbs);
  // Decimal or 0x-prefixed hexadecimal of any length, reduced mod 2^width.
  static WordN parse(std::string_view text, unsigned width);
  static WordN all_ones(unsigned width);
  // Mask of ones at positions >= from (i.e. the residue of -2^from).
  static WordN high_mask(unsigned width, unsigned from);

  unsigned width() const noexcept { return width_; }
  bool bit(unsigned i) const;
  void set_bit(unsigned i, bool value);
  std::uint64_t low64() const noexcept { return limbs_[0]; }
  std::span<const std::uint64_t> limbs() const noexcept {
    return {limbs_.data(), limb_count()};
  }
  bool is_zero() const noexcept;
  bool fits_u64() const noexcept;

  // Truncates or zero-extends to a new width.
  WordN resized(unsigned width) const;

  // Lowercase hex without prefix, "0" for zero.
  std::string to_hex() const;

  WordN& operator+=(const WordN& o) {
    if (!single(o)) return add_wide(o);
    limbs_[0] = (limbs_[0] + o.limbs_[0]) & low_mask();
    return *this;
  }
  WordN& operator-=(const WordN& o) {
    if (!single(o)) return sub_wide(o);
    limbs_[0] = (limbs_[0] - o.limbs_[0]) & low_mask();
    return *this;
  }
  WordN& operator*=(const WordN& o) {
    if (!single(o)) return mul_wide(o);
    limbs_[0] = (limbs_[0] * o.limbs_[0]) & low_mask();
    return *this;
  }
  WordN& operator&=(const WordN& o) {
    if (!single(o)) return and_wide(o);
    limbs_[0] &= o.limbs_[0];
    return *this;
  }
  WordN& operator|=(const WordN& o) {
    if (!single(o)) return or_wide(o);
    limbs_[0] |= o.limbs_[0];
    return *this;
  }
  WordN& operator^=(const WordN& o) {
    if (!single(o)) return xor_wide(o);
    limbs_[0] ^= o.limbs_[0];
    return *this;
  }
  WordN& operator<<=(unsigned s) {
    if (width_ > 64) return shl_wide(s);
    limbs_[0] = s >= width_ ? 0 : (limbs_[0] << s) & low_mask();
    return *this;
  }

  friend WordN operator+(WordN a, const WordN& b) { return a += b; }
  friend WordN operator-(WordN a, const WordN& b) { return a -= b; }
  friend WordN operator*(WordN a, const WordN& b) { return a *= b; }
  friend WordN operator&(WordN a, const WordN& b) { return a &= b; }
  friend WordN operator|(WordN a, const WordN& b) { return a |= b; }
  friend WordN operator^(WordN a, const WordN& b) { return a ^= b; }
  friend WordN operator<<(WordN a, unsigned s) { return a <<= s; }
  WordN operator~() const {
    if (width_ > 64) return not_wide();
    WordN r = *this;
    r.limbs_[0] = ~r.limbs_[0] & low_mask();
    return r;
  }
  WordN operator-() const {
    WordN zero(width_);
    return zero -= *this;
  }

  friend bool operator==(const WordN& a, const WordN& b) noexcept;
  // Orders by width, then by value.
  friend std::strong_ordering operator<=>(const WordN& a, const WordN& b) noexcept;

 private:
  unsigned limb_count() const noexcept { return (width_ + 63) / 64; }
  void normalize() noexcept;
  void require_same_width(const WordN& o) const;
  [[noreturn]] static void throw_bad_width(unsigned width);
  std::uint64_t low_mask() const noexcept {
    return width_ >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_) - 1;
  }
  // Both operands fit one limb and share a width.
  bool single(const WordN& o) const noexcept { return width_ <= 64 && o.width_ == width_; }
  WordN& add_wide(const WordN& o);
  WordN& sub_wide(const WordN& o);
  WordN& mul_wide(const WordN& o);
  WordN& and_wide(const WordN& o);
  WordN& or_wide(const WordN& o);
  WordN& xor_wide(const WordN& o);
  WordN& shl_wide(unsigned s);
  WordN not_wide() const;

  Limbs limbs_{};
  std::uint16_t width_;
};

using WordFn = std::function<WordN(const WordN&)>;

// Ordered m-tuple (x^0, ..., x^{m-1}) of words of one shared width n, m*n <= 512.
class StateVector {
 public:
  StateVector(unsigned m, unsigned n);
  explicit StateVector(std::vector<WordN> components);
  static StateVector from_values(unsigned n, std::span<const std::uint64_t> values);
  static StateVector from_values(unsigned n, std::initializer_list<std::uint64_t> values) {
    return from_values(n, std::span<const std::uint64_t>(values.begin(), values.size()));
  }

  unsigned size() const noexcept { return static_cast<unsigned>(components_.size()); }
  unsigned width() const noexcept { return width_; }
  const WordN& operator[](std::size_t i) const { return components_[i]; }
  void set(std::size_t i, WordN value);
  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }
  const std::vector<WordN>& components() const noexcept { return components_; }

  StateVector resized(unsigned width) const;

  // Packs component j into bits [j*n, (j+1)*n); requires m*n <= 64.
  std::uint64_t pack() const;
  static StateVector unpack(std::uint64_t packed, unsigned m, unsigned n);

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<WordN> components_;
  unsigned width_;
};

using MultiFn = std::function<StateVector(const StateVector&)>;

// The bijection B: bit k = l*m + r of the result is bit l of component r.
WordN interleave(const StateVector& v);
StateVector deinterleave(const WordN& x, unsigned m, unsigned n);

}  // namespace ergodic
