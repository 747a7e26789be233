#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergodic/tfunc.hpp"
#include "ergodic/word.hpp"

namespace ergodic {

// What a map is known to be. Ergodic maps are also measure preserving.
enum class MapKind { measure_preserving, ergodic, unverified };

std::string to_string(MapKind kind);

// Raised when a builder receives a map without the tag its recipe requires.
class KindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Width-polymorphic map of Z/2^w to itself. Built maps accept any width in
// [min_width, 512] and return a word of the same width.
class UnivariateMap {
 public:
  UnivariateMap(WordFn fn, MapKind kind, std::string provenance, unsigned min_width = 1);

  // A raw expression whose kind is asserted by the caller.
  static UnivariateMap from_expr(const TFuncExpr& e, MapKind claimed);
  static UnivariateMap identity();

  WordN operator()(const WordN& x) const;
  MapKind kind() const noexcept { return kind_; }
  bool is_measure_preserving() const noexcept { return kind_ != MapKind::unverified; }
  bool is_ergodic() const noexcept { return kind_ == MapKind::ergodic; }
  const std::string& provenance() const noexcept { return provenance_; }
  unsigned min_width() const noexcept { return min_width_; }

 private:
  WordFn fn_;
  MapKind kind_;
  std::string provenance_;
  unsigned min_width_;
};

// x -> d + x + 2*v(x)
UnivariateMap mk_measure_preserving(const TFuncExpr& v, const WordN& d);
// x -> 1 + x + 2*(v(x+1) - v(x))
UnivariateMap mk_ergodic(const TFuncExpr& v);

enum class Construction { conjugate, wp_mult_xor, wp_mult_plus, klimov_shamir, wreath_lift, custom };
enum class Combine { bit_xor, plus };

std::string to_string(Construction c);

// An m-variate map u whose bit-r level sums over all inputs below 2^r are
// even. Validated on construction for levels r <= min(r_max, n-1).
class EvenParameter {
 public:
  using Fn = std::function<WordN(const StateVector&)>;

  // Throws std::invalid_argument when some validated level has an odd sum.
  EvenParameter(Fn fn, unsigned m, unsigned n, std::optional<unsigned> r_max = std::nullopt,
                std::string description = "custom");

  static EvenParameter constant(const WordN& c, unsigned m, unsigned n);
  // u(x) = e(B(x)) truncated to the component width.
  static EvenParameter from_interleaved_expr(const TFuncExpr& e, unsigned m, unsigned n);

  WordN operator()(const StateVector& x) const { return fn_(x).resized(x.width()); }
  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  unsigned validated_levels() const noexcept { return validated_levels_; }
  const std::string& description() const noexcept { return description_; }

 private:
  Fn fn_;
  unsigned m_, n_;
  unsigned validated_levels_;
  std::string description_;
};

inline unsigned default_even_level_bound(unsigned m) { return 16 / m; }

// For every r <= r_max (and r < n): bit r of u(x) depends only on bits below r
// of each component, and its sum over all x with components < 2^r is even.
// Requires r_max*m <= 24.
bool check_even_parameter(const EvenParameter::Fn& u, unsigned m, unsigned n, unsigned r_max);

class MultivariateMap {
 public:
  MultivariateMap(unsigned m, unsigned n, MultiFn fn, Construction construction, MapKind kind,
                  std::string provenance, unsigned min_width = 1);

  // Applies at any component width in [min_width, 512/m].
  StateVector operator()(const StateVector& x) const;

  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  Construction construction() const noexcept { return construction_; }
  MapKind kind() const noexcept { return kind_; }
  bool is_ergodic() const noexcept { return kind_ == MapKind::ergodic; }
  unsigned min_width() const noexcept { return min_width_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const std::vector<std::optional<EvenParameter>>& even_parameters() const noexcept { return even_; }

  // Every construction except wreath_lift (below its threshold) and custom
  // is a T-function on the interleaved word.
  bool is_compatible_construction() const noexcept {
    return construction_ != Construction::wreath_lift && construction_ != Construction::custom;
  }

  static MultivariateMap custom(unsigned m, unsigned n, MultiFn fn, MapKind claimed, std::string provenance);

 private:
  friend MultivariateMap perturb(const MultivariateMap&, std::vector<std::optional<EvenParameter>>, Combine);

  unsigned m_, n_;
  MultiFn fn_;
  Construction construction_;
  MapKind kind_;
  std::string provenance_;
  unsigned min_width_;
  std::vector<std::optional<EvenParameter>> even_;
};

// H^B = B^{-1} o H o B, applied with H at width m*w.
MultivariateMap conjugate_multivariate(const UnivariateMap& H, unsigned m, unsigned n);

// Component t: x^t (+) ((AND_{s<t} g[t][s](x^s)) & AND_r (f[t][r](x^r) ^ x^r)),
// with (+) the chosen combine. f is m x m ergodic, g row t has t measure
// preserving entries (row 0 empty). Optional even parameters are combined
// into component t last.
MultivariateMap mk_multivariate_ergodic(unsigned n, const std::vector<std::vector<UnivariateMap>>& f,
                                        const std::vector<std::vector<UnivariateMap>>& g, Combine combine,
                                        std::vector<std::optional<EvenParameter>> u = {});

// h^s = x^s ^ ((h(w) ^ w) & x^0 & ... & x^{s-1}), w = x^0 & ... & x^{m-1}.
MultivariateMap mk_klimov_shamir(const UnivariateMap& h, unsigned m, unsigned n);

// Combines even parameters into a map of the XOR/PLUS family: XOR into wp_mult_xor
// or klimov_shamir maps, addition into wp_mult_plus maps.
MultivariateMap perturb(const MultivariateMap& base, std::vector<std::optional<EvenParameter>> u, Combine combine);

// Explicit permutation of (Z/2^n)^m (m = 1 for the univariate case), indexed
// by StateVector::pack. Limited to m*n <= 24.
class PermutationTable {
 public:
  PermutationTable(unsigned m, unsigned n, std::vector<std::uint32_t> image);

  static PermutationTable univariate(std::vector<std::uint32_t> image);
  // Uniformly random single cycle (Sattolo's algorithm).
  static PermutationTable random_single_cycle(unsigned m, unsigned n, std::mt19937_64& rng);

  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  unsigned bits() const noexcept { return m_ * n_; }
  std::size_t size() const noexcept { return image_.size(); }
  bool single_cycle() const noexcept { return single_cycle_; }

  std::uint32_t operator()(std::uint32_t index) const { return image_.at(index); }
  StateVector operator()(const StateVector& x) const;

 private:
  unsigned m_, n_;
  std::vector<std::uint32_t> image_;
  bool single_cycle_;
};

inline constexpr unsigned kMaxTableBits = 24;

// W(x) = T(x mod 2^M) + 2^M * H_{x mod 2^M}(x >> M). Defined for widths >= M.
// Tagged ergodic when check_wreath_conditions passes at the recorded bound.
UnivariateMap wreath_product(const PermutationTable& T, const std::vector<UnivariateMap>& family);

enum class WreathVerdict {
  ok,
  rho0_depends_on_x,   // condition (1) at i = 0
  rho_not_triangular,  // rho_i depends on bit i or above of x
  rho0_sum_even,       // condition (2)
  rho_sum_even,        // condition (3) at `level`
};

struct WreathCheck {
  WreathVerdict verdict = WreathVerdict::ok;
  unsigned level = 0;
  std::uint64_t z = 0;
  std::uint64_t x = 0;
  explicit operator bool() const noexcept { return verdict == WreathVerdict::ok; }
  std::string describe() const;
};

// rho_i(z;x) = bit i of H_z(x) XOR bit i of x, family evaluated at width i_max+1.
// Requires M + i_max <= 24.
WreathCheck check_wreath_conditions(const std::vector<UnivariateMap>& family, unsigned M, unsigned i_max);

// W^B(x) = T(x mod 2^n) + (H(x) & (-2^n)) component-wise, for widths >= n.
MultivariateMap wreath_lift(const PermutationTable& T, const MultivariateMap& H);

}  // namespace ergodic
