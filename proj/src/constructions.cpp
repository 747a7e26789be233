#include "ergodic/constructions.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ergodic {

namespace {

// Bits [from, width) of x as a word of width - from.
WordN high_part(const WordN& x, unsigned from) {
  const unsigned w = x.width() - from;
  auto src = x.limbs();
  WordN::Limbs out{};
  const unsigned whole = from / 64, part = from % 64;
  for (unsigned i = 0; i + whole < src.size(); ++i) {
    std::uint64_t v = src[i + whole] >> part;
    if (part != 0 && i + whole + 1 < src.size()) v |= src[i + whole + 1] << (64 - part);
    out[i] = v;
  }
  return WordN::from_limbs(w, out);
}

WordN combine(Combine c, const WordN& a, const WordN& b) { return c == Combine::plus ? a + b : a ^ b; }

void require_ergodic(const UnivariateMap& f, const std::string& what) {
  if (!f.is_ergodic()) {
    throw KindError(what + " must be tagged ergodic, got " + to_string(f.kind()) + " (" + f.provenance() + ")");
  }
}

void require_measure_preserving(const UnivariateMap& g, const std::string& what) {
  if (!g.is_measure_preserving()) {
    throw KindError(what + " must be tagged measure_preserving, got " + to_string(g.kind()) + " (" +
                    g.provenance() + ")");
  }
}

}  // namespace

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::measure_preserving: return "measure_preserving";
    case MapKind::ergodic: return "ergodic";
    case MapKind::unverified: return "unverified";
  }
  return "?";
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::conjugate: return "conjugate";
    case Construction::wp_mult_xor: return "wp_mult_xor";
    case Construction::wp_mult_plus: return "wp_mult_plus";
    case Construction::klimov_shamir: return "klimov_shamir";
    case Construction::wreath_lift: return "wreath_lift";
    case Construction::custom: return "custom";
  }
  return "?";
}

// --- UnivariateMap ---

UnivariateMap::UnivariateMap(WordFn fn, MapKind kind, std::string provenance, unsigned min_width)
    : fn_(std::move(fn)), kind_(kind), provenance_(std::move(provenance)), min_width_(min_width) {
  if (!fn_) throw std::invalid_argument("univariate map needs a callable");
}

UnivariateMap UnivariateMap::from_expr(const TFuncExpr& e, MapKind claimed) {
  return UnivariateMap([e](const WordN& x) { return e.eval(x); }, claimed, "expr(" + e.to_string() + ")");
}

UnivariateMap UnivariateMap::identity() {
  return UnivariateMap([](const WordN& x) { return x; }, MapKind::measure_preserving, "identity");
}

WordN UnivariateMap::operator()(const WordN& x) const {
  if (x.width() < min_width_) {
    throw std::invalid_argument(provenance_ + " is defined only for widths >= " + std::to_string(min_width_));
  }
  return fn_(x);
}

UnivariateMap mk_measure_preserving(const TFuncExpr& v, const WordN& d) {
  WordN d512 = d.resized(kMaxWidth);
  return UnivariateMap(
      [v, d512](const WordN& x) { return d512.resized(x.width()) + x + (v.eval(x) << 1); },
      MapKind::measure_preserving, "measure_preserving(v=" + v.to_string() + ", d=0x" + d.to_hex() + ")");
}

UnivariateMap mk_ergodic(const TFuncExpr& v) {
  return UnivariateMap(
      [v](const WordN& x) {
        const WordN one(x.width(), 1);
        return one + x + ((v.eval(x + one) - v.eval(x)) << 1);
      },
      MapKind::ergodic, "ergodic(v=" + v.to_string() + ")");
}

// --- EvenParameter ---

namespace {

// Empty when u is an even parameter at levels r <= min(r_max, n-1), else the reason.
std::string even_parameter_failure(const EvenParameter::Fn& u, unsigned m, unsigned n, unsigned r_max) {
  if (m < 1 || n < 1) throw std::invalid_argument("even parameter needs m, n >= 1");
  if (static_cast<unsigned long>(r_max) * m > 24) {
    throw std::invalid_argument("even-parameter check bound exceeded: r_max*m = " + std::to_string(r_max * m) +
                                " > 24");
  }
  const unsigned top = std::min(r_max, n - 1);
  std::vector<WordN> comps(m, WordN(n));
  auto at = [&](std::uint64_t p, unsigned bits) {
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    for (unsigned j = 0; j < m; ++j) comps[j] = WordN(n, (p >> (j * bits)) & mask);
    return u(StateVector(comps)).resized(n);
  };
  std::mt19937_64 rng(0x5eed);
  for (unsigned r = 0; r <= top; ++r) {
    unsigned parity = 0;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << (r * m)); ++p) parity ^= at(p, r).bit(r) ? 1U : 0U;
    if (parity != 0) return "odd bit-level sum at r = " + std::to_string(r);

    // Bit r may only depend on bits below r of each component.
    const auto low_differs = [&](const StateVector& x) {
      std::vector<WordN> low;
      for (const WordN& c : x) low.push_back(c & ~WordN::high_mask(n, r));
      return u(x).resized(n).bit(r) != u(StateVector(low)).resized(n).bit(r);
    };
    bool depends = false;
    if ((r + 1) * m <= 16) {
      const unsigned bits = std::min(r + 1, n);
      for (std::uint64_t p = 0; p < (std::uint64_t{1} << (bits * m)) && !depends; ++p) {
        const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
        std::vector<WordN> x;
        for (unsigned j = 0; j < m; ++j) x.emplace_back(n, (p >> (j * bits)) & mask);
        depends = low_differs(StateVector(x));
      }
    }
    for (int trial = 0; trial < 256 && !depends; ++trial) {
      std::vector<WordN> x;
      for (unsigned j = 0; j < m; ++j) {
        WordN::Limbs limbs{};
        for (auto& l : limbs) l = rng();
        x.push_back(WordN::from_limbs(n, limbs));
      }
      depends = low_differs(StateVector(x));
    }
    if (depends) return "bit " + std::to_string(r) + " depends on bit " + std::to_string(r) + " or above of an input";
  }
  return {};
}

}  // namespace

bool check_even_parameter(const EvenParameter::Fn& u, unsigned m, unsigned n, unsigned r_max) {
  return even_parameter_failure(u, m, n, r_max).empty();
}

EvenParameter::EvenParameter(Fn fn, unsigned m, unsigned n, std::optional<unsigned> r_max, std::string description)
    : fn_(std::move(fn)), m_(m), n_(n), description_(std::move(description)) {
  const unsigned bound = r_max.value_or(default_even_level_bound(m));
  const std::string failure = even_parameter_failure(fn_, m, n, bound);
  if (!failure.empty()) throw std::invalid_argument("not an even parameter: " + description_ + ": " + failure);
  validated_levels_ = std::min(bound, n - 1) + 1;
}

EvenParameter EvenParameter::constant(const WordN& c, unsigned m, unsigned n) {
  WordN c512 = c.resized(kMaxWidth);
  return EvenParameter([c512](const StateVector& x) { return c512.resized(x.width()); }, m, n, std::nullopt,
                       "const(0x" + c.to_hex() + ")");
}

EvenParameter EvenParameter::from_interleaved_expr(const TFuncExpr& e, unsigned m, unsigned n) {
  return EvenParameter([e](const StateVector& x) { return e.eval(interleave(x)).resized(x.width()); }, m, n,
                       std::nullopt, "expr(" + e.to_string() + ")");
}

// --- MultivariateMap ---

MultivariateMap::MultivariateMap(unsigned m, unsigned n, MultiFn fn, Construction construction, MapKind kind,
                                 std::string provenance, unsigned min_width)
    : m_(m),
      n_(n),
      fn_(std::move(fn)),
      construction_(construction),
      kind_(kind),
      provenance_(std::move(provenance)),
      min_width_(min_width) {
  if (m < 1 || n < 1 || static_cast<unsigned long>(m) * n > kMaxWidth) {
    throw std::invalid_argument("multivariate map needs m, n >= 1 and m*n <= 512");
  }
  if (!fn_) throw std::invalid_argument("multivariate map needs a callable");
}

MultivariateMap MultivariateMap::custom(unsigned m, unsigned n, MultiFn fn, MapKind claimed, std::string provenance) {
  return MultivariateMap(m, n, std::move(fn), Construction::custom, claimed, std::move(provenance));
}

StateVector MultivariateMap::operator()(const StateVector& x) const {
  if (x.size() != m_) {
    throw std::invalid_argument("map expects " + std::to_string(m_) + " components, got " + std::to_string(x.size()));
  }
  if (x.width() < min_width_) {
    throw std::invalid_argument(provenance_ + " is defined only for component widths >= " +
                                std::to_string(min_width_));
  }
  return fn_(x);
}

MultivariateMap conjugate_multivariate(const UnivariateMap& H, unsigned m, unsigned n) {
  if (m < 1 || static_cast<unsigned long>(m) * n > kMaxWidth) {
    throw std::invalid_argument("conjugate needs m*n <= 512");
  }
  MultiFn fn = [H, m](const StateVector& x) { return deinterleave(H(interleave(x)), m, x.width()); };
  return MultivariateMap(m, n, std::move(fn), Construction::conjugate, H.kind(),
                         "conjugate(" + H.provenance() + ")");
}

MultivariateMap mk_multivariate_ergodic(unsigned n, const std::vector<std::vector<UnivariateMap>>& f,
                                        const std::vector<std::vector<UnivariateMap>>& g, Combine combine_mode,
                                        std::vector<std::optional<EvenParameter>> u) {
  const unsigned m = static_cast<unsigned>(f.size());
  if (m < 1) throw std::invalid_argument("f must have at least one row");
  for (unsigned t = 0; t < m; ++t) {
    if (f[t].size() != m) throw std::invalid_argument("f must be an m x m array");
    for (unsigned r = 0; r < m; ++r) {
      require_ergodic(f[t][r], "f[" + std::to_string(t) + "][" + std::to_string(r) + "]");
    }
  }
  if (g.size() != m) throw std::invalid_argument("g must have m rows (row 0 empty)");
  for (unsigned t = 0; t < m; ++t) {
    if (g[t].size() != t) {
      throw std::invalid_argument("g row " + std::to_string(t) + " must have " + std::to_string(t) + " entries");
    }
    for (unsigned s = 0; s < t; ++s) {
      require_measure_preserving(g[t][s], "g[" + std::to_string(t) + "][" + std::to_string(s) + "]");
    }
  }

  MultiFn fn = [f, g, combine_mode, m](const StateVector& x) {
    const unsigned w = x.width();
    std::vector<WordN> out;
    out.reserve(m);
    for (unsigned t = 0; t < m; ++t) {
      WordN acc = WordN::all_ones(w);
      for (unsigned s = 0; s < t; ++s) acc &= g[t][s](x[s]);
      for (unsigned r = 0; r < m; ++r) acc &= f[t][r](x[r]) ^ x[r];
      out.push_back(combine(combine_mode, x[t], acc));
    }
    return StateVector(std::move(out));
  };
  const Construction kind = combine_mode == Combine::plus ? Construction::wp_mult_plus : Construction::wp_mult_xor;
  MultivariateMap base(m, n, std::move(fn), kind, MapKind::ergodic,
                       std::string(combine_mode == Combine::plus ? "wp_mult_plus" : "wp_mult_xor") +
                           "(m=" + std::to_string(m) + ")");
  if (u.empty()) return base;
  return perturb(base, std::move(u), combine_mode);
}

MultivariateMap mk_klimov_shamir(const UnivariateMap& h, unsigned m, unsigned n) {
  require_ergodic(h, "klimov_shamir h");
  if (m == 1) {
    return MultivariateMap(
        1, n, [h](const StateVector& x) { return StateVector(std::vector<WordN>{h(x[0])}); },
        Construction::klimov_shamir, MapKind::ergodic, "klimov_shamir(" + h.provenance() + ", m=1)");
  }
  MultiFn fn = [h, m](const StateVector& x) {
    WordN all = x[0];
    for (unsigned s = 1; s < m; ++s) all &= x[s];
    const WordN a = h(all) ^ all;
    WordN prefix = WordN::all_ones(x.width());
    std::vector<WordN> out;
    out.reserve(m);
    for (unsigned s = 0; s < m; ++s) {
      out.push_back(x[s] ^ (a & prefix));
      prefix &= x[s];
    }
    return StateVector(std::move(out));
  };
  return MultivariateMap(m, n, std::move(fn), Construction::klimov_shamir, MapKind::ergodic,
                         "klimov_shamir(" + h.provenance() + ", m=" + std::to_string(m) + ")");
}

MultivariateMap perturb(const MultivariateMap& base, std::vector<std::optional<EvenParameter>> u, Combine mode) {
  const bool xor_family =
      base.construction() == Construction::wp_mult_xor || base.construction() == Construction::klimov_shamir;
  const bool plus_family = base.construction() == Construction::wp_mult_plus;
  if (!(mode == Combine::bit_xor ? xor_family : plus_family)) {
    throw std::invalid_argument("even parameters combine by " +
                                std::string(mode == Combine::plus ? "addition" : "XOR") + " only into " +
                                (mode == Combine::plus ? "wp_mult_plus" : "wp_mult_xor/klimov_shamir") +
                                " maps, got " + to_string(base.construction()));
  }
  if (u.size() != base.m()) throw std::invalid_argument("need one (optional) even parameter per component");
  std::string desc;
  for (unsigned t = 0; t < u.size(); ++t) {
    if (!u[t]) continue;
    if (u[t]->m() != base.m()) throw std::invalid_argument("even parameter variable count mismatch");
    desc += (desc.empty() ? "" : ", ") + std::string("u") + std::to_string(t) + "=" + u[t]->description();
  }
  MultiFn inner = base.fn_;
  MultiFn fn = [inner, u, mode](const StateVector& x) {
    StateVector y = inner(x);
    for (unsigned t = 0; t < u.size(); ++t) {
      if (u[t]) y.set(t, combine(mode, y[t], (*u[t])(x)));
    }
    return y;
  };
  MultivariateMap out(base.m(), base.n(), std::move(fn), base.construction(), base.kind(),
                      base.provenance() + (desc.empty() ? "" : " with " + desc), base.min_width());
  out.even_ = std::move(u);
  return out;
}

// --- PermutationTable ---

PermutationTable::PermutationTable(unsigned m, unsigned n, std::vector<std::uint32_t> image)
    : m_(m), n_(n), image_(std::move(image)) {
  if (m < 1 || n < 1 || m * n > kMaxTableBits) {
    throw std::invalid_argument("permutation table needs 1 <= m*n <= 24");
  }
  const std::size_t size = std::size_t{1} << (m * n);
  if (image_.size() != size) {
    throw std::invalid_argument("permutation table must have 2^(m*n) = " + std::to_string(size) + " entries");
  }
  std::vector<bool> seen(size, false);
  for (auto v : image_) {
    if (v >= size || seen[v]) throw std::invalid_argument("table is not a bijection (value " + std::to_string(v) + ")");
    seen[v] = true;
  }
  std::size_t length = 0;
  std::uint32_t x = 0;
  do {
    x = image_[x];
    ++length;
  } while (x != 0);
  single_cycle_ = length == size;
}

PermutationTable PermutationTable::univariate(std::vector<std::uint32_t> image) {
  std::size_t size = image.size();
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  return PermutationTable(1, bits, std::move(image));
}

PermutationTable PermutationTable::random_single_cycle(unsigned m, unsigned n, std::mt19937_64& rng) {
  if (m < 1 || n < 1 || m * n > kMaxTableBits) throw std::invalid_argument("permutation table needs 1 <= m*n <= 24");
  const std::uint32_t size = std::uint32_t{1} << (m * n);
  std::vector<std::uint32_t> a(size);
  std::iota(a.begin(), a.end(), 0U);
  for (std::uint32_t i = size - 1; i > 0; --i) std::swap(a[i], a[rng() % i]);
  return PermutationTable(m, n, std::move(a));
}

StateVector PermutationTable::operator()(const StateVector& x) const {
  if (x.size() != m_ || x.width() != n_) throw std::invalid_argument("table applied to a vector of the wrong shape");
  return StateVector::unpack(image_[x.pack()], m_, n_);
}

// --- wreath products ---

std::string WreathCheck::describe() const {
  switch (verdict) {
    case WreathVerdict::ok:
      return "conditions hold";
    case WreathVerdict::rho0_depends_on_x:
      return "rho_0 depends on x (z=" + std::to_string(z) + ", x=" + std::to_string(x) + ")";
    case WreathVerdict::rho_not_triangular:
      return "rho_" + std::to_string(level) + " depends on bit " + std::to_string(level) +
             " or above of x (z=" + std::to_string(z) + ", x=" + std::to_string(x) + ")";
    case WreathVerdict::rho0_sum_even:
      return "sum of rho_0(z) over z is even";
    case WreathVerdict::rho_sum_even:
      return "sum of rho_" + std::to_string(level) + " is even";
  }
  return "?";
}

WreathCheck check_wreath_conditions(const std::vector<UnivariateMap>& family, unsigned M, unsigned i_max) {
  if (M < 1 || M + i_max > 24) throw std::invalid_argument("wreath check bound exceeded: need 1 <= M and M + i_max <= 24");
  const std::uint64_t zs = std::uint64_t{1} << M;
  if (family.size() != zs) throw std::invalid_argument("family must have 2^M members");
  const unsigned w = i_max + 1;
  const std::uint64_t xs = std::uint64_t{1} << i_max;
  std::vector<unsigned> sums(i_max + 1, 0);
  std::vector<std::uint64_t> rho(xs);
  for (std::uint64_t z = 0; z < zs; ++z) {
    for (std::uint64_t x = 0; x < xs; ++x) rho[x] = family[z](WordN(w, x)).low64() ^ x;
    for (std::uint64_t x = 0; x < xs; ++x) {
      if ((rho[x] ^ rho[0]) & 1U) return {WreathVerdict::rho0_depends_on_x, 0, z, x};
    }
    for (unsigned i = 1; i <= i_max; ++i) {
      const std::uint64_t mask = (std::uint64_t{1} << i) - 1;
      for (std::uint64_t x = 0; x < xs; ++x) {
        if (((rho[x] ^ rho[x & mask]) >> i) & 1U) return {WreathVerdict::rho_not_triangular, i, z, x};
      }
    }
    sums[0] ^= rho[0] & 1U;
    for (unsigned i = 1; i <= i_max; ++i) {
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << i); ++x) sums[i] ^= (rho[x] >> i) & 1U;
    }
  }
  if (sums[0] == 0) return {WreathVerdict::rho0_sum_even, 0, 0, 0};
  for (unsigned i = 1; i <= i_max; ++i) {
    if (sums[i] == 0) return {WreathVerdict::rho_sum_even, i, 0, 0};
  }
  return {};
}

UnivariateMap wreath_product(const PermutationTable& T, const std::vector<UnivariateMap>& family) {
  if (T.m() != 1) throw std::invalid_argument("wreath_product needs a univariate table");
  if (!T.single_cycle()) throw std::invalid_argument("wreath_product needs a single-cycle table T");
  const unsigned M = T.n();
  if (family.size() != (std::size_t{1} << M)) throw std::invalid_argument("family must have 2^M members");
  const unsigned bound = std::min(8U, 24 - M);
  const bool conditions = static_cast<bool>(check_wreath_conditions(family, M, bound));
  const std::uint64_t low_mask = (std::uint64_t{1} << M) - 1;
  WordFn fn = [T, family, M, low_mask](const WordN& x) {
    const auto z = static_cast<std::uint32_t>(x.low64() & low_mask);
    WordN out(x.width(), T(z));
    if (x.width() == M) return out;
    return out | (family[z](high_part(x, M)).resized(x.width()) << M);
  };
  return UnivariateMap(std::move(fn), conditions ? MapKind::ergodic : MapKind::unverified,
                       "wreath_product(M=" + std::to_string(M) +
                           (conditions ? ", conditions verified to i=" + std::to_string(bound) : ", conditions fail") +
                           ")",
                       M);
}

MultivariateMap wreath_lift(const PermutationTable& T, const MultivariateMap& H) {
  if (!T.single_cycle()) throw std::invalid_argument("wreath_lift needs a single-cycle table T");
  if (T.m() != H.m()) throw std::invalid_argument("wreath_lift: T and H disagree on m");
  if (!H.is_ergodic()) throw KindError("wreath_lift H must be tagged ergodic (" + H.provenance() + ")");
  const unsigned base = T.n();
  MultiFn fn = [T, H, base](const StateVector& x) {
    const unsigned w = x.width();
    StateVector low = T(x.resized(base)).resized(w);
    if (w == base) return low;
    const StateVector high = H(x);
    const WordN mask = WordN::high_mask(w, base);
    std::vector<WordN> out;
    out.reserve(x.size());
    for (unsigned j = 0; j < x.size(); ++j) out.push_back(low[j] | (high[j] & mask));
    return StateVector(std::move(out));
  };
  return MultivariateMap(H.m(), std::max(H.n(), base), std::move(fn), Construction::wreath_lift, MapKind::ergodic,
                         "wreath_lift(table " + std::to_string(T.m()) + "x" + std::to_string(base) + " bits, " +
                             H.provenance() + ")",
                         base);
}

}  // namespace ergodic
