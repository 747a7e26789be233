#include "ergodic/generators.hpp"

#include <algorithm>

namespace ergodic {

// --- BitPermutation ---

BitPermutation::BitPermutation(Kind kind, std::vector<unsigned> destination)
    : kind_(kind), destination_(std::move(destination)) {
  const unsigned n = width();
  if (n < 1 || n > kMaxWidth) throw std::invalid_argument("bit permutation width must be in [1, 512]");
  std::vector<bool> seen(n, false);
  for (unsigned d : destination_) {
    if (d >= n || seen[d]) throw std::invalid_argument("bit table is not a permutation of positions 0..n-1");
    seen[d] = true;
  }
  if (destination_[n - 1] != 0) {
    throw std::invalid_argument("bit permutation must send position n-1 to position 0 (got " +
                                std::to_string(destination_[n - 1]) + ")");
  }
}

BitPermutation BitPermutation::reverse(unsigned n) {
  std::vector<unsigned> d(n);
  for (unsigned i = 0; i < n; ++i) d[i] = n - 1 - i;
  return BitPermutation(Kind::reverse, std::move(d));
}

BitPermutation BitPermutation::rotate_up(unsigned n) {
  std::vector<unsigned> d(n);
  for (unsigned i = 0; i < n; ++i) d[i] = (i + 1) % n;
  return BitPermutation(Kind::rotate_up, std::move(d));
}

BitPermutation BitPermutation::custom(std::vector<unsigned> destination) {
  return BitPermutation(Kind::custom, std::move(destination));
}

BitPermutation mk_pi(unsigned n, BitPermutation::Kind kind) {
  switch (kind) {
    case BitPermutation::Kind::reverse: return BitPermutation::reverse(n);
    case BitPermutation::Kind::rotate_up: return BitPermutation::rotate_up(n);
    case BitPermutation::Kind::custom: break;
  }
  throw std::invalid_argument("custom bit permutations need an explicit table");
}

WordN BitPermutation::operator()(const WordN& z) const {
  const unsigned n = width();
  if (z.width() != n) throw std::invalid_argument("bit permutation applied to a word of the wrong width");
  if (n <= 64) {
    const std::uint64_t v = z.low64();
    if (kind_ == Kind::rotate_up && n > 1) return WordN(n, (v << 1) | (v >> (n - 1)));
    if (kind_ == Kind::reverse) {
      std::uint64_t r = v;
      r = ((r >> 1) & 0x5555555555555555ULL) | ((r & 0x5555555555555555ULL) << 1);
      r = ((r >> 2) & 0x3333333333333333ULL) | ((r & 0x3333333333333333ULL) << 2);
      r = ((r >> 4) & 0x0f0f0f0f0f0f0f0fULL) | ((r & 0x0f0f0f0f0f0f0f0fULL) << 4);
      r = __builtin_bswap64(r);
      return WordN(n, r >> (64 - n));
    }
    std::uint64_t out = 0;
    for (unsigned i = 0; i < n; ++i) out |= ((v >> i) & 1U) << destination_[i];
    return WordN(n, out);
  }
  WordN out(n);
  for (unsigned i = 0; i < n; ++i) {
    if (z.bit(i)) out.set_bit(destination_[i], true);
  }
  return out;
}

// --- stepping ---

namespace {

StateVector output_argument(const StateVector& x, const BitPermutation& pi) {
  const unsigned m = x.size();
  std::vector<WordN> arg;
  arg.reserve(m);
  arg.push_back(pi(x[m - 1]));
  for (unsigned j = 0; j + 1 < m; ++j) arg.push_back(x[j]);
  return StateVector(std::move(arg));
}

void require_shape(const MultivariateMap& map, unsigned m, unsigned n, const char* what) {
  if (map.m() != m || map.n() != n) {
    throw std::invalid_argument(std::string(what) + " has shape m=" + std::to_string(map.m()) +
                                ", n=" + std::to_string(map.n()) + "; expected m=" + std::to_string(m) +
                                ", n=" + std::to_string(n));
  }
  if (!map.is_ergodic()) throw KindError(std::string(what) + " must be tagged ergodic (" + map.provenance() + ")");
}

}  // namespace

std::pair<GeneratorState, StateVector> next_plain(const GeneratorState& state, const MultivariateMap& H,
                                                  const MultivariateMap& F, const BitPermutation& pi) {
  StateVector y = F(output_argument(state.x, pi));
  return {GeneratorState{H(state.x), state.step + 1}, std::move(y)};
}

CounterDependentConfig::CounterDependentConfig(unsigned M, std::vector<StateVector> c,
                                               std::vector<MultivariateMap> transitions,
                                               std::vector<MultivariateMap> outputs, BitPermutation pi)
    : M_(M), c_(std::move(c)), transitions_(std::move(transitions)), outputs_(std::move(outputs)), pi_(std::move(pi)) {
  using C = CounterConditionError::Condition;
  if (M < 3 || M % 2 == 0) throw CounterConditionError(C::modulus, "M must be odd and greater than 1, got " + std::to_string(M));
  if (c_.size() != M || transitions_.size() != M || outputs_.size() != M) {
    throw CounterConditionError(C::shape, "c, transition and output lists must each have M = " + std::to_string(M) + " entries");
  }
  m_ = transitions_[0].m();
  n_ = transitions_[0].n();
  for (unsigned j = 0; j < M; ++j) {
    require_shape(transitions_[j], m_, n_, "transition map");
    require_shape(outputs_[j], m_, n_, "output map");
    if (c_[j].size() != m_ || c_[j].width() != n_) {
      throw CounterConditionError(C::shape, "c_" + std::to_string(j) + " must have m components of width n");
    }
  }
  if (pi_.width() != n_) throw std::invalid_argument("bit permutation width must equal n");

  std::vector<unsigned> low(M);
  unsigned sum = 0;
  for (unsigned j = 0; j < M; ++j) {
    low[j] = c_[j][0].bit(0) ? 1U : 0U;
    sum += low[j];
  }
  if (sum % 2 != 0) {
    throw CounterConditionError(C::odd_sum, "sum over j of c_j^0 must be even (mod 2), got " + std::to_string(sum));
  }
  for (unsigned p = 1; p < M; ++p) {
    if (M % p != 0) continue;
    bool periodic = true;
    for (unsigned j = 0; j < M && periodic; ++j) periodic = low[j] == low[(j + p) % M];
    if (periodic) {
      throw CounterConditionError(C::period, "sequence c_j^0 mod 2 must have least period exactly M = " +
                                                 std::to_string(M) + ", found period " + std::to_string(p));
    }
  }
}

std::pair<GeneratorState, StateVector> next_counter_dependent(const GeneratorState& state,
                                                              const CounterDependentConfig& cfg) {
  const auto j = static_cast<std::size_t>(state.step % cfg.M());
  StateVector y = cfg.output(j)(output_argument(state.x, cfg.pi()));
  StateVector h = cfg.transition(j)(state.x);
  const StateVector& c = cfg.c()[j];
  std::vector<WordN> next;
  next.reserve(h.size());
  for (unsigned k = 0; k < h.size(); ++k) next.push_back(h[k] ^ c[k]);
  return {GeneratorState{StateVector(std::move(next)), state.step + 1}, std::move(y)};
}

// --- generator objects ---

PlainGenerator::PlainGenerator(MultivariateMap H, MultivariateMap F, BitPermutation pi, StateVector seed)
    : H_(std::move(H)), F_(std::move(F)), pi_(std::move(pi)), state_{std::move(seed), 0} {
  require_shape(H_, H_.m(), H_.n(), "transition map H");
  require_shape(F_, H_.m(), H_.n(), "output map F");
  if (state_.x.size() != H_.m() || state_.x.width() != H_.n()) {
    throw std::invalid_argument("seed must have m components of width n");
  }
  if (pi_.width() != H_.n()) throw std::invalid_argument("bit permutation width must equal n");
}

StateVector PlainGenerator::next() {
  auto [s, y] = next_plain(state_, H_, F_, pi_);
  state_ = std::move(s);
  return y;
}

CounterDependentGenerator::CounterDependentGenerator(std::shared_ptr<const CounterDependentConfig> cfg, StateVector seed)
    : cfg_(std::move(cfg)), state_{std::move(seed), 0} {
  if (!cfg_) throw std::invalid_argument("counter-dependent generator needs a config");
  if (state_.x.size() != cfg_->m() || state_.x.width() != cfg_->n()) {
    throw std::invalid_argument("seed must have m components of width n");
  }
}

StateVector CounterDependentGenerator::next() {
  auto [s, y] = next_counter_dependent(state_, *cfg_);
  state_ = std::move(s);
  return y;
}

// --- serialization ---

void append_vector_bytes(const StateVector& y, std::vector<std::uint8_t>& out) {
  const unsigned bytes = (y.width() + 7) / 8;
  std::size_t pos = out.size();
  out.resize(pos + std::size_t{bytes} * y.size());
  for (const WordN& c : y) {
    auto limbs = c.limbs();
    for (unsigned b = 0; b < bytes; ++b) out[pos++] = static_cast<std::uint8_t>(limbs[b / 8] >> (8 * (b % 8)));
  }
}

std::vector<std::uint8_t> keystream(KeystreamGenerator& gen, std::uint64_t count) {
  std::vector<std::uint8_t> out;
  out.reserve(count * gen.m() * ((gen.n() + 7) / 8));
  for (std::uint64_t i = 0; i < count; ++i) append_vector_bytes(gen.next(), out);
  return out;
}

void write_keystream(KeystreamGenerator& gen, std::uint64_t count, std::ostream& out) {
  std::vector<std::uint8_t> buf;
  for (std::uint64_t i = 0; i < count; ++i) {
    append_vector_bytes(gen.next(), buf);
    if (buf.size() >= 1 << 16 || i + 1 == count) {
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
}

std::vector<StateVector> decode_keystream(std::span<const std::uint8_t> bytes, unsigned m, unsigned n) {
  const unsigned per = (n + 7) / 8;
  if (bytes.size() % (static_cast<std::size_t>(per) * m) != 0) {
    throw std::invalid_argument("byte stream length is not a multiple of the vector size");
  }
  std::vector<StateVector> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::vector<WordN> comps;
    for (unsigned j = 0; j < m; ++j) {
      WordN::Limbs limbs{};
      for (unsigned b = 0; b < per; ++b) limbs[b / 8] |= std::uint64_t{bytes[pos++]} << (8 * (b % 8));
      comps.push_back(WordN::from_limbs(n, limbs));
    }
    out.emplace_back(std::move(comps));
  }
  return out;
}

}  // namespace ergodic
