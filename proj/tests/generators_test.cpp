#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ergodic/generators.hpp"

using namespace ergodic;

namespace {

// Naive least period: smallest p with seq[t+p] == seq[t] over the whole window.
template <class T>
std::size_t naive_period(const std::vector<T>& seq) {
  for (std::size_t p = 1; p < seq.size(); ++p) {
    bool ok = true;
    for (std::size_t t = 0; t + p < seq.size() && ok; ++t) ok = seq[t] == seq[t + p];
    if (ok) return p;
  }
  return seq.size();
}

std::vector<std::uint8_t> bits_of(const std::vector<StateVector>& seq, unsigned j, unsigned s) {
  std::vector<std::uint8_t> out;
  for (const auto& v : seq) out.push_back(v[j].bit(s) ? 1 : 0);
  return out;
}

UnivariateMap counter() { return mk_ergodic(parse_expr("0")); }

MultivariateMap random_ergodic(std::mt19937_64& rng, unsigned m, unsigned n, int flavour) {
  switch (flavour % 3) {
    case 0: return conjugate_multivariate(mk_ergodic(random_expr(rng, 3)), m, n);
    case 1: return mk_klimov_shamir(mk_ergodic(random_expr(rng, 3)), m, n);
    default: {
      std::vector<std::vector<UnivariateMap>> f(m), g(m);
      for (unsigned t = 0; t < m; ++t) {
        for (unsigned r = 0; r < m; ++r) f[t].push_back(mk_ergodic(random_expr(rng, 3)));
        for (unsigned s = 0; s < t; ++s) g[t].push_back(mk_measure_preserving(random_expr(rng, 3), WordN(8, rng())));
      }
      return mk_multivariate_ergodic(n, f, g, rng() % 2 ? Combine::bit_xor : Combine::plus);
    }
  }
}

std::vector<StateVector> run(KeystreamGenerator& gen, std::size_t count) {
  std::vector<StateVector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
  return out;
}

std::vector<StateVector> states(KeystreamGenerator& gen, std::size_t count) {
  std::vector<StateVector> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(gen.state().x);
    gen.next();
  }
  return out;
}

std::shared_ptr<const CounterDependentConfig> counter_config(unsigned M, unsigned m, unsigned n,
                                                             const std::vector<std::vector<std::uint64_t>>& c,
                                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<StateVector> cs;
  std::vector<MultivariateMap> hs, fs;
  for (unsigned j = 0; j < M; ++j) {
    cs.push_back(StateVector::from_values(n, c[j]));
    hs.push_back(conjugate_multivariate(mk_ergodic(random_expr(rng, 3)), m, n));
    fs.push_back(conjugate_multivariate(mk_ergodic(random_expr(rng, 3)), m, n));
  }
  return std::make_shared<const CounterDependentConfig>(M, cs, hs, fs, mk_pi(n, BitPermutation::Kind::reverse));
}

}  // namespace

TEST(BitPermutation, Examples) {
  EXPECT_EQ(mk_pi(4, BitPermutation::Kind::reverse)(WordN(4, 0b0001)), WordN(4, 0b1000));
  EXPECT_EQ(mk_pi(4, BitPermutation::Kind::rotate_up)(WordN(4, 0b1000)), WordN(4, 0b0001));
  EXPECT_EQ(mk_pi(4, BitPermutation::Kind::rotate_up)(WordN(4, 0b0011)), WordN(4, 0b0110));
  EXPECT_THROW(BitPermutation::custom({0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(BitPermutation::custom({1, 1, 0}), std::invalid_argument);
  EXPECT_EQ(BitPermutation::custom({2, 1, 0})(WordN(3, 0b100)), WordN(3, 0b001));
  EXPECT_EQ(mk_pi(1, BitPermutation::Kind::reverse)(WordN(1, 1)), WordN(1, 1));
  const BitPermutation wide = mk_pi(100, BitPermutation::Kind::reverse);
  WordN top(100);
  top.set_bit(99, true);
  EXPECT_EQ(wide(top), WordN(100, 1));
}

TEST(PlainGenerator, FirstStep) {
  const MultivariateMap H = conjugate_multivariate(counter(), 2, 2);
  const auto pi = mk_pi(2, BitPermutation::Kind::rotate_up);
  const auto [next, y] = next_plain(GeneratorState{StateVector(2, 2), 0}, H, H, pi);
  EXPECT_EQ(y, StateVector::from_values(2, {1, 0}));
  EXPECT_EQ(next.x, StateVector::from_values(2, {1, 0}));
  EXPECT_EQ(next.step, 1U);
}

TEST(PlainGenerator, RejectsBadShapes) {
  const MultivariateMap H = conjugate_multivariate(counter(), 2, 2);
  const MultivariateMap H3 = conjugate_multivariate(counter(), 3, 2);
  const MultivariateMap mp =
      conjugate_multivariate(mk_measure_preserving(parse_expr("x"), WordN(2, 0)), 2, 2);
  const auto pi = mk_pi(2, BitPermutation::Kind::rotate_up);
  EXPECT_THROW(PlainGenerator(H, H3, pi, StateVector(2, 2)), std::invalid_argument);
  EXPECT_THROW(PlainGenerator(H, mp, pi, StateVector(2, 2)), KindError);
  EXPECT_THROW(PlainGenerator(H, H, pi, StateVector(2, 3)), std::invalid_argument);
  EXPECT_THROW(PlainGenerator(H, H, mk_pi(3, BitPermutation::Kind::reverse), StateVector(2, 2)),
               std::invalid_argument);
}

TEST(PlainGenerator, OutputsVisitEveryVectorAndReachFullBitPeriod) {
  std::mt19937_64 rng(201);
  for (auto kind : {BitPermutation::Kind::reverse, BitPermutation::Kind::rotate_up}) {
    for (int flavour = 0; flavour < 3; ++flavour) {
      const unsigned m = 2, n = 4, period = 256;
      PlainGenerator gen(random_ergodic(rng, m, n, flavour), random_ergodic(rng, m, n, flavour + 1), mk_pi(n, kind),
                         StateVector::from_values(n, {rng() % 16, rng() % 16}));
      const auto seq = run(gen, 2 * period);
      std::set<std::uint64_t> seen;
      for (std::size_t i = 0; i < period; ++i) seen.insert(seq[i].pack());
      EXPECT_EQ(seen.size(), period);
      for (unsigned j = 0; j < m; ++j)
        for (unsigned s = 0; s < n; ++s) EXPECT_EQ(naive_period(bits_of(seq, j, s)), period) << "j=" << j << " s=" << s;
    }
  }
}

TEST(PlainGenerator, PermutedArgumentsKeepFullBitPeriod) {
  std::mt19937_64 rng(202);
  const unsigned m = 3, n = 3, period = 512;
  for (auto kind : {BitPermutation::Kind::reverse, BitPermutation::Kind::rotate_up}) {
    const MultivariateMap F = random_ergodic(rng, m, n, 2);
    const UnivariateMap g = mk_measure_preserving(random_expr(rng, 3), WordN(8, rng()));
    // Swap x^0 and x^1 and biject the first of them before F.
    const MultivariateMap F2 = MultivariateMap::custom(
        m, n,
        [F, g](const StateVector& a) {
          StateVector b = a;
          b.set(1, g(a[2]));
          b.set(2, a[1]);
          return F(b);
        },
        MapKind::ergodic, "F with permuted arguments");
    PlainGenerator gen(random_ergodic(rng, m, n, 0), F2, mk_pi(n, kind), StateVector(m, n));
    const auto seq = run(gen, 2 * period);
    for (unsigned j = 0; j < m; ++j)
      for (unsigned s = 0; s < n; ++s) EXPECT_EQ(naive_period(bits_of(seq, j, s)), period) << "j=" << j << " s=" << s;
  }
}

TEST(PlainGenerator, StateBitPeriodLaw) {
  std::mt19937_64 rng(203);
  for (unsigned m : {2U, 3U}) {
    for (unsigned n = 1; n <= 4; ++n) {
      for (int flavour = 0; flavour < 3; ++flavour) {
        const MultivariateMap H = random_ergodic(rng, m, n, flavour);
        PlainGenerator gen(H, H, mk_pi(n, BitPermutation::Kind::reverse), StateVector(m, n));
        const std::size_t period = std::size_t{1} << (m * n);
        const auto seq = states(gen, 2 * period);
        for (unsigned j = 0; j < m; ++j) {
          for (unsigned s = 0; s < n; ++s) {
            ASSERT_EQ(naive_period(bits_of(seq, j, s)), std::size_t{1} << (m * s + j + 1))
                << H.provenance() << " m=" << m << " n=" << n << " j=" << j << " s=" << s;
          }
        }
      }
    }
  }
}

TEST(PlainGenerator, CloneForksDeterministically) {
  std::mt19937_64 rng(204);
  PlainGenerator gen(random_ergodic(rng, 2, 16, 1), random_ergodic(rng, 2, 16, 2),
                     mk_pi(16, BitPermutation::Kind::reverse), StateVector::from_values(16, {7, 9}));
  run(gen, 10);
  auto fork = gen.clone();
  EXPECT_EQ(run(gen, 100), run(*fork, 100));
  EXPECT_EQ(gen.state().step, 110U);
}

TEST(CounterDependent, ThreeIndexExample) {
  auto cfg = counter_config(3, 2, 3, {{1, 0}, {3, 0}, {0, 0}}, 301);
  CounterDependentGenerator gen(cfg, StateVector(2, 3));
  auto probe = gen.clone();
  const auto st = states(*probe, 2 * 192 + 1);
  EXPECT_EQ(naive_period(st), 192U);
  std::map<std::uint64_t, int> counts;
  for (std::size_t i = 0; i < 192; ++i) ++counts[st[i].pack()];
  EXPECT_EQ(counts.size(), 64U);
  for (auto [v, c] : counts) EXPECT_EQ(c, 3) << v;

  const auto out = run(gen, 2 * 192);
  EXPECT_EQ(naive_period(out), 192U);
  for (unsigned j = 0; j < 2; ++j) {
    for (unsigned s = 0; s < 3; ++s) {
      const std::size_t p = naive_period(bits_of(out, j, s));
      EXPECT_TRUE(p == 64 || p == 192) << "j=" << j << " s=" << s << " p=" << p;
    }
  }
}

TEST(CounterDependent, FiveIndexExample) {
  auto cfg = counter_config(5, 2, 2, {{1, 2}, {1, 0}, {0, 3}, {2, 1}, {0, 0}}, 302);
  CounterDependentGenerator gen(cfg, StateVector::from_values(2, {3, 1}));
  const auto st = states(gen, 2 * 80);
  EXPECT_EQ(naive_period(st), 80U);
  std::map<std::uint64_t, int> counts;
  for (std::size_t i = 0; i < 80; ++i) ++counts[st[i].pack()];
  EXPECT_EQ(counts.size(), 16U);
  for (auto [v, c] : counts) EXPECT_EQ(c, 5);
}

TEST(CounterDependent, RejectsBadConditions) {
  using C = CounterConditionError::Condition;
  auto condition = [](auto&& fn) {
    try {
      fn();
    } catch (const CounterConditionError& e) {
      return std::optional<C>(e.condition());
    }
    return std::optional<C>();
  };
  EXPECT_EQ(condition([] { counter_config(1, 2, 3, {{0, 0}}, 1); }), C::modulus);
  EXPECT_EQ(condition([] { counter_config(4, 2, 3, {{1, 0}, {1, 0}, {0, 0}, {0, 0}}, 1); }), C::modulus);
  EXPECT_EQ(condition([] { counter_config(3, 2, 3, {{1, 0}, {0, 0}, {0, 0}}, 1); }), C::odd_sum);
  EXPECT_EQ(condition([] { counter_config(3, 2, 3, {{0, 0}, {2, 0}, {4, 0}}, 1); }), C::period);
  EXPECT_EQ(condition([] { counter_config(5, 2, 3, {{1, 0}, {1, 0}, {1, 0}, {1, 0}, {0, 0}}, 1); }), std::nullopt);
  EXPECT_EQ(condition([] { counter_config(3, 2, 3, {{1, 0}, {1, 0}, {0}}, 1); }), C::shape);
  const MultivariateMap H = conjugate_multivariate(counter(), 2, 3);
  const std::vector<StateVector> c = {StateVector::from_values(3, {1, 0}), StateVector::from_values(3, {1, 0}),
                                      StateVector(2, 3)};
  EXPECT_EQ(condition([&] {
              CounterDependentConfig(3, c, {H, H}, {H, H, H}, mk_pi(3, BitPermutation::Kind::reverse));
            }),
            C::shape);
  const MultivariateMap mp = conjugate_multivariate(mk_measure_preserving(parse_expr("x"), WordN(3, 0)), 2, 3);
  EXPECT_THROW(CounterDependentConfig(3, c, {H, mp, H}, {H, H, H}, mk_pi(3, BitPermutation::Kind::reverse)),
               KindError);
}

TEST(Keystream, ByteFormat) {
  const MultivariateMap H = conjugate_multivariate(counter(), 2, 2);
  PlainGenerator gen(H, H, mk_pi(2, BitPermutation::Kind::rotate_up), StateVector(2, 2));
  EXPECT_TRUE(keystream(gen, 0).empty());
  EXPECT_EQ(keystream(gen, 1), (std::vector<std::uint8_t>{0x01, 0x00}));

  std::vector<std::uint8_t> bytes;
  append_vector_bytes(StateVector::from_values(12, {0xabc, 0x123}), bytes);
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{0xbc, 0x0a, 0x23, 0x01}));
  bytes.clear();
  append_vector_bytes(StateVector::from_values(1, {1, 0, 1}), bytes);
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_THROW(decode_keystream(std::vector<std::uint8_t>{1, 2, 3}, 2, 12), std::invalid_argument);
}

TEST(Keystream, FullPeriodContainsEveryEncodingOnce) {
  std::mt19937_64 rng(205);
  const unsigned m = 2, n = 3;
  PlainGenerator gen(random_ergodic(rng, m, n, 0), random_ergodic(rng, m, n, 1),
                     mk_pi(n, BitPermutation::Kind::rotate_up), StateVector(m, n));
  auto copy = gen.clone();
  const auto bytes = keystream(gen, 64);
  ASSERT_EQ(bytes.size(), 128U);
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < bytes.size(); i += 2) seen.insert({bytes[i], bytes[i + 1]});
  EXPECT_EQ(seen.size(), 64U);
  EXPECT_EQ(decode_keystream(bytes, m, n), run(*copy, 64));
}

TEST(Keystream, StreamWriterMatchesBuffer) {
  std::mt19937_64 rng(206);
  PlainGenerator gen(random_ergodic(rng, 3, 70, 1), random_ergodic(rng, 3, 70, 0),
                     mk_pi(70, BitPermutation::Kind::reverse), StateVector(3, 70));
  auto copy = gen.clone();
  std::ostringstream out;
  write_keystream(gen, 1000, out);
  const auto expected = keystream(*copy, 1000);
  const std::string s = out.str();
  ASSERT_EQ(s.size(), expected.size());
  EXPECT_TRUE(std::equal(s.begin(), s.end(), expected.begin(),
                         [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }));
}
