#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ergodic/constructions.hpp"
#include "ergodic/word.hpp"

namespace ergodic {

// Permutation of the bit positions of an n-bit word. Position n-1 must land
// on position 0 so that the most significant state bit feeds the least
// significant argument bit of the output function.
class BitPermutation {
 public:
  enum class Kind { reverse, rotate_up, custom };

  static BitPermutation reverse(unsigned n);
  static BitPermutation rotate_up(unsigned n);
  // destination[i] is where bit i goes.
  static BitPermutation custom(std::vector<unsigned> destination);

  unsigned width() const noexcept { return static_cast<unsigned>(destination_.size()); }
  Kind kind() const noexcept { return kind_; }
  const std::vector<unsigned>& destinations() const noexcept { return destination_; }

  WordN operator()(const WordN& z) const;

 private:
  BitPermutation(Kind kind, std::vector<unsigned> destination);
  Kind kind_;
  std::vector<unsigned> destination_;
};

BitPermutation mk_pi(unsigned n, BitPermutation::Kind kind);

struct GeneratorState {
  StateVector x;
  std::uint64_t step = 0;
};

// y_i = F(pi(x^{m-1}_i), x^0_i, ..., x^{m-2}_i); x_{i+1} = H(x_i).
std::pair<GeneratorState, StateVector> next_plain(const GeneratorState& state, const MultivariateMap& H,
                                                  const MultivariateMap& F, const BitPermutation& pi);

// Raised for counter-dependent configurations that violate a condition on c.
class CounterConditionError : public std::invalid_argument {
 public:
  enum class Condition { modulus, shape, odd_sum, period };
  CounterConditionError(Condition c, const std::string& what) : std::invalid_argument(what), condition_(c) {}
  Condition condition() const noexcept { return condition_; }

 private:
  Condition condition_;
};

// M > 1 odd, with sum_j bit0(c_j^0) even and that bit sequence of least period M.
class CounterDependentConfig {
 public:
  CounterDependentConfig(unsigned M, std::vector<StateVector> c, std::vector<MultivariateMap> transitions,
                         std::vector<MultivariateMap> outputs, BitPermutation pi);

  unsigned M() const noexcept { return M_; }
  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  const std::vector<StateVector>& c() const noexcept { return c_; }
  const MultivariateMap& transition(std::size_t j) const { return transitions_.at(j); }
  const MultivariateMap& output(std::size_t j) const { return outputs_.at(j); }
  const BitPermutation& pi() const noexcept { return pi_; }

 private:
  unsigned M_, m_, n_;
  std::vector<StateVector> c_;
  std::vector<MultivariateMap> transitions_;
  std::vector<MultivariateMap> outputs_;
  BitPermutation pi_;
};

// y_i = F_{i mod M}(pi(x^{m-1}_i), x^0_i, ...); x_{i+1} = c_{i mod M} ^ H_{i mod M}(x_i).
std::pair<GeneratorState, StateVector> next_counter_dependent(const GeneratorState& state,
                                                              const CounterDependentConfig& cfg);

class KeystreamGenerator {
 public:
  virtual ~KeystreamGenerator() = default;
  virtual StateVector next() = 0;
  virtual const GeneratorState& state() const = 0;
  virtual std::unique_ptr<KeystreamGenerator> clone() const = 0;
  virtual unsigned m() const = 0;
  virtual unsigned n() const = 0;
};

class PlainGenerator final : public KeystreamGenerator {
 public:
  PlainGenerator(MultivariateMap H, MultivariateMap F, BitPermutation pi, StateVector seed);

  StateVector next() override;
  const GeneratorState& state() const override { return state_; }
  std::unique_ptr<KeystreamGenerator> clone() const override { return std::make_unique<PlainGenerator>(*this); }
  unsigned m() const override { return H_.m(); }
  unsigned n() const override { return state_.x.width(); }

 private:
  MultivariateMap H_, F_;
  BitPermutation pi_;
  GeneratorState state_;
};

class CounterDependentGenerator final : public KeystreamGenerator {
 public:
  CounterDependentGenerator(std::shared_ptr<const CounterDependentConfig> cfg, StateVector seed);

  StateVector next() override;
  const GeneratorState& state() const override { return state_; }
  std::unique_ptr<KeystreamGenerator> clone() const override {
    return std::make_unique<CounterDependentGenerator>(*this);
  }
  unsigned m() const override { return cfg_->m(); }
  unsigned n() const override { return cfg_->n(); }

 private:
  std::shared_ptr<const CounterDependentConfig> cfg_;
  GeneratorState state_;
};

// Component 0 first, each component as ceil(n/8) little-endian bytes.
void append_vector_bytes(const StateVector& y, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> keystream(KeystreamGenerator& gen, std::uint64_t count);
void write_keystream(KeystreamGenerator& gen, std::uint64_t count, std::ostream& out);
// Inverse of the byte format.
std::vector<StateVector> decode_keystream(std::span<const std::uint8_t> bytes, unsigned m, unsigned n);

}  // namespace ergodic
