#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergodic/constructions.hpp"
#include "ergodic/generators.hpp"

namespace ergodic {

// Config problems, reported with the path of the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One univariate slot. In JSON either a bare expression string (taken as a
// raw map carrying the kind the slot requires) or one of
//   {"ergodic": v}                  x -> 1 + x + 2(v(x+1) - v(x))
//   {"measure_preserving": v, "d": c}  x -> c + x + 2v(x)
//   {"expr": e, "kind": "ergodic" | "measure_preserving" | "unverified"}
struct UnivariateSpec {
  enum class Form { ergodic, measure_preserving, raw };
  Form form = Form::ergodic;
  TFuncExpr expr = TFuncExpr::constant(0);
  WordN d{kMaxWidth};
  MapKind kind = MapKind::ergodic;
};

// Even parameter: an integer constant or an expression over the interleaved input.
struct EvenSpec {
  std::optional<WordN> constant;
  std::optional<TFuncExpr> expr;
};

struct MapSpec {
  Construction construction = Construction::conjugate;
  std::optional<UnivariateSpec> h;                // conjugate, klimov_shamir
  std::vector<std::vector<UnivariateSpec>> f, g;  // wp_mult_*
  std::vector<std::optional<EvenSpec>> even;      // empty or m entries
  // wreath_lift
  unsigned base_n = 0;
  std::vector<std::uint32_t> table;
  std::optional<std::uint64_t> table_seed;
  std::vector<MapSpec> inner;  // exactly one entry for wreath_lift
};

struct PiSpec {
  BitPermutation::Kind kind = BitPermutation::Kind::reverse;
  std::vector<unsigned> table;
};

struct CounterSpec {
  unsigned M = 0;
  std::vector<std::vector<WordN>> c;
  // Either explicit maps or seeds; a seed s stands for
  // conjugate(mk_ergodic(random_expr(s, 3))).
  std::vector<MapSpec> transitions, outputs;
  std::vector<std::uint64_t> transition_seeds, output_seeds;
};

struct Config {
  unsigned m = 1, n = 1;
  std::optional<MapSpec> H, F;  // F defaults to H
  PiSpec pi;
  std::vector<WordN> seed;
  std::optional<CounterSpec> counter;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);  // throws std::runtime_error when unreadable
  // Canonical JSON text: defaults made explicit, expressions printed canonically.
  std::string emit() const;

  friend bool operator==(const Config& a, const Config& b) { return a.emit() == b.emit(); }
};

inline constexpr unsigned kCounterSeedDepth = 3;

MultivariateMap build_map(const MapSpec& spec, unsigned m, unsigned n);
UnivariateMap build_univariate(const UnivariateSpec& spec);

struct BuiltConfig {
  std::unique_ptr<KeystreamGenerator> generator;
  std::vector<MultivariateMap> transitions, outputs;       // one each for plain generators
  std::vector<std::pair<std::string, UnivariateMap>> univariates;  // every univariate slot, labelled
  std::shared_ptr<const CounterDependentConfig> counter;
};

// width overrides n (the maps are width-polymorphic; seed and c are truncated).
BuiltConfig build(const Config& cfg, std::optional<unsigned> width = std::nullopt);

// Plain generator with H = F = conjugate(U) for the univariate U of the
// configured construction (its h, or the counter 1+X otherwise).
std::unique_ptr<KeystreamGenerator> build_baseline(const Config& cfg);

}  // namespace ergodic
