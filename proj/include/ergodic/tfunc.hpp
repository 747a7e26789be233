#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ergodic/word.hpp"

namespace ergodic {

enum class ExprOp : std::uint8_t {
  variable,
  constant,
  add,
  sub,
  mul,
  neg,
  bit_and,
  bit_or,
  bit_xor,
  bit_not,
  shift_left,
};

// Immutable expression tree over the single variable x. Only compatible
// primitives exist, so every tree denotes a T-function.
class TFuncExpr {
 public:
  struct Node;

  static TFuncExpr variable();
  // Constants are kept modulo 2^512 and truncated to the evaluation width.
  static TFuncExpr constant(const WordN& value);
  static TFuncExpr constant(std::uint64_t value);
  static TFuncExpr binary(ExprOp op, TFuncExpr lhs, TFuncExpr rhs);
  static TFuncExpr unary(ExprOp op, TFuncExpr operand);
  static TFuncExpr shift_left(TFuncExpr operand, unsigned amount);

  ExprOp op() const noexcept;
  // Operand accessors; valid only for node kinds that have them.
  TFuncExpr lhs() const;
  TFuncExpr rhs() const;
  const WordN& constant_value() const;
  unsigned shift_amount() const;

  WordN eval(const WordN& x) const;
  std::string to_string() const;

  friend bool operator==(const TFuncExpr& a, const TFuncExpr& b);

 private:
  explicit TFuncExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error("at offset " + std::to_string(position) + ": " + message),
        position_(position),
        message_(message) {}
  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

// Precedence low to high: |  ^  &  <<  + -  *  unary - ~.
// Right shift, division, modulus and rotations are rejected.
TFuncExpr parse_expr(std::string_view text);
std::string print_expr(const TFuncExpr& e);
inline WordN eval_expr(const TFuncExpr& e, const WordN& x) { return e.eval(x); }

struct Incompatibility {
  std::uint64_t x;
  std::uint64_t y;  // x mod 2^level
  unsigned level;   // f(x) and f(y) differ modulo 2^level
};

inline constexpr unsigned kMaxCompatibilityWidth = 20;

// Exhaustive compatibility check of f evaluated at width k: x = y (mod 2^i)
// must imply f(x) = f(y) (mod 2^i) for all i <= k.
std::optional<Incompatibility> find_incompatibility(const WordFn& f, unsigned k);
bool check_compatible(const WordFn& f, unsigned k);

// Random expression of bounded depth. The draw sequence depends only on the
// engine output, so a seed reproduces the same tree on every platform.
TFuncExpr random_expr(std::mt19937_64& rng, unsigned max_depth = 4);
TFuncExpr random_expr(std::uint64_t seed, unsigned max_depth = 4);

}  // namespace ergodic
