#include "ergodic/tfunc.hpp"

#include <cctype>
#include <vector>

namespace ergodic {

struct TFuncExpr::Node {
  ExprOp op;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  WordN value{kMaxWidth};
  unsigned shift = 0;
};

namespace {

using NodePtr = std::shared_ptr<const TFuncExpr::Node>;

WordN eval_node(const TFuncExpr::Node& n, const WordN& x) {
  switch (n.op) {
    case ExprOp::variable:
      return x;
    case ExprOp::constant:
      return n.value.resized(x.width());
    case ExprOp::add:
      return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case ExprOp::sub:
      return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case ExprOp::mul:
      return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case ExprOp::bit_and:
      return eval_node(*n.lhs, x) & eval_node(*n.rhs, x);
    case ExprOp::bit_or:
      return eval_node(*n.lhs, x) | eval_node(*n.rhs, x);
    case ExprOp::bit_xor:
      return eval_node(*n.lhs, x) ^ eval_node(*n.rhs, x);
    case ExprOp::neg:
      return -eval_node(*n.lhs, x);
    case ExprOp::bit_not:
      return ~eval_node(*n.lhs, x);
    case ExprOp::shift_left:
      return eval_node(*n.lhs, x) << n.shift;
  }
  throw std::logic_error("unknown expression node");
}

bool equal_nodes(const TFuncExpr::Node& a, const TFuncExpr::Node& b) {
  if (&a == &b) return true;
  if (a.op != b.op) return false;
  switch (a.op) {
    case ExprOp::variable:
      return true;
    case ExprOp::constant:
      return a.value == b.value;
    case ExprOp::shift_left:
      return a.shift == b.shift && equal_nodes(*a.lhs, *b.lhs);
    case ExprOp::neg:
    case ExprOp::bit_not:
      return equal_nodes(*a.lhs, *b.lhs);
    default:
      return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
  }
}

// --- printing ---

int precedence(ExprOp op) {
  switch (op) {
    case ExprOp::bit_or: return 1;
    case ExprOp::bit_xor: return 2;
    case ExprOp::bit_and: return 3;
    case ExprOp::shift_left: return 4;
    case ExprOp::add:
    case ExprOp::sub: return 5;
    case ExprOp::mul: return 6;
    case ExprOp::neg:
    case ExprOp::bit_not: return 7;
    case ExprOp::variable:
    case ExprOp::constant: return 8;
  }
  return 0;
}

const char* symbol(ExprOp op) {
  switch (op) {
    case ExprOp::bit_or: return " | ";
    case ExprOp::bit_xor: return " ^ ";
    case ExprOp::bit_and: return " & ";
    case ExprOp::add: return " + ";
    case ExprOp::sub: return " - ";
    case ExprOp::mul: return " * ";
    default: return "";
  }
}

void print_node(const TFuncExpr::Node& n, std::string& out);

void print_child(const TFuncExpr::Node& child, bool parens, std::string& out) {
  if (parens) out.push_back('(');
  print_node(child, out);
  if (parens) out.push_back(')');
}

void print_node(const TFuncExpr::Node& n, std::string& out) {
  const int p = precedence(n.op);
  switch (n.op) {
    case ExprOp::variable:
      out += "x";
      return;
    case ExprOp::constant:
      out += n.value.fits_u64() ? std::to_string(n.value.low64()) : "0x" + n.value.to_hex();
      return;
    case ExprOp::neg:
    case ExprOp::bit_not:
      out.push_back(n.op == ExprOp::neg ? '-' : '~');
      print_child(*n.lhs, precedence(n.lhs->op) < p, out);
      return;
    case ExprOp::shift_left:
      print_child(*n.lhs, precedence(n.lhs->op) < p, out);
      out += " << " + std::to_string(n.shift);
      return;
    default:
      // Left-associative: a right operand of equal precedence needs parentheses.
      print_child(*n.lhs, precedence(n.lhs->op) < p, out);
      out += symbol(n.op);
      print_child(*n.rhs, precedence(n.rhs->op) <= p, out);
      return;
  }
}

// --- parsing ---

enum class Tok { end, x, number, lparen, rparen, pipe, caret, amp, shl, plus, minus, star, tilde };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  TFuncExpr parse() {
    TFuncExpr e = parse_or();
    if (cur_.kind != Tok::end) {
      if (cur_.kind == Tok::rparen) throw ParseError(cur_.pos, "unbalanced ')'");
      throw ParseError(cur_.pos, "unexpected token '" + std::string(cur_.text) + "'");
    }
    return e;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    const std::size_t start = i_;
    if (i_ >= src_.size()) {
      cur_ = {Tok::end, start, {}};
      return;
    }
    const char c = src_[i_];
    auto single = [&](Tok k) {
      ++i_;
      cur_ = {k, start, src_.substr(start, 1)};
    };
    auto starts = [&](std::string_view s) { return src_.substr(i_, s.size()) == s; };
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      if (starts("0x") || starts("0X")) {
        j += 2;
        while (j < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[j]))) ++j;
        if (j == i_ + 2) throw ParseError(start, "hex literal without digits");
      } else {
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      }
      if (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) {
        throw ParseError(j, "malformed integer literal");
      }
      cur_ = {Tok::number, start, src_.substr(start, j - start)};
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      auto word = src_.substr(start, j - start);
      if (word != "x") throw ParseError(start, "unknown identifier '" + std::string(word) + "'; the only variable is x");
      cur_ = {Tok::x, start, word};
      i_ = j;
      return;
    }
    if (starts(">>>") || starts("<<<")) {
      throw ParseError(start, "rotation is not a compatible operation: T-functions only allow bit i of the result to depend on bits 0..i of x");
    }
    if (starts(">>")) {
      throw ParseError(start, "right shift '>>' is not a compatible operation: T-functions only allow bit i of the result to depend on bits 0..i of x");
    }
    if (starts("<<")) {
      i_ += 2;
      cur_ = {Tok::shl, start, src_.substr(start, 2)};
      return;
    }
    switch (c) {
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case '|': return single(Tok::pipe);
      case '^': return single(Tok::caret);
      case '&': return single(Tok::amp);
      case '+': return single(Tok::plus);
      case '-': return single(Tok::minus);
      case '*': return single(Tok::star);
      case '~': return single(Tok::tilde);
      case '/':
        throw ParseError(start, "division '/' is not a compatible operation: T-functions only allow bit i of the result to depend on bits 0..i of x");
      case '%':
        throw ParseError(start, "modulus '%' is not a compatible operation: T-functions only allow bit i of the result to depend on bits 0..i of x");
      default:
        throw ParseError(start, "unknown token '" + std::string(1, c) + "'");
    }
  }

  TFuncExpr parse_or() {
    TFuncExpr e = parse_xor();
    while (cur_.kind == Tok::pipe) {
      advance();
      e = TFuncExpr::binary(ExprOp::bit_or, e, parse_xor());
    }
    return e;
  }

  TFuncExpr parse_xor() {
    TFuncExpr e = parse_and();
    while (cur_.kind == Tok::caret) {
      advance();
      e = TFuncExpr::binary(ExprOp::bit_xor, e, parse_and());
    }
    return e;
  }

  TFuncExpr parse_and() {
    TFuncExpr e = parse_shift();
    while (cur_.kind == Tok::amp) {
      advance();
      e = TFuncExpr::binary(ExprOp::bit_and, e, parse_shift());
    }
    return e;
  }

  TFuncExpr parse_shift() {
    TFuncExpr e = parse_additive();
    while (cur_.kind == Tok::shl) {
      advance();
      if (cur_.kind != Tok::number) throw ParseError(cur_.pos, "shift amount must be an integer literal");
      WordN amount = WordN::parse(cur_.text, kMaxWidth);
      if (!amount.fits_u64() || amount.low64() >= kMaxWidth) {
        throw ParseError(cur_.pos, "shift amount must be below 512");
      }
      advance();
      e = TFuncExpr::shift_left(e, static_cast<unsigned>(amount.low64()));
    }
    return e;
  }

  TFuncExpr parse_additive() {
    TFuncExpr e = parse_mul();
    while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
      ExprOp op = cur_.kind == Tok::plus ? ExprOp::add : ExprOp::sub;
      advance();
      e = TFuncExpr::binary(op, e, parse_mul());
    }
    return e;
  }

  TFuncExpr parse_mul() {
    TFuncExpr e = parse_unary();
    while (cur_.kind == Tok::star) {
      advance();
      e = TFuncExpr::binary(ExprOp::mul, e, parse_unary());
    }
    return e;
  }

  TFuncExpr parse_unary() {
    if (cur_.kind == Tok::minus || cur_.kind == Tok::tilde) {
      ExprOp op = cur_.kind == Tok::minus ? ExprOp::neg : ExprOp::bit_not;
      advance();
      return TFuncExpr::unary(op, parse_unary());
    }
    return parse_atom();
  }

  TFuncExpr parse_atom() {
    switch (cur_.kind) {
      case Tok::x:
        advance();
        return TFuncExpr::variable();
      case Tok::number: {
        TFuncExpr c = TFuncExpr::constant(WordN::parse(cur_.text, kMaxWidth));
        advance();
        return c;
      }
      case Tok::lparen: {
        const std::size_t open = cur_.pos;
        advance();
        TFuncExpr e = parse_or();
        if (cur_.kind != Tok::rparen) throw ParseError(cur_.kind == Tok::end ? open : cur_.pos, "unbalanced '('");
        advance();
        return e;
      }
      case Tok::end:
        throw ParseError(cur_.pos, "unexpected end of expression");
      case Tok::rparen:
        throw ParseError(cur_.pos, "unbalanced ')'");
      default:
        throw ParseError(cur_.pos, "unexpected token '" + std::string(cur_.text) + "'");
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token cur_{Tok::end, 0, {}};
};

}  // namespace

TFuncExpr TFuncExpr::variable() {
  return TFuncExpr(std::make_shared<const Node>(Node{ExprOp::variable, nullptr, nullptr}));
}

TFuncExpr TFuncExpr::constant(const WordN& value) {
  Node n{ExprOp::constant, nullptr, nullptr};
  n.value = value.resized(kMaxWidth);
  return TFuncExpr(std::make_shared<const Node>(std::move(n)));
}

TFuncExpr TFuncExpr::constant(std::uint64_t value) { return constant(WordN(kMaxWidth, value)); }

TFuncExpr TFuncExpr::binary(ExprOp op, TFuncExpr lhs, TFuncExpr rhs) {
  switch (op) {
    case ExprOp::add:
    case ExprOp::sub:
    case ExprOp::mul:
    case ExprOp::bit_and:
    case ExprOp::bit_or:
    case ExprOp::bit_xor:
      break;
    default:
      throw std::invalid_argument("not a binary operator");
  }
  return TFuncExpr(std::make_shared<const Node>(Node{op, std::move(lhs.root_), std::move(rhs.root_)}));
}

TFuncExpr TFuncExpr::unary(ExprOp op, TFuncExpr operand) {
  if (op != ExprOp::neg && op != ExprOp::bit_not) throw std::invalid_argument("not a unary operator");
  return TFuncExpr(std::make_shared<const Node>(Node{op, std::move(operand.root_), nullptr}));
}

TFuncExpr TFuncExpr::shift_left(TFuncExpr operand, unsigned amount) {
  Node n{ExprOp::shift_left, std::move(operand.root_), nullptr};
  n.shift = amount;
  return TFuncExpr(std::make_shared<const Node>(std::move(n)));
}

ExprOp TFuncExpr::op() const noexcept { return root_->op; }

TFuncExpr TFuncExpr::lhs() const {
  if (!root_->lhs) throw std::logic_error("node has no left operand");
  return TFuncExpr(root_->lhs);
}

TFuncExpr TFuncExpr::rhs() const {
  if (!root_->rhs) throw std::logic_error("node has no right operand");
  return TFuncExpr(root_->rhs);
}

const WordN& TFuncExpr::constant_value() const {
  if (root_->op != ExprOp::constant) throw std::logic_error("node is not a constant");
  return root_->value;
}

unsigned TFuncExpr::shift_amount() const {
  if (root_->op != ExprOp::shift_left) throw std::logic_error("node is not a shift");
  return root_->shift;
}

WordN TFuncExpr::eval(const WordN& x) const { return eval_node(*root_, x); }

std::string TFuncExpr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool operator==(const TFuncExpr& a, const TFuncExpr& b) { return equal_nodes(*a.root_, *b.root_); }

TFuncExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string print_expr(const TFuncExpr& e) { return e.to_string(); }

std::optional<Incompatibility> find_incompatibility(const WordFn& f, unsigned k) {
  if (k < 1 || k > kMaxCompatibilityWidth) {
    throw std::invalid_argument("exhaustive compatibility check supports widths 1..20, got " + std::to_string(k));
  }
  const std::uint64_t size = std::uint64_t{1} << k;
  std::vector<std::uint64_t> table(size);
  for (std::uint64_t x = 0; x < size; ++x) table[x] = f(WordN(k, x)).low64();
  for (unsigned i = 1; i < k; ++i) {
    const std::uint64_t mask = (std::uint64_t{1} << i) - 1;
    for (std::uint64_t x = 0; x < size; ++x) {
      const std::uint64_t y = x & mask;
      if (((table[x] ^ table[y]) & mask) != 0) return Incompatibility{x, y, i};
    }
  }
  return std::nullopt;
}

bool check_compatible(const WordFn& f, unsigned k) { return !find_incompatibility(f, k).has_value(); }

TFuncExpr random_expr(std::mt19937_64& rng, unsigned max_depth) {
  if (max_depth == 0 || rng() % 4 == 0) {
    if (rng() % 3 == 0) {
      const std::uint64_t v = rng();
      return TFuncExpr::constant(v % 4 == 0 ? v : v % 16);
    }
    return TFuncExpr::variable();
  }
  static constexpr ExprOp kOps[] = {ExprOp::add,     ExprOp::sub,    ExprOp::mul,
                                    ExprOp::bit_and, ExprOp::bit_or, ExprOp::bit_xor,
                                    ExprOp::neg,     ExprOp::bit_not, ExprOp::shift_left};
  const ExprOp op = kOps[rng() % std::size(kOps)];
  switch (op) {
    case ExprOp::neg:
    case ExprOp::bit_not:
      return TFuncExpr::unary(op, random_expr(rng, max_depth - 1));
    case ExprOp::shift_left: {
      const unsigned amount = static_cast<unsigned>(rng() % 8);
      return TFuncExpr::shift_left(random_expr(rng, max_depth - 1), amount);
    }
    default: {
      TFuncExpr lhs = random_expr(rng, max_depth - 1);
      return TFuncExpr::binary(op, lhs, random_expr(rng, max_depth - 1));
    }
  }
}

TFuncExpr random_expr(std::uint64_t seed, unsigned max_depth) {
  std::mt19937_64 rng(seed);
  return random_expr(rng, max_depth);
}

}  // namespace ergodic
