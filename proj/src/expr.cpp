#include "implicitfluid/expr.hpp"

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>

namespace ifluid {

namespace {

constexpr std::array<std::pair<std::string_view, Var>, 8> kVariables{{
    {"rho", Var::rho},
    {"i1", Var::i1},
    {"i2", Var::i2},
    {"i3", Var::i3},
    {"i4", Var::i4},
    {"i5", Var::i5},
    {"i6", Var::i6},
    {"phi", Var::phi},
}};

enum class Func { exp, log, abs, sqrt };

constexpr std::array<std::pair<std::string_view, Func>, 4> kFunctions{{
    {"exp", Func::exp},
    {"log", Func::log},
    {"abs", Func::abs},
    {"sqrt", Func::sqrt},
}};

std::string_view func_name(Func f) {
  for (const auto& [name, fn] : kFunctions)
    if (fn == f) return name;
  return "?";
}

}  // namespace

std::string_view var_name(Var v) {
  for (const auto& [name, var] : kVariables)
    if (var == v) return name;
  return "?";
}

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}

UnknownIdentifier::UnknownIdentifier(const std::string& name, std::size_t position)
    : ParseError("unknown identifier '" + name + "'", position), name_(name) {}

DomainError::DomainError(const std::string& what, std::string subexpression)
    : std::runtime_error(what + " in " + subexpression), subexpression_(std::move(subexpression)) {}

EvalContext::EvalContext(double rho, const InvariantSet& inv)
    : rho_(rho), inv_(inv), phi_(-inv.i1 / 3.0) {
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
}

EvalContext EvalContext::spherical(double rho, double phi) {
  InvariantSet inv;
  inv.i1 = -3.0 * phi;
  inv.i2 = 3.0 * phi * phi;
  inv.i3 = -3.0 * phi * phi * phi;
  EvalContext ctx(rho, inv);
  ctx.phi_ = phi;
  return ctx;
}

double EvalContext::value(Var v) const {
  switch (v) {
    case Var::rho: return rho_;
    case Var::i1: return inv_.i1;
    case Var::i2: return inv_.i2;
    case Var::i3: return inv_.i3;
    case Var::i4: return inv_.i4;
    case Var::i5: return inv_.i5;
    case Var::i6: return inv_.i6;
    case Var::phi: return phi();
  }
  return 0.0;
}

struct Expr::Node {
  enum class Kind { literal, variable, negate, add, sub, mul, div, pow, call };

  Kind kind = Kind::literal;
  double value = 0.0;
  Var var = Var::rho;
  Func func = Func::exp;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::literal;
  n->value = v;
  return n;
}

NodePtr make_unary(Kind k, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(Kind k, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_space();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    NodePtr n = sum();
    skip_space();
    if (pos_ != src_.size())
      throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return n;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+'))
        n = make_binary(Kind::add, n, product());
      else if (accept('-'))
        n = make_binary(Kind::sub, n, product());
      else
        return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make_binary(Kind::mul, n, unary());
      else if (accept('/'))
        n = make_binary(Kind::div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Kind::negate, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ == src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - from;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", start);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(v))
      throw ParseError("malformed number", start);
    return make_literal(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    for (const auto& [fname, fn] : kFunctions) {
      if (fname != name) continue;
      if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
      auto n = std::make_shared<Node>();
      n->kind = Kind::call;
      n->func = fn;
      n->lhs = sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return n;
    }
    for (const auto& [vname, var] : kVariables) {
      if (vname != name) continue;
      auto n = std::make_shared<Node>();
      n->kind = Kind::variable;
      n->var = var;
      return n;
    }
    throw UnknownIdentifier(std::string(name), start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string format_literal(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string print(const Node& n) {
  switch (n.kind) {
    case Kind::literal: return format_literal(n.value);
    case Kind::variable: return std::string(var_name(n.var));
    case Kind::negate: return "(-" + print(*n.lhs) + ")";
    case Kind::call: return std::string(func_name(n.func)) + "(" + print(*n.lhs) + ")";
    case Kind::add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
    case Kind::sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
    case Kind::mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
    case Kind::div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
    case Kind::pow: return "(" + print(*n.lhs) + " ^ " + print(*n.rhs) + ")";
  }
  return {};
}

double checked(double v, const Node& n) {
  if (!std::isfinite(v)) throw DomainError("non-finite result", print(n));
  return v;
}

double evaluate(const Node& n, const EvalContext& ctx) {
  switch (n.kind) {
    case Kind::literal: return n.value;
    case Kind::variable: return ctx.value(n.var);
    case Kind::negate: return -evaluate(*n.lhs, ctx);
    case Kind::add: return checked(evaluate(*n.lhs, ctx) + evaluate(*n.rhs, ctx), n);
    case Kind::sub: return checked(evaluate(*n.lhs, ctx) - evaluate(*n.rhs, ctx), n);
    case Kind::mul: return checked(evaluate(*n.lhs, ctx) * evaluate(*n.rhs, ctx), n);
    case Kind::div: {
      const double num = evaluate(*n.lhs, ctx);
      const double den = evaluate(*n.rhs, ctx);
      if (den == 0.0) throw DomainError("division by zero", print(n));
      return checked(num / den, n);
    }
    case Kind::pow: return checked(std::pow(evaluate(*n.lhs, ctx), evaluate(*n.rhs, ctx)), n);
    case Kind::call: {
      const double a = evaluate(*n.lhs, ctx);
      switch (n.func) {
        case Func::exp: return checked(std::exp(a), n);
        case Func::abs: return std::abs(a);
        case Func::log:
          if (!(a > 0.0)) throw DomainError("log of nonpositive value", print(n));
          return std::log(a);
        case Func::sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value", print(n));
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

void collect(const Node& n, std::set<Var>& out) {
  if (n.kind == Kind::variable) out.insert(n.var);
  if (n.lhs) collect(*n.lhs, out);
  if (n.rhs) collect(*n.rhs, out);
}

bool same(const Node* a, const Node* b) {
  if (a == nullptr || b == nullptr) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::literal:
      if (std::memcmp(&a->value, &b->value, sizeof(double)) != 0) return false;
      break;
    case Kind::variable:
      if (a->var != b->var) return false;
      break;
    case Kind::call:
      if (a->func != b->func) return false;
      break;
    default: break;
  }
  return same(a->lhs.get(), b->lhs.get()) && same(a->rhs.get(), b->rhs.get());
}

}  // namespace

Expr Expr::parse(std::string_view src) { return Expr(Parser(src).parse()); }

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("constant must be finite");
  return Expr(make_literal(value));
}

double Expr::eval(const EvalContext& ctx) const { return evaluate(*root_, ctx); }

std::string Expr::to_string() const { return print(*root_); }

std::set<Var> Expr::variables() const {
  std::set<Var> out;
  collect(*root_, out);
  return out;
}

bool Expr::references(Var v) const { return variables().count(v) != 0; }

bool Expr::is_literal_zero() const { return root_->kind == Kind::literal && root_->value == 0.0; }

bool Expr::structurally_equal(const Expr& other) const { return same(root_.get(), other.root_.get()); }

}  // namespace ifluid
