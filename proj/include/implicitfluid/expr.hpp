#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "implicitfluid/tensor3.hpp"

namespace ifluid {

/// Variables a coefficient expression may reference. `phi` is -i1/3.
enum class Var { rho, i1, i2, i3, i4, i5, i6, phi };

std::string_view var_name(Var v);

/// Thrown by Expr::parse. `position()` is a 0-based byte offset into the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t position);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Thrown by Expr::eval for log/sqrt/division domain violations and
/// non-finite results. `subexpression()` is the offending node, printed.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpression);
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

/// Variable bindings for evaluation: density and the six invariants.
class EvalContext {
 public:
  /// Throws std::invalid_argument unless rho > 0.
  EvalContext(double rho, const InvariantSet& inv);
  /// Context of the spherical stress -phi I with zero density gradient;
  /// `phi` is bound to the given value exactly.
  static EvalContext spherical(double rho, double phi);

  double rho() const { return rho_; }
  const InvariantSet& invariants() const { return inv_; }
  double phi() const { return phi_; }
  double value(Var v) const;

 private:
  double rho_;
  InvariantSet inv_;
  double phi_;
};

/// Immutable arithmetic expression over the fixed variable set.
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | variable | func '(' sum ')' | '(' sum ')'
/// so `-a^b` is `-(a^b)` and `a^b^c` is `a^(b^c)`.
class Expr {
 public:
  struct Node;

  /// Throws ParseError or UnknownIdentifier.
  static Expr parse(std::string_view src);
  static Expr constant(double value);

  double eval(const EvalContext& ctx) const;

  /// Fully parenthesized form that reparses to an identical tree.
  std::string to_string() const;
  std::set<Var> variables() const;
  bool references(Var v) const;
  /// True for a tree that is exactly the literal 0.
  bool is_literal_zero() const;
  /// Same shape, same operators, bitwise-equal literals.
  bool structurally_equal(const Expr& other) const;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace ifluid
