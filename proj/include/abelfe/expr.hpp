#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "abelfe/number.hpp"

namespace abelfe {

enum class ExprKind { Number, Variable, Negate, Add, Subtract, Multiply, Divide, Power, Call };
enum class Func { Exp, Ln, Sqrt, Sin, Cos };

std::string_view func_name(Func f);

// Immutable expression tree with shared subtrees. Default-constructed
// handles are empty placeholders; every factory returns a valid node.
class Expr {
 public:
  Expr() = default;

  bool valid() const { return node_ != nullptr; }
  ExprKind kind() const;
  const Number& number() const;       // kind() == Number
  const std::string& name() const;    // kind() == Variable
  Func func() const;                  // kind() == Call
  const Expr& operand(std::size_t i) const;
  std::size_t arity() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr expr_number(Number v);
  friend Expr expr_variable(std::string name);
  friend Expr expr_negate(Expr a);
  friend Expr expr_binary(ExprKind kind, Expr a, Expr b);
  friend Expr expr_call(Func f, Expr a);
};

// Structural factories; no folding, the tree is exactly what was asked for.
Expr expr_number(Number v);
Expr expr_variable(std::string name);
Expr expr_negate(Expr a);
Expr expr_binary(ExprKind kind, Expr a, Expr b);
inline Expr expr_add(Expr a, Expr b) { return expr_binary(ExprKind::Add, std::move(a), std::move(b)); }
inline Expr expr_sub(Expr a, Expr b) { return expr_binary(ExprKind::Subtract, std::move(a), std::move(b)); }
inline Expr expr_mul(Expr a, Expr b) { return expr_binary(ExprKind::Multiply, std::move(a), std::move(b)); }
inline Expr expr_div(Expr a, Expr b) { return expr_binary(ExprKind::Divide, std::move(a), std::move(b)); }
inline Expr expr_pow(Expr a, Expr b) { return expr_binary(ExprKind::Power, std::move(a), std::move(b)); }
Expr expr_call(Func f, Expr a);

struct ParseDiagnostic {
  std::size_t offset = 0;  // byte offset into the input text
  std::string expected;
  std::string found;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, ParseDiagnostic d)
      : std::runtime_error(std::move(msg)), diagnostic_(std::move(d)) {}
  const ParseDiagnostic& diagnostic() const { return diagnostic_; }

 private:
  ParseDiagnostic diagnostic_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grammar: expr := term (('+'|'-') term)*
//          term := factor (('*'|'/') factor)*
//          factor := '-' factor | primary ('^' factor)?
//          primary := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
// '^' is right-associative and binds tighter than unary minus, so -x^2
// parses as -(x^2) and 2^3^2 as 2^(3^2). NUMBER covers integers (exact),
// p/q ratios (exact), and decimal/exponent literals (double). IDENT calls
// are restricted to exp, ln, sqrt, sin, cos.
Expr parse_expr(std::string_view text);

// Prints with minimal parentheses; parse_expr(to_string(e)) reconstructs any
// parser-produced tree structurally.
std::string to_string(const Expr& e);

double evaluate(const Expr& e, const std::map<std::string, double>& bindings);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);
Expr differentiate(const Expr& e, std::string_view var);
std::set<std::string> free_variables(const Expr& e);
bool uses_only(const Expr& e, std::span<const std::string> allowed);

}  // namespace abelfe
