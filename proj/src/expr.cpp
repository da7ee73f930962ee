#include "abelfe/expr.hpp"

#include <cctype>
#include <cmath>
#include <utility>
#include <vector>

namespace abelfe {

struct Expr::Node {
  ExprKind kind;
  Number value;      // Number
  std::string name;  // Variable
  Func fn = Func::Exp;
  Expr a, b;
};

std::string_view func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
  }
  return "?";
}

ExprKind Expr::kind() const { return node_->kind; }
const Number& Expr::number() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->fn; }

const Expr& Expr::operand(std::size_t i) const {
  return i == 0 ? node_->a : node_->b;
}

std::size_t Expr::arity() const {
  switch (node_->kind) {
    case ExprKind::Number:
    case ExprKind::Variable:
      return 0;
    case ExprKind::Negate:
    case ExprKind::Call:
      return 1;
    default:
      return 2;
  }
}

Expr expr_number(Number v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::Number;
  n->value = std::move(v);
  return Expr(std::move(n));
}

Expr expr_variable(std::string name) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr expr_negate(Expr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::Negate;
  n->a = std::move(a);
  return Expr(std::move(n));
}

Expr expr_binary(ExprKind kind, Expr a, Expr b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr expr_call(Func f, Expr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::Call;
  n->fn = f;
  n->a = std::move(a);
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Number:
      return Number::same_representation(a.number(), b.number());
    case ExprKind::Variable:
      return a.name() == b.name();
    case ExprKind::Call:
      if (a.func() != b.func()) return false;
      return a.operand(0) == b.operand(0);
    case ExprKind::Negate:
      return a.operand(0) == b.operand(0);
    default:
      return a.operand(0) == b.operand(0) && a.operand(1) == b.operand(1);
  }
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok type = Tok::End;
  Number value;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    switch (c) {
      case '+': return simple(Tok::Plus);
      case '-': return simple(Tok::Minus);
      case '*': return simple(Tok::Star);
      case '/': return simple(Tok::Slash);
      case '^': return simple(Tok::Caret);
      case '(': return simple(Tok::LParen);
      case ')': return simple(Tok::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    t.type = Tok::End;
    t.text = std::string(1, c);
    bad_char_ = true;
    return t;
  }

  bool bad_char() const { return bad_char_; }

 private:
  Token simple(Tok type) {
    Token t;
    t.type = type;
    t.offset = pos_;
    t.text = std::string(1, text_[pos_]);
    ++pos_;
    return t;
  }

  std::size_t scan_digits(std::size_t p) const {
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    return p;
  }

  Token number() {
    Token t;
    t.type = Tok::Number;
    t.offset = pos_;
    std::size_t p = scan_digits(pos_);
    // p/q ratio: digits immediately followed by '/' and digits, with no
    // decimal point or exponent on the denominator. Otherwise '/' is division.
    if (p < text_.size() && text_[p] == '/' && p + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[p + 1]))) {
      std::size_t q = scan_digits(p + 1);
      bool den_extends = q < text_.size() && (text_[q] == '.' || text_[q] == 'e' || text_[q] == 'E');
      if (!den_extends) {
        t.text = std::string(text_.substr(pos_, q - pos_));
        t.value = *Number::parse(t.text);
        pos_ = q;
        return t;
      }
    }
    bool is_double = false;
    if (p < text_.size() && text_[p] == '.' && p + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[p + 1]))) {
      is_double = true;
      p = scan_digits(p + 1);
    }
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        is_double = true;
        p = scan_digits(q);
      }
    }
    t.text = std::string(text_.substr(pos_, p - pos_));
    if (is_double)
      t.value = Number(std::strtod(t.text.c_str(), nullptr));
    else
      t.value = *Number::parse(t.text);
    pos_ = p;
    return t;
  }

  Token ident() {
    Token t;
    t.type = Tok::Ident;
    t.offset = pos_;
    std::size_t p = pos_;
    while (p < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
      ++p;
    t.text = std::string(text_.substr(pos_, p - pos_));
    pos_ = p;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool bad_char_ = false;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  Expr parse() {
    Expr e = expression();
    if (cur_.type != Tok::End || lexer_.bad_char()) fail("end of input");
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& expected) {
    ParseDiagnostic d;
    d.offset = cur_.offset;
    d.expected = expected;
    d.found = cur_.type == Tok::End && cur_.text.empty() ? "end of input"
                                                         : "'" + cur_.text + "'";
    throw ParseError("expected " + expected + ", found " + d.found + " at offset " +
                         std::to_string(d.offset),
                     d);
  }

  Expr expression() {
    Expr e = term();
    while (cur_.type == Tok::Plus || cur_.type == Tok::Minus) {
      ExprKind k = cur_.type == Tok::Plus ? ExprKind::Add : ExprKind::Subtract;
      advance();
      e = expr_binary(k, std::move(e), term());
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (cur_.type == Tok::Star || cur_.type == Tok::Slash) {
      ExprKind k = cur_.type == Tok::Star ? ExprKind::Multiply : ExprKind::Divide;
      advance();
      e = expr_binary(k, std::move(e), factor());
    }
    return e;
  }

  Expr factor() {
    if (cur_.type == Tok::Minus) {
      advance();
      return expr_negate(factor());
    }
    Expr base = primary();
    if (cur_.type == Tok::Caret) {
      advance();
      return expr_pow(std::move(base), factor());
    }
    return base;
  }

  Expr primary() {
    switch (cur_.type) {
      case Tok::Number: {
        Expr e = expr_number(cur_.value);
        advance();
        return e;
      }
      case Tok::Ident: {
        std::string name = cur_.text;
        advance();
        if (cur_.type == Tok::LParen) {
          Func f;
          if (name == "exp") f = Func::Exp;
          else if (name == "ln") f = Func::Ln;
          else if (name == "sqrt") f = Func::Sqrt;
          else if (name == "sin") f = Func::Sin;
          else if (name == "cos") f = Func::Cos;
          else fail("a known function (exp, ln, sqrt, sin, cos)");
          advance();
          Expr arg = expression();
          if (cur_.type != Tok::RParen) fail("')'");
          advance();
          return expr_call(f, std::move(arg));
        }
        return expr_variable(std::move(name));
      }
      case Tok::LParen: {
        advance();
        Expr e = expression();
        if (cur_.type != Tok::RParen) fail("')'");
        advance();
        return e;
      }
      default:
        fail("a number, variable, function call, or '('");
    }
  }

  Lexer lexer_;
  Token cur_;
};

}  // namespace

Expr parse_expr(std::string_view text) {
  return Parser(text).parse();
}

// --------------------------------------------------------------- printing

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Subtract:
      return 1;
    case ExprKind::Multiply:
    case ExprKind::Divide:
      return 2;
    case ExprKind::Negate:
      return 3;
    case ExprKind::Power:
      return 4;
    case ExprKind::Number: {
      // Non-integer exact rationals print with a slash, so they bind like a
      // quotient; negative values print with a sign, binding like a negation.
      const Number& v = e.number();
      if (v.exact() && !v.is_integer()) return 2;
      return v.negative() ? 3 : 5;
    }
    default:
      return 5;
  }
}

// True when s ends with a maximal digit run that lexes as a standalone
// integer token (not the tail of an identifier or a decimal literal).
bool ends_with_bare_integer(const std::string& s) {
  std::size_t i = s.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
  if (i == s.size()) return false;
  if (i == 0) return true;
  char prev = s[i - 1];
  return !(std::isalnum(static_cast<unsigned char>(prev)) || prev == '_' || prev == '.');
}

void print_into(const Expr& e, int min_prec, std::string& out);

void print_node(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number:
      out += e.number().str();
      break;
    case ExprKind::Variable:
      out += e.name();
      break;
    case ExprKind::Negate:
      out += '-';
      print_into(e.operand(0), 3, out);
      break;
    case ExprKind::Add:
      print_into(e.operand(0), 1, out);
      out += '+';
      print_into(e.operand(1), 2, out);
      break;
    case ExprKind::Subtract:
      print_into(e.operand(0), 1, out);
      out += '-';
      print_into(e.operand(1), 2, out);
      break;
    case ExprKind::Multiply:
      print_into(e.operand(0), 2, out);
      out += '*';
      print_into(e.operand(1), 3, out);
      break;
    case ExprKind::Divide: {
      print_into(e.operand(0), 2, out);
      bool integer_tail = ends_with_bare_integer(out);
      out += '/';
      std::string rhs;
      print_into(e.operand(1), 3, rhs);
      // An integer token on both sides of '/' would re-lex as one ratio
      // literal; parenthesizing the denominator keeps this a quotient.
      if (integer_tail && !rhs.empty() && std::isdigit(static_cast<unsigned char>(rhs.front()))) {
        out += '(';
        out += rhs;
        out += ')';
      } else {
        out += rhs;
      }
      break;
    }
    case ExprKind::Power:
      print_into(e.operand(0), 5, out);
      out += '^';
      print_into(e.operand(1), 3, out);
      break;
    case ExprKind::Call:
      out += func_name(e.func());
      out += '(';
      print_into(e.operand(0), 1, out);
      out += ')';
      break;
  }
}

void print_into(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print_node(e, out);
    out += ')';
  } else {
    print_node(e, out);
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_into(e, 0, out);
  return out;
}

// ------------------------------------------------------------- evaluation

namespace {

double eval_power(double base, double exp) {
  if (base > 0.0) return std::pow(base, exp);
  if (base == 0.0) {
    if (exp > 0.0) return 0.0;
    if (exp == 0.0) return 1.0;
    throw EvalError("zero raised to a negative power");
  }
  if (std::floor(exp) == exp && std::abs(exp) < 9.0e15)
    return std::pow(base, exp);
  throw EvalError("negative base raised to a non-integer power");
}

}  // namespace

double evaluate(const Expr& e, const std::map<std::string, double>& bindings) {
  switch (e.kind()) {
    case ExprKind::Number:
      return e.number().value();
    case ExprKind::Variable: {
      auto it = bindings.find(e.name());
      if (it == bindings.end()) throw EvalError("unbound variable '" + e.name() + "'");
      return it->second;
    }
    case ExprKind::Negate:
      return -evaluate(e.operand(0), bindings);
    case ExprKind::Add:
      return evaluate(e.operand(0), bindings) + evaluate(e.operand(1), bindings);
    case ExprKind::Subtract:
      return evaluate(e.operand(0), bindings) - evaluate(e.operand(1), bindings);
    case ExprKind::Multiply:
      return evaluate(e.operand(0), bindings) * evaluate(e.operand(1), bindings);
    case ExprKind::Divide: {
      double num = evaluate(e.operand(0), bindings);
      double den = evaluate(e.operand(1), bindings);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case ExprKind::Power:
      return eval_power(evaluate(e.operand(0), bindings), evaluate(e.operand(1), bindings));
    case ExprKind::Call: {
      double a = evaluate(e.operand(0), bindings);
      switch (e.func()) {
        case Func::Exp: return std::exp(a);
        case Func::Ln:
          if (a <= 0.0) throw EvalError("ln of a non-positive argument");
          return std::log(a);
        case Func::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative argument");
          return std::sqrt(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
      }
      throw EvalError("unknown function");
    }
  }
  throw EvalError("malformed expression");
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  switch (e.kind()) {
    case ExprKind::Number:
      return e;
    case ExprKind::Variable: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    case ExprKind::Negate: {
      Expr a = substitute(e.operand(0), bindings);
      return a == e.operand(0) ? e : expr_negate(std::move(a));
    }
    case ExprKind::Call: {
      Expr a = substitute(e.operand(0), bindings);
      return a == e.operand(0) ? e : expr_call(e.func(), std::move(a));
    }
    default: {
      Expr a = substitute(e.operand(0), bindings);
      Expr b = substitute(e.operand(1), bindings);
      if (a == e.operand(0) && b == e.operand(1)) return e;
      return expr_binary(e.kind(), std::move(a), std::move(b));
    }
  }
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  auto walk = [&out](const Expr& node, auto&& self) -> void {
    if (node.kind() == ExprKind::Variable) {
      out.insert(node.name());
      return;
    }
    for (std::size_t i = 0; i < node.arity(); ++i) self(node.operand(i), self);
  };
  walk(e, walk);
  return out;
}

bool uses_only(const Expr& e, std::span<const std::string> allowed) {
  for (const auto& v : free_variables(e)) {
    bool ok = false;
    for (const auto& a : allowed)
      if (a == v) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

// --------------------------------------------------------- differentiation

namespace {

bool is_const(const Expr& e, const Number& v) {
  return e.kind() == ExprKind::Number && e.number() == v;
}

Expr d_num(Number v) { return expr_number(std::move(v)); }

Expr d_neg(Expr a) {
  if (is_const(a, Number(0))) return a;
  return expr_negate(std::move(a));
}

Expr d_add(Expr a, Expr b) {
  if (is_const(a, Number(0))) return b;
  if (is_const(b, Number(0))) return a;
  return expr_add(std::move(a), std::move(b));
}

Expr d_sub(Expr a, Expr b) {
  if (is_const(b, Number(0))) return a;
  if (is_const(a, Number(0))) return d_neg(std::move(b));
  return expr_sub(std::move(a), std::move(b));
}

Expr d_mul(Expr a, Expr b) {
  if (is_const(a, Number(0)) || is_const(b, Number(0))) return d_num(Number(0));
  if (is_const(a, Number(1))) return b;
  if (is_const(b, Number(1))) return a;
  return expr_mul(std::move(a), std::move(b));
}

Expr d_div(Expr a, Expr b) {
  if (is_const(a, Number(0))) return a;
  if (is_const(b, Number(1))) return a;
  return expr_div(std::move(a), std::move(b));
}

Expr d_pow(Expr base, Expr exp) {
  if (is_const(exp, Number(1))) return base;
  if (is_const(exp, Number(0))) return d_num(Number(1));
  return expr_pow(std::move(base), std::move(exp));
}

bool depends_on(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case ExprKind::Number:
      return false;
    case ExprKind::Variable:
      return e.name() == var;
    default:
      for (std::size_t i = 0; i < e.arity(); ++i)
        if (depends_on(e.operand(i), var)) return true;
      return false;
  }
}

Expr diff(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case ExprKind::Number:
      return d_num(Number(0));
    case ExprKind::Variable:
      return d_num(Number(e.name() == var ? 1 : 0));
    case ExprKind::Negate:
      return d_neg(diff(e.operand(0), var));
    case ExprKind::Add:
      return d_add(diff(e.operand(0), var), diff(e.operand(1), var));
    case ExprKind::Subtract:
      return d_sub(diff(e.operand(0), var), diff(e.operand(1), var));
    case ExprKind::Multiply: {
      const Expr& f = e.operand(0);
      const Expr& g = e.operand(1);
      return d_add(d_mul(diff(f, var), g), d_mul(f, diff(g, var)));
    }
    case ExprKind::Divide: {
      const Expr& f = e.operand(0);
      const Expr& g = e.operand(1);
      Expr num = d_sub(d_mul(diff(f, var), g), d_mul(f, diff(g, var)));
      return d_div(std::move(num), d_pow(g, d_num(Number(2))));
    }
    case ExprKind::Power: {
      const Expr& f = e.operand(0);
      const Expr& g = e.operand(1);
      if (!depends_on(g, var)) {
        Expr gm1 = g.kind() == ExprKind::Number ? d_num(g.number() - Number(1))
                                                : expr_sub(g, d_num(Number(1)));
        return d_mul(d_mul(g, d_pow(f, std::move(gm1))), diff(f, var));
      }
      // f^g = exp(g ln f): derivative f^g * (g' ln f + g f'/f).
      Expr left = d_mul(diff(g, var), expr_call(Func::Ln, f));
      Expr right = d_div(d_mul(g, diff(f, var)), f);
      return d_mul(e, d_add(std::move(left), std::move(right)));
    }
    case ExprKind::Call: {
      const Expr& u = e.operand(0);
      Expr du = diff(u, var);
      Expr outer;
      switch (e.func()) {
        case Func::Exp: outer = e; break;
        case Func::Ln: outer = d_div(d_num(Number(1)), u); break;
        case Func::Sqrt:
          outer = d_div(d_num(Number(1)), d_mul(d_num(Number(2)), e));
          break;
        case Func::Sin: outer = expr_call(Func::Cos, u); break;
        case Func::Cos: outer = d_neg(expr_call(Func::Sin, u)); break;
      }
      return d_mul(std::move(outer), std::move(du));
    }
  }
  throw EvalError("malformed expression");
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) {
  return diff(e, var);
}

}  // namespace abelfe
