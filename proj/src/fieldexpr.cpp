#include "kk/fieldexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "kk/error.hpp"

namespace kk::fieldexpr {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FunctionEntry {
  std::string_view name;
  Function f;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", Function::Sin},   {"cos", Function::Cos},   {"tan", Function::Tan},   {"exp", Function::Exp},
    {"log", Function::Log},   {"sqrt", Function::Sqrt}, {"sinh", Function::Sinh}, {"cosh", Function::Cosh},
};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& e : kFunctions) {
    if (e.name == name) return e.f;
  }
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options) : text_(text), opts_(options) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail_unexpected();
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  [[noreturn]] void fail_unexpected() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      lhs = Expr::binary(c == '+' ? NodeKind::Add : NodeKind::Sub, lhs, term());
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      lhs = Expr::binary(c == '*' ? NodeKind::Mul : NodeKind::Div, lhs, factor());
    }
  }

  // Unary minus applies to a whole power, so -x^2 is -(x^2).
  Expr factor() {
    if (peek() == '-') {
      ++pos_;
      return Expr::neg(factor());
    }
    Expr b = base();
    if (peek() == '^') {
      ++pos_;
      return Expr::binary(NodeKind::Pow, b, factor());
    }
    return b;
  }

  Expr base() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (peek() != ')') {
        if (pos_ >= text_.size()) throw ParseError("expected ')' but input ended", pos_);
        throw ParseError(std::string("expected ')' but found '") + text_[pos_] + "'", pos_);
      }
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail_unexpected();
  }

  Expr number() {
    const std::size_t start = pos_;
    auto is_digit = [this](std::size_t i) { return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i])); };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ - start == 1 && text_[start] == '.') throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (is_digit(look)) {
        pos_ = look;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return Expr::num(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string token(text_.substr(start, pos_ - start));

    if (peek() == '(') {
      const auto f = lookup_function(token);
      if (!f) throw UnknownIdentifierError(token, start);
      ++pos_;
      Expr arg = expr();
      if (peek() != ')') {
        if (pos_ >= text_.size()) throw ParseError("expected ')' but input ended", pos_);
        throw ParseError(std::string("expected ')' but found '") + text_[pos_] + "'", pos_);
      }
      ++pos_;
      return Expr::call(*f, arg);
    }
    if (lookup_function(token)) throw ParseError("expected '(' after " + token, pos_);
    if (token == "pi") return Expr::num(std::numbers::pi);

    if (auto idx = variable_index(token)) {
      if (*idx < 0) throw UnknownIdentifierError(token, start);
      return Expr::var(*idx);
    }
    for (std::size_t i = 0; i < opts_.aliases.size(); ++i) {
      if (opts_.aliases[i] == token) return Expr::var(static_cast<int>(i));
    }
    if (!opts_.allow_parameters) throw UnknownIdentifierError(token, start);
    return Expr::param(token);
  }

  // For tokens of the form x<digits>: the zero-based index, or -1 when out
  // of range. nullopt for any other token.
  std::optional<int> variable_index(const std::string& token) const {
    if (token.size() < 2 || token[0] != 'x') return std::nullopt;
    for (std::size_t i = 1; i < token.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(token[i]))) return std::nullopt;
    }
    if (token[1] == '0' || token.size() > 4) return -1;
    const int k = std::stoi(token.substr(1));
    if (opts_.num_vars >= 0 && k > opts_.num_vars) return -1;
    return k - 1;
  }

  std::string_view text_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
};

// Constant-folding builders used by diff().
Expr f_add(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return Expr::num(a.number() + b.number());
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  return Expr::binary(NodeKind::Add, a, b);
}

Expr f_neg(const Expr& a) {
  if (a.is_number()) return Expr::num(-a.number());
  if (a.kind() == NodeKind::Negate) return a.operand();
  return Expr::neg(a);
}

Expr f_sub(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return Expr::num(a.number() - b.number());
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return f_neg(b);
  return Expr::binary(NodeKind::Sub, a, b);
}

Expr f_mul(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return Expr::num(a.number() * b.number());
  if (a.is_number(0.0) || b.is_number(0.0)) return Expr::num(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.is_number(-1.0)) return f_neg(b);
  if (b.is_number(-1.0)) return f_neg(a);
  return Expr::binary(NodeKind::Mul, a, b);
}

Expr f_div(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number() && b.number() != 0.0) return Expr::num(a.number() / b.number());
  if (a.is_number(0.0)) return Expr::num(0.0);
  if (b.is_number(1.0)) return a;
  return Expr::binary(NodeKind::Div, a, b);
}

Expr f_pow(const Expr& a, const Expr& b) {
  if (b.is_number(1.0)) return a;
  if (b.is_number(0.0)) return Expr::num(1.0);
  return Expr::binary(NodeKind::Pow, a, b);
}

Expr f_call(Function f, const Expr& a) { return Expr::call(f, a); }

double checked_pow(double base, double exponent) {
  const bool integral = std::floor(exponent) == exponent;
  if (base < 0.0 && !integral) throw DomainError("non-integer power of a negative base");
  if (base == 0.0 && exponent < 0.0) throw DomainError("negative power of zero");
  return std::pow(base, exponent);
}

double apply_function(Function f, double x) {
  switch (f) {
    case Function::Sin: return std::sin(x);
    case Function::Cos: return std::cos(x);
    case Function::Tan: return std::tan(x);
    case Function::Exp: return std::exp(x);
    case Function::Log:
      if (x <= 0.0) throw DomainError("log of a nonpositive value");
      return std::log(x);
    case Function::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of a negative value");
      return std::sqrt(x);
    case Function::Sinh: return std::sinh(x);
    case Function::Cosh: return std::cosh(x);
  }
  return 0.0;
}

std::string op_symbol(NodeKind k) {
  switch (k) {
    case NodeKind::Add: return "+";
    case NodeKind::Sub: return "-";
    case NodeKind::Mul: return "*";
    case NodeKind::Div: return "/";
    case NodeKind::Pow: return "^";
    default: return "?";
  }
}

}  // namespace

Expr::Expr() : Expr(num(0.0)) {}

Expr Expr::num(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = v;
  return Expr(std::move(n));
}

Expr Expr::var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->variable = index;
  return Expr(std::move(n));
}

Expr Expr::param(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Parameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::neg(Expr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negate;
  n->lhs = a.node_;
  return Expr(std::move(n));
}

Expr Expr::binary(NodeKind kind, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = a.node_;
  n->rhs = b.node_;
  return Expr(std::move(n));
}

Expr Expr::call(Function f, Expr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->function = f;
  n->lhs = a.node_;
  return Expr(std::move(n));
}

int Expr::max_variable() const {
  switch (kind()) {
    case NodeKind::Number:
    case NodeKind::Parameter: return -1;
    case NodeKind::Variable: return variable();
    case NodeKind::Negate:
    case NodeKind::Call: return operand().max_variable();
    default: return std::max(lhs().max_variable(), rhs().max_variable());
  }
}

bool Expr::is_constant() const { return max_variable() < 0; }

std::string function_name(Function f) {
  for (const auto& e : kFunctions) {
    if (e.f == f) return std::string(e.name);
  }
  return "?";
}

Expr parse(std::string_view text, const ParseOptions& options) { return Parser(text, options).run(); }

Expr diff(const Expr& e, int index) {
  switch (e.kind()) {
    case NodeKind::Number:
    case NodeKind::Parameter: return Expr::num(0.0);
    case NodeKind::Variable: return Expr::num(e.variable() == index ? 1.0 : 0.0);
    case NodeKind::Negate: return f_neg(diff(e.operand(), index));
    case NodeKind::Add: return f_add(diff(e.lhs(), index), diff(e.rhs(), index));
    case NodeKind::Sub: return f_sub(diff(e.lhs(), index), diff(e.rhs(), index));
    case NodeKind::Mul: {
      const Expr u = e.lhs(), v = e.rhs();
      return f_add(f_mul(diff(u, index), v), f_mul(u, diff(v, index)));
    }
    case NodeKind::Div: {
      const Expr u = e.lhs(), v = e.rhs();
      const Expr num = f_sub(f_mul(diff(u, index), v), f_mul(u, diff(v, index)));
      return f_div(num, f_pow(v, Expr::num(2.0)));
    }
    case NodeKind::Pow: {
      const Expr u = e.lhs(), v = e.rhs();
      const Expr du = diff(u, index);
      if (v.is_constant()) {
        return f_mul(f_mul(v, f_pow(u, f_sub(v, Expr::num(1.0)))), du);
      }
      // d(u^v) = u^v (v' log u + v u'/u)
      const Expr dv = diff(v, index);
      const Expr inner = f_add(f_mul(dv, f_call(Function::Log, u)), f_div(f_mul(v, du), u));
      return f_mul(e, inner);
    }
    case NodeKind::Call: {
      const Expr u = e.operand();
      const Expr du = diff(u, index);
      if (du.is_number(0.0)) return Expr::num(0.0);
      switch (e.function()) {
        case Function::Sin: return f_mul(f_call(Function::Cos, u), du);
        case Function::Cos: return f_neg(f_mul(f_call(Function::Sin, u), du));
        case Function::Tan: return f_div(du, f_pow(f_call(Function::Cos, u), Expr::num(2.0)));
        case Function::Exp: return f_mul(e, du);
        case Function::Log: return f_div(du, u);
        case Function::Sqrt: return f_div(du, f_mul(Expr::num(2.0), e));
        case Function::Sinh: return f_mul(f_call(Function::Cosh, u), du);
        case Function::Cosh: return f_mul(f_call(Function::Sinh, u), du);
      }
    }
  }
  return Expr::num(0.0);
}

Expr bind(const Expr& e, const ParamMap& params) {
  switch (e.kind()) {
    case NodeKind::Number:
    case NodeKind::Variable: return e;
    case NodeKind::Parameter: {
      auto it = params.find(e.name());
      if (it == params.end()) throw InvalidInputError("unresolved parameter '" + e.name() + "'");
      return Expr::num(it->second);
    }
    case NodeKind::Negate: return Expr::neg(bind(e.operand(), params));
    case NodeKind::Call: return Expr::call(e.function(), bind(e.operand(), params));
    default: return Expr::binary(e.kind(), bind(e.lhs(), params), bind(e.rhs(), params));
  }
}

double evaluate(const Expr& e, std::span<const double> point) {
  switch (e.kind()) {
    case NodeKind::Number: return e.number();
    case NodeKind::Variable:
      if (e.variable() >= static_cast<int>(point.size())) throw DimensionError("point has too few coordinates");
      return point[e.variable()];
    case NodeKind::Parameter: throw InvalidInputError("unbound parameter '" + e.name() + "'");
    case NodeKind::Negate: return -evaluate(e.operand(), point);
    case NodeKind::Add: return evaluate(e.lhs(), point) + evaluate(e.rhs(), point);
    case NodeKind::Sub: return evaluate(e.lhs(), point) - evaluate(e.rhs(), point);
    case NodeKind::Mul: return evaluate(e.lhs(), point) * evaluate(e.rhs(), point);
    case NodeKind::Div: {
      const double d = evaluate(e.rhs(), point);
      if (d == 0.0) throw DomainError("division by zero");
      return evaluate(e.lhs(), point) / d;
    }
    case NodeKind::Pow: return checked_pow(evaluate(e.lhs(), point), evaluate(e.rhs(), point));
    case NodeKind::Call: return apply_function(e.function(), evaluate(e.operand(), point));
  }
  return 0.0;
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Number: {
      const double v = e.number();
      if (v < 0.0 || std::signbit(v)) return "(-" + format_number(-v) + ")";
      return format_number(v);
    }
    case NodeKind::Variable: return "x" + std::to_string(e.variable() + 1);
    case NodeKind::Parameter: return e.name();
    case NodeKind::Negate: return "(-" + to_string(e.operand()) + ")";
    case NodeKind::Call: return function_name(e.function()) + "(" + to_string(e.operand()) + ")";
    default: return "(" + to_string(e.lhs()) + " " + op_symbol(e.kind()) + " " + to_string(e.rhs()) + ")";
  }
}

std::string to_sexpr(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Number: return format_number(e.number());
    case NodeKind::Variable: return "x" + std::to_string(e.variable() + 1);
    case NodeKind::Parameter: return e.name();
    case NodeKind::Negate: return "(neg " + to_sexpr(e.operand()) + ")";
    case NodeKind::Call: return "(" + function_name(e.function()) + " " + to_sexpr(e.operand()) + ")";
    default: return "(" + op_symbol(e.kind()) + " " + to_sexpr(e.lhs()) + " " + to_sexpr(e.rhs()) + ")";
  }
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Number: return a.number() == b.number();
    case NodeKind::Variable: return a.variable() == b.variable();
    case NodeKind::Parameter: return a.name() == b.name();
    case NodeKind::Negate: return structurally_equal(a.operand(), b.operand());
    case NodeKind::Call: return a.function() == b.function() && structurally_equal(a.operand(), b.operand());
    default: return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
  }
}

FieldProvider::FieldProvider(const Expr& expr, const ParamMap& params, int num_vars)
    : num_vars_(num_vars), expr_(bind(expr, params)) {
  if (num_vars < 1) throw DimensionError("field needs at least one chart variable");
  if (expr_.max_variable() >= num_vars) {
    throw InvalidInputError("expression uses x" + std::to_string(expr_.max_variable() + 1) + " on a " +
                            std::to_string(num_vars) + "-dimensional chart");
  }
  first_.reserve(num_vars);
  for (int i = 0; i < num_vars; ++i) first_.push_back(diff(expr_, i));
  second_.reserve(num_vars * (num_vars + 1) / 2);
  for (int i = 0; i < num_vars; ++i) {
    for (int j = i; j < num_vars; ++j) second_.push_back(diff(first_[i], j));
  }
}

FieldProvider::FieldProvider(std::string_view text, const ParamMap& params, int num_vars)
    : FieldProvider(parse(text, ParseOptions{num_vars, {}, true}), params, num_vars) {}

double FieldProvider::value(std::span<const double> point) const { return evaluate(expr_, point); }

double FieldProvider::partial(int i, std::span<const double> point) const { return evaluate(first_.at(i), point); }

double FieldProvider::second_partial(int i, int j, std::span<const double> point) const {
  return evaluate(second(i, j), point);
}

const Expr& FieldProvider::second(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= num_vars_) throw DimensionError("partial index out of range");
  // Row i of the upper triangle starts after i*n - i*(i-1)/2 entries.
  const int row_start = i * num_vars_ - i * (i - 1) / 2;
  return second_[row_start + (j - i)];
}

}  // namespace kk::fieldexpr
