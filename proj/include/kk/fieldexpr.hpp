#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kk::fieldexpr {

enum class NodeKind { Number, Variable, Parameter, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh };

/// Immutable expression tree over chart variables x1..xn (stored zero-based),
/// named parameters and the usual arithmetic and elementary functions.
/// Copies share structure.
class Expr {
 public:
  struct Node {
    NodeKind kind;
    double number = 0.0;
    int variable = -1;
    std::string name;
    Function function = Function::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expr();  // the literal 0
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  NodeKind kind() const { return node_->kind; }
  double number() const { return node_->number; }
  int variable() const { return node_->variable; }
  const std::string& name() const { return node_->name; }
  Function function() const { return node_->function; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }
  // Operand of Negate and Call.
  Expr operand() const { return Expr(node_->lhs); }

  bool is_number() const { return kind() == NodeKind::Number; }
  bool is_number(double v) const { return is_number() && number() == v; }
  // True if no chart variable occurs anywhere in the tree.
  bool is_constant() const;
  int max_variable() const;  // -1 when no variable occurs

  // Raw constructors; parse() builds trees from these only.
  static Expr num(double v);
  static Expr var(int index);
  static Expr param(std::string name);
  static Expr neg(Expr a);
  static Expr binary(NodeKind kind, Expr a, Expr b);
  static Expr call(Function f, Expr a);

 private:
  std::shared_ptr<const Node> node_;
};

struct ParseOptions {
  // Highest admissible variable index (x1..x<num_vars>); negative = unbounded.
  int num_vars = -1;
  // Extra spellings for the variables, aliases[i] naming variable i.
  std::vector<std::string> aliases;
  bool allow_parameters = true;
};

/// Recursive-descent parser. Precedence: ^ (right associative) binds tighter
/// than unary minus, which binds tighter than * /, then + −.
/// Throws ParseError (byte offset) or UnknownIdentifierError.
Expr parse(std::string_view text, const ParseOptions& options = {});

/// Exact partial derivative with respect to variable `index` (zero-based:
/// index 0 is x1). Applies constant folding to keep trees small.
Expr diff(const Expr& e, int index);

using ParamMap = std::map<std::string, double>;

/// Replaces parameters by their values; throws InvalidInputError for any
/// parameter missing from `params`.
Expr bind(const Expr& e, const ParamMap& params);

/// Evaluates at `point`. Throws DomainError outside the real domain and
/// InvalidInputError for unbound parameters.
double evaluate(const Expr& e, std::span<const double> point);

// Fully parenthesized infix. parse(to_string(e)) reproduces e, except that a
// negative literal comes back as the negation of its magnitude.
std::string to_string(const Expr& e);
// Prefix form used in tests: (+ (* x1 x2) (sin x1)).
std::string to_sexpr(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

std::string function_name(Function f);

/// Scalar field on an n-dimensional chart with exact first and second
/// partials, precomputed symbolically at construction.
class FieldProvider {
 public:
  FieldProvider() : FieldProvider(Expr::num(0.0), {}, 1) {}
  FieldProvider(const Expr& expr, const ParamMap& params, int num_vars);
  FieldProvider(std::string_view text, const ParamMap& params, int num_vars);

  int num_vars() const { return num_vars_; }
  const Expr& expr() const { return expr_; }

  double value(std::span<const double> point) const;
  double partial(int i, std::span<const double> point) const;
  double second_partial(int i, int j, std::span<const double> point) const;

 private:
  const Expr& second(int i, int j) const;

  int num_vars_;
  Expr expr_;
  std::vector<Expr> first_;
  std::vector<Expr> second_;  // upper triangle, row-major over i <= j
};

}  // namespace kk::fieldexpr
