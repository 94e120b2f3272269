#pragma once

// Scalar expressions in the variables x1..xn, w1..wd: parsing, evaluation,
// exact symbolic differentiation and canonical rendering.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace aubin::expr {

enum class Axis { X, W };

/// Variable reference with a 1-based index along its axis.
struct Variable {
  Axis axis = Axis::X;
  int index = 1;

  friend bool operator==(const Variable&, const Variable&) = default;
};

enum class BinaryOp { Add, Sub, Mul, Div };
enum class Function { Sin, Cos, Exp, Ln, Sqrt };

class Expression;
struct Node;

namespace node {
struct Constant {
  double value;
};
struct Var {
  Variable var;
};
struct Binary {
  BinaryOp op;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};
struct Power {
  std::shared_ptr<const Node> base;
  unsigned exponent;
};
struct Negate {
  std::shared_ptr<const Node> operand;
};
struct Call {
  Function fn;
  std::shared_ptr<const Node> arg;
};
}  // namespace node

struct Node {
  std::variant<node::Constant, node::Var, node::Binary, node::Power, node::Negate, node::Call> data;
};

/// Immutable expression tree. Copies share structure.
class Expression {
 public:
  Expression();  // the constant 0
  explicit Expression(std::shared_ptr<const Node> root);

  static Expression constant(double value);
  static Expression variable(Variable v);
  static Expression binary(BinaryOp op, const Expression& lhs, const Expression& rhs);
  static Expression power(const Expression& base, unsigned exponent);
  static Expression negate(const Expression& operand);
  static Expression call(Function fn, const Expression& arg);

  const Node& root() const { return *root_; }

  bool is_constant(double value) const;

  /// Largest variable index referenced on the given axis (0 if none).
  int max_index(Axis axis) const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  std::shared_ptr<const Node> root_;
};

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);

/// Parses `source` against the grammar
///   expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
///   factor := base ('^' nonneg-integer)? ;
///   base := number | ident | '(' expr ')' | '-' factor | func '(' expr ')'
/// A '-' immediately followed by a numeric literal folds into a negative constant.
/// Throws ParseError with ErrorCode::Syntax, ::Index or ::Exponent.
Expression parse(std::string_view source, int n, int d);

/// Throws Error(ErrorCode::Domain) on ln/sqrt of a negative argument,
/// division by zero or any non-finite intermediate.
double evaluate(const Expression& e, std::span<const double> x, std::span<const double> w);

/// Exact derivative. Only neutral elements (x+0, x*1, x*0, x^1, ...) are simplified.
Expression differentiate(const Expression& e, Variable v);

/// Fully parenthesized text that parses back to a structurally identical tree.
std::string render(const Expression& e);

/// Problem data: minimize f0(x, w) subject to F(x, w) <= 0.
struct ProblemSpec {
  int n = 1;
  int d = 1;
  Expression f0;
  Expression F;
};

/// Parses both expressions and checks every reference against n and d.
ProblemSpec make_problem(int n, int d, std::string_view f0, std::string_view F);

}  // namespace aubin::expr
