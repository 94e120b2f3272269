#include "aubin/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aubin/error.hpp"

namespace aubin {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Index: return "IndexError";
    case ErrorCode::Exponent: return "ExponentError";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MfcqViolated: return "MfcqViolated";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::UnsupportedConePattern: return "UnsupportedConePattern";
    case ErrorCode::ProbeCapability: return "ProbeCapability";
    case ErrorCode::Input: return "InputError";
  }
  return "UnknownError";
}

}  // namespace aubin

namespace aubin::expr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::shared_ptr<const Node> make(auto&& payload) {
  return std::make_shared<const Node>(Node{std::forward<decltype(payload)>(payload)});
}

bool same(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.data.index() != b.data.index()) return false;
  return std::visit(
      overloaded{
          [&](const node::Constant& c) { return c.value == std::get<node::Constant>(b.data).value; },
          [&](const node::Var& v) { return v.var == std::get<node::Var>(b.data).var; },
          [&](const node::Binary& x) {
            const auto& y = std::get<node::Binary>(b.data);
            return x.op == y.op && same(*x.lhs, *y.lhs) && same(*x.rhs, *y.rhs);
          },
          [&](const node::Power& x) {
            const auto& y = std::get<node::Power>(b.data);
            return x.exponent == y.exponent && same(*x.base, *y.base);
          },
          [&](const node::Negate& x) {
            return same(*x.operand, *std::get<node::Negate>(b.data).operand);
          },
          [&](const node::Call& x) {
            const auto& y = std::get<node::Call>(b.data);
            return x.fn == y.fn && same(*x.arg, *y.arg);
          },
      },
      a.data);
}

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::Domain, std::string("non-finite value in ") + what);
  }
  return value;
}

double eval(const Node& n, std::span<const double> x, std::span<const double> w) {
  return std::visit(
      overloaded{
          [](const node::Constant& c) { return c.value; },
          [&](const node::Var& v) {
            const auto values = v.var.axis == Axis::X ? x : w;
            const auto i = static_cast<std::size_t>(v.var.index - 1);
            if (i >= values.size()) {
              throw Error(ErrorCode::DimensionMismatch, "evaluation point too short for variable");
            }
            return values[i];
          },
          [&](const node::Binary& b) {
            const double l = eval(*b.lhs, x, w);
            const double r = eval(*b.rhs, x, w);
            switch (b.op) {
              case BinaryOp::Add: return checked(l + r, "addition");
              case BinaryOp::Sub: return checked(l - r, "subtraction");
              case BinaryOp::Mul: return checked(l * r, "multiplication");
              case BinaryOp::Div:
                if (r == 0.0) throw Error(ErrorCode::Domain, "division by zero");
                return checked(l / r, "division");
            }
            return 0.0;
          },
          [&](const node::Power& p) {
            const double base = eval(*p.base, x, w);
            double result = 1.0;
            for (unsigned k = 0; k < p.exponent; ++k) result *= base;
            return checked(result, "power");
          },
          [&](const node::Negate& m) { return -eval(*m.operand, x, w); },
          [&](const node::Call& c) {
            const double a = eval(*c.arg, x, w);
            switch (c.fn) {
              case Function::Sin: return std::sin(a);
              case Function::Cos: return std::cos(a);
              case Function::Exp: return checked(std::exp(a), "exp");
              case Function::Ln:
                if (a <= 0.0) throw Error(ErrorCode::Domain, "ln of non-positive argument");
                return std::log(a);
              case Function::Sqrt:
                if (a < 0.0) throw Error(ErrorCode::Domain, "sqrt of negative argument");
                return std::sqrt(a);
            }
            return 0.0;
          },
      },
      n.data);
}

int max_index_of(const Node& n, Axis axis) {
  return std::visit(
      overloaded{
          [](const node::Constant&) { return 0; },
          [&](const node::Var& v) { return v.var.axis == axis ? v.var.index : 0; },
          [&](const node::Binary& b) {
            return std::max(max_index_of(*b.lhs, axis), max_index_of(*b.rhs, axis));
          },
          [&](const node::Power& p) { return max_index_of(*p.base, axis); },
          [&](const node::Negate& m) { return max_index_of(*m.operand, axis); },
          [&](const node::Call& c) { return max_index_of(*c.arg, axis); },
      },
      n.data);
}

const char* function_name(Function fn) {
  switch (fn) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Sqrt: return "sqrt";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render_into(const Node& n, std::string& out) {
  std::visit(
      overloaded{
          [&](const node::Constant& c) {
            if (std::signbit(c.value)) {
              out += "(-";
              out += format_number(-c.value);
              out += ')';
            } else {
              out += format_number(c.value);
            }
          },
          [&](const node::Var& v) {
            out += v.var.axis == Axis::X ? 'x' : 'w';
            out += std::to_string(v.var.index);
          },
          [&](const node::Binary& b) {
            static constexpr char ops[] = {'+', '-', '*', '/'};
            out += '(';
            render_into(*b.lhs, out);
            out += ops[static_cast<int>(b.op)];
            render_into(*b.rhs, out);
            out += ')';
          },
          [&](const node::Power& p) {
            out += '(';
            render_into(*p.base, out);
            out += '^';
            out += std::to_string(p.exponent);
            out += ')';
          },
          [&](const node::Negate& m) {
            // inner parentheses keep a negated literal from folding on reparse
            out += "(-(";
            render_into(*m.operand, out);
            out += "))";
          },
          [&](const node::Call& c) {
            out += function_name(c.fn);
            out += '(';
            render_into(*c.arg, out);
            out += ')';
          },
      },
      n.data);
}

}  // namespace

Expression::Expression() : root_(make(node::Constant{0.0})) {}

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expression Expression::constant(double value) { return Expression(make(node::Constant{value})); }

Expression Expression::variable(Variable v) { return Expression(make(node::Var{v})); }

Expression Expression::binary(BinaryOp op, const Expression& lhs, const Expression& rhs) {
  return Expression(make(node::Binary{op, lhs.root_, rhs.root_}));
}

Expression Expression::power(const Expression& base, unsigned exponent) {
  return Expression(make(node::Power{base.root_, exponent}));
}

Expression Expression::negate(const Expression& operand) {
  return Expression(make(node::Negate{operand.root_}));
}

Expression Expression::call(Function fn, const Expression& arg) {
  return Expression(make(node::Call{fn, arg.root_}));
}

bool Expression::is_constant(double value) const {
  const auto* c = std::get_if<node::Constant>(&root_->data);
  return c != nullptr && c->value == value;
}

int Expression::max_index(Axis axis) const { return max_index_of(*root_, axis); }

bool operator==(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expression::binary(BinaryOp::Add, a, b);
}

Expression operator-(const Expression& a, const Expression& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expression::binary(BinaryOp::Sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expression::binary(BinaryOp::Mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0)) return Expression::constant(0.0);
  return Expression::binary(BinaryOp::Div, a, b);
}

Expression operator-(const Expression& a) {
  if (a.is_constant(0.0)) return Expression::constant(0.0);
  return Expression::negate(a);
}

double evaluate(const Expression& e, std::span<const double> x, std::span<const double> w) {
  return checked(eval(e.root(), x, w), "expression");
}

Expression differentiate(const Expression& e, Variable v) {
  const auto sub = [&](const std::shared_ptr<const Node>& p) { return Expression(p); };
  return std::visit(
      overloaded{
          [](const node::Constant&) { return Expression::constant(0.0); },
          [&](const node::Var& var) { return Expression::constant(var.var == v ? 1.0 : 0.0); },
          [&](const node::Binary& b) {
            const Expression l = sub(b.lhs), r = sub(b.rhs);
            const Expression dl = differentiate(l, v), dr = differentiate(r, v);
            switch (b.op) {
              case BinaryOp::Add: return dl + dr;
              case BinaryOp::Sub: return dl - dr;
              case BinaryOp::Mul: return dl * r + l * dr;
              case BinaryOp::Div:
                return (dl * r - l * dr) / Expression::power(r, 2);
            }
            return Expression::constant(0.0);
          },
          [&](const node::Power& p) {
            if (p.exponent == 0) return Expression::constant(0.0);
            const Expression base = sub(p.base);
            const Expression db = differentiate(base, v);
            const Expression lowered =
                p.exponent == 1 ? Expression::constant(1.0)
                : p.exponent == 2 ? base
                                  : Expression::power(base, p.exponent - 1);
            return Expression::constant(static_cast<double>(p.exponent)) * lowered * db;
          },
          [&](const node::Negate& m) { return -differentiate(sub(m.operand), v); },
          [&](const node::Call& c) {
            const Expression a = sub(c.arg);
            const Expression da = differentiate(a, v);
            switch (c.fn) {
              case Function::Sin: return Expression::call(Function::Cos, a) * da;
              case Function::Cos: return -(Expression::call(Function::Sin, a) * da);
              case Function::Exp: return Expression::call(Function::Exp, a) * da;
              case Function::Ln: return da / a;
              case Function::Sqrt:
                return da / (Expression::constant(2.0) * Expression::call(Function::Sqrt, a));
            }
            return Expression::constant(0.0);
          },
      },
      e.root().data);
}

std::string render(const Expression& e) {
  std::string out;
  render_into(e.root(), out);
  return out;
}

ProblemSpec make_problem(int n, int d, std::string_view f0, std::string_view F) {
  if (n < 1 || d < 1) throw Error(ErrorCode::Input, "dimensions n and d must be positive");
  return ProblemSpec{n, d, parse(f0, n, d), parse(F, n, d)};
}

}  // namespace aubin::expr
