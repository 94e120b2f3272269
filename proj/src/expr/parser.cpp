#include <cctype>
#include <charconv>
#include <string>

#include "aubin/error.hpp"
#include "aubin/expr.hpp"

namespace aubin::expr {

namespace {

class Parser {
 public:
  Parser(std::string_view src, int n, int d) : src_(src), n_(n), d_(d) {}

  Expression run() {
    Expression e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("expected end of input or operator");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, ErrorCode code = ErrorCode::Syntax) const {
    throw ParseError(code, pos_, what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression acc = term();
    for (;;) {
      if (accept('+')) {
        acc = Expression::binary(BinaryOp::Add, acc, term());
      } else if (accept('-')) {
        acc = Expression::binary(BinaryOp::Sub, acc, term());
      } else {
        return acc;
      }
    }
  }

  Expression term() {
    Expression acc = factor();
    for (;;) {
      if (accept('*')) {
        acc = Expression::binary(BinaryOp::Mul, acc, factor());
      } else if (accept('/')) {
        acc = Expression::binary(BinaryOp::Div, acc, factor());
      } else {
        return acc;
      }
    }
  }

  Expression factor() {
    Expression b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      if (pos_ < src_.size() && src_[pos_] == '-') fail("negative exponent", ErrorCode::Exponent);
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected non-negative integer exponent", ErrorCode::Exponent);
      if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
        fail("non-integer exponent", ErrorCode::Exponent);
      }
      unsigned exponent = 0;
      const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, exponent);
      if (ec != std::errc{}) fail("exponent out of range", ErrorCode::Exponent);
      return Expression::power(b, exponent);
    }
    return b;
  }

  bool at_number() const {
    return pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.');
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{} || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return value;
  }

  Expression base() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (at_number()) return Expression::constant(number());
    if (c == '(') {
      ++pos_;
      Expression inner = expr();
      expect(')');
      return inner;
    }
    if (c == '-') {
      ++pos_;
      skip_ws();
      if (at_number()) {
        // "-3" is a negative literal; "-3^2" still negates the power
        const std::size_t save = pos_;
        const double value = number();
        if (!peek('^')) return Expression::constant(-value);
        pos_ = save;
      }
      return Expression::negate(factor());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view word = src_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Function> functions[] = {
        {"sin", Function::Sin}, {"cos", Function::Cos}, {"exp", Function::Exp},
        {"ln", Function::Ln},   {"sqrt", Function::Sqrt},
    };
    for (const auto& [name, fn] : functions) {
      if (word == name) {
        expect('(');
        Expression arg = expr();
        expect(')');
        return Expression::call(fn, arg);
      }
    }

    if (word == "x" || word == "w") {
      const std::size_t digits = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ == digits) {
        pos_ = start;
        fail("expected variable index");
      }
      int index = 0;
      const auto [ptr, ec] = std::from_chars(src_.data() + digits, src_.data() + pos_, index);
      const Axis axis = word == "x" ? Axis::X : Axis::W;
      const int limit = axis == Axis::X ? n_ : d_;
      if (ec != std::errc{} || index < 1 || index > limit) {
        const std::string name(src_.substr(start, pos_ - start));
        pos_ = start;
        fail("variable " + name + " out of range (dimension " + std::to_string(limit) + ")",
             ErrorCode::Index);
      }
      return Expression::variable(Variable{axis, index});
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(word) + "'");
  }

  std::string_view src_;
  int n_;
  int d_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view source, int n, int d) {
  if (n < 1 || d < 1) throw Error(ErrorCode::Input, "dimensions n and d must be positive");
  return Parser(source, n, d).run();
}

}  // namespace aubin::expr
