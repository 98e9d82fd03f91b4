#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "ioc/errors.hpp"

namespace ioc {

// Scalar expressions over state coordinates x1..xn, used for the entries of
// f(x), g(x) and R(x).
//
// Grammar (whitespace insignificant):
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | power
//   power  := atom ("^" factor)?          -- right-associative, binds tightest
//   atom   := number | "x" digits | func "(" expr ")" | "(" expr ")"
//   func   := sin | cos | tan | exp | sqrt | abs
class Expression {
 public:
  double eval(const Eigen::VectorXd& x) const { return eval_node(*root_, x); }

  // Largest 1-based variable index appearing in the tree (0 if none).
  int max_variable() const { return root_ ? root_->max_var : 0; }

  static Expression constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kConstant;
    n->value = v;
    return Expression(std::move(n));
  }

  static Expression variable(int index_1based) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kVariable;
    n->index = index_1based - 1;
    n->max_var = index_1based;
    return Expression(std::move(n));
  }

 private:
  enum class Kind { kConstant, kVariable, kUnary, kBinary };
  enum class UnaryOp { kNegate, kSin, kCos, kTan, kExp, kSqrt, kAbs };
  enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

  struct Node {
    Kind kind = Kind::kConstant;
    double value = 0.0;  // kConstant
    int index = 0;       // kVariable, 0-based
    UnaryOp uop = UnaryOp::kNegate;
    BinaryOp bop = BinaryOp::kAdd;
    std::shared_ptr<const Node> lhs;  // kUnary operand / kBinary left
    std::shared_ptr<const Node> rhs;  // kBinary right
    int max_var = 0;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static Expression unary(UnaryOp op, Expression operand) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kUnary;
    n->uop = op;
    n->max_var = operand.max_variable();
    n->lhs = std::move(operand.root_);
    return Expression(std::move(n));
  }

  static Expression binary(BinaryOp op, Expression lhs, Expression rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kBinary;
    n->bop = op;
    n->max_var = std::max(lhs.max_variable(), rhs.max_variable());
    n->lhs = std::move(lhs.root_);
    n->rhs = std::move(rhs.root_);
    return Expression(std::move(n));
  }

  static double eval_node(const Node& n, const Eigen::VectorXd& x) {
    switch (n.kind) {
      case Kind::kConstant:
        return n.value;
      case Kind::kVariable:
        if (n.index >= x.size()) {
          throw DimensionError("expression references x" +
                               std::to_string(n.index + 1) +
                               " but the state has length " +
                               std::to_string(x.size()));
        }
        return x[n.index];
      case Kind::kUnary: {
        const double v = eval_node(*n.lhs, x);
        switch (n.uop) {
          case UnaryOp::kNegate:
            return -v;
          case UnaryOp::kSin:
            return std::sin(v);
          case UnaryOp::kCos:
            return std::cos(v);
          case UnaryOp::kTan:
            return std::tan(v);
          case UnaryOp::kExp:
            return std::exp(v);
          case UnaryOp::kSqrt:
            if (v < 0.0) {
              throw EvalDomainError("sqrt of negative value " +
                                    std::to_string(v));
            }
            return std::sqrt(v);
          case UnaryOp::kAbs:
            return std::abs(v);
        }
        break;
      }
      case Kind::kBinary: {
        const double a = eval_node(*n.lhs, x);
        const double b = eval_node(*n.rhs, x);
        switch (n.bop) {
          case BinaryOp::kAdd:
            return a + b;
          case BinaryOp::kSub:
            return a - b;
          case BinaryOp::kMul:
            return a * b;
          case BinaryOp::kDiv:
            if (b == 0.0) {
              throw EvalDomainError("division by zero");
            }
            return a / b;
          case BinaryOp::kPow: {
            if (a == 0.0 && b < 0.0) {
              throw EvalDomainError("zero raised to a negative power");
            }
            const double r = std::pow(a, b);
            if (std::isnan(r) && !std::isnan(a) && !std::isnan(b)) {
              throw EvalDomainError("pow(" + std::to_string(a) + ", " +
                                    std::to_string(b) +
                                    ") is not a real number");
            }
            return r;
          }
        }
        break;
      }
    }
    throw Error("corrupt expression node");  // unreachable
  }

  NodePtr root_;

  friend class ExpressionParser;
};

// Recursive-descent parser for the grammar above. Errors carry the byte
// offset of the offending token.
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int state_dim)
      : text_(text), n_(state_dim) {}

  Expression parse() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError("empty expression", 0);
    }
    Expression e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'",
                       pos_);
    }
    return e;
  }

 private:
  using UnaryOp = Expression::UnaryOp;
  using BinaryOp = Expression::BinaryOp;

  Expression parse_expr() {
    Expression e = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        e = Expression::binary(BinaryOp::kAdd, std::move(e), parse_term());
      } else if (consume('-')) {
        e = Expression::binary(BinaryOp::kSub, std::move(e), parse_term());
      } else {
        return e;
      }
    }
  }

  Expression parse_term() {
    Expression e = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        e = Expression::binary(BinaryOp::kMul, std::move(e), parse_factor());
      } else if (consume('/')) {
        e = Expression::binary(BinaryOp::kDiv, std::move(e), parse_factor());
      } else {
        return e;
      }
    }
  }

  Expression parse_factor() {
    skip_ws();
    if (consume('-')) {
      return Expression::unary(UnaryOp::kNegate, parse_factor());
    }
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_atom();
    skip_ws();
    if (consume('^')) {
      // Exponent is a factor, so "^" is right-associative and "-" in the
      // exponent is allowed: a^-b^c parses as a^(-(b^c)).
      return Expression::binary(BinaryOp::kPow, std::move(base),
                                parse_factor());
    }
    return base;
  }

  Expression parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError("unexpected end of expression", pos_);
    }
    const char c = text_[pos_];
    if (consume('(')) {
      Expression e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_identifier();
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      } else {
        pos_ = mark;  // "e" belonged to something else; not our exponent
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      throw ParseError("malformed number literal", start);
    }
    return Expression::constant(value);
  }

  Expression parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char d) {
          return std::isdigit(static_cast<unsigned char>(d));
        })) {
      int index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index < 1 || index > n_) {
        throw ParseError("variable x" + std::to_string(index) +
                             " out of range for state dimension " +
                             std::to_string(n_),
                         start);
      }
      return Expression::variable(index);
    }

    UnaryOp op;
    if (name == "sin") {
      op = UnaryOp::kSin;
    } else if (name == "cos") {
      op = UnaryOp::kCos;
    } else if (name == "tan") {
      op = UnaryOp::kTan;
    } else if (name == "exp") {
      op = UnaryOp::kExp;
    } else if (name == "sqrt") {
      op = UnaryOp::kSqrt;
    } else if (name == "abs") {
      op = UnaryOp::kAbs;
    } else {
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    skip_ws();
    expect('(');
    Expression arg = parse_expr();
    expect(')');
    return Expression::unary(op, std::move(arg));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!consume(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

inline Expression parse_expression(std::string_view text, int state_dim) {
  return ExpressionParser(text, state_dim).parse();
}

}  // namespace ioc
