#pragma once

// Arithmetic expressions in the single variable s, used to give kappa(s) and
// tau(s) as text.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 's' | ident '(' expr ')' | '(' expr ')'
//
// So "-s^2" is -(s^2) and "2^-1" is 0.5. Functions: sin cos tan asin acos
// atan sqrt exp log abs sec.

#include <oscmate/error.hpp>

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace oscmate {

enum class ExprKind { Number, Variable, Negate, Add, Subtract, Multiply, Divide, Power, Call };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind = ExprKind::Number;
  double value = 0.0;    // Number
  std::string function;  // Call
  Expr lhs;              // operand of Negate and Call
  Expr rhs;
  std::size_t offset = 0;  // byte range in the source text
  std::size_t length = 0;
  std::string source;  // source slice, for diagnostics
};

class ExprSyntaxError : public Error {
 public:
  ExprSyntaxError(ErrorCode code, std::size_t offset, std::vector<std::string> expected,
                  const std::string& what)
      : Error(code, what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class DomainFault : public Error {
 public:
  DomainFault(double s, std::string subexpression, const std::string& what)
      : Error(ErrorCode::DomainFault, what), s_(s), subexpression_(std::move(subexpression)) {}
  double s() const { return s_; }
  const std::string& subexpression() const { return subexpression_; }

 private:
  double s_;
  std::string subexpression_;
};

/// Throws ExprSyntaxError with code SyntaxError or UnknownFunction.
Expr parse_expr(std::string_view text);

/// Throws DomainFault for division by zero, sqrt of a negative, log of a
/// non-positive, asin/acos outside [-1, 1] and any non-finite result.
double eval_expr(const Expr& e, double s);

/// Fully parenthesized form with 17 significant digits; parses back to the same tree.
std::string print_expr(const Expr& e);

/// Profile function for synthesis: s -> eval_expr(e, s).
std::function<double(double)> expr_function(Expr e);

const std::vector<std::string>& expr_functions();

}  // namespace oscmate
