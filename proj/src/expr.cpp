#include <oscmate/expr.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace oscmate {

const std::vector<std::string>& expr_functions() {
  static const std::vector<std::string> names = {"sin",  "cos", "tan", "asin", "acos", "atan",
                                                 "sqrt", "exp", "log", "abs",  "sec"};
  return names;
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& it : items) out += (out.empty() ? "" : ", ") + it;
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_space();
    if (pos_ == text_.size()) fail({"expression"}, "empty expression");
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail({"operator", "end of input"}, "unexpected character");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const {
    std::string msg = what + " at offset " + std::to_string(pos_);
    if (pos_ < text_.size()) msg += " ('" + std::string(1, text_[pos_]) + "')";
    msg += "; expected " + join(expected);
    throw ExprSyntaxError(ErrorCode::SyntaxError, pos_, std::move(expected), msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr make(ExprKind kind, std::size_t start, Expr lhs = nullptr, Expr rhs = nullptr) const {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    node->offset = start;
    node->length = pos_ - start;
    node->source = std::string(text_.substr(start, pos_ - start));
    return node;
  }

  std::size_t start_of_next() {
    skip_space();
    return pos_;
  }

  Expr expr() {
    const std::size_t start = start_of_next();
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        Expr rhs = term();
        lhs = make(ExprKind::Add, start, lhs, rhs);
      } else if (accept('-')) {
        Expr rhs = term();
        lhs = make(ExprKind::Subtract, start, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    const std::size_t start = start_of_next();
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        Expr rhs = unary();
        lhs = make(ExprKind::Multiply, start, lhs, rhs);
      } else if (accept('/')) {
        Expr rhs = unary();
        lhs = make(ExprKind::Divide, start, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    const std::size_t start = start_of_next();
    if (accept('-')) {
      Expr operand = unary();
      return make(ExprKind::Negate, start, operand);
    }
    return power();
  }

  Expr power() {
    const std::size_t start = start_of_next();
    Expr base = primary();
    if (accept('^')) {
      Expr exponent = unary();
      return make(ExprKind::Power, start, base, exponent);
    }
    return base;
  }

  Expr primary() {
    const std::size_t start = start_of_next();
    if (pos_ == text_.size()) fail({"number", "s", "function", "("}, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail({")"}, "unbalanced parenthesis");
      // Keep the parenthesized node but widen its source range.
      auto node = std::make_shared<ExprNode>(*inner);
      node->offset = start;
      node->length = pos_ - start;
      node->source = std::string(text_.substr(start, pos_ - start));
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail({"number", "s", "function", "("}, "unexpected character");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - from;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail({"digit"}, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail({"exponent digits"}, "malformed exponent");
    }
    const std::string literal(text_.substr(start, pos_ - start));
    const double v = std::strtod(literal.c_str(), nullptr);
    if (!std::isfinite(v)) {
      pos_ = start;
      fail({"finite number"}, "number out of range");
    }
    Expr node = make(ExprKind::Number, start);
    std::const_pointer_cast<ExprNode>(node)->value = v;
    return node;
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    skip_space();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (!call) {
      if (name == "s") return make(ExprKind::Variable, start);
      const auto& fns = expr_functions();
      pos_ = start;
      if (std::find(fns.begin(), fns.end(), name) != fns.end()) {
        pos_ = start + name.size();
        fail({"("}, "function '" + name + "' needs an argument");
      }
      fail({"number", "s", "function", "("}, "unknown variable '" + name + "' (only s is allowed)");
    }
    const auto& fns = expr_functions();
    if (std::find(fns.begin(), fns.end(), name) == fns.end()) {
      throw ExprSyntaxError(ErrorCode::UnknownFunction, start, fns,
                            "unknown function '" + name + "' at offset " + std::to_string(start) +
                                "; known: " + join(fns));
    }
    ++pos_;  // '('
    Expr arg = expr();
    if (!accept(')')) fail({")"}, "unclosed argument list");
    Expr node = make(ExprKind::Call, start, arg);
    std::const_pointer_cast<ExprNode>(node)->function = name;
    return node;
  }
};

[[noreturn]] void fault(const ExprNode& node, double s, const std::string& why) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s);
  throw DomainFault(s, node.source, why + " in '" + node.source + "' at s=" + buf);
}

double checked(const ExprNode& node, double s, double v) {
  if (!std::isfinite(v)) fault(node, s, "non-finite result");
  return v;
}

double call(const ExprNode& node, double s, double x) {
  const std::string& f = node.function;
  if (f == "sin") return std::sin(x);
  if (f == "cos") return std::cos(x);
  if (f == "tan") return std::tan(x);
  if (f == "atan") return std::atan(x);
  if (f == "exp") return std::exp(x);
  if (f == "abs") return std::abs(x);
  if (f == "asin" || f == "acos") {
    if (x < -1.0 || x > 1.0) fault(node, s, f + " argument outside [-1, 1]");
    return f == "asin" ? std::asin(x) : std::acos(x);
  }
  if (f == "sqrt") {
    if (x < 0.0) fault(node, s, "sqrt of a negative number");
    return std::sqrt(x);
  }
  if (f == "log") {
    if (x <= 0.0) fault(node, s, "log of a non-positive number");
    return std::log(x);
  }
  if (f == "sec") {
    const double c = std::cos(x);
    if (c == 0.0) fault(node, s, "sec at a zero of cos");
    return 1.0 / c;
  }
  fault(node, s, "unknown function '" + f + "'");
}

double eval(const ExprNode& n, double s) {
  switch (n.kind) {
    case ExprKind::Number: return n.value;
    case ExprKind::Variable: return s;
    case ExprKind::Negate: return -eval(*n.lhs, s);
    case ExprKind::Add: return checked(n, s, eval(*n.lhs, s) + eval(*n.rhs, s));
    case ExprKind::Subtract: return checked(n, s, eval(*n.lhs, s) - eval(*n.rhs, s));
    case ExprKind::Multiply: return checked(n, s, eval(*n.lhs, s) * eval(*n.rhs, s));
    case ExprKind::Divide: {
      const double num = eval(*n.lhs, s);
      const double den = eval(*n.rhs, s);
      if (den == 0.0) fault(n, s, "division by zero");
      return checked(n, s, num / den);
    }
    case ExprKind::Power: return checked(n, s, std::pow(eval(*n.lhs, s), eval(*n.rhs, s)));
    case ExprKind::Call: return checked(n, s, call(n, s, eval(*n.lhs, s)));
  }
  fault(n, s, "corrupt expression node");
}

void print(const ExprNode& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case ExprKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case ExprKind::Variable: out += 's'; return;
    case ExprKind::Negate:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case ExprKind::Add: binary(" + "); return;
    case ExprKind::Subtract: binary(" - "); return;
    case ExprKind::Multiply: binary(" * "); return;
    case ExprKind::Divide: binary(" / "); return;
    case ExprKind::Power: binary("^"); return;
    case ExprKind::Call:
      out += n.function + '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

double eval_expr(const Expr& e, double s) {
  if (!e) throw Error(ErrorCode::InvalidArgument, "eval_expr: empty expression");
  return eval(*e, s);
}

std::string print_expr(const Expr& e) {
  std::string out;
  if (e) print(*e, out);
  return out;
}

std::function<double(double)> expr_function(Expr e) {
  return [e = std::move(e)](double s) { return eval_expr(e, s); };
}

}  // namespace oscmate
