#include <cctype>
#include <charconv>
#include <sstream>

#include "mixsmooth/expr_ast.hpp"

namespace mixsmooth {

namespace {

struct Failure {
  ParseDiagnostic diag;
};

class Parser {
 public:
  Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

  Expr parse_all() {
    skip_ws();
    if (at_end()) fail(pos_, "empty expression", "expression");
    Expr e = expr();
    skip_ws();
    if (!at_end()) {
      if (peek() == ')') fail(pos_, "unbalanced ')'", "operator or end of input");
      if (peek() == '^') fail(pos_, "chained '^' needs parentheses", "operator or end of input");
      fail(pos_, "unexpected trailing input", "operator or end of input");
    }
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  std::size_t column(std::size_t pos) const { return pos + 1; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(std::size_t pos, std::string message, std::string expected) {
    throw Failure{ParseDiagnostic{column(pos), std::move(message), std::move(expected)}};
  }

  Expr expr() {
    Expr lhs = term();
    while (true) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      const std::size_t at = pos_++;
      Expr rhs = term();
      lhs = Expr::binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs, column(at));
    }
  }

  Expr term() {
    Expr lhs = factor();
    while (true) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      const std::size_t at = pos_++;
      Expr rhs = factor();
      lhs = Expr::binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs, column(at));
    }
  }

  Expr factor() {
    Expr base = atom();
    skip_ws();
    if (peek() != '^') return base;
    const std::size_t at = pos_++;
    skip_ws();
    const std::size_t start = pos_;
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
      fail(start, "exponent must be a nonnegative integer literal", "unsigned integer");
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (!at_end() && (peek() == '.' || peek() == 'e' || peek() == 'E'))
      fail(start, "exponent must be a nonnegative integer literal", "unsigned integer");
    unsigned value = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || value > 1024)
      fail(start, "exponent out of range (max 1024)", "unsigned integer");
    return Expr::power(base, value, column(at));
  }

  Expr atom() {
    skip_ws();
    if (at_end()) fail(pos_, "unexpected end of input", "expression");
    const std::size_t start = pos_;
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return Expr::unary(UnaryOp::Neg, atom(), column(start));
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      skip_ws();
      if (peek() != ')') fail(pos_, "expected ')'", "')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == ')') fail(pos_, "unbalanced ')'", "expression");
    fail(pos_, std::string("unexpected character '") + c + "'", "expression");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_, ++n;
      return n;
    };
    std::size_t mantissa = digits();
    if (peek() == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail(start, "malformed number", "digits");
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) fail(pos_, "malformed number exponent", "digits");
    }
    double value = 0.0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || p != text_.data() + pos_)
      fail(start, "malformed number", "number");
    return Expr::constant(value, column(start));
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      int index = 0;
      auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc{} || index < 1)
        fail(start, "variable index must be >= 1", "x1..x" + std::to_string(arity_));
      if (index > arity_)
        fail(start,
             "variable index " + std::to_string(index) + " exceeds arity " + std::to_string(arity_),
             "x1..x" + std::to_string(arity_));
      return Expr::variable(index, column(start));
    }

    static constexpr std::pair<std::string_view, UnaryOp> kFunctions[] = {
        {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
        {"log", UnaryOp::Log},   {"sqrt", UnaryOp::Sqrt}, {"tanh", UnaryOp::Tanh}};
    for (const auto& [fname, op] : kFunctions) {
      if (name != fname) continue;
      skip_ws();
      if (peek() != '(') fail(pos_, "expected '(' after function name", "'('");
      ++pos_;
      Expr arg = expr();
      skip_ws();
      if (peek() != ')') fail(pos_, "expected ')'", "')'");
      ++pos_;
      return Expr::unary(op, arg, column(start));
    }
    fail(start, "unknown identifier '" + std::string(name) + "'",
         "sin, cos, exp, log, sqrt, tanh or x1..x" + std::to_string(arity_));
  }

  std::string_view text_;
  int arity_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(ParseDiagnostic d)
    : std::runtime_error("parse error at column " + std::to_string(d.offset) + ": " + d.message),
      diag_(std::move(d)) {}

ParseResult parse(std::string_view text, int arity) {
  if (arity < 0) throw DomainError("parse: arity must be nonnegative");
  try {
    return Parser(text, arity).parse_all();
  } catch (Failure& f) {
    return std::move(f.diag);
  }
}

Expr parse_or_throw(std::string_view text, int arity) {
  auto r = parse(text, arity);
  if (auto* d = std::get_if<ParseDiagnostic>(&r)) throw ParseError(*d);
  return std::get<Expr>(std::move(r));
}

FunctionSource read_function_source(std::string_view contents) {
  FunctionSource out;
  std::string body;
  std::istringstream in{std::string(contents)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      std::string_view v = line;
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
      if (v.substr(0, 6) == "arity:") {
        v.remove_prefix(6);
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
        int n = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
        if (ec != std::errc{} || p != v.data() + v.size() || n < 1)
          throw DomainError("function file: malformed 'arity:' line");
        out.arity = n;
        continue;
      }
    }
    if (!body.empty()) body += ' ';
    body += line;
  }
  out.text = std::move(body);
  return out;
}

}  // namespace mixsmooth
