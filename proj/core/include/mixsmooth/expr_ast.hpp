#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixsmooth/errors.hpp"

namespace mixsmooth {

// Function mini-language, grammar version 1:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' uint)?
//   atom   := number | var | func '(' expr ')' | '(' expr ')' | '-' atom
//   var    := 'x' digits            (x1 .. xN)
//   func   := sin | cos | exp | log | sqrt | tanh
//
// Whitespace is ignored; binary operators associate to the left. Exponents
// are literal nonnegative integers so that mixed-jet composition stays exact.
inline constexpr int kGrammarVersion = 1;

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, Tanh };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

struct Node;

/// Immutable expression tree handle. Copies share structure.
class Expr {
 public:
  enum class Kind { Constant, Variable, Unary, Binary };

  static Expr constant(double value, std::size_t offset = 0);
  /// Variable x_index, index >= 1.
  static Expr variable(int index, std::size_t offset = 0);
  static Expr unary(UnaryOp op, Expr child, std::size_t offset = 0);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset = 0);
  static Expr power(Expr base, unsigned exponent, std::size_t offset = 0);

  Kind kind() const noexcept;
  double value() const;             // Constant
  int variable_index() const;       // Variable
  UnaryOp unary_op() const;         // Unary
  BinaryOp binary_op() const;       // Binary
  const Expr& child() const;        // Unary
  const Expr& lhs() const;          // Binary
  const Expr& rhs() const;          // Binary
  unsigned exponent() const;        // Binary Pow
  /// 1-based source column of the token that produced the node; 0 if synthetic.
  std::size_t offset() const noexcept;

  bool is_constant(double v) const noexcept;
  const Node* node() const noexcept { return node_.get(); }

  friend Expr operator+(Expr a, Expr b);
  friend Expr operator-(Expr a, Expr b);
  friend Expr operator*(Expr a, Expr b);
  friend Expr operator/(Expr a, Expr b);
  friend Expr operator-(Expr a);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Expr::Kind kind = Expr::Kind::Constant;
  double value = 0.0;
  int var = 0;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  unsigned exponent = 0;
  std::optional<Expr> a;
  std::optional<Expr> b;
  std::size_t offset = 0;
};

struct ParseDiagnostic {
  std::size_t offset = 0;  // 1-based column; input length + 1 means end of input
  std::string message;
  std::string expected;    // hint such as "')'" or "expression"; may be empty
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(ParseDiagnostic d);
  const ParseDiagnostic& diagnostic() const noexcept { return diag_; }

 private:
  ParseDiagnostic diag_;
};

using ParseResult = std::variant<Expr, ParseDiagnostic>;

/// Parses `text` as a function of x1..x_arity. Stops at the first error.
ParseResult parse(std::string_view text, int arity);
Expr parse_or_throw(std::string_view text, int arity);

/// Contents of a function file: an optional leading "arity: N" line followed
/// by one expression.
struct FunctionSource {
  std::string text;
  std::optional<int> arity;
};
FunctionSource read_function_source(std::string_view file_contents);

/// Fully parenthesized rendering that parses back to the same tree.
std::string to_string(const Expr& e);

double eval_real(const Expr& e, std::span<const double> point);

/// Largest variable index appearing in `e` (0 for constants).
int free_arity(const Expr& e);

/// Symbolic partial derivative with respect to x_axis, lightly simplified.
Expr differentiate(const Expr& e, int axis);

/// Replaces x_i by replacements[i-1]. Missing entries leave the variable alone.
Expr substitute(const Expr& e, std::span<const std::optional<Expr>> replacements);

/// Structural equality (constants compared bitwise).
bool structurally_equal(const Expr& a, const Expr& b);

/// Flattened post-order form of an expression, shared by the real and jet
/// evaluators. Slots are produced in order; the last one holds the result.
struct Instruction {
  Expr::Kind kind;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  int a = -1;
  int b = -1;
  double value = 0.0;
  int var = 0;
  unsigned exponent = 0;
  const Node* source = nullptr;
};

class Program {
 public:
  explicit Program(const Expr& e);

  std::span<const Instruction> code() const noexcept { return code_; }
  int arity() const noexcept { return arity_; }
  const Expr& expr() const noexcept { return expr_; }

  /// Evaluation error pinned to the instruction that raised it.
  [[noreturn]] void fail(const Instruction& ins, const std::string& what) const;

 private:
  Expr expr_;
  std::vector<Instruction> code_;
  int arity_ = 0;
};

/// Allocation-free repeated evaluation of one expression; same arithmetic
/// and error reporting as eval_real. Not thread-safe.
class RealEvaluator {
 public:
  explicit RealEvaluator(const Expr& e);
  double operator()(std::span<const double> point);

 private:
  Program program_;
  std::vector<double> slots_;
};

}  // namespace mixsmooth
