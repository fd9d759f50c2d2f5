#include "mixsmooth/expr_ast.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>

namespace mixsmooth {

std::string_view to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Tanh: return "tanh";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
  }
  return "?";
}

Expr Expr::constant(double value, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  n->offset = offset;
  return Expr(std::move(n));
}

Expr Expr::variable(int index, std::size_t offset) {
  if (index < 1) throw DomainError("variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = index;
  n->offset = offset;
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->a = std::move(child);
  n->offset = offset;
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset) {
  if (op == BinaryOp::Pow) {
    if (rhs.kind() != Kind::Constant || rhs.value() < 0 || std::floor(rhs.value()) != rhs.value())
      throw DomainError("'^' requires a nonnegative integer constant exponent");
    return power(std::move(lhs), static_cast<unsigned>(rhs.value()), offset);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  n->offset = offset;
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, unsigned exponent, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = BinaryOp::Pow;
  n->exponent = exponent;
  n->a = std::move(base);
  n->b = constant(static_cast<double>(exponent));
  n->offset = offset;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::variable_index() const { return node_->var; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
const Expr& Expr::child() const { return *node_->a; }
const Expr& Expr::lhs() const { return *node_->a; }
const Expr& Expr::rhs() const { return *node_->b; }
unsigned Expr::exponent() const { return node_->exponent; }
std::size_t Expr::offset() const noexcept { return node_->offset; }

bool Expr::is_constant(double v) const noexcept {
  return node_->kind == Kind::Constant && node_->value == v;
}

Expr operator+(Expr a, Expr b) { return Expr::binary(BinaryOp::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(BinaryOp::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(BinaryOp::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(BinaryOp::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::unary(UnaryOp::Neg, std::move(a)); }

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "0";
  return std::string(buf, end);
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      if (std::signbit(e.value()) && e.value() != 0.0) {
        out += "(-";
        out += format_number(-e.value());
        out += ')';
      } else {
        out += format_number(std::abs(e.value()));
      }
      return;
    case Expr::Kind::Variable:
      out += 'x';
      out += std::to_string(e.variable_index());
      return;
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::Neg) {
        out += "(-";
        print(e.child(), out);
        out += ')';
      } else {
        out += to_string(e.unary_op());
        out += '(';
        print(e.child(), out);
        out += ')';
      }
      return;
    case Expr::Kind::Binary:
      out += '(';
      print(e.lhs(), out);
      if (e.binary_op() == BinaryOp::Pow) {
        out += '^';
        out += std::to_string(e.exponent());
      } else {
        out += ' ';
        out += to_string(e.binary_op());
        out += ' ';
        print(e.rhs(), out);
      }
      out += ')';
      return;
  }
}

[[noreturn]] void eval_fail(const Expr& e, const std::string& what) {
  throw EvalError(what + " at column " + std::to_string(e.offset()) + " in " + to_string(e),
                  e.offset(), to_string(e));
}

double eval_node(const Expr& e, std::span<const double> x) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value();
    case Expr::Kind::Variable: {
      const auto i = static_cast<std::size_t>(e.variable_index() - 1);
      if (i >= x.size())
        throw DomainError("eval: point has dimension " + std::to_string(x.size()) +
                          " but expression uses x" + std::to_string(e.variable_index()));
      return x[i];
    }
    case Expr::Kind::Unary: {
      const double v = eval_node(e.child(), x);
      double r = 0.0;
      switch (e.unary_op()) {
        case UnaryOp::Neg: r = -v; break;
        case UnaryOp::Sin: r = std::sin(v); break;
        case UnaryOp::Cos: r = std::cos(v); break;
        case UnaryOp::Exp: r = std::exp(v); break;
        case UnaryOp::Log:
          if (!(v > 0.0)) eval_fail(e, "log of nonpositive argument");
          r = std::log(v);
          break;
        case UnaryOp::Sqrt:
          if (!(v >= 0.0)) eval_fail(e, "sqrt of negative argument");
          r = std::sqrt(v);
          break;
        case UnaryOp::Tanh: r = std::tanh(v); break;
      }
      if (!std::isfinite(r)) eval_fail(e, "non-finite value");
      return r;
    }
    case Expr::Kind::Binary: {
      const double a = eval_node(e.lhs(), x);
      double r = 0.0;
      if (e.binary_op() == BinaryOp::Pow) {
        r = 1.0;
        double base = a;
        for (unsigned k = e.exponent(); k; k >>= 1) {
          if (k & 1u) r *= base;
          if (k > 1) base *= base;
        }
      } else {
        const double b = eval_node(e.rhs(), x);
        switch (e.binary_op()) {
          case BinaryOp::Add: r = a + b; break;
          case BinaryOp::Sub: r = a - b; break;
          case BinaryOp::Mul: r = a * b; break;
          case BinaryOp::Div:
            if (b == 0.0) eval_fail(e, "division by zero");
            r = a / b;
            break;
          case BinaryOp::Pow: break;
        }
      }
      if (!std::isfinite(r)) eval_fail(e, "non-finite value");
      return r;
    }
  }
  return 0.0;
}

// Simplifying constructors used by differentiate(). Only folds identities
// that are exact in floating point.
Expr k(double v) { return Expr::constant(v); }

Expr s_neg(const Expr& a) {
  if (a.kind() == Expr::Kind::Constant) return k(-a.value());
  if (a.kind() == Expr::Kind::Unary && a.unary_op() == UnaryOp::Neg) return a.child();
  return Expr::unary(UnaryOp::Neg, a);
}

Expr s_add(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant)
    return k(a.value() + b.value());
  return Expr::binary(BinaryOp::Add, a, b);
}

Expr s_sub(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return s_neg(b);
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant)
    return k(a.value() - b.value());
  return Expr::binary(BinaryOp::Sub, a, b);
}

Expr s_mul(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return k(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return s_neg(b);
  if (b.is_constant(-1.0)) return s_neg(a);
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant)
    return k(a.value() * b.value());
  return Expr::binary(BinaryOp::Mul, a, b);
}

Expr s_div(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return k(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::binary(BinaryOp::Div, a, b);
}

Expr s_pow(const Expr& a, unsigned n) {
  if (n == 0) return k(1.0);
  if (n == 1) return a;
  return Expr::power(a, n);
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

double eval_real(const Expr& e, std::span<const double> point) { return eval_node(e, point); }

int free_arity(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return 0;
    case Expr::Kind::Variable: return e.variable_index();
    case Expr::Kind::Unary: return free_arity(e.child());
    case Expr::Kind::Binary:
      if (e.binary_op() == BinaryOp::Pow) return free_arity(e.lhs());
      return std::max(free_arity(e.lhs()), free_arity(e.rhs()));
  }
  return 0;
}

Expr differentiate(const Expr& e, int axis) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return k(0.0);
    case Expr::Kind::Variable: return k(e.variable_index() == axis ? 1.0 : 0.0);
    case Expr::Kind::Unary: {
      const Expr& a = e.child();
      const Expr da = differentiate(a, axis);
      if (da.is_constant(0.0)) return k(0.0);
      switch (e.unary_op()) {
        case UnaryOp::Neg: return s_neg(da);
        case UnaryOp::Sin: return s_mul(Expr::unary(UnaryOp::Cos, a), da);
        case UnaryOp::Cos: return s_neg(s_mul(Expr::unary(UnaryOp::Sin, a), da));
        case UnaryOp::Exp: return s_mul(e, da);
        case UnaryOp::Log: return s_div(da, a);
        case UnaryOp::Sqrt: return s_div(da, s_mul(k(2.0), e));
        case UnaryOp::Tanh: return s_mul(s_sub(k(1.0), s_pow(e, 2)), da);
      }
      return k(0.0);
    }
    case Expr::Kind::Binary: {
      const Expr& a = e.lhs();
      const Expr da = differentiate(a, axis);
      if (e.binary_op() == BinaryOp::Pow) {
        const unsigned n = e.exponent();
        if (n == 0 || da.is_constant(0.0)) return k(0.0);
        return s_mul(s_mul(k(static_cast<double>(n)), s_pow(a, n - 1)), da);
      }
      const Expr& b = e.rhs();
      const Expr db = differentiate(b, axis);
      switch (e.binary_op()) {
        case BinaryOp::Add: return s_add(da, db);
        case BinaryOp::Sub: return s_sub(da, db);
        case BinaryOp::Mul: return s_add(s_mul(da, b), s_mul(a, db));
        case BinaryOp::Div:
          if (db.is_constant(0.0)) return s_div(da, b);
          return s_div(s_sub(s_mul(da, b), s_mul(a, db)), s_pow(b, 2));
        case BinaryOp::Pow: break;
      }
      return k(0.0);
    }
  }
  return k(0.0);
}

Expr substitute(const Expr& e, std::span<const std::optional<Expr>> replacements) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e;
    case Expr::Kind::Variable: {
      const auto i = static_cast<std::size_t>(e.variable_index() - 1);
      if (i < replacements.size() && replacements[i]) return *replacements[i];
      return e;
    }
    case Expr::Kind::Unary:
      return Expr::unary(e.unary_op(), substitute(e.child(), replacements), e.offset());
    case Expr::Kind::Binary:
      if (e.binary_op() == BinaryOp::Pow)
        return Expr::power(substitute(e.lhs(), replacements), e.exponent(), e.offset());
      return Expr::binary(e.binary_op(), substitute(e.lhs(), replacements),
                          substitute(e.rhs(), replacements), e.offset());
  }
  return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant: {
      const double x = a.value(), y = b.value();
      return std::memcmp(&x, &y, sizeof x) == 0;
    }
    case Expr::Kind::Variable: return a.variable_index() == b.variable_index();
    case Expr::Kind::Unary:
      return a.unary_op() == b.unary_op() && structurally_equal(a.child(), b.child());
    case Expr::Kind::Binary:
      if (a.binary_op() != b.binary_op()) return false;
      if (a.binary_op() == BinaryOp::Pow)
        return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
      return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
  }
  return false;
}

Program::Program(const Expr& e) : expr_(e), arity_(free_arity(e)) {
  std::function<int(const Expr&)> emit = [&](const Expr& x) -> int {
    Instruction ins{x.kind()};
    ins.source = x.node();
    switch (x.kind()) {
      case Expr::Kind::Constant: ins.value = x.value(); break;
      case Expr::Kind::Variable: ins.var = x.variable_index(); break;
      case Expr::Kind::Unary:
        ins.uop = x.unary_op();
        ins.a = emit(x.child());
        break;
      case Expr::Kind::Binary:
        ins.bop = x.binary_op();
        ins.a = emit(x.lhs());
        if (x.binary_op() == BinaryOp::Pow) ins.exponent = x.exponent();
        else ins.b = emit(x.rhs());
        break;
    }
    code_.push_back(ins);
    return static_cast<int>(code_.size()) - 1;
  };
  emit(e);
}

void Program::fail(const Instruction& ins, const std::string& what) const {
  // Rebuild a printable view of the offending node by locating it in the tree.
  std::string text;
  std::size_t offset = 0;
  std::function<bool(const Expr&)> find = [&](const Expr& x) -> bool {
    if (x.node() == ins.source) {
      text = to_string(x);
      offset = x.offset();
      return true;
    }
    switch (x.kind()) {
      case Expr::Kind::Unary: return find(x.child());
      case Expr::Kind::Binary:
        return find(x.lhs()) || (x.binary_op() != BinaryOp::Pow && find(x.rhs()));
      default: return false;
    }
  };
  find(expr_);
  throw EvalError(what + " at column " + std::to_string(offset) + " in " + text, offset, text);
}

RealEvaluator::RealEvaluator(const Expr& e) : program_(e), slots_(program_.code().size()) {}

double RealEvaluator::operator()(std::span<const double> x) {
  const auto code = program_.code();
  for (std::size_t i = 0; i < code.size(); ++i) {
    const Instruction& ins = code[i];
    double r = 0.0;
    switch (ins.kind) {
      case Expr::Kind::Constant:
        slots_[i] = ins.value;
        continue;
      case Expr::Kind::Variable: {
        const auto v = static_cast<std::size_t>(ins.var - 1);
        if (v >= x.size())
          throw DomainError("eval: point has dimension " + std::to_string(x.size()) +
                            " but expression uses x" + std::to_string(ins.var));
        slots_[i] = x[v];
        continue;
      }
      case Expr::Kind::Unary: {
        const double v = slots_[static_cast<std::size_t>(ins.a)];
        switch (ins.uop) {
          case UnaryOp::Neg: r = -v; break;
          case UnaryOp::Sin: r = std::sin(v); break;
          case UnaryOp::Cos: r = std::cos(v); break;
          case UnaryOp::Exp: r = std::exp(v); break;
          case UnaryOp::Log:
            if (!(v > 0.0)) program_.fail(ins, "log of nonpositive argument");
            r = std::log(v);
            break;
          case UnaryOp::Sqrt:
            if (!(v >= 0.0)) program_.fail(ins, "sqrt of negative argument");
            r = std::sqrt(v);
            break;
          case UnaryOp::Tanh: r = std::tanh(v); break;
        }
        break;
      }
      case Expr::Kind::Binary: {
        const double a = slots_[static_cast<std::size_t>(ins.a)];
        if (ins.bop == BinaryOp::Pow) {
          r = 1.0;
          double base = a;
          for (unsigned k = ins.exponent; k; k >>= 1) {
            if (k & 1u) r *= base;
            if (k > 1) base *= base;
          }
          break;
        }
        const double b = slots_[static_cast<std::size_t>(ins.b)];
        switch (ins.bop) {
          case BinaryOp::Add: r = a + b; break;
          case BinaryOp::Sub: r = a - b; break;
          case BinaryOp::Mul: r = a * b; break;
          case BinaryOp::Div:
            if (b == 0.0) program_.fail(ins, "division by zero");
            r = a / b;
            break;
          case BinaryOp::Pow: break;
        }
        break;
      }
    }
    if (!std::isfinite(r)) program_.fail(ins, "non-finite value");
    slots_[i] = r;
  }
  return slots_.back();
}

}  // namespace mixsmooth
