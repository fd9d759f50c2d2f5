#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mixsmooth/errors.hpp"
#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/gallery.hpp"

using namespace mixsmooth;

namespace {

Expr must_parse(std::string_view text, int arity) {
  auto r = parse(text, arity);
  if (auto* d = std::get_if<ParseDiagnostic>(&r)) {
    ADD_FAILURE() << "parse failed at " << d->offset << ": " << d->message;
    return Expr::constant(0.0);
  }
  return std::get<Expr>(r);
}

ParseDiagnostic must_fail(std::string_view text, int arity) {
  auto r = parse(text, arity);
  if (auto* d = std::get_if<ParseDiagnostic>(&r)) return *d;
  ADD_FAILURE() << "'" << text << "' parsed unexpectedly";
  return {};
}

double eval(const Expr& e, std::initializer_list<double> pt) {
  std::vector<double> v(pt);
  return eval_real(e, v);
}

}  // namespace

TEST(Parse, ProductOfTwoVariables) {
  const Expr e = must_parse("x1*x2", 2);
  ASSERT_EQ(e.kind(), Expr::Kind::Binary);
  EXPECT_EQ(e.binary_op(), BinaryOp::Mul);
  EXPECT_EQ(e.lhs().kind(), Expr::Kind::Variable);
  EXPECT_EQ(e.lhs().variable_index(), 1);
  EXPECT_EQ(e.rhs().variable_index(), 2);
}

TEST(Parse, MultiplicationBindsTighterThanAddition) {
  const Expr e = must_parse("x1+x2*x3", 3);
  ASSERT_EQ(e.binary_op(), BinaryOp::Add);
  EXPECT_EQ(e.lhs().variable_index(), 1);
  ASSERT_EQ(e.rhs().kind(), Expr::Kind::Binary);
  EXPECT_EQ(e.rhs().binary_op(), BinaryOp::Mul);
}

TEST(Parse, UnclosedCallReportsColumnSeven) {
  const auto d = must_fail("sin(x1", 1);
  EXPECT_EQ(d.offset, 7u);
  EXPECT_EQ(d.message, "expected ')'");
}

TEST(Parse, LeftAssociativeSubtractionAndDivision) {
  EXPECT_DOUBLE_EQ(eval(must_parse("x1-2-3", 1), {10.0}), 5.0);
  EXPECT_DOUBLE_EQ(eval(must_parse("x1/2/5", 1), {10.0}), 1.0);
}

TEST(Parse, PowerTakesLiteralIntegerOnly) {
  EXPECT_DOUBLE_EQ(eval(must_parse("x1^3", 1), {2.0}), 8.0);
  EXPECT_DOUBLE_EQ(eval(must_parse("x1^0", 1), {2.0}), 1.0);
  must_fail("x1^x1", 1);
  must_fail("x1^1.5", 1);
  must_fail("x1^-1", 1);
}

TEST(Parse, RejectsBadInput) {
  must_fail("", 1);
  must_fail("x1 x2", 2);  // no implicit multiplication
  must_fail("abs(x1)", 1);
  must_fail("x3", 2);
  must_fail("x0", 2);
  must_fail("1e", 1);
  must_fail("(x1", 1);
  must_fail("x1 +", 1);
  must_fail("x1 $ 2", 1);
}

TEST(Parse, WhitespaceAndScientificNumbers) {
  EXPECT_DOUBLE_EQ(eval(must_parse("  2.5e1 *\tx1 ", 1), {2.0}), 50.0);
  EXPECT_DOUBLE_EQ(eval(must_parse(".5 + 1.", 1), {0.0}), 1.5);
}

TEST(Parse, ThrowingVariantCarriesDiagnostic) {
  try {
    parse_or_throw("cos(", 1);
    FAIL() << "no throw";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.diagnostic().offset, 5u);
  }
}

TEST(EvalReal, SpecExamples) {
  EXPECT_EQ(eval(must_parse("x1*x2", 2), {2.0, 3.0}), 6.0);
  EXPECT_EQ(eval(must_parse("sin(x1)", 1), {0.0}), 0.0);
  EXPECT_THROW(eval(must_parse("log(x1)", 1), {0.0}), EvalError);
}

TEST(EvalReal, ErrorsCarrySourceColumn) {
  try {
    eval(must_parse("1 + sqrt(x1)", 1), {-1.0});
    FAIL() << "no throw";
  } catch (const EvalError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW(eval(must_parse("1/x1", 1), {0.0}), EvalError);
  EXPECT_THROW(eval(must_parse("exp(x1)", 1), {1000.0}), EvalError);
}

TEST(EvalReal, PointTooShort) {
  EXPECT_THROW(eval(must_parse("x1*x2", 2), {1.0}), DomainError);
}

TEST(FreeArity, SpecExamples) {
  EXPECT_EQ(free_arity(must_parse("x1*x2", 2)), 2);
  EXPECT_EQ(free_arity(must_parse("5", 1)), 0);
  EXPECT_EQ(free_arity(must_parse("sin(x3)", 3)), 3);
}

TEST(RoundTrip, PrintParsePrintIsFixedPoint) {
  const char* cases[] = {"x1*x2", "x1+x2*x3", "-x1^2", "sin(x1)*exp(x2)*x3",
                         "log(log(1 + 1/sqrt(x1^2 + x2^2 + 0.25)))", "1/(x1-3)/x2", "-(-x1)",
                         "tanh(x1) - cos(x2 / 3)", "0.1 + 1e-300 * x1", "2 - (3 - x1)"};
  for (const char* c : cases) {
    const Expr e = must_parse(c, 3);
    const std::string once = to_string(e);
    const Expr again = must_parse(once, 3);
    EXPECT_TRUE(structurally_equal(e, again)) << c << " -> " << once;
    EXPECT_EQ(to_string(again), once);
  }
  for (const auto& fam : gallery_families())
    for (int n = 1; n <= 4; ++n) {
      const auto g = gallery(fam, n);
      EXPECT_TRUE(structurally_equal(g.expr, must_parse(to_string(g.expr), n))) << g.id;
    }
}

TEST(Gallery, EvalMatchesHandWrittenClosureExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (const auto& fam : gallery_families())
    for (int n = 1; n <= 4; ++n) {
      const auto g = gallery(fam, n);
      RealEvaluator fast(g.expr);
      for (int i = 0; i < 100; ++i) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = U(rng);
        const double a = eval_real(g.expr, x);
        EXPECT_EQ(a, g.closure(x)) << g.id;
        EXPECT_EQ(a, fast(x)) << g.id;
      }
    }
}

TEST(Differentiate, MatchesClosedForms) {
  const Expr e = must_parse("sin(x1)*exp(x2)", 2);
  const Expr d1 = differentiate(e, 1);
  const Expr d12 = differentiate(d1, 2);
  for (double a : {-1.0, 0.3, 2.0})
    for (double b : {-0.5, 0.0, 1.0}) {
      EXPECT_NEAR(eval(d1, {a, b}), std::cos(a) * std::exp(b), 1e-15);
      EXPECT_NEAR(eval(d12, {a, b}), std::cos(a) * std::exp(b), 1e-15);
    }
  EXPECT_TRUE(differentiate(must_parse("x2^3", 2), 1).is_constant(0.0));
  EXPECT_NEAR(eval(differentiate(must_parse("x1^3", 1), 1), {2.0}), 12.0, 1e-15);
  EXPECT_NEAR(eval(differentiate(must_parse("1/x1", 1), 1), {2.0}), -0.25, 1e-15);
  EXPECT_NEAR(eval(differentiate(must_parse("sqrt(x1)", 1), 1), {4.0}), 0.25, 1e-15);
  EXPECT_NEAR(eval(differentiate(must_parse("log(x1)", 1), 1), {4.0}), 0.25, 1e-15);
  EXPECT_NEAR(eval(differentiate(must_parse("tanh(x1)", 1), 1), {0.5}),
              1.0 - std::tanh(0.5) * std::tanh(0.5), 1e-15);
}

TEST(Substitute, ReplacesOnlyGivenVariables) {
  const Expr e = must_parse("x1 + 10*x2", 2);
  std::vector<std::optional<Expr>> repl(2);
  repl[1] = Expr::constant(-1.0) * Expr::variable(1);
  const Expr s = substitute(e, repl);
  EXPECT_EQ(free_arity(s), 1);
  EXPECT_DOUBLE_EQ(eval(s, {3.0}), 3.0 - 30.0);
}

TEST(FunctionSource, OptionalArityLine) {
  auto a = read_function_source("arity: 3\nx1*x2\n+ x3\n");
  ASSERT_TRUE(a.arity.has_value());
  EXPECT_EQ(*a.arity, 3);
  EXPECT_DOUBLE_EQ(eval(must_parse(a.text, 3), {1.0, 2.0, 3.0}), 5.0);
  auto b = read_function_source("exp(x1)");
  EXPECT_FALSE(b.arity.has_value());
  EXPECT_THROW(read_function_source("arity: two\nx1"), DomainError);
}
