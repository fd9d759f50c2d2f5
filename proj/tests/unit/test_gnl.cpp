#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mixsmooth/gallery.hpp"
#include "mixsmooth/gnl.hpp"
#include "mixsmooth/parallel.hpp"
#include "mixsmooth/sampling.hpp"

using namespace mixsmooth;

namespace {

const SubsetContribution& record(const GnlBreakdown& b, std::vector<int> idx, int n) {
  const IndexSubset s(std::move(idx), n);
  for (const auto& r : b.records)
    if (r.subset == s) return r;
  throw std::runtime_error("missing record " + s.to_string());
}

class ThreadGuard {
 public:
  explicit ThreadGuard(int n) { set_thread_count(n); }
  ~ThreadGuard() { set_thread_count(0); }
};

}  // namespace

TEST(GnlRhs, ProductOnUnitSquare) {
  const auto b = gnl_rhs(parse_or_throw("x1*x2", 2), Rectangle::unit(2));
  ASSERT_EQ(b.records.size(), 3u);
  EXPECT_EQ(record(b, {1}, 2).value, 0.0);
  EXPECT_EQ(record(b, {2}, 2).value, 0.0);
  EXPECT_NEAR(record(b, {1, 2}, 2).value, 1.0, 1e-15);
  EXPECT_EQ(b.lhs, 1.0);
  EXPECT_LE(b.residual, 1e-14);
}

TEST(GnlRhs, OneDimensionIsClassicalNewtonLeibniz) {
  const auto b = gnl_rhs(parse_or_throw("x1^2", 1), Rectangle::unit(1));
  ASSERT_EQ(b.records.size(), 1u);
  EXPECT_NEAR(b.records[0].value, 1.0, 1e-15);
  EXPECT_EQ(b.lhs, 1.0);
}

TEST(GnlRhs, SinExpLinearOnBoxAgainstClosedForms) {
  const Rectangle P({0.0, 0.0, 0.0}, {1.0, 1.0, 2.0});
  const auto b = gnl_rhs_refined(parse_or_throw("sin(x1)*exp(x2)*x3", 3), P);
  const double s1 = std::sin(1.0), e = std::numbers::e;
  // Every face pinned at x3 = 0 vanishes; the ones with x3 free carry
  // the antiderivatives sin(1), e - 1 and 2.
  EXPECT_NEAR(b.lhs, 2 * s1 * e, 1e-15);
  EXPECT_NEAR(b.lhs, 4.574710, 1e-6);
  EXPECT_NEAR(record(b, {1}, 3).value, 0.0, 1e-15);
  EXPECT_NEAR(record(b, {2}, 3).value, 0.0, 1e-15);
  EXPECT_NEAR(record(b, {3}, 3).value, 0.0, 1e-15);
  EXPECT_NEAR(record(b, {1, 2}, 3).value, 0.0, 1e-15);
  EXPECT_NEAR(record(b, {1, 3}, 3).value, 2 * s1, 1e-12);
  EXPECT_NEAR(record(b, {2, 3}, 3).value, 0.0, 1e-15);
  EXPECT_NEAR(record(b, {1, 2, 3}, 3).value, 2 * s1 * (e - 1), 1e-12);
  EXPECT_NEAR(b.rhs, 2 * s1 * e, 1e-9);
  EXPECT_TRUE(b.converged);
}

TEST(GnlRhs, RecordsFollowCanonicalOrder) {
  const auto b = gnl_rhs(gallery("poly", 4).expr, Rectangle::unit(4));
  const auto order = enumerate_subsets(4);
  ASSERT_EQ(b.records.size(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(b.records[i].subset, order[i]);
  double s = 0.0;
  for (const auto& r : b.records) s += r.value;
  EXPECT_EQ(b.rhs, s);
}

TEST(GnlVerify, PolynomialRandomBoxes) {
  const auto g = gallery("poly", 3);
  const auto boxes = random_boxes(3, 10, 11);
  const auto rep = gnl_verify(g.expr, boxes, 1e-8);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
  ASSERT_EQ(rep.rectangles.size(), 10u);
  for (const auto& r : rep.rectangles) {
    ASSERT_TRUE(r.breakdown.has_value());
    EXPECT_LE(r.breakdown->residual, r.threshold);
  }
}

TEST(GnlVerify, ConstantGivesExactZeros) {
  const auto boxes = random_boxes(3, 5, 2);
  const auto rep = gnl_verify(parse_or_throw("3.5", 3), boxes, 1e-12);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
  for (const auto& r : rep.rectangles) {
    EXPECT_EQ(r.breakdown->lhs, 0.0);
    EXPECT_EQ(r.breakdown->residual, 0.0);
    for (const auto& rec : r.breakdown->records) EXPECT_EQ(rec.value, 0.0);
  }
}

TEST(GnlVerify, PoleIsNeverPass) {
  const std::vector<Rectangle> boxes{Rectangle::cube(2, -1.0, 1.0)};
  const auto rep = gnl_verify(parse_or_throw("1/(x1 - 0.3)", 2), boxes, 1e-8);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
  EXPECT_FALSE(rep.rectangles[0].note.empty());
}

TEST(GnlVerify, SingularEndpointIsInconclusive) {
  const std::vector<Rectangle> boxes{Rectangle::unit(1)};
  const auto rep = gnl_verify(parse_or_throw("log(x1)", 1), boxes, 1e-8);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
}

TEST(GnlVerify, EmptyListPasses) {
  const auto rep = gnl_verify(parse_or_throw("x1", 1), {}, 1e-8);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
  EXPECT_EQ(rep.worst, -1);
}

TEST(GnlForPair, EqualPointsGiveZeroBreakdown) {
  const double x[] = {0.5, -0.25};
  const auto b = gnl_for_pair(parse_or_throw("exp(x1)*x2", 2), x, x);
  EXPECT_EQ(b.lhs, 0.0);
  EXPECT_EQ(b.rhs, 0.0);
  EXPECT_EQ(b.residual, 0.0);
  EXPECT_TRUE(b.records.empty());
}

TEST(GnlForPair, LinearWithReflectedAxis) {
  const double x[] = {1.0, 0.0}, xp[] = {0.0, 1.0};
  const auto b = gnl_for_pair(parse_or_throw("x1+x2", 2), x, xp);
  EXPECT_EQ(b.lhs, 0.0);
  EXPECT_NEAR(record(b, {1}, 2).value, -1.0, 1e-15);
  EXPECT_NEAR(record(b, {2}, 2).value, 1.0, 1e-15);
  EXPECT_NEAR(record(b, {1, 2}, 2).value, 0.0, 1e-15);
  EXPECT_LE(b.residual, 1e-15);
}

TEST(GnlForPair, ExpSinAgainstClosedForm) {
  const double x[] = {1.0, 2.0}, xp[] = {0.0, 1.0};
  const auto b = gnl_for_pair(parse_or_throw("exp(x1)*sin(x2)", 2), x, xp);
  const double lhs = std::sin(1.0) - std::numbers::e * std::sin(2.0);
  EXPECT_NEAR(b.lhs, lhs, 1e-15);
  EXPECT_NEAR(b.rhs, lhs, 1e-9);
}

TEST(GnlForPair, CollapsedAxisReducesDimension) {
  const double x[] = {0.2, 0.7, -0.1}, xp[] = {0.9, 0.7, 0.4};
  const auto b = gnl_for_pair(gallery("sinexp", 3).expr, x, xp);
  EXPECT_EQ(b.dim, 2);
  EXPECT_EQ(b.records.size(), 3u);
  for (const auto& r : b.records) EXPECT_FALSE(r.subset.contains(2));
  EXPECT_LE(b.residual, 1e-12);
}

TEST(GnlProperty, RandomPairsOverGallery) {
  std::mt19937_64 rng(2024);
  for (const auto& fam : gallery_families())
    for (int n = 1; n <= 3; ++n) {
      const auto g = gallery(fam, n);
      for (int t = 0; t < 4; ++t) {
        std::vector<double> x(n), xp(n);
        for (int i = 0; i < n; ++i) {
          x[i] = -1.0 + 2.0 * unit_uniform(rng);
          xp[i] = -1.0 + 2.0 * unit_uniform(rng);
        }
        const auto b = gnl_for_pair(g.expr, x, xp, GridSpec::uniform(16, 4));
        EXPECT_LE(b.residual, 1e-9 * std::max(1.0, std::abs(b.lhs))) << g.id;
      }
    }
}

TEST(GnlProperty, TranslationInvariance) {
  // Shifting the box and the function together leaves every record unchanged.
  const Expr u = parse_or_throw("exp(x1 - 0.5)*sin(x2 + 0.25)", 2);
  const Expr shifted = parse_or_throw("exp((x1 + 1) - 0.5)*sin((x2 - 2) + 0.25)", 2);
  const Rectangle P({0.5, -0.25}, {1.5, 0.75});
  const std::vector<double> shift{-1.0, 2.0};
  const auto a = gnl_rhs(u, P);
  const auto b = gnl_rhs(shifted, P.translated(shift));
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    EXPECT_NEAR(a.records[i].value, b.records[i].value, 1e-14);
  EXPECT_NEAR(a.lhs, b.lhs, 1e-15);
}

TEST(GnlProperty, DimensionReductionForIndependentAxis) {
  // A function of x1 only: every record touching x2 vanishes and the {1}
  // record is the 1-D Newton-Leibniz integral.
  const Expr u2 = parse_or_throw("sin(3*x1) + 0*x2", 2);
  const Expr u1 = parse_or_throw("sin(3*x1)", 1);
  const auto b2 = gnl_rhs(u2, Rectangle({0.0, 0.0}, {1.0, 2.0}));
  const auto b1 = gnl_rhs(u1, Rectangle({0.0}, {1.0}));
  EXPECT_EQ(record(b2, {1}, 2).value, b1.records[0].value);
  EXPECT_EQ(record(b2, {2}, 2).value, 0.0);
  EXPECT_EQ(record(b2, {1, 2}, 2).value, 0.0);
}

TEST(GnlProperty, ThreadCountDoesNotChangeBits) {
  const auto g = gallery("loglog", 3);
  const Rectangle P({0.1, 0.2, 0.3}, {0.9, 1.0, 0.8});
  GnlBreakdown serial, threaded;
  {
    ThreadGuard t(1);
    serial = gnl_rhs_refined(g.expr, P);
  }
  {
    ThreadGuard t(4);
    threaded = gnl_rhs_refined(g.expr, P);
  }
  ASSERT_EQ(serial.records.size(), threaded.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i)
    EXPECT_EQ(serial.records[i].value, threaded.records[i].value);
  EXPECT_EQ(serial.rhs, threaded.rhs);
}

TEST(RandomBoxes, ReproducibleAndInsideBounds) {
  const Rectangle bounds({-2.0, 0.0}, {2.0, 1.0});
  const auto a = random_boxes(2, 20, 5, bounds);
  const auto b = random_boxes(2, 20, 5, bounds);
  EXPECT_EQ(a, b);
  for (const auto& r : a) {
    EXPECT_TRUE(bounds.contains(r));
    for (int i = 0; i < 2; ++i) {
      EXPECT_GE(r.edge(i), bounds.edge(i) / 8 * (1 - 1e-12));
      EXPECT_LE(r.edge(i), bounds.edge(i) / 2 * (1 + 1e-12));
    }
  }
  EXPECT_NE(random_boxes(2, 20, 6, bounds), a);
}
