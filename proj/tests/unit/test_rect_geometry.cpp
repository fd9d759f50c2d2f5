#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mixsmooth/errors.hpp"
#include "mixsmooth/rect_geometry.hpp"

using namespace mixsmooth;

namespace {

std::vector<std::vector<int>> as_lists(const std::vector<IndexSubset>& subsets) {
  std::vector<std::vector<int>> out;
  for (const auto& s : subsets) out.emplace_back(s.indices().begin(), s.indices().end());
  return out;
}

}  // namespace

TEST(Rectangle, RejectsDegenerateAndMismatchedCorners) {
  EXPECT_THROW(Rectangle({0.0}, {0.0}), DomainError);
  EXPECT_THROW(Rectangle({1.0}, {0.0}), DomainError);
  EXPECT_THROW(Rectangle({0.0, 0.0}, {1.0}), DomainError);
  EXPECT_THROW(Rectangle({}, {}), DomainError);
}

TEST(Rectangle, BasicMeasures) {
  Rectangle r({0.0, -1.0}, {2.0, 3.0});
  EXPECT_EQ(r.dim(), 2);
  EXPECT_DOUBLE_EQ(r.volume(), 8.0);
  EXPECT_DOUBLE_EQ(r.edge(1), 4.0);
  EXPECT_DOUBLE_EQ(r.diameter(), std::sqrt(20.0));
  const double inside[] = {1.0, 0.0};
  const double outside[] = {2.5, 0.0};
  EXPECT_TRUE(r.contains(inside));
  EXPECT_FALSE(r.contains(outside));
  EXPECT_TRUE(r.contains(Rectangle({0.5, 0.0}, {1.0, 1.0})));
}

TEST(IndexSubset, CanonicalisesAndValidates) {
  IndexSubset a({3, 1}, 3);
  IndexSubset b({1, 3}, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.mask(), 0b101u);
  EXPECT_EQ(a.to_string(), "{1,3}");
  EXPECT_EQ(a.position(3), 1);
  EXPECT_EQ(a.position(2), -1);
  EXPECT_THROW(IndexSubset({}, 3), DomainError);
  EXPECT_THROW(IndexSubset({1, 1}, 3), DomainError);
  EXPECT_THROW(IndexSubset({4}, 3), DomainError);
  EXPECT_THROW(IndexSubset({0}, 3), DomainError);
  ASSERT_TRUE(a.complement().has_value());
  EXPECT_EQ(*a.complement(), IndexSubset({2}, 3));
  EXPECT_FALSE(IndexSubset::full(3).complement().has_value());
}

TEST(EnumerateSubsets, SingleAxis) {
  const auto s = enumerate_subsets(1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], IndexSubset({1}, 1));
}

TEST(EnumerateSubsets, ThreeAxesInCanonicalOrder) {
  const std::vector<std::vector<int>> expected = {{1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
  EXPECT_EQ(as_lists(enumerate_subsets(3)), expected);
}

TEST(EnumerateSubsets, FourAxesPairGroupHasSix) {
  const auto s = enumerate_subsets(4);
  EXPECT_EQ(std::count_if(s.begin(), s.end(), [](const IndexSubset& x) { return x.size() == 2; }), 6);
}

TEST(EnumerateSubsets, CountsPerCardinalityUpToTwelve) {
  for (int n = 1; n <= 12; ++n) {
    const auto s = enumerate_subsets(n);
    ASSERT_EQ(s.size(), (std::size_t{1} << n) - 1) << "n=" << n;
    std::vector<std::uint64_t> per(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& x : s) ++per[static_cast<std::size_t>(x.size())];
    // Independent count: Pascal's triangle built by addition.
    std::vector<std::uint64_t> row{1};
    for (int m = 1; m <= n; ++m) {
      std::vector<std::uint64_t> next(row.size() + 1, 1);
      for (std::size_t j = 1; j < row.size(); ++j) next[j] = row[j - 1] + row[j];
      row = next;
    }
    for (int k = 1; k <= n; ++k) EXPECT_EQ(per[static_cast<std::size_t>(k)], row[static_cast<std::size_t>(k)]);
    // Cardinality-major, lexicographic inside a group, no repeats.
    for (std::size_t i = 1; i < s.size(); ++i) {
      const auto a = s[i - 1].indices(), b = s[i].indices();
      if (a.size() == b.size())
        EXPECT_TRUE(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
      else
        EXPECT_LT(a.size(), b.size());
    }
  }
}

TEST(EnumerateSubsets, RejectsOutOfRange) {
  EXPECT_THROW(enumerate_subsets(0), DomainError);
  EXPECT_THROW(enumerate_subsets(kMaxDimension + 1), DomainError);
}

TEST(Binomial, PascalRecurrenceExactUpToThirty) {
  for (int m = 0; m <= 30; ++m)
    for (int j = 0; j <= m + 1; ++j) EXPECT_EQ(binomial(m, j) + binomial(m, j - 1), binomial(m + 1, j));
  EXPECT_EQ(binomial(5, -1), 0u);
  EXPECT_EQ(binomial(5, 6), 0u);
  EXPECT_EQ(binomial(62, 31), 465428353255261088ull);
}

TEST(SubRectangle, SegmentOnSecondAxis) {
  const Rectangle P({0.0, 0.0}, {1.0, 2.0});
  const auto sr = sub_rectangle(P, IndexSubset({2}, 2));
  EXPECT_EQ(sr.dim(), 1);
  EXPECT_DOUBLE_EQ(sr.base[0], 0.0);
  EXPECT_DOUBLE_EQ(sr.lo_of(2), 0.0);
  EXPECT_DOUBLE_EQ(sr.hi_of(2), 2.0);
  EXPECT_DOUBLE_EQ(sr.measure(), 2.0);
}

TEST(SubRectangle, FullSubsetIsTheParent) {
  const Rectangle P({0.0, 0.0}, {1.0, 2.0});
  const auto sr = sub_rectangle(P, IndexSubset({1, 2}, 2));
  EXPECT_EQ(sr.parent, P);
  EXPECT_DOUBLE_EQ(sr.measure(), P.volume());
}

TEST(SubRectangle, FacePinsMissingAxisAtBottom) {
  const Rectangle P = Rectangle::cube(3, 0.0, 1.0);
  const auto sr = sub_rectangle(P, IndexSubset({1, 3}, 3));
  EXPECT_DOUBLE_EQ(sr.base[1], 0.0);
  EXPECT_DOUBLE_EQ(sr.measure(), 1.0);
}

TEST(SubRectangle, IndependentOfIndexOrder) {
  const Rectangle P({-1.0, 0.0, 2.0}, {1.0, 3.0, 5.0});
  std::vector<int> idx{3, 1, 2};
  const auto ref = sub_rectangle(P, IndexSubset({1, 2, 3}, 3));
  std::sort(idx.begin(), idx.end());
  do {
    for (std::size_t k = 1; k <= idx.size(); ++k) {
      std::vector<int> part(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
      std::vector<int> sorted = part;
      std::sort(sorted.begin(), sorted.end());
      const auto a = sub_rectangle(P, IndexSubset(part, 3));
      const auto b = sub_rectangle(P, IndexSubset(sorted, 3));
      EXPECT_EQ(a.active, b.active);
      EXPECT_EQ(a.base, b.base);
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  EXPECT_EQ(ref.dim(), 3);
}

TEST(NormalizePair, ReflectsDecreasingAxis) {
  const double x[] = {0.0, 1.0}, xp[] = {1.0, 0.0};
  const auto np = normalize_pair(x, xp);
  ASSERT_FALSE(np.empty());
  EXPECT_FALSE(np.transform.flips[0]);
  EXPECT_TRUE(np.transform.flips[1]);
  EXPECT_EQ(np.transform.flip_count(), 1);
  EXPECT_EQ(*np.rect, Rectangle({0.0, -1.0}, {1.0, 0.0}));
  EXPECT_FALSE(np.dropped_axes.has_value());
}

TEST(NormalizePair, DropsCollapsedAxis) {
  const double x[] = {0.0, 0.0}, xp[] = {1.0, 0.0};
  const auto np = normalize_pair(x, xp);
  ASSERT_FALSE(np.empty());
  EXPECT_EQ(*np.rect, Rectangle({0.0}, {1.0}));
  EXPECT_EQ(np.kept_axes, std::vector<int>{1});
  ASSERT_TRUE(np.dropped_axes.has_value());
  EXPECT_EQ(*np.dropped_axes, IndexSubset({2}, 2));
}

TEST(NormalizePair, EqualPointsGiveEmptySignal) {
  const double x[] = {3.0, 3.0};
  EXPECT_TRUE(normalize_pair(x, x).empty());
}

TEST(NormalizePair, RoundTripRecoversPoints) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    std::vector<double> x(n), xp(n);
    for (int i = 0; i < n; ++i) {
      x[i] = U(rng);
      xp[i] = (trial + i) % 4 == 0 ? x[i] : U(rng);
    }
    const auto np = normalize_pair(x, xp);
    if (np.empty()) continue;
    const auto rx = np.to_reduced(x), rxp = np.to_reduced(xp);
    // Reduced points are the bottom and top corners of the rectangle.
    for (std::size_t r = 0; r < rx.size(); ++r) {
      EXPECT_DOUBLE_EQ(rx[r], np.rect->lo(static_cast<int>(r)));
      EXPECT_DOUBLE_EQ(rxp[r], np.rect->hi(static_cast<int>(r)));
    }
    EXPECT_EQ(np.from_reduced(rx, x), x);
    EXPECT_EQ(np.from_reduced(rxp, xp), xp);
  }
}

TEST(AxisTransform, SelfInverse) {
  AxisTransform t{{true, false, true}};
  const double p[] = {1.5, -2.0, 0.25};
  const auto q = t.apply(p);
  EXPECT_EQ(q, (std::vector<double>{-1.5, -2.0, -0.25}));
  EXPECT_EQ(t.inverse(q), std::vector<double>(std::begin(p), std::end(p)));
}
