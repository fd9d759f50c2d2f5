#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsmooth/errors.hpp"

namespace mixsmooth {

/// Largest ambient dimension accepted by the subset machinery. Enumeration is
/// 2^n by nature; the cap keeps memory and run time predictable.
inline constexpr int kMaxDimension = 20;

/// Axis-aligned box {lo_i <= eta_i <= hi_i} with lo_i < hi_i on every axis.
/// Axes are addressed 0-based here; IndexSubset uses the 1-based x1..xN names.
class Rectangle {
 public:
  Rectangle(std::vector<double> lo, std::vector<double> hi);

  static Rectangle unit(int n);
  static Rectangle cube(int n, double lo, double hi);

  int dim() const noexcept { return static_cast<int>(lo_.size()); }
  std::span<const double> lo() const noexcept { return lo_; }
  std::span<const double> hi() const noexcept { return hi_; }
  double lo(int axis) const { return lo_.at(static_cast<std::size_t>(axis)); }
  double hi(int axis) const { return hi_.at(static_cast<std::size_t>(axis)); }
  double edge(int axis) const { return hi(axis) - lo(axis); }
  double volume() const noexcept;
  double diameter() const noexcept;

  Rectangle translated(std::span<const double> shift) const;
  bool contains(std::span<const double> point) const noexcept;
  bool contains(const Rectangle& other) const noexcept;

  friend bool operator==(const Rectangle&, const Rectangle&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Nonempty set of axes {i1 < ... < ik} of R^n, stored canonically (sorted).
class IndexSubset {
 public:
  /// Accepts indices in any order; throws DomainError on empty input,
  /// duplicates, or indices outside 1..ambient_dim.
  IndexSubset(std::vector<int> indices, int ambient_dim);

  static IndexSubset from_mask(std::uint32_t mask, int ambient_dim);
  static IndexSubset full(int ambient_dim);

  std::span<const int> indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  int ambient_dim() const noexcept { return ambient_dim_; }
  /// Bit (i-1) is set for every member axis i.
  std::uint32_t mask() const noexcept { return mask_; }
  bool contains(int axis) const noexcept;
  /// Position of `axis` inside the sorted index list, or -1.
  int position(int axis) const noexcept;

  /// Axes not in the subset; nullopt when the subset is everything.
  std::optional<IndexSubset> complement() const;

  std::string to_string() const;

  friend bool operator==(const IndexSubset& a, const IndexSubset& b) noexcept {
    return a.ambient_dim_ == b.ambient_dim_ && a.mask_ == b.mask_;
  }

 private:
  std::vector<int> indices_;
  int ambient_dim_ = 0;
  std::uint32_t mask_ = 0;
};

/// All 2^n - 1 nonempty subsets of {1..n}: grouped by cardinality, each group
/// in lexicographic order. The order fixes the summation order of every
/// Newton-Leibniz sum in the library.
std::vector<IndexSubset> enumerate_subsets(int n);

/// Binomial coefficient C(m, j); zero outside 0 <= j <= m. Exact up to m = 62.
std::uint64_t binomial(int m, int j);

/// The k-dimensional face of `parent` whose free axes are `active` and whose
/// remaining coordinates are pinned at the bottom corner.
struct SubRectangle {
  Rectangle parent;
  IndexSubset active;
  std::vector<double> base;

  int dim() const noexcept { return active.size(); }
  double measure() const;
  double lo_of(int axis) const { return parent.lo(axis - 1); }
  double hi_of(int axis) const { return parent.hi(axis - 1); }
};

SubRectangle sub_rectangle(const Rectangle& parent, const IndexSubset& active);

/// Composition of coordinate reflections y_i -> -y_i. Self-inverse.
struct AxisTransform {
  std::vector<bool> flips;

  std::vector<double> apply(std::span<const double> point) const;
  std::vector<double> inverse(std::span<const double> point) const { return apply(point); }
  int flip_count() const noexcept;
};

/// Result of bringing an arbitrary point pair into bottom/top-corner form.
///
/// Axes with x_i == x'_i (within `collapse_tol`) are dropped: the faces that
/// would contain them have zero measure, so their integrals vanish exactly.
/// The remaining axes, reflected where x_i > x'_i, form `rect` in the reduced
/// coordinates listed by `kept_axes` (1-based original axis numbers).
struct NormalizedPair {
  std::optional<Rectangle> rect;
  AxisTransform transform;
  std::vector<int> kept_axes;
  std::optional<IndexSubset> dropped_axes;
  int ambient_dim = 0;

  bool empty() const noexcept { return !rect.has_value(); }

  /// Original point -> reduced, reflected coordinates (kept axes only).
  std::vector<double> to_reduced(std::span<const double> point) const;
  /// Reduced coordinates back to the original space; dropped axes take the
  /// values from `fill`.
  std::vector<double> from_reduced(std::span<const double> reduced,
                                   std::span<const double> fill) const;
};

NormalizedPair normalize_pair(std::span<const double> x, std::span<const double> x_prime,
                              double collapse_tol = 0.0);

}  // namespace mixsmooth
