#include "mixsmooth/rect_geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mixsmooth {

Rectangle::Rectangle(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty()) throw DomainError("rectangle: dimension must be at least 1");
  if (lo_.size() != hi_.size()) throw DomainError("rectangle: corner dimensions differ");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
      throw DomainError("rectangle: corners must be finite");
    if (!(lo_[i] < hi_[i]))
      throw DomainError("rectangle: lo must be strictly below hi on axis " + std::to_string(i + 1));
  }
}

Rectangle Rectangle::unit(int n) { return cube(n, 0.0, 1.0); }

Rectangle Rectangle::cube(int n, double lo, double hi) {
  if (n < 1) throw DomainError("rectangle: dimension must be at least 1");
  return Rectangle(std::vector<double>(static_cast<std::size_t>(n), lo),
                   std::vector<double>(static_cast<std::size_t>(n), hi));
}

double Rectangle::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
  return v;
}

double Rectangle::diameter() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
  return std::sqrt(s);
}

Rectangle Rectangle::translated(std::span<const double> shift) const {
  if (shift.size() != lo_.size()) throw DomainError("rectangle: shift dimension mismatch");
  auto lo = lo_;
  auto hi = hi_;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] += shift[i];
    hi[i] += shift[i];
  }
  return Rectangle(std::move(lo), std::move(hi));
}

bool Rectangle::contains(std::span<const double> point) const noexcept {
  if (point.size() != lo_.size()) return false;
  for (std::size_t i = 0; i < lo_.size(); ++i)
    if (point[i] < lo_[i] || point[i] > hi_[i]) return false;
  return true;
}

bool Rectangle::contains(const Rectangle& other) const noexcept {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < lo_.size(); ++i)
    if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
  return true;
}

IndexSubset::IndexSubset(std::vector<int> indices, int ambient_dim)
    : indices_(std::move(indices)), ambient_dim_(ambient_dim) {
  if (ambient_dim_ < 1 || ambient_dim_ > kMaxDimension)
    throw DomainError("index subset: ambient dimension out of range 1.." +
                      std::to_string(kMaxDimension));
  if (indices_.empty()) throw DomainError("index subset: must be nonempty");
  std::sort(indices_.begin(), indices_.end());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const int a = indices_[i];
    if (a < 1 || a > ambient_dim_)
      throw DomainError("index subset: axis " + std::to_string(a) + " outside 1.." +
                        std::to_string(ambient_dim_));
    if (i > 0 && indices_[i - 1] == a)
      throw DomainError("index subset: repeated axis " + std::to_string(a));
    mask_ |= std::uint32_t{1} << (a - 1);
  }
}

IndexSubset IndexSubset::from_mask(std::uint32_t mask, int ambient_dim) {
  std::vector<int> idx;
  for (int i = 0; i < 32; ++i)
    if (mask & (std::uint32_t{1} << i)) idx.push_back(i + 1);
  return IndexSubset(std::move(idx), ambient_dim);
}

IndexSubset IndexSubset::full(int ambient_dim) {
  std::vector<int> idx(static_cast<std::size_t>(std::max(ambient_dim, 0)));
  std::iota(idx.begin(), idx.end(), 1);
  return IndexSubset(std::move(idx), ambient_dim);
}

bool IndexSubset::contains(int axis) const noexcept {
  return axis >= 1 && axis <= ambient_dim_ && (mask_ & (std::uint32_t{1} << (axis - 1)));
}

int IndexSubset::position(int axis) const noexcept {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), axis);
  if (it == indices_.end() || *it != axis) return -1;
  return static_cast<int>(it - indices_.begin());
}

std::optional<IndexSubset> IndexSubset::complement() const {
  const std::uint32_t all =
      ambient_dim_ == 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << ambient_dim_) - 1);
  const std::uint32_t rest = all & ~mask_;
  if (rest == 0) return std::nullopt;
  return from_mask(rest, ambient_dim_);
}

std::string IndexSubset::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < indices_.size(); ++i) os << (i ? "," : "") << indices_[i];
  os << '}';
  return os.str();
}

std::vector<IndexSubset> enumerate_subsets(int n) {
  if (n < 1 || n > kMaxDimension)
    throw DomainError("enumerate_subsets: n must lie in 1.." + std::to_string(kMaxDimension));
  std::vector<IndexSubset> out;
  out.reserve((std::size_t{1} << n) - 1);
  std::vector<int> combo;
  for (int k = 1; k <= n; ++k) {
    // Lexicographic k-combinations of 1..n.
    combo.resize(static_cast<std::size_t>(k));
    std::iota(combo.begin(), combo.end(), 1);
    while (true) {
      out.emplace_back(combo, n);
      int i = k - 1;
      while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - k + i + 1) --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

std::uint64_t binomial(int m, int j) {
  if (m < 0 || j < 0 || j > m) return 0;
  j = std::min(j, m - j);
  std::uint64_t r = 1;
  // r * (m - j + i) is divisible by i at every step.
  for (int i = 1; i <= j; ++i) r = r * static_cast<std::uint64_t>(m - j + i) / static_cast<std::uint64_t>(i);
  return r;
}

double SubRectangle::measure() const {
  double v = 1.0;
  for (int a : active.indices()) v *= parent.edge(a - 1);
  return v;
}

SubRectangle sub_rectangle(const Rectangle& parent, const IndexSubset& active) {
  if (active.ambient_dim() != parent.dim())
    throw DomainError("sub_rectangle: subset ambient dimension " +
                      std::to_string(active.ambient_dim()) + " != rectangle dimension " +
                      std::to_string(parent.dim()));
  std::vector<double> base(parent.lo().begin(), parent.lo().end());
  return SubRectangle{parent, active, std::move(base)};
}

std::vector<double> AxisTransform::apply(std::span<const double> point) const {
  if (point.size() != flips.size()) throw DomainError("axis transform: dimension mismatch");
  std::vector<double> out(point.begin(), point.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (flips[i]) out[i] = -out[i];
  return out;
}

int AxisTransform::flip_count() const noexcept {
  return static_cast<int>(std::count(flips.begin(), flips.end(), true));
}

std::vector<double> NormalizedPair::to_reduced(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != ambient_dim)
    throw DomainError("normalized pair: dimension mismatch");
  const auto reflected = transform.apply(point);
  std::vector<double> out;
  out.reserve(kept_axes.size());
  for (int a : kept_axes) out.push_back(reflected[static_cast<std::size_t>(a - 1)]);
  return out;
}

std::vector<double> NormalizedPair::from_reduced(std::span<const double> reduced,
                                                 std::span<const double> fill) const {
  if (reduced.size() != kept_axes.size() || static_cast<int>(fill.size()) != ambient_dim)
    throw DomainError("normalized pair: dimension mismatch");
  std::vector<double> out(fill.begin(), fill.end());
  for (std::size_t j = 0; j < kept_axes.size(); ++j) {
    const auto i = static_cast<std::size_t>(kept_axes[j] - 1);
    out[i] = transform.flips[i] ? -reduced[j] : reduced[j];
  }
  return out;
}

NormalizedPair normalize_pair(std::span<const double> x, std::span<const double> x_prime,
                              double collapse_tol) {
  if (x.size() != x_prime.size())
    throw DomainError("normalize_pair: point dimensions differ");
  if (x.empty()) throw DomainError("normalize_pair: points must have dimension >= 1");
  if (collapse_tol < 0.0) throw DomainError("normalize_pair: collapse tolerance must be >= 0");

  NormalizedPair out;
  out.ambient_dim = static_cast<int>(x.size());
  out.transform.flips.assign(x.size(), false);
  std::vector<double> lo, hi;
  std::vector<int> dropped;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int axis = static_cast<int>(i) + 1;
    if (std::abs(x[i] - x_prime[i]) <= collapse_tol) {
      dropped.push_back(axis);
      continue;
    }
    const bool flip = x[i] > x_prime[i];
    out.transform.flips[i] = flip;
    out.kept_axes.push_back(axis);
    lo.push_back(flip ? -x[i] : x[i]);
    hi.push_back(flip ? -x_prime[i] : x_prime[i]);
  }
  if (!dropped.empty()) out.dropped_axes.emplace(std::move(dropped), out.ambient_dim);
  if (!lo.empty()) out.rect.emplace(std::move(lo), std::move(hi));
  return out;
}

}  // namespace mixsmooth
