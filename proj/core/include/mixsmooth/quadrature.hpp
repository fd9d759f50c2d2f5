#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mixsmooth/rect_geometry.hpp"

namespace mixsmooth {

inline constexpr int kMaxRuleOrder = 64;

/// Gauss-Legendre rule on [-1, 1]. Nodes ascend; weights are positive.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes are Legendre roots found by Newton iteration from Chebyshev guesses.
/// Rules are cached; the reference stays valid for the program lifetime.
const QuadratureRule& gauss_legendre(int order);

/// Composite tensor grid over the free axes of a face. `cells_per_axis` holds
/// one entry per free axis, or a single entry used for all of them.
struct GridSpec {
  int order = 12;
  std::vector<int> cells_per_axis{2};

  int cells(int local_axis) const;
  static GridSpec uniform(int order, int cells) { return GridSpec{order, {cells}}; }
};

struct IntegralResult {
  double value = 0.0;
  /// |value_L - value_{L-1}| for refined results; 0 for a single fixed grid.
  double error_estimate = 0.0;
  std::uint64_t evaluations = 0;
  /// Refinement level reached (-1 for a single fixed-grid evaluation).
  int level = -1;
  /// Cells per axis of the grid that produced `value`.
  int cells = 0;
  bool converged = true;
  /// Value at the previous level; equals `value` for fixed grids.
  double previous_value = 0.0;
};

/// Vector-valued counterpart: all components share the same nodes, so
/// several integrals over one face cost a single sweep of the integrand.
struct VectorIntegralResult {
  std::vector<double> values;
  std::vector<double> error_estimates;
  std::vector<double> previous_values;
  std::uint64_t evaluations = 0;
  int level = -1;
  int cells = 0;
  bool converged = true;
};

/// Receives a full-dimensional point (pinned coordinates already filled).
using Integrand = std::function<double(std::span<const double>)>;
using VectorIntegrand = std::function<void(std::span<const double>, std::span<double>)>;

/// Iterated sum, innermost over the last free axis, each level with Neumaier
/// compensation; the order is fixed, so results are reproducible. Failures
/// inside `f` are rethrown as IntegrandError carrying the node.
IntegralResult integrate_face(const Integrand& f, const SubRectangle& sr, const GridSpec& grid);
VectorIntegralResult integrate_face(const VectorIntegrand& f, std::size_t width,
                                    const SubRectangle& sr, const GridSpec& grid);

struct RefineSettings {
  int order = 12;
  int start_cells = 1;
  /// Guard on the total number of integrand calls across all levels.
  std::uint64_t max_evaluations = 200'000'000;
};

/// Level L compares start_cells * 2^L against start_cells * 2^(L+1) cells per
/// axis; stops at the first L with |delta| <= tol * max(1, |value|). When
/// max_level or the evaluation budget runs out the result is returned with
/// converged = false and both last values, never silently accepted.
IntegralResult refine_until(const Integrand& f, const SubRectangle& sr, double tol, int max_level,
                            const RefineSettings& settings = {});
VectorIntegralResult refine_until(const VectorIntegrand& f, std::size_t width,
                                  const SubRectangle& sr, double tol, int max_level,
                                  const RefineSettings& settings = {});

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace mixsmooth
