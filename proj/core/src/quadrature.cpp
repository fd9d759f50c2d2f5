#include "mixsmooth/quadrature.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "mixsmooth/errors.hpp"

namespace mixsmooth {

namespace {

QuadratureRule build_rule(int n) {
  QuadratureRule r;
  r.order = n;
  r.nodes.assign(static_cast<std::size_t>(n), 0.0);
  r.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Descending roots x_i ~ cos(pi (i + 3/4) / (n + 1/2)).
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    {
      // Derivative at the converged root for the weight formula.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    if (lo == hi) {
      r.nodes[lo] = 0.0;
      r.weights[lo] = w;
    } else {
      r.nodes[lo] = -x;
      r.nodes[hi] = x;
      r.weights[lo] = w;
      r.weights[hi] = w;
    }
  }
  // Push the rounding residual of the weight sum into the central weight(s)
  // so that the weights add up to 2 as closely as doubles allow.
  CompensatedSum total;
  for (double w : r.weights) total.add(w);
  const double residual = 2.0 - total.value();
  if (n % 2) {
    r.weights[static_cast<std::size_t>(n / 2)] += residual;
  } else {
    r.weights[static_cast<std::size_t>(n / 2 - 1)] += 0.5 * residual;
    r.weights[static_cast<std::size_t>(n / 2)] += 0.5 * residual;
  }
  return r;
}

struct Axis1D {
  std::vector<double> x;
  std::vector<double> w;
};

std::vector<Axis1D> axis_grids(const SubRectangle& sr, const GridSpec& grid) {
  const QuadratureRule& rule = gauss_legendre(grid.order);
  std::vector<Axis1D> axes;
  const auto idx = sr.active.indices();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const int cells = grid.cells(static_cast<int>(a));
    const double lo = sr.lo_of(idx[a]);
    const double h = (sr.hi_of(idx[a]) - lo) / cells;
    Axis1D ax;
    for (int c = 0; c < cells; ++c) {
      const double left = lo + h * c;
      for (int q = 0; q < rule.order; ++q) {
        ax.x.push_back(left + 0.5 * h * (rule.nodes[static_cast<std::size_t>(q)] + 1.0));
        ax.w.push_back(0.5 * h * rule.weights[static_cast<std::size_t>(q)]);
      }
    }
    axes.push_back(std::move(ax));
  }
  return axes;
}

// Visits the tensor grid in odometer order, first free axis outermost, and
// returns the iterated sum sum_i w_i (sum_j w_j (... f)). Each level keeps its
// own compensated accumulator; for f = 1 every level reduces to the rule's
// weight sum, so areas of dyadic boxes come out exact.
template <class Eval>
std::uint64_t sweep(const SubRectangle& sr, const GridSpec& grid, std::size_t width, Eval&& eval,
                    std::vector<double>& result) {
  if (static_cast<int>(sr.base.size()) != sr.parent.dim())
    throw DomainError("integrate_face: base point has wrong dimension");
  const auto axes = axis_grids(sr, grid);
  const auto idx = sr.active.indices();
  const std::size_t k = axes.size();
  std::vector<double> point(sr.base.begin(), sr.base.end());
  std::vector<std::size_t> pos(k, 0);
  for (std::size_t a = 0; a < k; ++a) point[static_cast<std::size_t>(idx[a] - 1)] = axes[a].x[0];
  // acc[a] sums over axis a with the outer positions fixed.
  std::vector<std::vector<CompensatedSum>> acc(k, std::vector<CompensatedSum>(width));
  std::vector<double> buf(width);
  std::uint64_t count = 0;
  while (true) {
    ++count;
    try {
      eval(std::span<const double>(point), std::span<double>(buf));
    } catch (const IntegrandError&) {
      throw;
    } catch (const std::exception& e) {
      throw IntegrandError(e.what(), point);
    }
    const double wk = axes[k - 1].w[pos[k - 1]];
    for (std::size_t i = 0; i < width; ++i) acc[k - 1][i].add(wk * buf[i]);

    std::size_t a = k;
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].x.size()) break;
      pos[a] = 0;
      if (a == 0) {
        result.resize(width);
        for (std::size_t i = 0; i < width; ++i) result[i] = acc[0][i].value();
        return count;
      }
      // Axis a finished a full pass: fold it into the next outer level.
      const double w = axes[a - 1].w[pos[a - 1]];
      for (std::size_t i = 0; i < width; ++i) {
        acc[a - 1][i].add(w * acc[a][i].value());
        acc[a][i] = CompensatedSum{};
      }
    }
    for (std::size_t b = a; b < k; ++b) point[static_cast<std::size_t>(idx[b] - 1)] = axes[b].x[pos[b]];
  }
}

void check_finite(double v, std::span<const double> point) {
  if (!std::isfinite(v))
    throw IntegrandError("integrand returned a non-finite value",
                         std::vector<double>(point.begin(), point.end()));
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1 || order > kMaxRuleOrder)
    throw DomainError("gauss_legendre: order must be in 1.." + std::to_string(kMaxRuleOrder));
  static std::array<std::unique_ptr<QuadratureRule>, kMaxRuleOrder + 1> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto& slot = cache[static_cast<std::size_t>(order)];
  if (!slot) slot = std::make_unique<QuadratureRule>(build_rule(order));
  return *slot;
}

int GridSpec::cells(int local_axis) const {
  if (cells_per_axis.empty()) throw DomainError("GridSpec: cells_per_axis is empty");
  const int c = cells_per_axis.size() == 1 ? cells_per_axis[0]
                                           : cells_per_axis.at(static_cast<std::size_t>(local_axis));
  if (c < 1) throw DomainError("GridSpec: cells per axis must be >= 1");
  return c;
}

IntegralResult integrate_face(const Integrand& f, const SubRectangle& sr, const GridSpec& grid) {
  std::vector<double> out;
  const auto n = sweep(sr, grid, 1, [&](std::span<const double> x, std::span<double> v) {
    v[0] = f(x);
    check_finite(v[0], x);
  }, out);
  IntegralResult r;
  r.value = out[0];
  r.previous_value = r.value;
  r.evaluations = n;
  r.cells = grid.cells(0);
  return r;
}

VectorIntegralResult integrate_face(const VectorIntegrand& f, std::size_t width,
                                    const SubRectangle& sr, const GridSpec& grid) {
  VectorIntegralResult r;
  const auto n = sweep(sr, grid, width, [&](std::span<const double> x, std::span<double> v) {
    f(x, v);
    for (double e : v) check_finite(e, x);
  }, r.values);
  r.previous_values = r.values;
  r.error_estimates.assign(width, 0.0);
  r.evaluations = n;
  r.cells = grid.cells(0);
  return r;
}

namespace {

std::uint64_t grid_points(int order, int cells, int k) {
  double total = 1.0;
  for (int i = 0; i < k; ++i) total *= static_cast<double>(order) * cells;
  return total > 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(total);
}

void check_refine_args(double tol, int max_level, const RefineSettings& s) {
  if (!(tol > 0.0)) throw DomainError("refine_until: tol must be > 0");
  if (max_level < 0) throw DomainError("refine_until: max_level must be >= 0");
  if (s.start_cells < 1) throw DomainError("refine_until: start_cells must be >= 1");
}

}  // namespace

VectorIntegralResult refine_until(const VectorIntegrand& f, std::size_t width,
                                  const SubRectangle& sr, double tol, int max_level,
                                  const RefineSettings& settings) {
  check_refine_args(tol, max_level, settings);
  const int k = sr.dim();
  int cells = settings.start_cells;
  VectorIntegralResult prev = integrate_face(f, width, sr, GridSpec::uniform(settings.order, cells));
  std::uint64_t evaluations = prev.evaluations;
  VectorIntegralResult cur = prev;
  for (int level = 0; level <= max_level; ++level) {
    const int next = cells * 2;
    if (evaluations + grid_points(settings.order, next, k) > settings.max_evaluations) {
      cur.level = level - 1;
      cur.converged = false;
      break;
    }
    cur = integrate_face(f, width, sr, GridSpec::uniform(settings.order, next));
    evaluations += cur.evaluations;
    cur.level = level;
    cur.previous_values = prev.values;
    bool ok = true;
    for (std::size_t i = 0; i < width; ++i) {
      const double d = std::abs(cur.values[i] - prev.values[i]);
      cur.error_estimates[i] = d;
      if (!(d <= tol * std::max(1.0, std::abs(cur.values[i])))) ok = false;
    }
    cur.converged = ok;
    cells = next;
    if (ok) break;
    prev = cur;
  }
  if (cur.level < 0) {
    // Budget too small for even one comparison.
    cur.error_estimates.assign(width, std::numeric_limits<double>::infinity());
  }
  cur.evaluations = evaluations;
  return cur;
}

IntegralResult refine_until(const Integrand& f, const SubRectangle& sr, double tol, int max_level,
                            const RefineSettings& settings) {
  const VectorIntegrand vf = [&f](std::span<const double> x, std::span<double> out) { out[0] = f(x); };
  const auto v = refine_until(vf, 1, sr, tol, max_level, settings);
  IntegralResult r;
  r.value = v.values[0];
  r.error_estimate = v.error_estimates[0];
  r.previous_value = v.previous_values[0];
  r.evaluations = v.evaluations;
  r.level = v.level;
  r.cells = v.cells;
  r.converged = v.converged;
  return r;
}

}  // namespace mixsmooth
