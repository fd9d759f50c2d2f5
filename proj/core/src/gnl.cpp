#include "mixsmooth/gnl.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mixsmooth/mixed_jet.hpp"
#include "mixsmooth/parallel.hpp"
#include "mixsmooth/sampling.hpp"

namespace mixsmooth {

namespace {

void check_arity(const Expr& u, const Rectangle& P) {
  const int a = free_arity(u);
  if (a > P.dim())
    throw DomainError("expression uses x" + std::to_string(a) + " but the rectangle has dimension " +
                      std::to_string(P.dim()));
}

template <class FaceFn>
GnlBreakdown assemble(const Expr& u, const Rectangle& P, int order, bool parallel, FaceFn&& face) {
  check_arity(u, P);
  const auto subsets = enumerate_subsets(P.dim());
  std::vector<std::optional<SubsetContribution>> slots(subsets.size());
  auto run = [&](std::size_t i) { slots[i] = face(subsets[i]); };
  if (parallel) {
    parallel_for(subsets.size(), run);
  } else {
    for (std::size_t i = 0; i < subsets.size(); ++i) run(i);
  }
  GnlBreakdown b;
  b.dim = P.dim();
  b.order = order;
  b.lhs = eval_real(u, P.hi()) - eval_real(u, P.lo());
  double rhs = 0.0;
  for (auto& s : slots) {
    rhs += s->value;
    b.converged = b.converged && s->converged;
    b.evaluations += s->evaluations;
    b.records.push_back(std::move(*s));
  }
  b.rhs = rhs;
  b.residual = std::abs(b.lhs - b.rhs);
  return b;
}

Integrand face_integrand(JetEvaluator& ev) {
  return [&ev](std::span<const double> x) { return ev.evaluate(x).back(); };
}

}  // namespace

double GnlBreakdown::max_error_estimate() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.error_estimate);
  return m;
}

GnlBreakdown gnl_rhs(const Expr& u, const Rectangle& P, const GridSpec& grid) {
  return assemble(u, P, grid.order, false, [&](const IndexSubset& s) {
    JetEvaluator ev(u, s);
    const auto r = integrate_face(face_integrand(ev), sub_rectangle(P, s), grid);
    return SubsetContribution{s, r.value, 0.0, r.evaluations, r.cells, true};
  });
}

GnlBreakdown gnl_rhs_refined(const Expr& u, const Rectangle& P, const GnlSettings& settings) {
  return assemble(u, P, settings.refine.order, settings.parallel, [&](const IndexSubset& s) {
    JetEvaluator ev(u, s);
    const auto r = refine_until(face_integrand(ev), sub_rectangle(P, s), settings.refine_tol,
                                settings.max_level, settings.refine);
    return SubsetContribution{s, r.value, r.error_estimate, r.evaluations, r.cells, r.converged};
  });
}

GnlReport gnl_verify(const Expr& u, std::span<const Rectangle> rectangles, double tol,
                     const GnlSettings& settings) {
  if (!(tol > 0.0)) throw DomainError("gnl_verify: tol must be > 0");
  GnlReport report;
  report.tol = tol;
  double worst_ratio = -1.0;
  for (std::size_t i = 0; i < rectangles.size(); ++i) {
    GnlRectangleResult res{rectangles[i], std::nullopt, 0.0, Verdict::Inconclusive, {}};
    try {
      res.breakdown = gnl_rhs_refined(u, rectangles[i], settings);
      const auto& b = *res.breakdown;
      res.threshold = tol * std::max(1.0, std::abs(b.lhs));
      if (!b.converged) {
        res.verdict = Verdict::Inconclusive;
        res.note = "face quadrature did not converge";
      } else {
        res.verdict = b.residual <= res.threshold ? Verdict::Pass : Verdict::Fail;
      }
    } catch (const IntegrandError& e) {
      res.note = std::string("integrand failed: ") + e.what();
    } catch (const EvalError& e) {
      res.note = std::string("evaluation failed: ") + e.what();
    }
    double ratio = 0.0;
    if (res.verdict != Verdict::Pass) ratio = res.verdict == Verdict::Fail ? 2e300 : 1e300;
    else if (res.threshold > 0.0) ratio = res.breakdown->residual / res.threshold;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      report.worst = static_cast<int>(i);
    }
    report.verdict = combine(report.verdict, res.verdict);
    report.rectangles.push_back(std::move(res));
  }
  return report;
}

GnlBreakdown gnl_for_pair(const Expr& u, std::span<const double> x, std::span<const double> x_prime,
                          const GridSpec& grid) {
  const auto np = normalize_pair(x, x_prime);
  if (free_arity(u) > np.ambient_dim)
    throw DomainError("expression uses more variables than the points have coordinates");
  GnlBreakdown out;
  out.order = grid.order;
  if (np.empty()) return out;

  // u(x) = v(y) with x_i = +-y_r on kept axes and x_i frozen on dropped ones.
  std::vector<std::optional<Expr>> repl(static_cast<std::size_t>(np.ambient_dim));
  for (int i = 1; i <= np.ambient_dim; ++i) repl[static_cast<std::size_t>(i - 1)] = Expr::constant(x[static_cast<std::size_t>(i - 1)]);
  for (std::size_t r = 0; r < np.kept_axes.size(); ++r) {
    const int axis = np.kept_axes[r];
    Expr y = Expr::variable(static_cast<int>(r) + 1);
    repl[static_cast<std::size_t>(axis - 1)] = np.transform.flips[static_cast<std::size_t>(axis - 1)] ? -y : y;
  }
  const Expr v = substitute(u, repl);
  GnlBreakdown reduced = gnl_rhs(v, *np.rect, grid);
  out = reduced;
  out.records.clear();
  for (auto& rec : reduced.records) {
    std::vector<int> axes;
    for (int r : rec.subset.indices()) axes.push_back(np.kept_axes[static_cast<std::size_t>(r - 1)]);
    rec.subset = IndexSubset(std::move(axes), np.ambient_dim);
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<Rectangle> random_boxes(int n, int count, std::uint64_t seed,
                                    std::optional<Rectangle> bounds) {
  if (n < 1 || n > kMaxDimension) throw DomainError("random_boxes: dimension out of range");
  if (count < 0) throw DomainError("random_boxes: count must be >= 0");
  const Rectangle bb = bounds ? *bounds : Rectangle::cube(n, -1.0, 1.0);
  if (bb.dim() != n) throw DomainError("random_boxes: bounding box dimension mismatch");
  std::mt19937_64 g(seed);
  std::vector<Rectangle> boxes;
  for (int b = 0; b < count; ++b) {
    std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const double edge = bb.edge(a) * (0.125 + 0.375 * unit_uniform(g));
      const double start = bb.lo(a) + (bb.edge(a) - edge) * unit_uniform(g);
      lo[static_cast<std::size_t>(a)] = start;
      hi[static_cast<std::size_t>(a)] = start + edge;
    }
    boxes.emplace_back(std::move(lo), std::move(hi));
  }
  return boxes;
}

}  // namespace mixsmooth
