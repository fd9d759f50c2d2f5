#include "mixsmooth/mollifier.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <cmath>

#include "mixsmooth/mixed_jet.hpp"
#include "mixsmooth/norms.hpp"

namespace mixsmooth {

namespace {

double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

struct KernelNodes {
  std::vector<std::vector<double>> y;
  std::vector<double> w;  // quadrature weight (kernel factor applied separately)
};

KernelNodes kernel_nodes(int n, const MollifierQuadrature& q) {
  const auto& rule = gauss_legendre(q.order);
  const double h = 2.0 / q.cells;
  std::vector<double> x1, w1;
  for (int c = 0; c < q.cells; ++c)
    for (int k = 0; k < q.order; ++k) {
      x1.push_back(-1.0 + h * c + 0.5 * h * (rule.nodes[static_cast<std::size_t>(k)] + 1.0));
      w1.push_back(0.5 * h * rule.weights[static_cast<std::size_t>(k)]);
    }
  KernelNodes kn;
  const std::size_t m = x1.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> y(static_cast<std::size_t>(n));
    double w = 1.0, r2 = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      y[a] = x1[idx[a]];
      w *= w1[idx[a]];
      r2 += y[a] * y[a];
    }
    if (r2 < 1.0) {
      kn.y.push_back(std::move(y));
      kn.w.push_back(w);
    }
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == m) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return kn;
}

std::vector<std::vector<double>> grid_points(const Rectangle& box, int m) {
  if (m < 2) throw DomainError("mollify: need at least 2 points per axis");
  const int n = box.dim();
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      x[static_cast<std::size_t>(a)] = i == m - 1 ? box.hi(a) : box.lo(a) + box.edge(a) * i / (m - 1);
    }
    pts.push_back(std::move(x));
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == m) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return pts;
}

std::vector<std::uint32_t> with_value(std::span<const std::uint32_t> masks) {
  std::vector<std::uint32_t> m{0};
  for (auto x : masks)
    if (x != 0) m.push_back(x);
  return m;
}

std::optional<IndexSubset> union_subset(std::span<const std::uint32_t> masks, int n) {
  std::uint32_t all = 0;
  for (auto m : masks) all |= m;
  if (n < 32 && (all >> n) != 0) throw DomainError("mollify: derivative mask exceeds the dimension");
  if (!all) return std::nullopt;
  return IndexSubset::from_mask(all, n);
}

}  // namespace

double mollifier_normalization(int n, double tol) {
  if (n < 1 || n > kMaxDimension) throw DomainError("mollifier_normalization: dimension out of range");
  const auto seg = Rectangle::unit(1);
  const Integrand f = [n](std::span<const double> r) { return std::pow(r[0], n - 1) * bump(r[0] * r[0]); };
  const auto res = refine_until(f, sub_rectangle(seg, IndexSubset::full(1)), tol, 12);
  const double sphere = n * unit_ball_volume(n);
  return 1.0 / (sphere * res.value);
}

MollifierSpec make_mollifier(int n, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("mollifier: epsilon must be > 0");
  return {n, epsilon, mollifier_normalization(n)};
}

double mollifier_kernel(const MollifierSpec& spec, std::span<const double> y) {
  double r2 = 0.0;
  for (double v : y) r2 += v * v;
  return spec.normalization * bump(r2);
}

Expr mollifier_kernel_expr(int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) s += (i > 1 ? " + x" : "x") + std::to_string(i) + "^2";
  return parse_or_throw("exp(-1/(1 - (" + s + ")))", n);
}

double kernel_mass(const MollifierSpec& spec, const GridSpec& grid) {
  const auto cube = Rectangle::cube(spec.dim, -1.0, 1.0);
  const Integrand f = [&](std::span<const double> y) { return mollifier_kernel(spec, y); };
  return integrate_face(f, sub_rectangle(cube, IndexSubset::full(spec.dim)), grid).value;
}

std::vector<double> MollifiedGrid::point(std::size_t i) const {
  const int n = box.dim();
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int a = n - 1; a >= 0; --a) {
    const int k = static_cast<int>(i % static_cast<std::size_t>(points_per_axis));
    i /= static_cast<std::size_t>(points_per_axis);
    x[static_cast<std::size_t>(a)] =
        k == points_per_axis - 1 ? box.hi(a) : box.lo(a) + box.edge(a) * k / (points_per_axis - 1);
  }
  return x;
}

std::size_t MollifiedGrid::size() const { return values.empty() ? 0 : values[0].size(); }

MollifiedGrid mollify(const Expr& u, const MollifierSpec& spec, const Rectangle& box,
                      int points_per_axis, std::span<const std::uint32_t> masks,
                      const MollifierQuadrature& q) {
  const int n = box.dim();
  if (spec.dim != n) throw DomainError("mollify: kernel and box dimensions differ");
  const auto kn = kernel_nodes(n, q);
  std::vector<double> kw(kn.w.size());
  CompensatedSum mass;
  for (std::size_t k = 0; k < kw.size(); ++k) {
    kw[k] = kn.w[k] * mollifier_kernel(spec, kn.y[k]);
    mass.add(kw[k]);
  }
  // Unit discrete mass: the bump is flat to all orders at |y| = 1, so Gauss
  // rules converge slowly there and constants would otherwise drift by ~1e-9.
  for (double& w : kw) w /= mass.value();

  MollifiedGrid g;
  g.box = box;
  g.points_per_axis = points_per_axis;
  g.masks = with_value(masks);
  const auto pts = grid_points(box, points_per_axis);
  g.values.assign(g.masks.size(), std::vector<double>(pts.size(), 0.0));

  const auto active = union_subset(g.masks, n);
  std::optional<JetEvaluator> jet;
  std::vector<std::uint32_t> local;
  if (active) {
    jet.emplace(u, *active);
    const MixedJet probe(*active);
    for (auto m : g.masks) local.push_back(probe.local_mask(m));
  }
  RealEvaluator real(u);
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<CompensatedSum> acc(g.masks.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::fill(acc.begin(), acc.end(), CompensatedSum{});
    for (std::size_t k = 0; k < kn.y.size(); ++k) {
      for (int a = 0; a < n; ++a)
        z[static_cast<std::size_t>(a)] = pts[i][static_cast<std::size_t>(a)] - spec.epsilon * kn.y[k][static_cast<std::size_t>(a)];
      if (jet) {
        const auto c = jet->evaluate(z);
        for (std::size_t m = 0; m < local.size(); ++m) acc[m].add(kw[k] * c[local[m]]);
      } else {
        acc[0].add(kw[k] * real(z));
      }
    }
    for (std::size_t m = 0; m < acc.size(); ++m) g.values[m][i] = acc[m].value();
  }
  return g;
}

MollifiedGrid mollify_kernel_derivatives(const Expr& u, const MollifierSpec& spec,
                                         const Rectangle& box, int points_per_axis,
                                         std::span<const std::uint32_t> masks,
                                         const MollifierQuadrature& q) {
  const int n = box.dim();
  if (spec.dim != n) throw DomainError("mollify: kernel and box dimensions differ");
  const auto kn = kernel_nodes(n, q);
  MollifiedGrid g;
  g.box = box;
  g.points_per_axis = points_per_axis;
  g.masks = with_value(masks);
  const auto active = union_subset(g.masks, n);

  // Weighted kernel derivatives per node: w_k * c * d_S phi(y_k) * eps^{-|S|}.
  std::vector<std::vector<double>> kw(g.masks.size(), std::vector<double>(kn.y.size()));
  const Expr phi = mollifier_kernel_expr(n);
  std::optional<JetEvaluator> jet;
  std::vector<std::uint32_t> local;
  if (active) {
    jet.emplace(phi, *active);
    const MixedJet probe(*active);
    for (auto m : g.masks) local.push_back(probe.local_mask(m));
  }
  CompensatedSum mass;
  for (std::size_t k = 0; k < kn.y.size(); ++k)
    mass.add(kn.w[k] * spec.normalization *
             bump(std::inner_product(kn.y[k].begin(), kn.y[k].end(), kn.y[k].begin(), 0.0)));
  for (std::size_t k = 0; k < kn.y.size(); ++k) {
    for (std::size_t m = 0; m < g.masks.size(); ++m) {
      double d;
      if (jet) d = jet->evaluate(kn.y[k])[local[m]];
      else d = bump(std::inner_product(kn.y[k].begin(), kn.y[k].end(), kn.y[k].begin(), 0.0));
      const int order = std::popcount(g.masks[m]);
      kw[m][k] = kn.w[k] * spec.normalization * d * std::pow(spec.epsilon, -order) / mass.value();
    }
  }

  const auto pts = grid_points(box, points_per_axis);
  g.values.assign(g.masks.size(), std::vector<double>(pts.size(), 0.0));
  RealEvaluator real(u);
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<CompensatedSum> acc(g.masks.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::fill(acc.begin(), acc.end(), CompensatedSum{});
    for (std::size_t k = 0; k < kn.y.size(); ++k) {
      for (int a = 0; a < n; ++a)
        z[static_cast<std::size_t>(a)] = pts[i][static_cast<std::size_t>(a)] - spec.epsilon * kn.y[k][static_cast<std::size_t>(a)];
      const double v = real(z);
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m].add(kw[m][k] * v);
    }
    for (std::size_t m = 0; m < acc.size(); ++m) g.values[m][i] = acc[m].value();
  }
  return g;
}

CheckReport mollifier_convergence(const Expr& u, const Rectangle& box, int points_per_axis,
                                  std::span<const double> epsilons, double min_order,
                                  const MollifierQuadrature& q) {
  if (epsilons.size() < 2) throw DomainError("mollifier_convergence: need at least two epsilons");
  const int n = box.dim();
  const auto pts = grid_points(box, points_per_axis);
  RealEvaluator real(u);
  std::vector<double> exact;
  for (const auto& x : pts) exact.push_back(real(x));

  CheckReport r;
  r.name = "mollifier_convergence";
  r.columns = {"epsilon", "max_error", "order"};
  const double c = mollifier_normalization(n);
  std::vector<double> errs;
  for (double eps : epsilons) {
    const MollifierSpec spec{n, eps, c};
    const auto g = mollify(u, spec, box, points_per_axis, {}, q);
    double e = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) e = std::max(e, std::abs(g.values[0][i] - exact[i]));
    errs.push_back(e);
  }
  double worst_order = kInf;
  bool decreasing = true;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    double order = 0.0;
    if (i > 0) {
      order = std::log(errs[i - 1] / errs[i]) / std::log(epsilons[i - 1] / epsilons[i]);
      worst_order = std::min(worst_order, order);
      decreasing = decreasing && errs[i] < errs[i - 1];
    }
    r.rows.push_back({epsilons[i], errs[i], i > 0 ? order : 0.0});
  }
  r.values = {{"min_order", worst_order}, {"required_order", min_order}};
  r.verdict = decreasing && worst_order >= min_order ? Verdict::Pass : Verdict::Fail;
  if (!decreasing) r.note = "error did not decrease monotonically";
  return r;
}

}  // namespace mixsmooth
