#include "mixsmooth/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixsmooth/mixed_jet.hpp"

namespace mixsmooth {

namespace {

double pow_abs(double v, double p) {
  if (p == 1.0) return std::abs(v);
  if (p == 2.0) return v * v;
  return std::pow(std::abs(v), p);
}

void check_p(double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
}

void check_arity(const Expr& u, int n) {
  if (free_arity(u) > n)
    throw DomainError("expression uses x" + std::to_string(free_arity(u)) + " but the box has dimension " +
                      std::to_string(n));
}

struct JetSetup {
  IndexSubset active;
  std::vector<std::uint32_t> local;
};

JetSetup jet_setup(int n, std::span<const std::uint32_t> masks) {
  std::uint32_t all = 0;
  for (auto m : masks) all |= m;
  if (n < 32 && (all >> n) != 0) throw DomainError("derivative mask exceeds the dimension");
  // A jet needs at least one active axis; with no derivatives requested the
  // value slot is all that is read.
  IndexSubset active = all ? IndexSubset::from_mask(all, n) : IndexSubset({1}, n);
  const MixedJet probe(active);
  JetSetup js{active, {}};
  for (auto m : masks) js.local.push_back(probe.local_mask(m));
  return js;
}

int auto_grid(int n) {
  switch (n) {
    case 1: return 2049;
    case 2: return 257;
    case 3: return 65;
    case 4: return 25;
    default: return 9;
  }
}

std::vector<std::uint32_t> all_masks(int n) {
  std::vector<std::uint32_t> m{0};
  for (const auto& s : enumerate_subsets(n)) m.push_back(s.mask());
  return m;
}

NormReport base_report(NormKind kind, double p, const Rectangle& box) {
  NormReport r;
  r.kind = kind;
  r.p = p;
  r.domain = box;
  return r;
}

}  // namespace

std::string_view to_string(NormKind k) {
  switch (k) {
    case NormKind::Lp: return "Lp";
    case NormKind::S1p: return "S1p";
    case NormKind::Wsp: return "Wsp";
    case NormKind::C0: return "C0";
    case NormKind::HolderSemi: return "HolderSemi";
    case NormKind::HolderNorm: return "HolderNorm";
  }
  return "?";
}

double NormReport::certified_lower() const { return std::max(0.0, value - error_estimate); }

double root_error(double integral, double integral_error, double p) {
  const double i = std::max(0.0, integral);
  if (!std::isfinite(integral_error)) return kInf;
  return std::pow(i + integral_error, 1.0 / p) - std::pow(i, 1.0 / p);
}

MixedIntegrals mixed_power_integrals(const Expr& u, const SubRectangle& region,
                                     std::span<const std::uint32_t> masks, double p,
                                     const NormSettings& s) {
  check_p(p);
  if (!std::isfinite(p)) throw DomainError("mixed_power_integrals: p must be finite");
  const int n = region.parent.dim();
  check_arity(u, n);
  const auto js = jet_setup(n, masks);
  JetEvaluator ev(u, js.active);
  const VectorIntegrand f = [&](std::span<const double> x, std::span<double> out) {
    const auto c = ev.evaluate(x);
    for (std::size_t i = 0; i < js.local.size(); ++i) out[i] = pow_abs(c[js.local[i]], p);
  };
  RefineSettings rs;
  rs.order = s.order;
  rs.start_cells = s.start_cells;
  rs.max_evaluations = s.max_evaluations;
  const auto r = refine_until(f, masks.size(), region, s.tol, s.max_level, rs);
  MixedIntegrals out;
  out.values = r.values;
  out.errors = r.error_estimates;
  out.converged = r.converged;
  out.order = s.order;
  out.cells = r.cells;
  out.evaluations = r.evaluations;
  return out;
}

std::vector<double> mixed_sampled_sups(const Expr& u, const Rectangle& box,
                                       std::span<const std::uint32_t> masks, const NormSettings& s) {
  const int n = box.dim();
  check_arity(u, n);
  const auto js = jet_setup(n, masks);
  JetEvaluator ev(u, js.active);
  std::vector<double> sup(masks.size(), 0.0);
  auto visit = [&](std::span<const double> x) {
    const auto c = ev.evaluate(x);
    for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = std::max(sup[i], std::abs(c[js.local[i]]));
  };
  const VectorIntegrand at_nodes = [&](std::span<const double> x, std::span<double> out) {
    visit(x);
    out[0] = 0.0;
  };
  integrate_face(at_nodes, 1, sub_rectangle(box, IndexSubset::full(n)),
                 GridSpec::uniform(s.order, std::max(1, s.start_cells)));

  const int m = s.sup_grid > 1 ? s.sup_grid : auto_grid(n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  while (true) {
    for (int a = 0; a < n; ++a)
      x[static_cast<std::size_t>(a)] =
          idx[static_cast<std::size_t>(a)] == m - 1
              ? box.hi(a)
              : box.lo(a) + box.edge(a) * idx[static_cast<std::size_t>(a)] / (m - 1);
    try {
      visit(x);
    } catch (const std::exception& e) {
      throw IntegrandError(e.what(), x);
    }
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == m) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return sup;
}

NormReport lp_norm(const Expr& u, const Rectangle& box, double p, const NormSettings& s) {
  check_p(p);
  NormReport r = base_report(NormKind::Lp, p, box);
  const std::uint32_t mask0[] = {0};
  r.order = s.order;
  if (std::isinf(p)) {
    r.value = mixed_sampled_sups(u, box, mask0, s)[0];
    r.sampled_lower_bound = true;
    return r;
  }
  const auto mi = mixed_power_integrals(u, sub_rectangle(box, IndexSubset::full(box.dim())), mask0, p, s);
  r.value = std::pow(std::max(0.0, mi.values[0]), 1.0 / p);
  r.error_estimate = root_error(mi.values[0], mi.errors[0], p);
  r.converged = mi.converged;
  r.cells = mi.cells;
  r.evaluations = mi.evaluations;
  return r;
}

NormReport s1p_norm(const Expr& u, const Rectangle& box, double p, const NormSettings& s) {
  check_p(p);
  const int n = box.dim();
  NormReport r = base_report(NormKind::S1p, p, box);
  r.order = s.order;
  const auto masks = all_masks(n);
  if (std::isinf(p)) {
    const auto sups = mixed_sampled_sups(u, box, masks, s);
    double total = 0.0;
    for (double v : sups) total += v;
    r.value = total;
    r.terms = sups;
    r.sampled_lower_bound = true;
    return r;
  }
  const auto mi = mixed_power_integrals(u, sub_rectangle(box, IndexSubset::full(n)), masks, p, s);
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    total += std::max(0.0, mi.values[i]);
    err += mi.errors[i];
    r.terms.push_back(std::pow(std::max(0.0, mi.values[i]), 1.0 / p));
  }
  r.value = std::pow(total, 1.0 / p);
  r.error_estimate = root_error(total, err, p);
  r.converged = mi.converged;
  r.cells = mi.cells;
  r.evaluations = mi.evaluations;
  return r;
}

NormReport ws_norm(const Expr& u, const Rectangle& box, int axis, double p, const NormSettings& s) {
  check_p(p);
  const int n = box.dim();
  if (axis < 1 || axis > n) throw DomainError("ws_norm: axis out of range");
  NormReport r = base_report(NormKind::Wsp, p, box);
  r.axis = axis;
  r.order = s.order;
  const std::uint32_t masks[] = {0, std::uint32_t{1} << (axis - 1)};
  if (std::isinf(p)) {
    const auto sups = mixed_sampled_sups(u, box, masks, s);
    r.value = sups[0] + sups[1];
    r.terms = sups;
    r.sampled_lower_bound = true;
    return r;
  }
  const auto mi = mixed_power_integrals(u, sub_rectangle(box, IndexSubset::full(n)), masks, p, s);
  for (std::size_t i = 0; i < 2; ++i) {
    r.terms.push_back(std::pow(std::max(0.0, mi.values[i]), 1.0 / p));
    r.error_estimate += root_error(mi.values[i], mi.errors[i], p);
  }
  r.value = r.terms[0] + r.terms[1];
  r.converged = mi.converged;
  r.cells = mi.cells;
  r.evaluations = mi.evaluations;
  return r;
}

NormReport c0_norm(const Expr& u, const Rectangle& box, const NormSettings& s) {
  NormReport r = lp_norm(u, box, kInf, s);
  r.kind = NormKind::C0;
  return r;
}

NormReport holder_seminorm(const Expr& u, double gamma, const PairSampler& sampler) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("holder_seminorm: gamma must be in (0, 1]");
  check_arity(u, sampler.domain().dim());
  NormReport r = base_report(NormKind::HolderSemi, kInf, sampler.domain());
  r.gamma = gamma;
  r.sampled_lower_bound = true;
  r.pairs = sampler.count();
  r.seed = sampler.seed();
  for (std::size_t i = 0; i < sampler.count(); ++i) {
    SamplePair sp = sampler.pair(i);
    const double ratio = std::abs(eval_real(u, sp.x) - eval_real(u, sp.x_prime)) / std::pow(sp.distance, gamma);
    if (!r.witness || ratio > r.value) {
      r.value = ratio;
      r.witness = std::move(sp);
    }
  }
  return r;
}

NormReport holder_norm(const Expr& u, double gamma, const PairSampler& sampler, const NormSettings& s) {
  NormReport semi = holder_seminorm(u, gamma, sampler);
  const NormReport c0 = c0_norm(u, sampler.domain(), s);
  semi.kind = NormKind::HolderNorm;
  semi.terms = {c0.value, semi.value};
  semi.value = c0.value + semi.value;
  semi.order = c0.order;
  return semi;
}

double gamma_half(int m) {
  if (m < 1) throw DomainError("gamma_half: m must be >= 1");
  double g = (m % 2) ? std::sqrt(std::numbers::pi) : 1.0;
  for (double t = (m % 2) ? 0.5 : 1.0; t < m / 2.0; t += 1.0) g *= t;
  return g;
}

double unit_ball_volume(int n) {
  if (n < 1) throw DomainError("unit_ball_volume: n must be >= 1");
  return std::pow(std::numbers::pi, n / 2.0) / gamma_half(n + 2);
}

}  // namespace mixsmooth
