#include "mixsmooth/counterexample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "mixsmooth/mixed_jet.hpp"

namespace mixsmooth {

namespace {

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void check_radii(std::span<const double> radii) {
  if (radii.empty()) throw DomainError("counterexample: empty radius list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 0.5)) throw DomainError("counterexample: radii must lie in (0, 1/2)");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw DomainError("counterexample: radii must decrease");
  }
}

}  // namespace

Expr counterexample_expr(int n, double r0) {
  if (n < 1 || n > kMaxDimension) throw DomainError("counterexample: dimension out of range");
  if (!(r0 > 0.0)) throw DomainError("counterexample: r0 must be > 0");
  std::string s;
  for (int i = 1; i <= n; ++i) s += (i > 1 ? " + x" : "x") + std::to_string(i) + "^2";
  return parse_or_throw("log(log(1 + 1/sqrt(" + s + " + " + number(r0 * r0) + ")))", n);
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int k = 4; k <= 12; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

CounterexampleRow counterexample_row(double r0, const CounterexampleSettings& s) {
  const Expr u = counterexample_expr(2, r0);
  // Log-polar box: t = ln r in [ln r0, 0], theta in [0, 2 pi], area e^{2t}.
  const Rectangle polar({std::log(r0), 0.0}, {0.0, 2.0 * std::numbers::pi});
  JetEvaluator ev(u, IndexSubset::full(2));
  double sup = 0.0;
  const VectorIntegrand f = [&](std::span<const double> q, std::span<double> out) {
    const double r = std::exp(q[0]);
    const double x[2] = {r * std::cos(q[1]), r * std::sin(q[1])};
    const auto c = ev.evaluate(x);
    const double jac = r * r;
    sup = std::max(sup, std::abs(c[0]));
    out[0] = c[0] * c[0] * jac;
    out[1] = c[1] * c[1] * jac;
    out[2] = c[2] * c[2] * jac;
    out[3] = c[3] * c[3] * jac;
  };
  RefineSettings rs;
  rs.order = s.norm.order;
  rs.start_cells = s.norm.start_cells;
  rs.max_evaluations = s.norm.max_evaluations;
  const auto res = refine_until(f, 4, sub_rectangle(polar, IndexSubset::full(2)), s.norm.tol,
                                s.norm.max_level, rs);
  // The profile is radial and decreasing, so the inner circle carries the sup.
  RealEvaluator real(u);
  for (int k = 0; k < 64; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 64.0;
    const double x[2] = {r0 * std::cos(th), r0 * std::sin(th)};
    sup = std::max(sup, std::abs(real(x)));
  }
  CounterexampleRow row;
  row.r0 = r0;
  row.sup = sup;
  const auto& v = res.values;
  row.w12 = std::sqrt(v[0]) + std::sqrt(v[1] + v[2]);
  row.s12 = std::sqrt(v[0] + v[1] + v[2] + v[3]);
  for (double e : res.error_estimates) row.error_estimate = std::max(row.error_estimate, e);
  row.converged = res.converged;
  return row;
}

CheckReport counterexample_run(int n, std::span<const double> radii, const CounterexampleSettings& s) {
  if (n != 2) throw DomainError("counterexample_run: only n = 2 is supported");
  check_radii(radii);
  CheckReport r;
  r.name = "counterexample";
  r.columns = {"r0", "sup", "W12", "S12"};
  std::vector<CounterexampleRow> rows;
  bool converged = true;
  for (double r0 : radii) {
    rows.push_back(counterexample_row(r0, s));
    converged = converged && rows.back().converged;
    r.rows.push_back({r0, rows.back().sup, rows.back().w12, rows.back().s12});
  }
  bool sup_increasing = true, s12_increasing = true, w12_settled = true;
  double max_late_increment = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    sup_increasing = sup_increasing && rows[i].sup > rows[i - 1].sup;
    s12_increasing = s12_increasing && rows[i].s12 > rows[i - 1].s12;
    if (rows[i].r0 <= s.settle_radius) {
      const double inc = std::abs(rows[i].w12 - rows[i - 1].w12) / rows[i - 1].w12;
      max_late_increment = std::max(max_late_increment, inc);
      w12_settled = w12_settled && inc < s.w12_increment_tol;
    }
  }
  const double growth = rows.back().sup / rows.front().sup;
  r.values = {{"sup_ratio", growth},
              {"sup_increasing", sup_increasing ? 1.0 : 0.0},
              {"s12_increasing", s12_increasing ? 1.0 : 0.0},
              {"w12_max_late_increment", max_late_increment},
              {"w12_increment_tol", s.w12_increment_tol}};
  const bool ok = sup_increasing && growth >= s.sup_growth && s12_increasing && w12_settled;
  if (ok) {
    r.verdict = Verdict::Pass;
  } else if (!converged) {
    r.verdict = Verdict::Inconclusive;
    r.note = "annulus quadrature did not converge";
  } else {
    r.verdict = Verdict::Fail;
    std::string why;
    if (!sup_increasing) why += "sup not strictly increasing; ";
    if (growth < s.sup_growth) why += "sup growth below threshold; ";
    if (!s12_increasing) why += "S12 not increasing; ";
    if (!w12_settled) why += "W12 increments above tolerance for small r0; ";
    r.note = why.substr(0, why.size() - 2);
  }
  return r;
}

CheckReport counterexample_1d(std::span<const double> radii, const CounterexampleSettings& s) {
  check_radii(radii);
  CheckReport r;
  r.name = "counterexample_1d";
  r.columns = {"r0", "sup", "bound"};
  r.verdict = Verdict::Pass;
  for (double r0 : radii) {
    const Expr u = counterexample_expr(1, r0);
    const Rectangle seg({r0}, {1.0});
    const NormReport d = [&] {
      const std::uint32_t masks[] = {1};
      const auto mi = mixed_power_integrals(u, sub_rectangle(seg, IndexSubset::full(1)), masks, 2.0, s.norm);
      NormReport n;
      n.value = std::sqrt(mi.values[0]);
      n.converged = mi.converged;
      return n;
    }();
    const double at_r0 = std::abs(eval_real(u, std::vector<double>{r0}));
    const double bound = std::abs(eval_real(u, std::vector<double>{1.0})) + d.value;
    r.rows.push_back({r0, at_r0, bound});
    if (!(at_r0 <= bound)) r.verdict = combine(r.verdict, d.converged ? Verdict::Fail : Verdict::Inconclusive);
  }
  return r;
}

}  // namespace mixsmooth
