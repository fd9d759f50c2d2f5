#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/norms.hpp"
#include "mixsmooth/rect_geometry.hpp"
#include "mixsmooth/reports.hpp"
#include "mixsmooth/sampling.hpp"

namespace mixsmooth {

enum class ConstantKind { PointwiseP, PointwiseP1, HolderNorm, C0NormP1, Trace };
std::string_view to_string(ConstantKind k);

struct BoundConstant {
  ConstantKind kind = ConstantKind::PointwiseP;
  double p = 1.0;
  int n = 0;
  std::optional<double> d;
  double value = 0.0;
};

/// ((1+p)^{1/p} + d^{(p-1)/p})^n - (1+p)^{n/p}, p > 1, d >= 0. Evaluated as
/// sum_{k>=1} C(n,k) d^{k(p-1)/p} (1+p)^{(n-k)/p}, which has no cancellation
/// for small d.
BoundConstant pointwise_bound_constant(int n, double p, double d);
/// 3^n - 2^n.
BoundConstant pointwise_bound_constant_p1(int n);
/// (1 + (1+p)^{1/p})^n - (1+p)^{n/p}: bound on the local Hoelder quotient
/// over pairs with |x - x'| <= 1.
double local_holder_constant(int n, double p);
/// local_holder_constant + Gamma_n^{-1/p}: the C0 bound for p > 1.
double c0_bound_constant(int n, double p);
/// 3 * c0_bound_constant(n, p).
BoundConstant holder_norm_constant(int n, double p);
/// 3^n - 2^n + 1/Gamma_n.
BoundConstant c0_norm_constant_p1(int n);
/// max(p - 1 + 1/edge, 1).
BoundConstant trace_constant(double p, double edge);

struct EmbeddingSettings {
  NormSettings norm{.order = 12, .start_cells = 2, .tol = 1e-7, .max_level = 6,
                    .max_evaluations = 20'000'000, .sup_grid = 0};
  /// Relative slack for rounding: a sample violates when lhs > rhs (1 + tol).
  double verdict_tol = 1e-12;
  /// Re-check a FAIL with a doubled quadrature order before reporting it.
  bool reverify = true;
};

/// |u(x) - u(x')| <= C(n, p, |x - x'|) ||u||_{S^1_p} over the sampler's pairs
/// (p = 1 uses 3^n - 2^n). The norm is taken over the sampler's domain, which
/// should contain the support of u.
InequalityReport check_pointwise(const Expr& u, double p, const PairSampler& pairs,
                                 const EmbeddingSettings& s = {});

/// p > 1: parts "c0", "seminorm_near", "seminorm_far", "seminorm" and
/// "holder_norm" with constants K, K - Gamma_n^{-1/p}, 2K, 2K, 3K where
/// K = c0_bound_constant(n, p) and the exponent is (p-1)/p.
/// p = 1: the single part "c0" with constant 3^n - 2^n + 1/Gamma_n.
InequalityReport check_holder_norm(const Expr& u, double p, const PairSampler& pairs,
                                   const EmbeddingSettings& s = {});

/// Trace of pointwise_bound_constant(n, p, d) along `p_sequence`. For d == 1
/// the last entry must be within `tol` of 3^n - 2^n; other d only report.
CheckReport check_p_to_1_limit(int n, double d, std::span<const double> p_sequence,
                               double tol = 1e-3);

/// ||d_face u||_{L_p(bottom face)} <= C ||d_face u||_{W^s_p(P)} with s the
/// unit vector of the axis j missing from `face` (|face| = n - 1).
InequalityReport check_trace(const Expr& u, const Rectangle& P, const IndexSubset& face, double p,
                             const EmbeddingSettings& s = {});

/// Runs check_pointwise on every derivative of order k - 1 (multi-indices
/// i1 <= ... <= i_{k-1}, built symbolically). 2 <= k <= 3.
InequalityReport corollary2_check(const Expr& u, int k, double p, const PairSampler& pairs,
                                  const EmbeddingSettings& s = {});

}  // namespace mixsmooth
