#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/quadrature.hpp"
#include "mixsmooth/rect_geometry.hpp"
#include "mixsmooth/reports.hpp"

namespace mixsmooth {

/// phi(y) = c exp(-1 / (1 - |y|^2)) on |y| < 1, zero outside, with c chosen
/// so that phi integrates to 1 over R^n. phi_eps(y) = eps^-n phi(y / eps).
struct MollifierSpec {
  int dim = 1;
  double epsilon = 1.0;
  double normalization = 0.0;
};

/// c from the radial integral n Gamma_n int_0^1 r^{n-1} exp(-1/(1-r^2)) dr,
/// computed to relative accuracy `tol`.
double mollifier_normalization(int n, double tol = 1e-14);
MollifierSpec make_mollifier(int n, double epsilon);

/// phi(y) (unscaled kernel).
double mollifier_kernel(const MollifierSpec& spec, std::span<const double> y);
/// The unnormalized bump exp(-1/(1 - (x1^2 + ... + xn^2))) as an expression,
/// valid inside the unit ball.
Expr mollifier_kernel_expr(int n);

/// Tensor Gauss-Legendre integral of phi over [-1, 1]^n; should be 1.
double kernel_mass(const MollifierSpec& spec, const GridSpec& grid);

/// Quadrature over the kernel support used by mollify().
struct MollifierQuadrature {
  int order = 12;
  int cells = 8;
};

/// u_eps and its mixed derivatives on a uniform grid.
struct MollifiedGrid {
  Rectangle box = Rectangle::unit(1);
  int points_per_axis = 0;
  /// Ambient masks of the stored derivatives; masks[0] == 0 is u_eps itself.
  std::vector<std::uint32_t> masks;
  /// values[m][i]: derivative masks[m] at grid point i (row-major, last axis
  /// fastest).
  std::vector<std::vector<double>> values;

  std::vector<double> point(std::size_t i) const;
  std::size_t size() const;
};

/// u_eps(x) = int u(x - eps y) phi(y) dy over [-1, 1]^n, and d_S u_eps by
/// mollifying the jet coefficient d_S u the same way. The discrete kernel
/// weights are rescaled to unit mass, so constants are reproduced to rounding.
MollifiedGrid mollify(const Expr& u, const MollifierSpec& spec, const Rectangle& box,
                      int points_per_axis, std::span<const std::uint32_t> masks = {},
                      const MollifierQuadrature& q = {});

/// d_S u_eps with the derivative moved onto the kernel:
/// eps^{-|S|} int u(x - eps y) d_S phi(y) dy. Independent of the jet route.
MollifiedGrid mollify_kernel_derivatives(const Expr& u, const MollifierSpec& spec,
                                         const Rectangle& box, int points_per_axis,
                                         std::span<const std::uint32_t> masks,
                                         const MollifierQuadrature& q = {});

/// max_i |u_eps(x_i) - u(x_i)| for each eps, and observed orders
/// log2(e(eps) / e(eps / 2)) between consecutive halvings.
CheckReport mollifier_convergence(const Expr& u, const Rectangle& box, int points_per_axis,
                                  std::span<const double> epsilons, double min_order,
                                  const MollifierQuadrature& q = {});

}  // namespace mixsmooth
