#pragma once

#include <span>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/norms.hpp"
#include "mixsmooth/reports.hpp"

namespace mixsmooth {

/// log(log(1 + 1/sqrt(x1^2 + ... + xn^2 + r0^2))): unbounded as r0 -> 0 yet
/// with bounded W^1_2 energy on the annulus r0 < |x| < 1 in two dimensions.
Expr counterexample_expr(int n, double r0);

/// 2^-4, 2^-5, ..., 2^-12.
std::vector<double> default_radii();

struct CounterexampleRow {
  double r0 = 0.0;
  double sup = 0.0;  // sampled sup over the annulus
  double w12 = 0.0;  // ||u||_2 + ||grad u||_2 on the annulus
  double s12 = 0.0;  // (||u||^2 + ||u_1||^2 + ||u_2||^2 + ||u_12||^2)^{1/2}
  double error_estimate = 0.0;
  bool converged = true;
};

struct CounterexampleSettings {
  NormSettings norm{.order = 16, .start_cells = 2, .tol = 1e-11, .max_level = 8,
                    .max_evaluations = 40'000'000, .sup_grid = 0};
  /// W^1_2 relative increments must drop below this from `settle_radius` on.
  double w12_increment_tol = 0.01;
  double settle_radius = 1.0 / 256.0;
  /// Required sup(last) / sup(first).
  double sup_growth = 1.5;
};

CounterexampleRow counterexample_row(double r0, const CounterexampleSettings& s = {});

/// Annulus study in n = 2 over decreasing radii in (0, 1/2). Columns r0,
/// sup, W12, S12. PASS needs a strictly increasing sup column with the
/// requested growth, a strictly increasing S12 column, and W12 increments
/// below the tolerance for r0 <= settle_radius.
CheckReport counterexample_run(int n, std::span<const double> radii,
                               const CounterexampleSettings& s = {});

/// The same profile on the segment [r0, 1]: sup <= |u(1)| + ||u'||_{L_2(r0,1)}
/// for every r0, as the one-dimensional embedding demands.
CheckReport counterexample_1d(std::span<const double> radii, const CounterexampleSettings& s = {});

}  // namespace mixsmooth
