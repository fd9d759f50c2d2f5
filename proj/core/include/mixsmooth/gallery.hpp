#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/rect_geometry.hpp"

namespace mixsmooth {

/// Built-in test function. Families (x = (x1..xn)):
///
///   bump    exp(-(x1^4 + ... + xn^4))          support box [-2.5, 2.5]^n
///   gauss   exp(-(x1^2 + ... + xn^2))          support box [-6, 6]^n
///   poly    (1 + x1 + x2/2 + ... + xn/n)^3 + x1^2*...*xn^2
///   sinexp  sin(x1)*exp(x2)*x3*cos(x4)*sin(x5)*...  (factors cycle)
///   loglog  log(log(1 + 1/sqrt(x1^2 + ... + xn^2 + 0.25)))
///
/// bump and gauss decay fast enough that every mixed derivative is below
/// 1e-15 outside the support box, so norms over the box stand in for norms
/// over R^n. Identifiers are family + n + "d", e.g. "gauss2d".
struct GalleryFunction {
  std::string id;
  std::string family;
  int dim = 0;
  std::string text;
  Expr expr = Expr::constant(0.0);
  /// Same arithmetic as `expr`, written out by hand.
  std::function<double(std::span<const double>)> closure;
  std::optional<Rectangle> support;
  /// Closed-form S^1_2 norm over R^n where known.
  std::optional<double> s1_2_norm;
};

std::vector<std::string> gallery_families();
GalleryFunction gallery(std::string_view family, int n);
/// Looks up "bump2d", "poly3d", ... Throws DomainError for unknown ids.
GalleryFunction gallery_by_id(std::string_view id);
bool is_gallery_id(std::string_view id);

}  // namespace mixsmooth
