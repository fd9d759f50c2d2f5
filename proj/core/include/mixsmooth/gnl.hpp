#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/quadrature.hpp"
#include "mixsmooth/rect_geometry.hpp"
#include "mixsmooth/verdict.hpp"

namespace mixsmooth {

/// One term of the Newton-Leibniz sum: the integral of d^k u / dx_S over the
/// bottom-corner face with free axes S.
struct SubsetContribution {
  IndexSubset subset;
  double value = 0.0;
  double error_estimate = 0.0;
  std::uint64_t evaluations = 0;
  int cells = 0;
  bool converged = true;
};

struct GnlBreakdown {
  /// Number of axes that carry integrals (after dropping collapsed ones).
  int dim = 0;
  int order = 0;
  /// Canonical subset order; subsets are named by original axis numbers.
  std::vector<SubsetContribution> records;
  double lhs = 0.0;       // u(x') - u(x)
  double rhs = 0.0;       // records summed in order
  double residual = 0.0;  // |lhs - rhs|
  bool converged = true;
  std::uint64_t evaluations = 0;
  double max_error_estimate() const;
};

/// Every face on one fixed grid.
GnlBreakdown gnl_rhs(const Expr& u, const Rectangle& P, const GridSpec& grid = {});

struct GnlSettings {
  double refine_tol = 1e-10;
  int max_level = 6;
  RefineSettings refine{};
  /// Faces may be integrated concurrently (see parallel_for); the sum is
  /// always formed in canonical order.
  bool parallel = true;
};

/// Every face refined with refine_until.
GnlBreakdown gnl_rhs_refined(const Expr& u, const Rectangle& P, const GnlSettings& settings = {});

struct GnlRectangleResult {
  Rectangle rect;
  std::optional<GnlBreakdown> breakdown;
  double threshold = 0.0;  // tol * max(1, |lhs|)
  Verdict verdict = Verdict::Inconclusive;
  std::string note;        // evaluation or convergence problem, if any
};

struct GnlReport {
  double tol = 0.0;
  std::vector<GnlRectangleResult> rectangles;
  Verdict verdict = Verdict::Pass;
  /// Rectangle with the largest residual / threshold ratio (or the first
  /// non-PASS one); -1 if no rectangles were given.
  int worst = -1;
};

/// PASS iff every residual <= tol * max(1, |lhs|). Evaluation failures and
/// unconverged faces make a rectangle INCONCLUSIVE, never FAIL.
GnlReport gnl_verify(const Expr& u, std::span<const Rectangle> rectangles, double tol,
                     const GnlSettings& settings = {});

/// Newton-Leibniz breakdown for an arbitrary point pair: axes with
/// x_i > x'_i are reflected in the expression, axes with x_i == x'_i are
/// frozen. Records name subsets by original axis numbers.
GnlBreakdown gnl_for_pair(const Expr& u, std::span<const double> x, std::span<const double> x_prime,
                          const GridSpec& grid = {});

/// `count` boxes inside `bounds` (default [-1, 1]^n) with each edge between
/// 1/8 and 1/2 of the bounding edge; reproducible for a given seed.
std::vector<Rectangle> random_boxes(int n, int count, std::uint64_t seed,
                                    std::optional<Rectangle> bounds = std::nullopt);

}  // namespace mixsmooth
