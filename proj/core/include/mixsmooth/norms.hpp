#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/quadrature.hpp"
#include "mixsmooth/rect_geometry.hpp"
#include "mixsmooth/sampling.hpp"

namespace mixsmooth {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NormKind { Lp, S1p, Wsp, C0, HolderSemi, HolderNorm };
std::string_view to_string(NormKind k);

struct NormSettings {
  int order = 12;
  /// Two cells per axis puts the midplanes of symmetric boxes on cell
  /// boundaries, where the kinks of |odd derivative|^p sit.
  int start_cells = 2;
  double tol = 1e-10;
  int max_level = 8;
  std::uint64_t max_evaluations = 40'000'000;
  /// Points per axis of the uniform grid added to sampled sups; 0 = pick
  /// from the dimension.
  int sup_grid = 0;
};

struct NormReport {
  NormKind kind = NormKind::Lp;
  double p = 2.0;
  double value = 0.0;
  /// Bound on |value - exact| implied by the last refinement step; 0 for
  /// sampled quantities.
  double error_estimate = 0.0;
  bool converged = true;
  /// Sups over samples (p = inf, C0, Hoelder) only bound the truth from below.
  bool sampled_lower_bound = false;
  Rectangle domain = Rectangle::unit(1);
  int order = 0;
  int cells = 0;
  std::uint64_t evaluations = 0;
  /// Hoelder kinds.
  std::optional<double> gamma;
  std::size_t pairs = 0;
  std::uint64_t seed = 0;
  std::optional<SamplePair> witness;
  /// Ws_p: the derivative axis.
  std::optional<int> axis;
  /// S1p: per-term norms ||d_S u||, empty set first then canonical order.
  std::vector<double> terms;

  /// value - error_estimate, clipped at 0: what a certified upper side may use.
  double certified_lower() const;
  double certified_upper() const { return value + error_estimate; }
};

/// Integrals of |d_S u|^p over `region` for each ambient mask S (0 = u
/// itself), sharing one jet evaluation per node.
struct MixedIntegrals {
  std::vector<double> values;
  std::vector<double> errors;
  bool converged = true;
  int order = 0;
  int cells = 0;
  std::uint64_t evaluations = 0;
};
MixedIntegrals mixed_power_integrals(const Expr& u, const SubRectangle& region,
                                     std::span<const std::uint32_t> masks, double p,
                                     const NormSettings& s = {});

/// max |d_S u| over the quadrature nodes of `box` plus a uniform grid that
/// includes the faces and corners. A lower bound of the true sup.
std::vector<double> mixed_sampled_sups(const Expr& u, const Rectangle& box,
                                       std::span<const std::uint32_t> masks,
                                       const NormSettings& s = {});

NormReport lp_norm(const Expr& u, const Rectangle& box, double p, const NormSettings& s = {});
NormReport s1p_norm(const Expr& u, const Rectangle& box, double p, const NormSettings& s = {});
/// ||u||_p + ||du/dx_axis||_p, axis 1-based.
NormReport ws_norm(const Expr& u, const Rectangle& box, int axis, double p, const NormSettings& s = {});
NormReport c0_norm(const Expr& u, const Rectangle& box, const NormSettings& s = {});
NormReport holder_seminorm(const Expr& u, double gamma, const PairSampler& sampler);
/// Sampled C0 norm plus sampled seminorm.
NormReport holder_norm(const Expr& u, double gamma, const PairSampler& sampler, const NormSettings& s = {});

/// Gamma(m / 2) for m >= 1 from Gamma(1) = 1, Gamma(1/2) = sqrt(pi).
double gamma_half(int m);
/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Norm of a value from its integral I with error dI: (I + dI)^{1/p} - I^{1/p}.
double root_error(double integral, double integral_error, double p);

}  // namespace mixsmooth
