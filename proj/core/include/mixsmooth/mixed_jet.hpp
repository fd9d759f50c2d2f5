#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mixsmooth/expr_ast.hpp"
#include "mixsmooth/rect_geometry.hpp"

namespace mixsmooth {

/// All mixed partials of order <= 1 per active variable at one point.
///
/// Coefficients are indexed by a *local* bitmask over the active axes: bit p
/// refers to active.indices()[p]. coeffs[0] is the value, coeffs[S] is
/// d^{|S|}u / dx_S. Arithmetic is exact truncated-polynomial arithmetic in
/// the algebra where every active direction e_i satisfies e_i^2 = 0.
class MixedJet {
 public:
  explicit MixedJet(IndexSubset active);
  MixedJet(IndexSubset active, std::vector<double> coeffs);

  static MixedJet constant(const IndexSubset& active, double c);
  /// Lift of the coordinate x_axis at `value`; the derivative slot is seeded
  /// only when `axis` is active.
  static MixedJet variable(const IndexSubset& active, int axis, double value);

  const IndexSubset& active() const noexcept { return active_; }
  int order() const noexcept { return active_.size(); }
  std::size_t width() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }

  double operator[](std::uint32_t local_mask) const { return coeffs_.at(local_mask); }
  double value() const noexcept { return coeffs_[0]; }
  /// Coefficient of the full mixed derivative over all active axes.
  double top() const noexcept { return coeffs_.back(); }
  /// Coefficient for a subset given in ambient axis numbers; must lie inside
  /// the active set.
  double coeff(const IndexSubset& s) const;

  /// Ambient bitmask (bit i-1 for axis i) -> local bitmask.
  std::uint32_t local_mask(std::uint32_t ambient_mask) const;

 private:
  IndexSubset active_;
  std::vector<double> coeffs_;
};

MixedJet jet_add(const MixedJet& a, const MixedJet& b);
MixedJet jet_sub(const MixedJet& a, const MixedJet& b);
/// Leibniz rule over square-free multi-indices: c[S] = sum_{A u B = S} a[A] b[B].
MixedJet jet_mul(const MixedJet& a, const MixedJet& b);
MixedJet jet_div(const MixedJet& a, const MixedJet& b);
MixedJet jet_pow(const MixedJet& a, unsigned exponent);
/// f(v + eps) = sum_{m<=k} f^{(m)}(v) eps^m / m!, exact because eps^{k+1} = 0.
MixedJet jet_unary(UnaryOp op, const MixedJet& a);

inline MixedJet operator+(const MixedJet& a, const MixedJet& b) { return jet_add(a, b); }
inline MixedJet operator-(const MixedJet& a, const MixedJet& b) { return jet_sub(a, b); }
inline MixedJet operator*(const MixedJet& a, const MixedJet& b) { return jet_mul(a, b); }
inline MixedJet operator/(const MixedJet& a, const MixedJet& b) { return jet_div(a, b); }

/// Seed values for every variable x_1..x_n at `point`: active variables
/// become jets, inactive ones stay plain reals.
std::vector<std::variant<double, MixedJet>> jet_lift(std::span<const double> point,
                                                     const IndexSubset& active);

/// Taylor coefficients f^{(m)}(v)/m!, m = 0..order, for a unary operation.
/// Throws DomainError when v lies outside the domain of `op` (including
/// sqrt at 0 when order > 0); evaluators convert it to an EvalError.
std::vector<double> taylor_coefficients(UnaryOp op, double v, int order);

MixedJet eval_jet(const Expr& e, std::span<const double> point, const IndexSubset& active);

/// Reusable evaluator: compiles the expression once and keeps a workspace,
/// so repeated evaluation (quadrature inner loops) does not allocate.
/// Not thread-safe; use one instance per thread.
class JetEvaluator {
 public:
  JetEvaluator(const Expr& e, const IndexSubset& active);

  const IndexSubset& active() const noexcept { return active_; }
  std::size_t width() const noexcept { return width_; }

  /// Coefficients in local-mask order; valid until the next call.
  std::span<const double> evaluate(std::span<const double> point);
  MixedJet evaluate_jet(std::span<const double> point);

 private:
  std::span<double> slot(int i) { return {slots_.data() + static_cast<std::size_t>(i) * width_, width_}; }
  void unary(const Instruction& ins, std::span<const double> a, std::uint32_t dep, std::span<double> out);
  void run(std::span<const double> point, bool check_all);

  Program program_;
  IndexSubset active_;
  int order_;
  std::size_t width_;
  std::vector<int> position_;  // ambient axis (1-based) -> local bit or -1
  std::vector<double> slots_;
  std::vector<std::uint32_t> dep_;  // local axes each slot depends on; 0 = scalar
  std::vector<double> eps_, acc_, tmp_, taylor_;
};

namespace jet_kernels {
// Raw span kernels shared by MixedJet and JetEvaluator. All spans have the
// same power-of-two width. `da` and `db` are dependency masks: a[S] may be
// nonzero only for S inside da (likewise b). Entries of `out` outside
// da | db are set to zero.
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out,
         std::uint32_t da, std::uint32_t db);
/// q = a / b via q[S] = (a[S] - sum_{A strictly inside S} q[A] b[S\A]) / b[0].
void div(std::span<const double> a, std::span<const double> b, std::span<double> out,
         std::uint32_t da, std::uint32_t db);
}  // namespace jet_kernels

}  // namespace mixsmooth
