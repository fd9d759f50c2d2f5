#include "mixsmooth/mixed_jet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace mixsmooth {

namespace {

// Unordered splits {A, s^A} with A < s^A for every s of a 2^k jet, in the
// order the generic loop visits them.
struct SplitTable {
  std::vector<std::uint32_t> begin;  // size 2^k + 1
  std::vector<std::uint8_t> lo, hi;
};

constexpr int kSplitTableMax = 6;

const SplitTable& split_table(int k) {
  static const auto tables = [] {
    std::array<SplitTable, kSplitTableMax + 1> t;
    for (int kk = 0; kk <= kSplitTableMax; ++kk) {
      auto& tab = t[static_cast<std::size_t>(kk)];
      const std::uint32_t w = 1u << kk;
      for (std::uint32_t s = 0; s < w; ++s) {
        tab.begin.push_back(static_cast<std::uint32_t>(tab.lo.size()));
        for (std::uint32_t A = s;; A = (A - 1) & s) {
          const std::uint32_t B = s ^ A;
          if (A < B) {
            tab.lo.push_back(static_cast<std::uint8_t>(A));
            tab.hi.push_back(static_cast<std::uint8_t>(B));
          }
          if (A == 0) break;
        }
      }
      tab.begin.push_back(static_cast<std::uint32_t>(tab.lo.size()));
    }
    return t;
  }();
  return tables[static_cast<std::size_t>(k)];
}

// Set partitions of every s of a 2^k jet, flattened as (m, block_1..block_m).
struct PartitionTable {
  std::vector<std::uint32_t> begin;  // size 2^k + 1
  std::vector<std::uint8_t> data;
};

void append_partitions(std::uint32_t rest, std::vector<std::uint8_t>& blocks,
                       std::vector<std::uint8_t>& data) {
  if (rest == 0) {
    data.push_back(static_cast<std::uint8_t>(blocks.size()));
    data.insert(data.end(), blocks.begin(), blocks.end());
    return;
  }
  const std::uint32_t low = rest & (~rest + 1);
  const std::uint32_t others = rest ^ low;
  for (std::uint32_t T = others;; T = (T - 1) & others) {
    blocks.push_back(static_cast<std::uint8_t>(low | T));
    append_partitions(others ^ T, blocks, data);
    blocks.pop_back();
    if (T == 0) break;
  }
}

const PartitionTable& partition_table(int k) {
  static const auto tables = [] {
    std::array<PartitionTable, kSplitTableMax + 1> t;
    for (int kk = 0; kk <= kSplitTableMax; ++kk) {
      auto& tab = t[static_cast<std::size_t>(kk)];
      std::vector<std::uint8_t> blocks;
      for (std::uint32_t s = 0; s < (1u << kk); ++s) {
        tab.begin.push_back(static_cast<std::uint32_t>(tab.data.size()));
        if (s != 0) append_partitions(s, blocks, tab.data);
      }
      tab.begin.push_back(static_cast<std::uint32_t>(tab.data.size()));
    }
    return t;
  }();
  return tables[static_cast<std::size_t>(k)];
}

}  // namespace

namespace jet_kernels {

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out,
         std::uint32_t da, std::uint32_t db) {
  const std::uint32_t w = static_cast<std::uint32_t>(out.size());
  const std::uint32_t d = da | db;
  const int k = std::countr_zero(w);
  const SplitTable* table = k <= kSplitTableMax ? &split_table(k) : nullptr;
  for (std::uint32_t s = 0; s < w; ++s) {
    if (s & ~d) {
      out[s] = 0.0;
      continue;
    }
    // Each unordered split {A, S\A} contributes a[A]b[S\A] + a[S\A]b[A];
    // grouping the two products makes the result bitwise symmetric in a, b.
    double sum = 0.0;
    if (!(s & ~da) && !(s & ~db)) {
      // Every split is live; same terms in the same order as below.
      if (table) {
        if (s == 0) sum = a[0] * b[0];
        for (std::uint32_t t = table->begin[s]; t < table->begin[s + 1]; ++t)
          sum += a[table->lo[t]] * b[table->hi[t]] + a[table->hi[t]] * b[table->lo[t]];
        out[s] = sum;
        continue;
      }
      for (std::uint32_t A = s;; A = (A - 1) & s) {
        const std::uint32_t B = s ^ A;
        if (A < B) sum += a[A] * b[B] + a[B] * b[A];
        else if (s == 0) sum = a[0] * b[0];
        if (A == 0) break;
      }
      out[s] = sum;
      continue;
    }
    for (std::uint32_t A = s;; A = (A - 1) & s) {
      const std::uint32_t B = s ^ A;
      if (A < B) {
        const bool ab = !(A & ~da) && !(B & ~db);
        const bool ba = !(B & ~da) && !(A & ~db);
        if (ab && ba) sum += a[A] * b[B] + a[B] * b[A];
        else if (ab) sum += a[A] * b[B];
        else if (ba) sum += a[B] * b[A];
      } else if (s == 0) {
        sum = a[0] * b[0];
      }
      if (A == 0) break;
    }
    out[s] = sum;
  }
}

void div(std::span<const double> a, std::span<const double> b, std::span<double> out,
         std::uint32_t da, std::uint32_t db) {
  const std::uint32_t w = static_cast<std::uint32_t>(out.size());
  const std::uint32_t d = da | db;
  const double b0 = b[0];
  out[0] = a[0] / b0;
  for (std::uint32_t s = 1; s < w; ++s) {
    if (s & ~d) {
      out[s] = 0.0;
      continue;
    }
    double sum = a[s];
    for (std::uint32_t A = (s - 1) & s;; A = (A - 1) & s) {
      if (!((s ^ A) & ~db)) sum -= out[A] * b[s ^ A];
      if (A == 0) break;
    }
    out[s] = sum / b0;
  }
}

}  // namespace jet_kernels

namespace {

void require_same(const MixedJet& a, const MixedJet& b) {
  if (!(a.active() == b.active())) throw DomainError("mixed jet: active sets differ");
}

// sum_{m<=k} c_m eps^m with k = popcount(dep): higher powers of eps vanish
// because eps only involves the nilpotent directions in `dep`.
void horner(std::span<const double> c, std::span<const double> eps, std::uint32_t dep,
            std::span<double> acc, std::span<double> tmp) {
  std::fill(acc.begin(), acc.end(), 0.0);
  const int k = std::min(static_cast<int>(c.size()) - 1, std::popcount(dep));
  acc[0] = c[static_cast<std::size_t>(k)];
  std::uint32_t acc_dep = 0;
  for (int m = k - 1; m >= 0; --m) {
    jet_kernels::mul(acc, eps, tmp, acc_dep, dep);
    std::copy(tmp.begin(), tmp.end(), acc.begin());
    acc[0] += c[static_cast<std::size_t>(m)];
    acc_dep = dep;
  }
}

// f(a0 + eps) from Taylor coefficients c. For small jets this sums
// f^(m)(a0) * prod eps[B] over the set partitions {B_1..B_m} of each
// coefficient's index set, which needs far fewer products than Horner.
void compose(std::span<const double> c, std::span<const double> eps, std::uint32_t dep,
             std::span<double> out, std::span<double> tmp) {
  const int k = std::countr_zero(static_cast<std::uint32_t>(out.size()));
  if (k > kSplitTableMax) {
    horner(c, eps, dep, out, tmp);
    return;
  }
  const auto& tab = partition_table(k);
  std::array<double, kSplitTableMax + 1> deriv{};
  double fact = 1.0;
  for (std::size_t m = 0; m < c.size() && m <= static_cast<std::size_t>(kSplitTableMax); ++m) {
    if (m > 0) fact *= static_cast<double>(m);
    deriv[m] = c[m] * fact;
  }
  out[0] = c[0];
  for (std::uint32_t s = 1; s < out.size(); ++s) {
    if (s & ~dep) {
      out[s] = 0.0;
      continue;
    }
    double sum = 0.0;
    for (std::uint32_t t = tab.begin[s]; t < tab.begin[s + 1];) {
      const std::uint8_t m = tab.data[t++];
      double prod = deriv[m];
      for (std::uint8_t b = 0; b < m; ++b) prod *= eps[tab.data[t++]];
      sum += prod;
    }
    out[s] = sum;
  }
}

std::uint32_t full_mask(const MixedJet& j) { return static_cast<std::uint32_t>(j.width() - 1); }

}  // namespace

MixedJet::MixedJet(IndexSubset active)
    : active_(std::move(active)), coeffs_(std::size_t{1} << active_.size(), 0.0) {}

MixedJet::MixedJet(IndexSubset active, std::vector<double> coeffs)
    : active_(std::move(active)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != (std::size_t{1} << active_.size()))
    throw DomainError("mixed jet: coefficient vector must have length 2^k");
}

MixedJet MixedJet::constant(const IndexSubset& active, double c) {
  MixedJet j(active);
  j.coeffs_[0] = c;
  return j;
}

MixedJet MixedJet::variable(const IndexSubset& active, int axis, double value) {
  MixedJet j(active);
  j.coeffs_[0] = value;
  const int p = active.position(axis);
  if (p >= 0) j.coeffs_[std::size_t{1} << p] = 1.0;
  return j;
}

std::uint32_t MixedJet::local_mask(std::uint32_t ambient_mask) const {
  std::uint32_t local = 0;
  const auto idx = active_.indices();
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const std::uint32_t bit = std::uint32_t{1} << (idx[p] - 1);
    if (ambient_mask & bit) {
      local |= std::uint32_t{1} << p;
      ambient_mask &= ~bit;
    }
  }
  if (ambient_mask != 0) throw DomainError("mixed jet: subset is not inside the active set");
  return local;
}

double MixedJet::coeff(const IndexSubset& s) const { return coeffs_[local_mask(s.mask())]; }

MixedJet jet_add(const MixedJet& a, const MixedJet& b) {
  require_same(a, b);
  MixedJet r(a.active());
  for (std::size_t i = 0; i < r.width(); ++i) r.coeffs()[i] = a.coeffs()[i] + b.coeffs()[i];
  return r;
}

MixedJet jet_sub(const MixedJet& a, const MixedJet& b) {
  require_same(a, b);
  MixedJet r(a.active());
  for (std::size_t i = 0; i < r.width(); ++i) r.coeffs()[i] = a.coeffs()[i] - b.coeffs()[i];
  return r;
}

MixedJet jet_mul(const MixedJet& a, const MixedJet& b) {
  require_same(a, b);
  MixedJet r(a.active());
  jet_kernels::mul(a.coeffs(), b.coeffs(), r.coeffs(), full_mask(a), full_mask(b));
  return r;
}

MixedJet jet_div(const MixedJet& a, const MixedJet& b) {
  require_same(a, b);
  if (b.value() == 0.0) throw DomainError("mixed jet: division by a jet with zero value");
  MixedJet r(a.active());
  jet_kernels::div(a.coeffs(), b.coeffs(), r.coeffs(), full_mask(a), full_mask(b));
  return r;
}

MixedJet jet_pow(const MixedJet& a, unsigned exponent) {
  MixedJet r = MixedJet::constant(a.active(), 1.0);
  MixedJet base = a;
  for (unsigned k = exponent; k; k >>= 1) {
    if (k & 1u) r = jet_mul(r, base);
    if (k > 1) base = jet_mul(base, base);
  }
  return r;
}

namespace {

[[gnu::noinline]] double plain_sin(double v) { return std::sin(v); }
[[gnu::noinline]] double plain_cos(double v) { return std::cos(v); }

}  // namespace

std::vector<double> taylor_coefficients(UnaryOp op, double v, int order) {
  if (order < 0) throw DomainError("taylor_coefficients: order must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  auto at = [&](int m) -> double& { return c[static_cast<std::size_t>(m)]; };
  switch (op) {
    case UnaryOp::Neg:
      at(0) = -v;
      if (order >= 1) at(1) = -1.0;
      break;
    case UnaryOp::Exp: {
      const double ev = std::exp(v);
      at(0) = ev;
      double fact = 1.0;
      for (int m = 1; m <= order; ++m) {
        fact *= m;
        at(m) = ev / fact;
      }
      break;
    }
    case UnaryOp::Sin:
    case UnaryOp::Cos: {
      // Separate calls: a fused sincos may differ from std::sin in the last bit,
      // and the value coefficient must match plain evaluation exactly.
      const double s = plain_sin(v), co = plain_cos(v);
      // Derivative cycles: sin -> cos -> -sin -> -cos; cos -> -sin -> -cos -> sin.
      const double cyc_sin[4] = {s, co, -s, -co};
      const double cyc_cos[4] = {co, -s, -co, s};
      const double* cyc = op == UnaryOp::Sin ? cyc_sin : cyc_cos;
      double fact = 1.0;
      for (int m = 0; m <= order; ++m) {
        if (m > 0) fact *= m;
        at(m) = cyc[m % 4] / fact;
      }
      break;
    }
    case UnaryOp::Log: {
      if (!(v > 0.0)) throw DomainError("log of nonpositive argument");
      at(0) = std::log(v);
      double vp = 1.0;
      for (int m = 1; m <= order; ++m) {
        vp *= v;
        at(m) = ((m % 2) ? 1.0 : -1.0) / (m * vp);
      }
      break;
    }
    case UnaryOp::Sqrt: {
      if (!(v >= 0.0)) throw DomainError("sqrt of negative argument");
      if (v == 0.0 && order > 0) throw DomainError("sqrt is not differentiable at 0");
      at(0) = std::sqrt(v);
      for (int m = 1; m <= order; ++m) at(m) = at(m - 1) * (0.5 - (m - 1)) / (m * v);
      break;
    }
    case UnaryOp::Tanh: {
      // t' = 1 - t^2 as a power-series recurrence.
      at(0) = std::tanh(v);
      for (int m = 0; m < order; ++m) {
        double sq = 0.0;
        for (int i = 0; i <= m; ++i) sq += at(i) * at(m - i);
        at(m + 1) = ((m == 0 ? 1.0 : 0.0) - sq) / (m + 1);
      }
      break;
    }
  }
  return c;
}

MixedJet jet_unary(UnaryOp op, const MixedJet& a) {
  if (op == UnaryOp::Neg) {
    MixedJet r(a.active());
    for (std::size_t i = 0; i < r.width(); ++i) r.coeffs()[i] = -a.coeffs()[i];
    return r;
  }
  const auto c = taylor_coefficients(op, a.value(), a.order());
  std::vector<double> eps(a.coeffs().begin(), a.coeffs().end());
  eps[0] = 0.0;
  MixedJet r(a.active());
  std::vector<double> tmp(r.width());
  compose(c, eps, full_mask(a), r.coeffs(), tmp);
  return r;
}

std::vector<std::variant<double, MixedJet>> jet_lift(std::span<const double> point,
                                                     const IndexSubset& active) {
  if (active.ambient_dim() > static_cast<int>(point.size()))
    throw DomainError("jet_lift: active axes exceed point dimension");
  std::vector<std::variant<double, MixedJet>> out;
  out.reserve(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const int axis = static_cast<int>(i) + 1;
    if (active.contains(axis)) out.emplace_back(MixedJet::variable(active, axis, point[i]));
    else out.emplace_back(point[i]);
  }
  return out;
}

MixedJet eval_jet(const Expr& e, std::span<const double> point, const IndexSubset& active) {
  JetEvaluator ev(e, active);
  return ev.evaluate_jet(point);
}

JetEvaluator::JetEvaluator(const Expr& e, const IndexSubset& active)
    : program_(e),
      active_(active),
      order_(active.size()),
      width_(std::size_t{1} << active.size()),
      position_(static_cast<std::size_t>(active.ambient_dim()) + 1, -1),
      slots_(program_.code().size() * width_, 0.0),
      dep_(program_.code().size(), 0),
      eps_(width_),
      acc_(width_),
      tmp_(width_) {
  const auto idx = active.indices();
  for (std::size_t p = 0; p < idx.size(); ++p) position_[static_cast<std::size_t>(idx[p])] = static_cast<int>(p);
}

void JetEvaluator::unary(const Instruction& ins, std::span<const double> a, std::uint32_t dep,
                         std::span<double> out) {
  if (ins.uop == UnaryOp::Neg) {
    if (!dep) out[0] = -a[0];
    else for (std::size_t i = 0; i < width_; ++i) out[i] = -a[i];
    return;
  }
  if (!dep) {
    const double v = a[0];
    double r = 0.0;
    switch (ins.uop) {
      case UnaryOp::Sin: r = std::sin(v); break;
      case UnaryOp::Cos: r = std::cos(v); break;
      case UnaryOp::Exp: r = std::exp(v); break;
      case UnaryOp::Log:
        if (!(v > 0.0)) program_.fail(ins, "log of nonpositive argument");
        r = std::log(v);
        break;
      case UnaryOp::Sqrt:
        if (!(v >= 0.0)) program_.fail(ins, "sqrt of negative argument");
        r = std::sqrt(v);
        break;
      case UnaryOp::Tanh: r = std::tanh(v); break;
      case UnaryOp::Neg: break;
    }
    out[0] = r;
    return;
  }
  try {
    taylor_ = taylor_coefficients(ins.uop, a[0], std::popcount(dep));
  } catch (const DomainError& err) {
    program_.fail(ins, err.what());
  }
  std::copy(a.begin(), a.end(), eps_.begin());
  eps_[0] = 0.0;
  compose(taylor_, eps_, dep, out, tmp_);
}

void JetEvaluator::run(std::span<const double> point, bool check_all) {
  const auto code = program_.code();
  for (std::size_t i = 0; i < code.size(); ++i) {
    const Instruction& ins = code[i];
    auto out = slot(static_cast<int>(i));
    std::uint32_t dep = 0;
    switch (ins.kind) {
      case Expr::Kind::Constant:
        out[0] = ins.value;
        break;
      case Expr::Kind::Variable: {
        const auto v = static_cast<std::size_t>(ins.var);
        if (v > point.size())
          throw DomainError("eval_jet: point has dimension " + std::to_string(point.size()) +
                            " but expression uses x" + std::to_string(ins.var));
        const int p = v < position_.size() ? position_[v] : -1;
        out[0] = point[v - 1];
        if (p >= 0) {
          std::fill(out.begin() + 1, out.end(), 0.0);
          out[std::size_t{1} << p] = 1.0;
          dep = std::uint32_t{1} << p;
        }
        break;
      }
      case Expr::Kind::Unary:
        dep = dep_[static_cast<std::size_t>(ins.a)];
        unary(ins, slot(ins.a), dep, out);
        break;
      case Expr::Kind::Binary: {
        const auto a = slot(ins.a);
        const std::uint32_t da = dep_[static_cast<std::size_t>(ins.a)];
        if (ins.bop == BinaryOp::Pow) {
          dep = da;
          if (!da) {
            double r = 1.0, base = a[0];
            for (unsigned k = ins.exponent; k; k >>= 1) {
              if (k & 1u) r *= base;
              if (k > 1) base *= base;
            }
            out[0] = r;
          } else {
            std::fill(acc_.begin(), acc_.end(), 0.0);
            acc_[0] = 1.0;
            std::uint32_t acc_dep = 0;
            std::copy(a.begin(), a.end(), eps_.begin());
            for (unsigned k = ins.exponent; k; k >>= 1) {
              if (k & 1u) {
                jet_kernels::mul(acc_, eps_, tmp_, acc_dep, da);
                std::swap(acc_, tmp_);
                acc_dep = da;
              }
              if (k > 1) {
                jet_kernels::mul(eps_, eps_, tmp_, da, da);
                std::swap(eps_, tmp_);
              }
            }
            std::copy(acc_.begin(), acc_.end(), out.begin());
          }
          break;
        }
        const auto b = slot(ins.b);
        const std::uint32_t db = dep_[static_cast<std::size_t>(ins.b)];
        dep = da | db;
        switch (ins.bop) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
            if (!dep) {
              out[0] = ins.bop == BinaryOp::Add ? a[0] + b[0] : a[0] - b[0];
            } else {
              for (std::size_t j = 0; j < width_; ++j) {
                const double x = !da && j ? 0.0 : a[j];
                const double y = !db && j ? 0.0 : b[j];
                out[j] = ins.bop == BinaryOp::Add ? x + y : x - y;
              }
            }
            break;
          case BinaryOp::Mul:
            if (!dep) out[0] = a[0] * b[0];
            else if (!da) for (std::size_t j = 0; j < width_; ++j) out[j] = a[0] * b[j];
            else if (!db) for (std::size_t j = 0; j < width_; ++j) out[j] = a[j] * b[0];
            else jet_kernels::mul(a, b, out, da, db);
            break;
          case BinaryOp::Div:
            if (b[0] == 0.0) program_.fail(ins, "division by zero");
            if (!dep) out[0] = a[0] / b[0];
            else if (!db) for (std::size_t j = 0; j < width_; ++j) out[j] = a[j] / b[0];
            else if (!da) {
              std::fill(acc_.begin(), acc_.end(), 0.0);
              acc_[0] = a[0];
              jet_kernels::div(acc_, b, out, 0, db);
            } else {
              jet_kernels::div(a, b, out, da, db);
            }
            break;
          case BinaryOp::Pow: break;
        }
        break;
      }
    }
    dep_[i] = dep;
    if (!std::isfinite(out[0])) program_.fail(ins, "non-finite value");
    if (check_all && dep) {
      for (double c : out)
        if (!std::isfinite(c)) program_.fail(ins, "non-finite value");
    }
  }
}

std::span<const double> JetEvaluator::evaluate(std::span<const double> point) {
  // Values are checked at every node; derivative coefficients only at the
  // end, since a non-finite coefficient cannot turn finite again except
  // through 0 * inf = NaN. On failure, rerun with full checks to name the node.
  run(point, false);
  const auto last = program_.code().size() - 1;
  auto result = slot(static_cast<int>(last));
  if (!dep_[last]) {
    std::fill(result.begin() + 1, result.end(), 0.0);
  } else {
    for (double c : result) {
      if (!std::isfinite(c)) {
        run(point, true);
        program_.fail(program_.code()[last], "non-finite derivative");
      }
    }
  }
  return result;
}

MixedJet JetEvaluator::evaluate_jet(std::span<const double> point) {
  const auto c = evaluate(point);
  return MixedJet(active_, std::vector<double>(c.begin(), c.end()));
}

}  // namespace mixsmooth
