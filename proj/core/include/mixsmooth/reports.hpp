#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixsmooth/norms.hpp"
#include "mixsmooth/sampling.hpp"
#include "mixsmooth/verdict.hpp"

namespace mixsmooth {

/// Outcome of checking lhs <= rhs where lhs is sampled (a lower bound of
/// the true left side) and rhs = constant * norm uses the certified lower
/// end of the norm. A PASS can therefore only under-report violations.
struct InequalityReport {
  std::string name;
  int n = 0;
  double p = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  /// min over samples of (rhs - lhs); for pair checks rhs depends on the pair.
  double margin = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string note;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::uint64_t seed = 0;
  std::optional<SamplePair> witness;
  std::optional<NormReport> norm;      // provenance of the norm on the right
  std::optional<NormReport> lhs_norm;  // when the left side is itself a norm
  /// Worst margins split by |x - x'| <= 1 and > 1.
  std::optional<double> margin_near;
  std::optional<double> margin_far;
  /// Set when a FAIL was re-checked with a doubled quadrature order.
  bool reverified = false;
  std::vector<InequalityReport> parts;
};

/// Generic named-values-plus-table result for studies without a single
/// inequality (limits, mollification, counterexample).
struct CheckReport {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::string note;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::optional<double> value(const std::string& key) const {
    for (const auto& [k, v] : values)
      if (k == key) return v;
    return std::nullopt;
  }
};

}  // namespace mixsmooth
