#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "mixsmooth/gnl.hpp"
#include "mixsmooth/norms.hpp"
#include "mixsmooth/reports.hpp"
#include "mixsmooth/verdict.hpp"

namespace mixsmooth::cli {

using nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.3.0";

/// Finite numbers as numbers, +-inf as "inf"/"-inf", NaN as null.
ordered_json number(double v);
ordered_json box_json(const Rectangle& r);
ordered_json pair_json(const SamplePair& p);

/// One envelope entry. Every entry carries kind, inputs, values, margin,
/// verdict, quadrature and sampler; the last three may be null.
struct Entry {
  std::string kind;
  ordered_json inputs = ordered_json::object();
  ordered_json values = ordered_json::object();
  double margin = 0.0;
  bool has_margin = false;
  Verdict verdict = Verdict::Pass;
  ordered_json quadrature;  // null or {order, cells, error_estimate}
  ordered_json sampler;     // null or {seed, count}
  std::string note;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Entry> parts;

  ordered_json to_json() const;
  /// values["lhs"] when numeric, else 0.
  double lhs_value() const;
};

Entry gnl_entry(const GnlRectangleResult& r, double tol);
Entry inequality_entry(const InequalityReport& r);
Entry check_entry(const std::string& kind, const CheckReport& r);
Entry norm_entry(const NormReport& r);

struct Envelope {
  std::string command;
  ordered_json config = ordered_json::object();
  std::vector<Entry> entries;

  Verdict overall() const;
  ordered_json to_json() const;
};

/// Flat CSV: one row per entry (parts are not expanded). Columns are
/// listed in tools/schemas/csv_columns.json.
std::string entries_csv(const std::vector<Entry>& entries);
/// CSV of a table-valued entry (counterexample, mollifier).
std::string table_csv(const Entry& e);
/// One row per entry, aligned columns.
std::string human_table(const Envelope& env);

}  // namespace mixsmooth::cli
