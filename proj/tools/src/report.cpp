#include "report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace mixsmooth::cli {

namespace {

std::string verdict_str(Verdict v) { return std::string(to_string(v)); }

// Shortest round-trip text, so CSV and JSON agree on every digit.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

ordered_json quadrature_json(int order, int cells, double error_estimate) {
  return {{"order", order}, {"cells", cells}, {"error_estimate", number(error_estimate)}};
}

ordered_json sampler_json(std::uint64_t seed, std::size_t count) {
  return {{"seed", seed}, {"count", count}};
}

}  // namespace

ordered_json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json box_json(const Rectangle& r) {
  ordered_json lo = ordered_json::array(), hi = ordered_json::array();
  for (int i = 0; i < r.dim(); ++i) {
    lo.push_back(r.lo(i));
    hi.push_back(r.hi(i));
  }
  return {{"lo", lo}, {"hi", hi}};
}

ordered_json pair_json(const SamplePair& p) {
  return {{"x", p.x},
          {"x_prime", p.x_prime},
          {"distance", p.distance},
          {"regime", p.regime == PairRegime::Near ? "near" : "far"},
          {"scale", p.scale}};
}

ordered_json Entry::to_json() const {
  ordered_json j;
  j["kind"] = kind;
  j["inputs"] = inputs;
  j["values"] = values;
  j["margin"] = has_margin ? number(margin) : ordered_json(nullptr);
  j["verdict"] = verdict_str(verdict);
  j["quadrature"] = quadrature;
  j["sampler"] = sampler;
  if (!note.empty()) j["note"] = note;
  if (!columns.empty()) {
    ordered_json rows_json = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json r = ordered_json::array();
      for (double v : row) r.push_back(number(v));
      rows_json.push_back(std::move(r));
    }
    j["table"] = {{"columns", columns}, {"rows", rows_json}};
  }
  if (!parts.empty()) {
    ordered_json ps = ordered_json::array();
    for (const auto& p : parts) ps.push_back(p.to_json());
    j["parts"] = ps;
  }
  return j;
}

double Entry::lhs_value() const {
  return values.contains("lhs") && values["lhs"].is_number() ? values["lhs"].get<double>() : 0.0;
}

Entry gnl_entry(const GnlRectangleResult& r, double tol) {
  Entry e;
  e.kind = "gnl";
  e.inputs = {{"n", r.rect.dim()}, {"box", box_json(r.rect)}, {"tol", tol}};
  e.verdict = r.verdict;
  e.note = r.note;
  if (r.breakdown) {
    const auto& b = *r.breakdown;
    e.values["lhs"] = number(b.lhs);
    e.values["rhs"] = number(b.rhs);
    e.values["residual"] = number(b.residual);
    e.values["threshold"] = number(r.threshold);
    e.values["faces"] = b.records.size();
    e.values["evaluations"] = b.evaluations;
    ordered_json recs = ordered_json::array();
    int cells = 0;
    for (const auto& rec : b.records) {
      recs.push_back({{"subset", rec.subset.to_string()},
                      {"value", number(rec.value)},
                      {"error_estimate", number(rec.error_estimate)},
                      {"cells", rec.cells}});
      cells = std::max(cells, rec.cells);
    }
    e.values["records"] = recs;
    e.margin = r.threshold - b.residual;
    e.has_margin = true;
    e.quadrature = quadrature_json(b.order, cells, b.max_error_estimate());
  }
  return e;
}

Entry norm_entry(const NormReport& r) {
  Entry e;
  e.kind = "norm";
  e.inputs = {{"norm", std::string(to_string(r.kind))}, {"p", number(r.p)}, {"box", box_json(r.domain)}};
  if (r.gamma) e.inputs["gamma"] = *r.gamma;
  if (r.axis) e.inputs["axis"] = *r.axis;
  e.values["value"] = number(r.value);
  e.values["sampled_lower_bound"] = r.sampled_lower_bound;
  e.values["converged"] = r.converged;
  if (!r.terms.empty()) {
    ordered_json t = ordered_json::array();
    for (double v : r.terms) t.push_back(number(v));
    e.values["terms"] = t;
  }
  if (r.witness) e.values["witness"] = pair_json(*r.witness);
  e.verdict = r.converged ? Verdict::Pass : Verdict::Inconclusive;
  if (r.sampled_lower_bound) e.note = "sampled lower bound";
  if (!r.converged) e.note = "quadrature did not reach the tolerance";
  if (r.order > 0) e.quadrature = quadrature_json(r.order, r.cells, r.error_estimate);
  if (r.pairs > 0) e.sampler = sampler_json(r.seed, r.pairs);
  return e;
}

Entry inequality_entry(const InequalityReport& r) {
  Entry e;
  e.kind = r.name;
  e.inputs = {{"n", r.n}, {"p", number(r.p)}};
  e.values["lhs"] = number(r.lhs);
  e.values["rhs"] = number(r.rhs);
  e.values["constant"] = number(r.constant);
  e.values["samples"] = r.samples;
  e.values["violations"] = r.violations;
  if (r.margin_near) e.values["margin_near"] = number(*r.margin_near);
  if (r.margin_far) e.values["margin_far"] = number(*r.margin_far);
  if (r.witness) e.values["witness"] = pair_json(*r.witness);
  e.values["reverified"] = r.reverified;
  if (r.norm) {
    e.values["norm"] = number(r.norm->value);
    e.inputs["box"] = box_json(r.norm->domain);
    if (r.norm->axis) e.inputs["axis"] = *r.norm->axis;
    if (r.norm->order > 0) e.quadrature = quadrature_json(r.norm->order, r.norm->cells, r.norm->error_estimate);
  }
  if (r.lhs_norm) {
    e.values["lhs_norm"] = number(r.lhs_norm->value);
    e.values["lhs_norm_error_estimate"] = number(r.lhs_norm->error_estimate);
  }
  e.margin = r.margin;
  e.has_margin = true;
  e.verdict = r.verdict;
  e.note = r.note;
  if (r.samples > 0) e.sampler = sampler_json(r.seed, r.samples);
  for (const auto& part : r.parts) {
    Entry pe = inequality_entry(part);
    pe.quadrature = nullptr;  // shared with the parent
    e.parts.push_back(std::move(pe));
  }
  return e;
}

Entry check_entry(const std::string& kind, const CheckReport& r) {
  Entry e;
  e.kind = kind;
  e.inputs = {{"name", r.name}};
  for (const auto& [k, v] : r.values) e.values[k] = number(v);
  e.verdict = r.verdict;
  e.note = r.note;
  e.columns = r.columns;
  e.rows = r.rows;
  return e;
}

Verdict Envelope::overall() const {
  Verdict v = Verdict::Pass;
  for (const auto& e : entries) v = combine(v, e.verdict);
  return v;
}

ordered_json Envelope::to_json() const {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["config"] = config;
  ordered_json es = ordered_json::array();
  for (const auto& e : entries) es.push_back(e.to_json());
  j["entries"] = es;
  j["overall"] = verdict_str(overall());
  return j;
}

std::string entries_csv(const std::vector<Entry>& entries) {
  std::ostringstream os;
  os << "index,kind,n,p,value,margin,verdict,order,cells,error_estimate,seed,count\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    auto num_or_empty = [](const ordered_json& j, const char* key) -> std::string {
      if (!j.is_object() || !j.contains(key)) return "";
      const auto& v = j[key];
      if (v.is_number_float()) return fmt(v.get<double>());
      if (v.is_number()) return v.dump();
      if (v.is_string()) return v.get<std::string>();
      return "";
    };
    std::string value = num_or_empty(e.values, "value");
    if (value.empty()) value = num_or_empty(e.values, "residual");
    if (value.empty()) value = num_or_empty(e.values, "lhs");
    os << i << ',' << csv_field(e.kind) << ',' << num_or_empty(e.inputs, "n") << ','
       << num_or_empty(e.inputs, "p") << ',' << value << ','
       << (e.has_margin ? fmt(e.margin) : std::string()) << ',' << verdict_str(e.verdict) << ','
       << num_or_empty(e.quadrature, "order") << ',' << num_or_empty(e.quadrature, "cells") << ','
       << num_or_empty(e.quadrature, "error_estimate") << ',' << num_or_empty(e.sampler, "seed") << ','
       << num_or_empty(e.sampler, "count") << '\n';
  }
  return os.str();
}

std::string table_csv(const Entry& e) {
  std::ostringstream os;
  for (std::size_t c = 0; c < e.columns.size(); ++c) os << (c ? "," : "") << e.columns[c];
  os << '\n';
  for (const auto& row : e.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << fmt(row[c]);
    os << '\n';
  }
  return os.str();
}

std::string human_table(const Envelope& env) {
  auto shortfmt = [](double v) {
    std::ostringstream o;
    o << std::setprecision(6) << v;
    return o.str();
  };
  auto row = [](std::ostream& os, const std::string& idx, const std::string& kind, const std::string& p,
                const std::string& value, const std::string& margin, const std::string& verdict) {
    os << std::left << std::setw(4) << idx << std::setw(16) << kind << std::setw(8) << p << std::setw(14) << value
       << std::setw(14) << margin << verdict;
  };
  std::ostringstream os;
  os << env.command << '\n';
  row(os, "#", "kind", "p", "value", "margin", "verdict");
  os << '\n';
  for (std::size_t i = 0; i < env.entries.size(); ++i) {
    const auto& e = env.entries[i];
    std::string p, value;
    if (e.inputs.contains("p"))
      p = e.inputs["p"].is_string() ? e.inputs["p"].get<std::string>() : shortfmt(e.inputs["p"].get<double>());
    for (const char* key : {"value", "residual", "lhs"}) {
      if (e.values.contains(key) && e.values[key].is_number()) {
        value = shortfmt(e.values[key].get<double>());
        break;
      }
    }
    std::string kind = e.kind;
    if (e.inputs.contains("norm")) kind += ":" + e.inputs["norm"].get<std::string>();
    row(os, std::to_string(i), kind, p, value, e.has_margin ? shortfmt(e.margin) : "-", verdict_str(e.verdict));
    if (!e.note.empty()) os << "  (" << e.note << ')';
    os << '\n';
    for (const auto& part : e.parts) {
      row(os, "", "  " + part.kind, "", shortfmt(part.lhs_value()), shortfmt(part.margin), verdict_str(part.verdict));
      os << '\n';
    }
  }
  os << "overall: " << verdict_str(env.overall()) << '\n';
  return os.str();
}

}  // namespace mixsmooth::cli
