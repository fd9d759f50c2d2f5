#include "app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mixsmooth/counterexample.hpp"
#include "mixsmooth/embedding.hpp"
#include "mixsmooth/errors.hpp"
#include "mixsmooth/gallery.hpp"
#include "mixsmooth/gnl.hpp"
#include "mixsmooth/mollifier.hpp"
#include "mixsmooth/norms.hpp"
#include "report.hpp"
#include "schema_check.hpp"

namespace mixsmooth::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string fn;
  std::string fn_file;
  int n = 0;
  std::string p_list;
  std::string boxes = "unit";
  std::vector<std::string> box;
  std::optional<double> tol;
  int order = 12;
  int cells = 2;
  std::uint64_t seed = 1;
  std::size_t pairs = 2000;
  std::string format;
  std::string output;
  std::string kinds;
  std::string radii;
  int k = 1;
  double gamma = 0.5;
  bool list = false;
};

struct Function {
  Expr expr = Expr::constant(0.0);
  std::string text;
  int n = 1;
  std::optional<GalleryFunction> gallery;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  if (s == "inf" || s == "+inf") return kInf;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw UsageError("malformed " + what + ": '" + raw + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  if (trim(s).empty()) throw UsageError("empty " + what);
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_number(item, what));
  return out;
}

std::vector<double> parse_p(const std::string& s, const std::string& fallback) {
  auto ps = parse_list(s.empty() ? fallback : s, "p list");
  for (double p : ps)
    if (!(p >= 1.0)) throw UsageError("p must be ≥ 1");
  return ps;
}

Rectangle parse_box(const std::string& s, int n) {
  const auto v = parse_list(s, "box");
  if (v.size() != static_cast<std::size_t>(2 * n))
    throw UsageError("box '" + s + "' needs " + std::to_string(2 * n) + " numbers (lo,hi per axis)");
  std::vector<double> lo, hi;
  for (int i = 0; i < n; ++i) {
    lo.push_back(v[static_cast<std::size_t>(2 * i)]);
    hi.push_back(v[static_cast<std::size_t>(2 * i + 1)]);
    if (!(std::isfinite(lo.back()) && std::isfinite(hi.back()) && lo.back() < hi.back()))
      throw UsageError("box '" + s + "': need finite lo < hi on every axis");
  }
  return Rectangle(lo, hi);
}

Function load_function(const RunConfig& c) {
  if (!c.fn.empty() && !c.fn_file.empty()) throw UsageError("give either --fn or --fn-file, not both");
  if (c.n < 0 || c.n > kMaxDimension)
    throw UsageError("--n must lie in 1.." + std::to_string(kMaxDimension));
  Function f;
  std::string text = c.fn;
  std::optional<int> arity;
  if (!c.fn_file.empty()) {
    std::ifstream in(c.fn_file, std::ios::binary);
    if (!in) throw IoError("cannot read function file " + c.fn_file);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      auto src = read_function_source(ss.str());
      text = src.text;
      arity = src.arity;
    } catch (const std::exception& e) {
      throw UsageError(c.fn_file + ": " + e.what());
    }
  } else if (text.empty()) {
    throw UsageError("a function is required (--fn or --fn-file)");
  }
  if (is_gallery_id(trim(text))) {
    auto g = gallery_by_id(trim(text));
    if (c.n != 0 && c.n != g.dim)
      throw UsageError(g.id + " has dimension " + std::to_string(g.dim) + ", not " + std::to_string(c.n));
    f.expr = g.expr;
    f.text = g.id;
    f.n = g.dim;
    f.gallery = std::move(g);
    return f;
  }
  const int declared = c.n != 0 ? c.n : arity.value_or(kMaxDimension);
  if (c.n != 0 && arity && *arity != c.n)
    throw UsageError("function file declares arity " + std::to_string(*arity) + " but --n is " +
                     std::to_string(c.n));
  auto parsed = parse(text, declared);
  if (auto* d = std::get_if<ParseDiagnostic>(&parsed)) {
    std::string msg = "parse error at column " + std::to_string(d->offset) + ": " + d->message;
    if (!d->expected.empty()) msg += " (expected " + d->expected + ")";
    throw UsageError(msg);
  }
  f.expr = std::get<Expr>(parsed);
  f.text = text;
  f.n = c.n != 0 ? c.n : arity.value_or(std::max(1, free_arity(f.expr)));
  return f;
}

// Domain for checks over R^n: explicit box, then the gallery support box,
// then [-1, 1]^n.
Rectangle domain_for(const RunConfig& c, const Function& f, bool* fallback = nullptr) {
  if (c.box.size() > 1) throw UsageError("this command takes at most one --box");
  if (!c.box.empty()) return parse_box(c.box.front(), f.n);
  if (f.gallery && f.gallery->support) return *f.gallery->support;
  if (fallback) *fallback = true;
  return Rectangle::cube(f.n, -1.0, 1.0);
}

ordered_json p_json(const std::vector<double>& ps) {
  ordered_json a = ordered_json::array();
  for (double p : ps) a.push_back(number(p));
  return a;
}

ordered_json config_json(const RunConfig& c, const Function* f) {
  ordered_json j;
  j["fn"] = f ? f->text : c.fn;
  if (!c.fn_file.empty()) j["fn_file"] = c.fn_file;
  j["n"] = f ? f->n : c.n;
  if (!c.p_list.empty()) j["p"] = c.p_list;
  if (c.command == "verify-gnl") j["boxes"] = c.boxes;
  j["box"] = c.box;
  j["tol"] = c.tol ? number(*c.tol) : ordered_json(nullptr);
  j["order"] = c.order;
  j["cells"] = c.cells;
  j["seed"] = c.seed;
  j["pairs"] = c.pairs;
  if (!c.kinds.empty()) j["kinds"] = c.kinds;
  if (!c.radii.empty()) j["radii"] = c.radii;
  j["k"] = c.k;
  j["gamma"] = c.gamma;
  j["format"] = c.format;
  return j;
}

EmbeddingSettings embedding_settings(const RunConfig& c) {
  EmbeddingSettings s;
  s.norm.order = c.order;
  s.norm.start_cells = c.cells;
  if (c.tol) s.norm.tol = *c.tol;
  return s;
}

NormSettings norm_settings(const RunConfig& c) {
  NormSettings s;
  s.order = c.order;
  s.start_cells = c.cells;
  if (c.tol) s.tol = *c.tol;
  return s;
}

void check_common(const RunConfig& c) {
  if (c.tol && !(*c.tol > 0.0)) throw UsageError("--tol must be > 0");
  if (c.order < 1 || c.order > 64) throw UsageError("--order must lie in 1..64");
  if (c.cells < 1) throw UsageError("--cells must be >= 1");
}

Envelope cmd_verify_gnl(const RunConfig& c) {
  check_common(c);
  const Function f = load_function(c);
  const double tol = c.tol.value_or(1e-8);
  std::vector<Rectangle> rects;
  if (c.boxes == "unit") {
    if (!c.box.empty()) throw UsageError("--box is not used with --boxes unit");
    rects.push_back(Rectangle::unit(f.n));
  } else if (c.boxes.rfind("random:", 0) == 0) {
    const double k = parse_number(c.boxes.substr(7), "random box count");
    if (!(k >= 1.0 && k <= 100000.0 && k == std::floor(k))) throw UsageError("random:K needs an integer K >= 1");
    std::optional<Rectangle> bounds;
    if (c.box.size() > 1) throw UsageError("random boxes take at most one --box (the bounding box)");
    if (!c.box.empty()) bounds = parse_box(c.box.front(), f.n);
    rects = random_boxes(f.n, static_cast<int>(k), c.seed, bounds);
  } else if (c.boxes == "explicit") {
    if (c.box.empty()) throw UsageError("--boxes explicit needs at least one --box");
    for (const auto& b : c.box) rects.push_back(parse_box(b, f.n));
  } else {
    throw UsageError("--boxes must be unit, random:K or explicit");
  }
  GnlSettings gs;
  gs.refine.order = c.order;
  gs.refine_tol = std::min(gs.refine_tol, tol / 100.0);

  Envelope env;
  env.config = config_json(c, &f);
  env.config["tol"] = tol;
  const auto report = gnl_verify(f.expr, rects, tol, gs);
  for (const auto& r : report.rectangles) env.entries.push_back(gnl_entry(r, tol));
  return env;
}

Envelope cmd_check_embedding(const RunConfig& c) {
  check_common(c);
  const Function f = load_function(c);
  const auto ps = parse_p(c.p_list, "1,2,4");
  for (double p : ps)
    if (std::isinf(p)) throw UsageError("check-embedding needs finite p (p = inf is available in norms)");
  if (c.k < 1 || c.k > 3) throw UsageError("--k must be 1, 2 or 3");
  if (c.pairs < 1) throw UsageError("--pairs must be >= 1");
  bool fallback = false;
  const Rectangle dom = domain_for(c, f, &fallback);
  const PairSampler sampler(dom, c.seed, c.pairs);
  const auto s = embedding_settings(c);

  Envelope env;
  env.config = config_json(c, &f);
  env.config["p"] = p_json(ps);
  env.config["domain"] = box_json(dom);
  for (double p : ps) {
    auto pw = inequality_entry(check_pointwise(f.expr, p, sampler, s));
    auto hn = inequality_entry(check_holder_norm(f.expr, p, sampler, s));
    if (fallback) {
      const char* why = "no --box given; norms taken over [-1, 1]^n";
      pw.note = pw.note.empty() ? why : pw.note + "; " + why;
      hn.note = hn.note.empty() ? why : hn.note + "; " + why;
    }
    env.entries.push_back(std::move(pw));
    env.entries.push_back(std::move(hn));
    if (c.k >= 2) env.entries.push_back(inequality_entry(corollary2_check(f.expr, c.k, p, sampler, s)));
  }
  const double seq[] = {1.1, 1.01, 1.001, 1.0001};
  auto lim = check_entry("p_to_1_limit", check_p_to_1_limit(f.n, 1.0, seq, 1e-2));
  lim.inputs["n"] = f.n;
  lim.inputs["d"] = 1.0;
  env.entries.push_back(std::move(lim));
  return env;
}

Envelope cmd_check_trace(const RunConfig& c) {
  check_common(c);
  const Function f = load_function(c);
  if (f.n < 2) throw UsageError("check-trace needs n >= 2: the faces carry n - 1 >= 1 axes");
  const auto ps = parse_p(c.p_list, "1,2,4");
  for (double p : ps)
    if (std::isinf(p)) throw UsageError("check-trace needs finite p");
  if (c.box.size() > 1) throw UsageError("check-trace takes at most one --box");
  const Rectangle P = c.box.empty() ? Rectangle::unit(f.n) : parse_box(c.box.front(), f.n);
  const auto s = embedding_settings(c);

  Envelope env;
  env.config = config_json(c, &f);
  env.config["p"] = p_json(ps);
  env.config["domain"] = box_json(P);
  for (double p : ps) {
    for (int j = 1; j <= f.n; ++j) {
      const auto face = *IndexSubset({j}, f.n).complement();
      auto e = inequality_entry(check_trace(f.expr, P, face, p, s));
      e.inputs["face"] = face.to_string();
      e.inputs["j"] = j;
      env.entries.push_back(std::move(e));
    }
  }
  return env;
}

Envelope cmd_gallery(const RunConfig& c, std::vector<std::string>& kinds) {
  check_common(c);
  kinds = split(c.kinds.empty() ? "counterexample" : c.kinds, ',');
  Envelope env;
  env.config = config_json(c, nullptr);
  for (auto& kind : kinds) {
    kind = trim(kind);
    if (kind == "counterexample" || kind == "segment") {
      std::vector<double> radii = c.radii.empty() ? default_radii() : parse_list(c.radii, "radius list");
      for (double r : radii)
        if (!(r > 0.0 && r < 0.5)) throw UsageError("radii must lie in (0, 1/2)");
      for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1])) throw UsageError("radii must decrease");
      CounterexampleSettings cs;
      auto e = kind == "counterexample" ? check_entry(kind, counterexample_run(2, radii, cs))
                                        : check_entry(kind, counterexample_1d(radii, cs));
      e.inputs["n"] = kind == "counterexample" ? 2 : 1;
      env.entries.push_back(std::move(e));
    } else if (kind == "mollifier") {
      Function f;
      if (c.fn.empty() && c.fn_file.empty()) {
        auto g = gallery_by_id("bump2d");
        f.expr = g.expr;
        f.text = g.id;
        f.n = 2;
      } else {
        f = load_function(c);
      }
      if (c.box.size() > 1) throw UsageError("gallery takes at most one --box");
      const Rectangle box = c.box.empty() ? Rectangle::cube(f.n, -1.0, 1.0) : parse_box(c.box.front(), f.n);
      const double eps[] = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
      auto e = check_entry(kind, mollifier_convergence(f.expr, box, 9, eps, 1.8));
      e.inputs["fn"] = f.text;
      e.inputs["n"] = f.n;
      e.inputs["box"] = box_json(box);
      env.entries.push_back(std::move(e));
    } else {
      throw UsageError("unknown gallery kind '" + kind + "' (counterexample, segment, mollifier)");
    }
  }
  return env;
}

Envelope cmd_norms(const RunConfig& c) {
  check_common(c);
  const Function f = load_function(c);
  const auto ps = parse_p(c.p_list, "2");
  const auto kinds = split(c.kinds.empty() ? "lp,s1p" : c.kinds, ',');
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw UsageError("--gamma must lie in (0, 1]");
  const Rectangle box = domain_for(c, f);
  const auto s = norm_settings(c);
  const PairSampler sampler(box, c.seed, c.pairs);

  Envelope env;
  env.config = config_json(c, &f);
  env.config["p"] = p_json(ps);
  env.config["domain"] = box_json(box);
  for (const auto& raw : kinds) {
    const std::string kind = trim(raw);
    if (kind == "lp" || kind == "s1p" || kind == "ws") {
      for (double p : ps) {
        if (kind == "lp") {
          env.entries.push_back(norm_entry(lp_norm(f.expr, box, p, s)));
        } else if (std::isinf(p)) {
          throw UsageError(kind + " needs finite p");
        } else if (kind == "s1p") {
          env.entries.push_back(norm_entry(s1p_norm(f.expr, box, p, s)));
        } else {
          for (int axis = 1; axis <= f.n; ++axis) env.entries.push_back(norm_entry(ws_norm(f.expr, box, axis, p, s)));
        }
      }
    } else if (kind == "c0") {
      env.entries.push_back(norm_entry(c0_norm(f.expr, box, s)));
    } else if (kind == "holder") {
      env.entries.push_back(norm_entry(holder_seminorm(f.expr, c.gamma, sampler)));
    } else if (kind == "holder_norm") {
      env.entries.push_back(norm_entry(holder_norm(f.expr, c.gamma, sampler, s)));
    } else {
      throw UsageError("unknown norm kind '" + kind + "' (lp, s1p, ws, c0, holder, holder_norm)");
    }
  }
  return env;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--fn", c.fn, "Expression in x1..xn, or a gallery id such as gauss2d");
  sub->add_option("--fn-file", c.fn_file, "File holding an optional 'arity: N' line and one expression");
  sub->add_option("--n", c.n, "Dimension (default: from the function)");
  sub->add_option("--tol", c.tol, "Tolerance");
  sub->add_option("--order", c.order, "Gauss-Legendre order per axis")->capture_default_str();
  sub->add_option("--seed", c.seed, "Sampler / random box seed")->capture_default_str();
  sub->add_option("--format", c.format, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
  sub->add_option("--output", c.output, "Write the report here instead of stdout");
}

std::string render(const Envelope& env, const std::string& format, const std::vector<std::string>& gallery_kinds,
                   double seconds) {
  if (format == "json") {
    const auto j = env.to_json();
    const auto problems = validate(report_schema(), j);
    if (!problems.empty()) throw std::logic_error("report does not match its schema: " + problems.front());
    return j.dump(2) + "\n";
  }
  if (format == "csv") {
    if (env.command == "gallery") {
      if (gallery_kinds.size() != 1) throw UsageError("csv output holds one table; pass a single --kinds value");
      return table_csv(env.entries.front());
    }
    return entries_csv(env.entries);
  }
  std::ostringstream os;
  os << human_table(env);
  for (const auto& e : env.entries)
    if (!e.columns.empty()) os << '\n' << e.kind << ":\n" << table_csv(e);
  os << "wall time: " << seconds << " s\n";
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for mixed-smoothness embeddings", "mixsmooth"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  RunConfig c;

  auto* gnl = app.add_subcommand("verify-gnl", "Check the Newton-Leibniz identity on boxes");
  add_common(gnl, c);
  gnl->add_option("--boxes", c.boxes, "unit, random:K or explicit")->capture_default_str();
  gnl->add_option("--box", c.box, "lo1,hi1,...,lon,hin (repeatable; bounding box for random:K)");

  auto* emb = app.add_subcommand("check-embedding", "Pointwise, Hoelder-norm and p -> 1 checks");
  add_common(emb, c);
  emb->add_option("--p", c.p_list, "Comma-separated p values (default 1,2,4)");
  emb->add_option("--box", c.box, "Domain of the norms (default: gallery support or [-1,1]^n)");
  emb->add_option("--pairs", c.pairs, "Sampled pairs")->capture_default_str();
  emb->add_option("--cells", c.cells, "Starting cells per axis")->capture_default_str();
  emb->add_option("--k", c.k, "Also check derivatives of order k - 1 (k = 2, 3)")->capture_default_str();

  auto* tr = app.add_subcommand("check-trace", "Trace inequality on every face of size n - 1");
  add_common(tr, c);
  tr->add_option("--p", c.p_list, "Comma-separated p values (default 1,2,4)");
  tr->add_option("--box", c.box, "Box (default [0,1]^n)");
  tr->add_option("--cells", c.cells, "Starting cells per axis")->capture_default_str();

  auto* gal = app.add_subcommand("gallery", "Counterexample and mollification studies; --list prints the gallery");
  add_common(gal, c);
  gal->add_option("--kinds", c.kinds, "counterexample, segment, mollifier (default counterexample)");
  gal->add_option("--radii", c.radii, "Decreasing radii in (0, 1/2)");
  gal->add_option("--box", c.box, "Box for the mollifier study (default [-1,1]^n)");
  gal->add_flag("--list", c.list, "Print the built-in functions and exit");

  auto* nm = app.add_subcommand("norms", "Print norms with quadrature provenance");
  add_common(nm, c);
  nm->add_option("--p", c.p_list, "Comma-separated p values, inf allowed (default 2)");
  nm->add_option("--box", c.box, "Domain (default: gallery support or [-1,1]^n)");
  nm->add_option("--kinds", c.kinds, "lp, s1p, ws, c0, holder, holder_norm (default lp,s1p)");
  nm->add_option("--gamma", c.gamma, "Hoelder exponent")->capture_default_str();
  nm->add_option("--pairs", c.pairs, "Sampled pairs for Hoelder kinds")->capture_default_str();
  nm->add_option("--cells", c.cells, "Starting cells per axis")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "mixsmooth: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Envelope env;
  std::vector<std::string> gallery_kinds;
  try {
    if (gnl->parsed()) {
      c.command = "verify-gnl";
      env = cmd_verify_gnl(c);
    } else if (emb->parsed()) {
      c.command = "check-embedding";
      env = cmd_check_embedding(c);
    } else if (tr->parsed()) {
      c.command = "check-trace";
      env = cmd_check_trace(c);
    } else if (gal->parsed()) {
      c.command = "gallery";
      if (c.list) {
        for (const auto& fam : gallery_families())
          for (int n = 1; n <= 3; ++n) {
            const auto g = gallery(fam, n);
            out << g.id << "  " << g.text << '\n';
          }
        return kExitPass;
      }
      env = cmd_gallery(c, gallery_kinds);
    } else {
      c.command = "norms";
      env = cmd_norms(c);
    }
  } catch (const UsageError& e) {
    err << "mixsmooth " << c.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "mixsmooth " << c.command << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const DomainError& e) {
    err << "mixsmooth " << c.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mixsmooth " << c.command << ": no verdict: " << e.what() << '\n';
    return kExitInconclusive;
  }
  env.command = c.command;

  const std::string format = c.format.empty() ? (c.command == "gallery" ? "csv" : "json") : c.format;
  env.config["format"] = format;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string text;
  try {
    text = render(env, format, gallery_kinds, seconds);
  } catch (const UsageError& e) {
    err << "mixsmooth " << c.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mixsmooth " << c.command << ": " << e.what() << '\n';
    return kExitInconclusive;
  }

  if (c.output.empty()) {
    out << text;
    out.flush();
  } else {
    std::ofstream file(c.output, std::ios::binary);
    if (!(file << text) || !file.flush()) {
      err << "mixsmooth " << c.command << ": cannot write " << c.output << '\n';
      return kExitIo;
    }
  }
  switch (env.overall()) {
    case Verdict::Pass: return kExitPass;
    case Verdict::Fail: return kExitFail;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

}  // namespace mixsmooth::cli
