// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mixsmooth/counterexample.hpp"
#include "mixsmooth/embedding.hpp"
#include "mixsmooth/gallery.hpp"
#include "mixsmooth/gnl.hpp"
#include "mixsmooth/mixed_jet.hpp"
#include "mixsmooth/mollifier.hpp"
#include "mixsmooth/quadrature.hpp"
#include "mixsmooth/rect_geometry.hpp"
#include "quad_oracle.hpp"

using namespace mixsmooth;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  std::array<char, 512> buf{};
  std::snprintf(buf.data(), buf.size(), f, args...);
  return buf.data();
}

Rectangle check_domain(const GalleryFunction& g) {
  return g.support ? *g.support : Rectangle::cube(g.dim, -1.0, 1.0);
}

Outcome gnl_identity() {
  const auto t0 = Clock::now();
  int boxes = 0, passed = 0;
  std::string worst;
  for (const auto& fam : gallery_families())
    for (int n = 1; n <= 4; ++n) {
      const auto g = gallery(fam, n);
      const auto rects = random_boxes(n, 10, 1000 + static_cast<std::uint64_t>(n));
      const auto rep = gnl_verify(g.expr, rects, 1e-8);
      for (const auto& r : rep.rectangles) {
        ++boxes;
        if (r.verdict == Verdict::Pass) ++passed;
        else if (worst.empty()) worst = " first failure " + g.id + ": " + r.note;
      }
    }
  const double t = seconds_since(t0);
  return {passed == boxes && t <= 60.0,
          fmt("%d/%d boxes within 1e-8 relative, %.2f s (limit 60 s)", passed, boxes, t) + worst};
}

Outcome subset_counts() {
  for (int n = 1; n <= 12; ++n) {
    const auto subs = enumerate_subsets(n);
    if (subs.size() != (std::size_t{1} << n) - 1)
      return {false, fmt("n=%d: %zu subsets", n, subs.size())};
    std::vector<std::uint64_t> per(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& s : subs) ++per[static_cast<std::size_t>(s.size())];
    for (int k = 1; k <= n; ++k)
      if (per[static_cast<std::size_t>(k)] != binomial(n, k))
        return {false, fmt("n=%d k=%d: %llu subsets", n, k,
                           static_cast<unsigned long long>(per[static_cast<std::size_t>(k)]))};
  }
  return {true, "2^n - 1 subsets, C(n,k) per size, n = 1..12"};
}

Outcome jet_correctness() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::size_t partials = 0, bad = 0, value_mismatch = 0;
  double worst = 0.0;
  for (const auto& fam : gallery_families())
    for (int n = 1; n <= 4; ++n) {
      const auto g = gallery(fam, n);
      std::vector<std::vector<double>> pts(50, std::vector<double>(static_cast<std::size_t>(n)));
      for (auto& x : pts)
        for (auto& v : x) v = U(rng);
      const IndexSubset full = IndexSubset::full(n);
      JetEvaluator ev(g.expr, full);
      for (const auto& x : pts) {
        const auto jet = ev.evaluate(x);
        if (jet[0] != eval_real(g.expr, x)) ++value_mismatch;
        for (std::uint32_t m = 1; m < jet.size(); ++m) {
          const double fd = mixsmooth::testing::mixed_fd(g.expr, x, m);
          const double rel = std::abs(jet[m] - fd) / std::max(1.0, std::abs(fd));
          worst = std::max(worst, rel);
          ++partials;
          if (rel > 1e-6) ++bad;
        }
      }
      // Smaller active sets go through their own evaluators.
      for (const auto& s : enumerate_subsets(n)) {
        if (s.size() == n) continue;
        JetEvaluator sub(g.expr, s);
        for (const auto& x : pts)
          if (sub.evaluate(x)[0] != eval_real(g.expr, x)) ++value_mismatch;
      }
    }
  return {bad == 0 && value_mismatch == 0,
          fmt("%zu partials, %zu beyond 1e-6 (worst %.2e), %zu value mismatches", partials, bad, worst,
              value_mismatch)};
}

Outcome pointwise(const std::vector<double>& ps, bool with_limit) {
  std::size_t checks = 0, violations = 0, undecided = 0;
  double min_margin = kInf;
  for (const char* fam : {"bump", "gauss"})
    for (int n = 1; n <= 3; ++n) {
      const auto g = gallery(fam, n);
      const PairSampler sampler(check_domain(g), 42, 10'000);
      for (double p : ps) {
        const auto r = check_pointwise(g.expr, p, sampler);
        ++checks;
        violations += r.violations;
        if (r.verdict == Verdict::Inconclusive) ++undecided;
        min_margin = std::min(min_margin, r.margin);
      }
    }
  bool limit_ok = true;
  std::string limit;
  if (with_limit) {
    double gap = 0.0;
    for (int n = 1; n <= 3; ++n)
      gap = std::max(gap, std::abs(pointwise_bound_constant(n, 1.0 + 1e-4, 1.0).value -
                                   pointwise_bound_constant_p1(n).value));
    limit_ok = gap <= 1e-2;
    limit = fmt(", p->1 gap %.3e (tol 1e-2)", gap);
  }
  return {violations == 0 && undecided == 0 && limit_ok,
          fmt("%zu checks x 10^4 pairs, %zu violations, %zu inconclusive, min margin %.3e", checks,
              violations, undecided, min_margin) +
              limit};
}

Outcome holder_norms() {
  std::size_t checks = 0, violations = 0, undecided = 0;
  std::string first;
  for (const auto& fam : gallery_families())
    for (int n = 1; n <= 3; ++n) {
      const auto g = gallery(fam, n);
      const PairSampler sampler(check_domain(g), 42, 2000);
      for (double p : {1.0, 2.0, 4.0}) {
        const auto r = check_holder_norm(g.expr, p, sampler);
        ++checks;
        violations += r.violations;
        if (r.verdict != Verdict::Pass) {
          if (r.verdict == Verdict::Inconclusive) ++undecided;
          if (first.empty()) first = fmt("; first non-pass %s p=%g: %s", g.id.c_str(), p, r.note.c_str());
        }
      }
    }
  return {violations == 0 && undecided == 0,
          fmt("%zu checks (p = 1, 2, 4), %zu violations, %zu inconclusive", checks, violations, undecided) +
              first};
}

Outcome trace() {
  std::size_t checks = 0, violations = 0, undecided = 0;
  std::string first;
  for (int n = 2; n <= 3; ++n) {
    const auto boxes = random_boxes(n, 5, 77 + static_cast<std::uint64_t>(n));
    for (const auto& fam : gallery_families()) {
      const auto g = gallery(fam, n);
      for (const auto& P : boxes)
        for (double p : {1.0, 2.0, 4.0})
          for (int j = 1; j <= n; ++j) {
            const auto face = *IndexSubset({j}, n).complement();
            const auto r = check_trace(g.expr, P, face, p);
            ++checks;
            if (r.verdict == Verdict::Fail) ++violations;
            if (r.verdict == Verdict::Inconclusive) ++undecided;
            if (r.verdict != Verdict::Pass && first.empty())
              first = fmt("; first non-pass %s p=%g j=%d: %s", g.id.c_str(), p, j, r.note.c_str());
          }
    }
  }
  return {violations == 0 && undecided == 0,
          fmt("%zu face checks, %zu violations, %zu inconclusive", checks, violations, undecided) + first};
}

// Tensor trapezoid rule over [-1, 1]^n; spectrally accurate for the smooth
// compactly supported bump.
double trapezoid_bump_mass(int n, int m) {
  const double h = 2.0 / m;
  std::vector<double> t(static_cast<std::size_t>(m - 1));
  for (int i = 1; i < m; ++i) t[static_cast<std::size_t>(i - 1)] = -1.0 + i * h;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  CompensatedSum s;
  while (true) {
    double r2 = 0.0;
    for (auto i : idx) r2 += t[i] * t[i];
    if (r2 < 1.0) s.add(std::exp(-1.0 / (1.0 - r2)));
    int a = n - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == t.size()) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  return s.value() * std::pow(h, n);
}

Outcome mollification() {
  double norm_err = 0.0;
  for (int n = 1; n <= 3; ++n)
    norm_err = std::max(norm_err, std::abs(mollifier_normalization(n) * trapezoid_bump_mass(n, 240) - 1.0));

  double const_err = 0.0;
  for (int n = 1; n <= 2; ++n)
    for (double eps : {0.25, 0.0625}) {
      const auto g = mollify(parse_or_throw("2.5", n), make_mollifier(n, eps), Rectangle::unit(n), 5);
      for (double v : g.values[0]) const_err = std::max(const_err, std::abs(v - 2.5));
    }

  const double eps[] = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  const auto conv = mollifier_convergence(gallery("bump", 2).expr, Rectangle::cube(2, -1.0, 1.0), 9, eps, 1.8);
  const double order = conv.value("min_order").value_or(0.0);
  return {norm_err <= 1e-10 && const_err <= 1e-10 && conv.verdict == Verdict::Pass,
          fmt("normalization error %.2e, constant error %.2e (tol 1e-10), min order %.3f (need 1.8)",
              norm_err, const_err, order) +
              (conv.note.empty() ? "" : "; " + conv.note)};
}

Outcome counterexample() {
  const auto r = counterexample_run(2, default_radii());
  const double ratio = r.value("sup_ratio").value_or(0.0);
  const double inc = r.value("w12_max_late_increment").value_or(kInf);
  return {r.verdict == Verdict::Pass,
          fmt("sup increasing %s, ratio %.3f (need 1.5), max W12 increment for r0 <= 2^-8 %.4f (need < 0.01)",
              r.value("sup_increasing").value_or(0.0) == 1.0 ? "yes" : "no", ratio, inc) +
              (r.note.empty() ? "" : "; " + r.note)};
}

#ifdef MIXSMOOTH_CLI_PATH
std::string capture(const std::string& args, int& code) {
  std::string out;
  FILE* pipe = popen((std::string(MIXSMOOTH_CLI_PATH) + " " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t k;
  while ((k = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), k);
  const int status = pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}
#endif

std::string library_fingerprint() {
  std::ostringstream os;
  os << std::hexfloat;
  const auto rep = gnl_verify(gallery("poly", 3).expr, random_boxes(3, 4, 5), 1e-8);
  for (const auto& r : rep.rectangles)
    if (r.breakdown)
      for (const auto& rec : r.breakdown->records) os << rec.value << ' ';
  return os.str();
}

Outcome quadrature_and_determinism() {
  double worst = 0.0;
  for (int q : {2, 4, 8, 12}) {
    const auto& rule = gauss_legendre(q);
    for (int deg = 0; deg <= 2 * q - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < q; ++i)
        s += rule.weights[static_cast<std::size_t>(i)] * std::pow(rule.nodes[static_cast<std::size_t>(i)], deg);
      const double exact = deg % 2 == 0 ? 2.0 / (deg + 1) : 0.0;
      worst = std::max(worst, std::abs(s - exact));
    }
  }
  bool same = library_fingerprint() == library_fingerprint();
  std::string how = "library";
#ifdef MIXSMOOTH_CLI_PATH
  for (const char* args : {"verify-gnl --fn poly3d --boxes random:4 --seed 3 --format json",
                           "check-embedding --fn gauss2d --p 2 --pairs 500 --seed 9 --format json"}) {
    int ca = 0, cb = 0;
    const auto a = capture(args, ca), b = capture(args, cb);
    same = same && ca == cb && ca >= 0 && !a.empty() && a == b;
  }
  how = "CLI JSON";
#endif
  return {worst <= 1e-12 && same,
          fmt("max monomial error %.2e (tol 1e-12), %s output byte-identical: %s", worst, how.c_str(),
              same ? "yes" : "no")};
}

Outcome corollary2() {
  const auto g = gallery("bump", 2);
  const PairSampler sampler(check_domain(g), 42, 10'000);
  std::size_t violations = 0, undecided = 0;
  for (double p : {1.5, 2.0, 4.0}) {
    const auto r = corollary2_check(g.expr, 2, p, sampler);
    violations += r.violations;
    if (r.verdict == Verdict::Inconclusive) ++undecided;
  }
  return {violations == 0 && undecided == 0,
          fmt("k=2 on bump2d, p = 1.5, 2, 4, 10^4 pairs: %zu violations, %zu inconclusive", violations,
              undecided)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, gnl_identity},
      {2, subset_counts},
      {3, jet_correctness},
      {4, [] { return pointwise({1.5, 2.0, 4.0}, false); }},
      {5, [] { return pointwise({1.0}, true); }},
      {6, holder_norms},
      {7, trace},
      {8, mollification},
      {9, counterexample},
      {10, quadrature_and_determinism},
      {11, corollary2},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
