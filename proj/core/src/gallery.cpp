#include "mixsmooth/gallery.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace mixsmooth {

namespace {

using Closure = std::function<double(std::span<const double>)>;

// x*x and (x*x)*(x*x): the evaluator's square-and-multiply for ^2 and ^4
// starts from 1.0, and 1.0 * y == y exactly.
double sq(double x) { return x * x; }
double quart(double x) {
  const double s = x * x;
  return s * s;
}

std::string var(int i) { return "x" + std::to_string(i); }

std::string power_sum(int n, int e) {
  std::string s;
  for (int i = 1; i <= n; ++i) {
    if (i > 1) s += " + ";
    s += var(i) + "^" + std::to_string(e);
  }
  return s;
}

GalleryFunction make(std::string family, int n, std::string text, Closure closure) {
  GalleryFunction g;
  g.id = family + std::to_string(n) + "d";
  g.family = std::move(family);
  g.dim = n;
  g.expr = parse_or_throw(text, n);
  g.text = std::move(text);
  g.closure = std::move(closure);
  return g;
}

GalleryFunction bump(int n) {
  auto g = make("bump", n, "exp(-(" + power_sum(n, 4) + "))", [n](std::span<const double> x) {
    double s = quart(x[0]);
    for (int i = 1; i < n; ++i) s = s + quart(x[static_cast<std::size_t>(i)]);
    return std::exp(-s);
  });
  g.support = Rectangle::cube(n, -2.5, 2.5);
  return g;
}

GalleryFunction gauss(int n) {
  auto g = make("gauss", n, "exp(-(" + power_sum(n, 2) + "))", [n](std::span<const double> x) {
    double s = sq(x[0]);
    for (int i = 1; i < n; ++i) s = s + sq(x[static_cast<std::size_t>(i)]);
    return std::exp(-s);
  });
  g.support = Rectangle::cube(n, -6.0, 6.0);
  // Each of the 2^n terms factorizes into n one-dimensional integrals equal
  // to sqrt(pi/2): int e^{-2t^2} = int 4t^2 e^{-2t^2} = sqrt(pi/2).
  g.s1_2_norm = std::sqrt(std::pow(2.0, n) * std::pow(std::numbers::pi / 2.0, n / 2.0));
  return g;
}

GalleryFunction poly(int n) {
  std::string lin = "1 + x1";
  for (int i = 2; i <= n; ++i) lin += " + " + var(i) + "/" + std::to_string(i);
  std::string prod = var(1) + "^2";
  for (int i = 2; i <= n; ++i) prod += "*" + var(i) + "^2";
  return make("poly", n, "(" + lin + ")^3 + " + prod, [n](std::span<const double> x) {
    double b = 1.0 + x[0];
    for (int i = 2; i <= n; ++i) b = b + x[static_cast<std::size_t>(i - 1)] / static_cast<double>(i);
    double p = sq(x[0]);
    for (int i = 1; i < n; ++i) p = p * sq(x[static_cast<std::size_t>(i)]);
    return b * (b * b) + p;
  });
}

GalleryFunction sinexp(int n) {
  static const char* const kFactor[] = {"sin(", "exp(", "", "cos("};
  std::string text;
  for (int i = 1; i <= n; ++i) {
    if (i > 1) text += "*";
    const char* f = kFactor[(i - 1) % 4];
    text += f + var(i) + (*f ? ")" : "");
  }
  return make("sinexp", n, text, [n](std::span<const double> x) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = x[static_cast<std::size_t>(i)];
      double f = v;
      switch (i % 4) {
        case 0: f = std::sin(v); break;
        case 1: f = std::exp(v); break;
        case 2: f = v; break;
        case 3: f = std::cos(v); break;
      }
      r = i == 0 ? f : r * f;
    }
    return r;
  });
}

GalleryFunction loglog(int n) {
  return make("loglog", n, "log(log(1 + 1/sqrt(" + power_sum(n, 2) + " + 0.25)))",
              [n](std::span<const double> x) {
                double s = sq(x[0]);
                for (int i = 1; i < n; ++i) s = s + sq(x[static_cast<std::size_t>(i)]);
                return std::log(std::log(1.0 + 1.0 / std::sqrt(s + 0.25)));
              });
}

}  // namespace

std::vector<std::string> gallery_families() { return {"bump", "gauss", "poly", "sinexp", "loglog"}; }

GalleryFunction gallery(std::string_view family, int n) {
  if (n < 1 || n > kMaxDimension) throw DomainError("gallery: dimension out of range");
  if (family == "bump") return bump(n);
  if (family == "gauss") return gauss(n);
  if (family == "poly") return poly(n);
  if (family == "sinexp") return sinexp(n);
  if (family == "loglog") return loglog(n);
  throw DomainError("unknown gallery family '" + std::string(family) + "'");
}

namespace {

std::optional<std::pair<std::string, int>> split_id(std::string_view id) {
  if (id.size() < 3 || id.back() != 'd') return std::nullopt;
  std::size_t digits = id.size() - 1;
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(id[digits - 1]))) --digits;
  if (digits == 0 || digits == id.size() - 1) return std::nullopt;
  int n = 0;
  const auto num = id.substr(digits, id.size() - 1 - digits);
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
  if (ec != std::errc() || p != num.data() + num.size()) return std::nullopt;
  const std::string fam(id.substr(0, digits));
  for (const auto& f : gallery_families())
    if (f == fam && n >= 1 && n <= kMaxDimension) return std::make_pair(fam, n);
  return std::nullopt;
}

}  // namespace

bool is_gallery_id(std::string_view id) { return split_id(id).has_value(); }

GalleryFunction gallery_by_id(std::string_view id) {
  const auto s = split_id(id);
  if (!s) throw DomainError("unknown gallery identifier '" + std::string(id) + "'");
  return gallery(s->first, s->second);
}

}  // namespace mixsmooth
