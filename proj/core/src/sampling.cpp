#include "mixsmooth/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mixsmooth {

namespace {

constexpr std::array<int, 2 * kMaxDimension> kPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23,  29,  31,  37,  41,  43,  47,  53,  59,  61,  67,  71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173};

double radical_inverse(std::size_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::size_t>(base));
    i /= static_cast<std::size_t>(base);
  }
  return r;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

PairSampler::PairSampler(Rectangle domain, std::uint64_t seed, std::size_t count)
    : domain_(std::move(domain)), seed_(seed), count_(count) {
  std::mt19937_64 g(seed);
  shift_.resize(static_cast<std::size_t>(2 * domain_.dim()));
  for (auto& s : shift_) s = unit_uniform(g);
}

std::vector<double> PairSampler::halton(std::size_t index, int offset_dim, int dims) const {
  std::vector<double> u(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) {
    const auto k = static_cast<std::size_t>(offset_dim + d);
    double v = radical_inverse(index, kPrimes[k]) + shift_[k];
    u[static_cast<std::size_t>(d)] = v - std::floor(v);
  }
  return u;
}

void PairSampler::clamp(std::vector<double>& p) const {
  for (int a = 0; a < domain_.dim(); ++a) {
    auto& v = p[static_cast<std::size_t>(a)];
    v = std::clamp(v, domain_.lo(a), domain_.hi(a));
  }
}

SamplePair PairSampler::pair(std::size_t i) const {
  const int n = domain_.dim();
  const std::size_t round = i / 4;
  const std::size_t kind = i % 4;
  // Halton index 0 is the origin of the unshifted sequence; start at 1.
  const auto u = halton(round + 1, 0, n);
  const auto v = halton(round + 1, n, n);
  SamplePair sp;
  sp.x.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    sp.x[static_cast<std::size_t>(a)] = domain_.lo(a) + domain_.edge(a) * u[static_cast<std::size_t>(a)];

  auto global = [&] {
    sp.x_prime.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
      sp.x_prime[static_cast<std::size_t>(a)] = domain_.lo(a) + domain_.edge(a) * v[static_cast<std::size_t>(a)];
    sp.scale = -1;
  };

  if (kind == 0) {
    global();
  } else if (kind == 3) {
    // Vertex-anchored: the second point sits on a corner picked by the round.
    sp.x_prime.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const bool top = (round >> (a % 63)) & 1u;
      sp.x_prime[static_cast<std::size_t>(a)] = top ? domain_.hi(a) : domain_.lo(a);
    }
  } else {
    const int j = static_cast<int>((round * 2 + (kind - 1)) % (kMaxScale + 1));
    const double t = std::ldexp(1.0, -j);
    std::vector<double> dir(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (int a = 0; a < n; ++a) {
      dir[static_cast<std::size_t>(a)] = 2.0 * v[static_cast<std::size_t>(a)] - 1.0;
      norm += dir[static_cast<std::size_t>(a)] * dir[static_cast<std::size_t>(a)];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      dir.assign(dir.size(), 0.0);
      dir[0] = 1.0;
      norm = 1.0;
    }
    sp.x_prime = sp.x;
    for (int a = 0; a < n; ++a) sp.x_prime[static_cast<std::size_t>(a)] += t * dir[static_cast<std::size_t>(a)] / norm;
    if (!domain_.contains(sp.x_prime)) {
      for (int a = 0; a < n; ++a) sp.x_prime[static_cast<std::size_t>(a)] = sp.x[static_cast<std::size_t>(a)] - t * dir[static_cast<std::size_t>(a)] / norm;
      clamp(sp.x_prime);
    }
    sp.scale = j;
  }
  if (sp.x == sp.x_prime) global();
  if (sp.x == sp.x_prime) {
    // Only possible for a degenerate shift; nudge along the first axis.
    sp.x_prime[0] = sp.x[0] == domain_.hi(0) ? domain_.lo(0) : domain_.hi(0);
  }
  sp.distance = distance(sp.x, sp.x_prime);
  sp.regime = sp.distance <= 1.0 ? PairRegime::Near : PairRegime::Far;
  return sp;
}

std::vector<SamplePair> PairSampler::pairs() const {
  std::vector<SamplePair> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(pair(i));
  return out;
}

}  // namespace mixsmooth
