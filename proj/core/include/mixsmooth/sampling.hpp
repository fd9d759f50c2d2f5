#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mixsmooth/rect_geometry.hpp"

namespace mixsmooth {

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double unit_uniform(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Which branch of the |x - x'| <= 1 / > 1 split a pair belongs to.
enum class PairRegime { Near, Far };

struct SamplePair {
  std::vector<double> x;
  std::vector<double> x_prime;
  double distance = 0.0;
  PairRegime regime = PairRegime::Near;
  /// Dyadic scale j of a near-diagonal pair (separation 2^-j), or -1.
  int scale = -1;
};

/// Deterministic stream of distinct point pairs in a box.
///
/// Pair i depends only on (domain, seed, i), so growing `count` extends the
/// list without changing earlier pairs. The stream interleaves four kinds:
/// global pairs from a shifted Halton sequence in the product box, two
/// near-diagonal pairs at separations 2^-j (j = 0..12), and pairs with one
/// end at a vertex of the box.
class PairSampler {
 public:
  static constexpr int kMaxScale = 12;

  PairSampler(Rectangle domain, std::uint64_t seed, std::size_t count);

  const Rectangle& domain() const noexcept { return domain_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t count() const noexcept { return count_; }

  SamplePair pair(std::size_t i) const;
  std::vector<SamplePair> pairs() const;

 private:
  std::vector<double> halton(std::size_t index, int offset_dim, int dims) const;
  void clamp(std::vector<double>& p) const;

  Rectangle domain_;
  std::uint64_t seed_;
  std::size_t count_;
  std::vector<double> shift_;
};

}  // namespace mixsmooth
