#include "depthlab/rng.hpp"

#include <cmath>

namespace depthlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream{seed, splitmix64(stream ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(RngStream stream) {
  const std::uint64_t a = splitmix64(stream.seed);
  const std::uint64_t b = splitmix64(stream.stream ^ 0xd1b54a32d192ed03ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::exponential() { return -std::log(uniform()); }

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

Vector Rng::normal_vector(int n) {
  Vector g(n);
  for (int i = 0; i < n; ++i) g[i] = normal();
  return g;
}

Vector Rng::unit_vector(int n) {
  for (;;) {
    Vector g = normal_vector(n);
    const double norm = g.norm();
    if (norm > 1e-300) return g / norm;
  }
}

}  // namespace depthlab
