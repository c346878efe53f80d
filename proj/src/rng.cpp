#include "icagg/rng.hpp"

#include <cmath>

#include "icagg/normal.hpp"

namespace icagg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t root, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the tag bytes
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return derive_seed(root, h);
}

double Rng::normal() { return normal_quantile(uniform01()); }

double Rng::exponential(double rate) { return -std::log(uniform01()) / rate; }

double Rng::gamma_log(double shape) {
  // Marsaglia-Tsang squeeze for shape >= 1; the boost trick
  // Gamma(a) = Gamma(a+1) * U^(1/a) handles a < 1 in log space.
  double boost = 0.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::log(uniform01()) / a;
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d * v) + boost;
    }
  }
}

}  // namespace icagg
