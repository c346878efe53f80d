#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace icagg {

// Stream-splitting hash; used to derive independent child seeds from a root
// seed (replication index, tree path, ...).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t root, const std::string& tag);

// Seedable generator used everywhere. All variates are produced by explicit
// formulas on top of the 64-bit stream (no std::*_distribution), so a given
// (engine, seed) pair replays bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform strictly inside (0,1): 53-bit mantissa, half-ulp offset.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
  }

  double normal();                  // inverse-CDF transform
  double exponential(double rate);  // -log(U)/rate
  // log of a Gamma(shape, 1) variate; stays finite for very small shapes
  // where the variate itself would underflow.
  double gamma_log(double shape);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace icagg
