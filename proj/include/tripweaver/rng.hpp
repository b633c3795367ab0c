#pragma once

#include <cstdint>

namespace tripweaver {

// splitmix64-based generator. Hand-rolled so that generated bytes are stable
// across standard libraries and platforms (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double uniform01();                    // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int lo, int hi);       // [lo, hi] inclusive
  double gaussian(double mean = 0.0, double stddev = 1.0);

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

 private:
  std::uint64_t state_;
};

}  // namespace tripweaver
