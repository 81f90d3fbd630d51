#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace khl {

// Deterministic random source. The mapping from raw engine output to
// doubles is spelled out here instead of going through the standard
// distributions, whose output sequences are implementation-defined; this
// keeps generated datasets and solver runs reproducible bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cosine branch only, two draws each).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  // Uniform on the unit sphere of the given dimension.
  std::vector<double> unit_sphere(int dim) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    while (true) {
      double norm2 = 0.0;
      for (auto& c : x) {
        c = normal();
        norm2 += c * c;
      }
      if (norm2 > 1e-24) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& c : x) c *= inv;
        return x;
      }
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace khl
