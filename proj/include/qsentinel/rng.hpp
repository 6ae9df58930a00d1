#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qsentinel {

// Seedable, platform-independent random source. The engine (mt19937_64) is
// fully specified by the C++ standard; the variate transforms below are our
// own, so identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Exponential with the given rate (mean 1/rate), strictly positive.
  double exponential(double rate) {
    double y = -std::log1p(-uniform()) / rate;
    return y > 0.0 ? y : 1.0 / rate * 1e-300;
  }

  // Uniform integer in [0, n), n >= 1. Lemire multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qsentinel
