#pragma once

// Seeded randomness built on raw engine output only, so sequences are the
// same under every standard library.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace edqe {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::vector<double> unit_vector(std::size_t dim) {
    std::vector<double> v(dim);
    double n2 = 0.0;
    while (n2 == 0.0) {
      n2 = 0.0;
      for (double& x : v) {
        x = gaussian();
        n2 += x * x;
      }
    }
    const double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    return v;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace edqe
