#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace g2flow {

/// Deterministic, cross-run-stable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Floating-point values are derived by explicit bit manipulation
/// rather than through std::*_distribution (whose output is
/// implementation-defined), so identical seeds give identical streams on any
/// conforming platform. Reports refer to this generator as "mt19937_64".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static constexpr const char* name() { return "mt19937_64"; }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

  /// Uniform in [lo, hi).
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller on the deterministic uniform stream.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t integer() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace g2flow
