#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylwave {

/// Thrown when a configuration document or a constructed object violates its
/// schema; `path` holds a JSON-pointer-style location when one is known.
class validation_error : public std::runtime_error {
public:
  validation_error(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

/// Thrown by time integrators on step-size underflow; carries the last state.
class integration_error : public std::runtime_error {
public:
  integration_error(const std::string& what, double t_last,
                    std::vector<double> state_last)
      : std::runtime_error(what), t_last(t_last),
        state_last(std::move(state_last)) {}
  double t_last;
  std::vector<double> state_last;
};

constexpr double pi = 3.14159265358979323846264338327950288;

inline bool is_finite(double x) { return std::isfinite(x); }

inline double sq(double x) { return x * x; }

// --- deterministic RNG -------------------------------------------------------
//
// splitmix64: tiny, seedable, identical across platforms. Every randomized
// sampler in the library derives its stream as splitmix(seed ^ hash(index)),
// so results do not depend on scheduling or worker count.

struct SplitMix64 {
  std::uint64_t s;
  explicit SplitMix64(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  /// uniform in [0,1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  /// uniform in [a,b)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// standard normal (Box-Muller; consumes two draws)
  double normal() {
    double u1 = uniform(), u2 = uniform();
    u1 = u1 > 0 ? u1 : 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  return g.next();
}

// --- small helpers -----------------------------------------------------------

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = a;
    return x;
  }
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * double(i) / double(n - 1);
  return x;
}

/// max_i |a_i - b_i|
inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace cylwave
