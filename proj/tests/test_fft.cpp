#include <doctest.h>

#include "cylwave/cylwave.hpp"

using namespace cylwave;

TEST_CASE("spectral derivative is exact for resolved trigonometric data") {
  const int n = 64;
  const double L = 6.0;
  std::vector<double> v(n), dv_exact(n);
  for (int i = 0; i < n; ++i) {
    const double x = L * i / n;
    v[i] = 1.5 + std::sin(2 * pi * 3 * x / L) - 0.4 * std::cos(2 * pi * 7 * x / L);
    dv_exact[i] = (2 * pi * 3 / L) * std::cos(2 * pi * 3 * x / L) +
                  0.4 * (2 * pi * 7 / L) * std::sin(2 * pi * 7 * x / L);
  }
  auto dv = spectral_derivative(v, L);
  CHECK(max_abs_diff(dv, dv_exact) < 1e-12);
}

TEST_CASE("fourier interpolation reproduces trig data at arbitrary points") {
  const int n = 32;
  const double L = 6.0;
  std::vector<double> v(n);
  auto f = [&](double x) {
    return 0.7 + std::cos(2 * pi * 2 * x / L + 0.3) - 0.2 * std::sin(2 * pi * 5 * x / L);
  };
  for (int i = 0; i < n; ++i) v[i] = f(L * i / n);
  SplitMix64 rng(10);
  for (int k = 0; k < 20; ++k) {
    const double x = rng.uniform(0.0, L);
    CHECK(fourier_interp(v, L, x) == doctest::Approx(f(x)).epsilon(1e-12));
  }
}

TEST_CASE("filter removes exactly the high modes") {
  const int n = 64;
  const double L = 6.0;
  std::vector<double> v(n), low(n);
  for (int i = 0; i < n; ++i) {
    const double x = L * i / n;
    low[i] = std::sin(2 * pi * 4 * x / L);
    v[i] = low[i] + 0.5 * std::cos(2 * pi * 29 * x / L);
  }
  auto filtered = spectral_filter(v, n / 3);
  CHECK(max_abs_diff(filtered, low) < 1e-13);
}

TEST_CASE("round trip and mode magnitudes") {
  SplitMix64 rng(77);
  std::vector<double> v(128);
  for (double& x : v) x = rng.uniform(-1, 1);
  auto a = fft(v);
  auto back = ifft_real(std::move(a));
  CHECK(max_abs_diff(v, back) < 1e-13);
  std::vector<double> pure(64);
  for (int i = 0; i < 64; ++i) pure[i] = 2.0 * std::cos(2 * pi * 5 * i / 64.0);
  auto mag = mode_magnitudes(pure);
  CHECK(mag[5] == doctest::Approx(1.0));
  for (int m = 0; m <= 32; ++m)
    if (m != 5) CHECK(mag[m] < 1e-13);
}
