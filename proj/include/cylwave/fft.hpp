#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "cylwave/common.hpp"

namespace cylwave {

using cplx = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
/// sign = -1 forward, +1 inverse (inverse is unnormalized).
inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const int n = int(a.size());
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * pi / len;
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cplx w(1.0);
      for (int j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline std::vector<cplx> fft(const std::vector<double>& x) {
  std::vector<cplx> a(x.begin(), x.end());
  fft_pow2(a, -1);
  return a;
}

inline std::vector<double> ifft_real(std::vector<cplx> a) {
  fft_pow2(a, +1);
  std::vector<double> x(a.size());
  const double inv = 1.0 / double(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = a[i].real() * inv;
  return x;
}

/// Signed wavenumber index of FFT bin k for length n.
inline int fft_mode(int k, int n) { return k <= n / 2 ? k : k - n; }

/// Spectral derivative of a real periodic sample of period L.
/// The Nyquist mode's derivative is set to zero (it is pure cosine).
inline std::vector<double> spectral_derivative(const std::vector<double>& v,
                                               double period) {
  const int n = int(v.size());
  auto a = fft(v);
  const double k0 = 2.0 * pi / period;
  for (int k = 0; k < n; ++k) {
    const int m = fft_mode(k, n);
    if (m == n / 2) {
      a[k] = 0.0;
    } else {
      a[k] *= cplx(0.0, k0 * m);
    }
  }
  return ifft_real(std::move(a));
}

/// Zero all modes with |m| > cutoff (2/3-rule dealiasing uses cutoff = n/3).
inline std::vector<double> spectral_filter(const std::vector<double>& v,
                                           int cutoff) {
  const int n = int(v.size());
  auto a = fft(v);
  for (int k = 0; k < n; ++k)
    if (std::abs(fft_mode(k, n)) > cutoff) a[k] = 0.0;
  return ifft_real(std::move(a));
}

/// |c_m| for m = 0..n/2 of the (normalized) Fourier series of v.
inline std::vector<double> mode_magnitudes(const std::vector<double>& v) {
  const int n = int(v.size());
  auto a = fft(v);
  std::vector<double> mag(n / 2 + 1);
  for (int m = 0; m <= n / 2; ++m) mag[m] = std::abs(a[m]) / double(n);
  return mag;
}

/// Fourier interpolation of a real periodic sample at arbitrary position.
/// x is measured from the first node; nodes sit at x_i = i * period / n.
inline double fourier_interp(const std::vector<double>& v, double period,
                             double x) {
  const int n = int(v.size());
  auto a = fft(v);
  const double th = 2.0 * pi * x / period;
  double s = a[0].real() / n;
  for (int m = 1; m < n / 2; ++m) {
    const cplx c = a[m] * (1.0 / double(n));
    s += 2.0 * (c.real() * std::cos(m * th) - c.imag() * std::sin(m * th));
  }
  // Nyquist: represented as a pure cosine for real signals.
  s += (a[n / 2].real() / n) * std::cos((n / 2) * th);
  return s;
}

/// Energy fraction carried by the top quarter of the spectrum; a crude but
/// serviceable aliasing indicator for under-resolved runs.
inline double nyquist_band_fraction(const std::vector<double>& v) {
  auto mag = mode_magnitudes(v);
  double total = 0, top = 0;
  const int n2 = int(mag.size()) - 1;
  for (int m = 1; m <= n2; ++m) {
    const double e = mag[m] * mag[m];
    total += e;
    if (m >= (3 * n2) / 4) top += e;
  }
  return total > 0 ? top / total : 0.0;
}

}  // namespace cylwave
