#pragma once

#include <cassert>
#include <cmath>

namespace cylwave {

/// q(t) = (-1 + 2 t^2 - t^3) / (1 + 4 t - 4 t^2 + t^3); q(0) = -1, q(1) = 0.
inline double qtt(double t) {
  const double den = 1.0 + 4.0 * t - 4.0 * t * t + t * t * t;
  assert(den > 0.0);  // holds on [0,1]
  return (-1.0 + 2.0 * t * t - t * t * t) / den;
}

/// p(t) = sqrt((1 + 4 t - 4 t^2 + t^3) / (2 - t)); p(0) = 1/sqrt(2), p(1) = sqrt(2).
inline double ptt(double t) {
  const double num = 1.0 + 4.0 * t - 4.0 * t * t + t * t * t;
  assert(num > 0.0 && t < 2.0);
  return std::sqrt(num / (2.0 - t));
}

/// tau = ln(t/(2-t))/2, the autonomizing time variable; tau(1) = 0.
inline double tau_of_t(double t) {
  if (!(t > 0.0)) throw std::domain_error("tau_of_t: t must be positive");
  return 0.5 * std::log(t / (2.0 - t));
}

/// Inverse of tau_of_t: t = 2 e^{2 tau} / (1 + e^{2 tau}).
inline double t_of_tau(double tau) {
  const double e = std::exp(2.0 * tau);
  return 2.0 * e / (1.0 + e);
}

}  // namespace cylwave
