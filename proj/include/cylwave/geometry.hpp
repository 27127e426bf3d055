#pragma once

// The cylinder-at-spatial-infinity chart: the compactifying diffeomorphism
// and its inverse, the conformal factor, the radial cutoff, initial-data
// transformation and extension, the constraints, and reconstruction of the
// physical solution from evolved fields.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cylwave/coefficients.hpp"
#include "cylwave/common.hpp"
#include "cylwave/fft.hpp"
#include "cylwave/grid.hpp"
#include "cylwave/scalars.hpp"

namespace cylwave {

struct PhysicalPoint {
  double tbar = 0.0;  // >= 0
  double rbar = 1.0;  // > 0, with rbar^2 - tbar^2 > 0
  AngularPoint angular;
};

struct CompactPoint {
  double t = 1.0;  // (0, 2)
  double r = 1.0;  // > 0
  AngularPoint angular;
};

inline CompactPoint psi(const PhysicalPoint& p) {
  const double s = p.rbar * p.rbar - p.tbar * p.tbar;
  if (!(p.rbar > 0) || !(s > 0))
    throw std::domain_error("psi: point must satisfy rbar^2 - tbar^2 > 0");
  return {1.0 - p.tbar / p.rbar, p.rbar / s, p.angular};
}

inline PhysicalPoint psi_inverse(const CompactPoint& q) {
  if (!(q.t > 0 && q.t < 2) || !(q.r > 0))
    throw std::domain_error("psi_inverse: need t in (0,2) and r > 0");
  const double d = q.r * q.t * (2.0 - q.t);
  return {(1.0 - q.t) / d, 1.0 / d, q.angular};
}

inline double conformal_factor(const CompactPoint& q) {
  if (!(q.t > 0 && q.t < 2) || !(q.r > 0))
    throw std::domain_error("conformal_factor: need t in (0,2) and r > 0");
  return 1.0 / (q.r * (2.0 - q.t) * q.t);
}

// --- cutoff -------------------------------------------------------------------

/// C^9 polynomial step: 0 for x <= 0, 1 for x >= 1, the normalized
/// incomplete-beta transition x^10 * P9(x) between (derivative x^9 (1-x)^9,
/// vanishing to 9th order at both ends). Symmetric evaluation keeps the
/// values exact at the junctions so the grid representation is clean down to
/// roundoff; the spectral tail of the resulting cutoffs decays like k^-10,
/// well past the -8 log-log slope the smoothness checks require. (An
/// exp-based bump is nominally C^inf but its root-exponential tail is far
/// fatter on practical grids and fails those checks.)
inline double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.5) return 1.0 - smooth_step(1.0 - x);
  // 923780 * integral of s^9 (1-s)^9, expanded; coefficients exact integers
  static const double c[10] = {92378.0,    -755820.0, 2771340.0, -5969040.0,
                               8314020.0,  -7759752.0, 4849845.0, -1956240.0,
                               461890.0,   -48620.0};
  double p = 0.0;
  for (int j = 9; j >= 0; --j) p = p * x + c[j];
  double x10 = x * x;       // x^2
  x10 = x10 * x10 * x10;    // x^6
  x10 *= x * x * x * x;     // x^10
  return p * x10;
}

/// chi: 1 on [-rho0, rho0], support in (-2 rho0, 2 rho0), even, periodic.
inline double cutoff_chi(double rho, const RadialChart& chart) {
  const double x = std::abs(chart.wrap(rho));
  return smooth_step((2.0 * chart.rho0 - x) / chart.rho0);
}

/// Taper for extending band data: exactly 1 on [margin, rho0-margin],
/// exactly 0 outside (0, rho0).
inline double band_taper(double rho, const RadialChart& chart, double margin) {
  if (rho <= 0.0 || rho >= chart.rho0) return 0.0;
  return smooth_step(rho / margin) * smooth_step((chart.rho0 - rho) / margin);
}

// --- initial data --------------------------------------------------------------

/// Analytic closures for the physical data (vbar, wbar) on the t=0 slice.
/// dr_vbar is the exact radial derivative; the angular derivatives are taken
/// from the optional closures when supplied and by central differences of
/// width 1e-6 otherwise.
struct InitialDataFunctions {
  using Fn = std::function<double(double, double, double)>;  // (rbar, theta, phi)
  Fn vbar;
  Fn wbar;
  Fn dr_vbar;
  Fn dtheta_vbar;  // optional
  Fn dphi_vbar;    // optional

  static InitialDataFunctions zero() {
    auto z = [](double, double, double) { return 0.0; };
    return {z, z, z, nullptr, nullptr};
  }
};

/// Five-component fiber value at one point.
struct FiberState {
  double v[n_comp] = {0, 0, 0, 0, 0};
};

/// Initial data for the first-order system at t = 1 from (vbar, wbar), for
/// one field. rho must lie in the physical band (0, rho0). Angular components
/// are returned in the orthonormal frame (phi slot carries csc(theta)).
inline FiberState initial_data_transform(const InitialDataFunctions& data,
                                         const RadialChart& chart, double rho,
                                         const AngularPoint& p) {
  if (!(rho > 0.0))
    throw std::domain_error("initial_data_transform: rho must be positive");
  const double im = 1.0 / chart.r_of_rho(rho);  // rbar = 1/rho^m
  const double v = data.vbar(im, p.theta, p.phi);
  const double w = data.wbar(im, p.theta, p.phi);
  const double dv = data.dr_vbar(im, p.theta, p.phi);
  double dth, dph;
  if (data.dtheta_vbar && data.dphi_vbar) {
    dth = data.dtheta_vbar(im, p.theta, p.phi);
    dph = data.dphi_vbar(im, p.theta, p.phi);
  } else {
    const double h = 1e-6;
    dth = (data.vbar(im, p.theta + h, p.phi) - data.vbar(im, p.theta - h, p.phi)) /
          (2 * h);
    dph = (data.vbar(im, p.theta, p.phi + h) - data.vbar(im, p.theta, p.phi - h)) /
          (2 * h);
  }
  FiberState f;
  f.v[c_V0] = im * (im * dv + v - im * w);
  f.v[c_V1] = -im * (im * dv + v + im * w);
  f.v[c_Vth] = std::sqrt(2.0) * im * dth;
  f.v[c_Vph] = std::sqrt(2.0) * im * dph / std::sin(p.theta);
  f.v[c_V4] = im * v;
  return f;
}

/// Build t=1 data for the extended system on the torus: evaluate the band
/// transform, multiply by the taper, zero outside the band. Rotationally
/// invariant sector: one angular point serves the whole sphere.
inline GridField extend_to_S(const std::vector<InitialDataFunctions>& data,
                             const RadialChart& chart, int n_rho,
                             double taper_margin,
                             const AngularPoint& p = AngularPoint{}) {
  GridField g(1.0, n_rho, int(data.size()), chart);
  for (int i = 0; i < n_rho; ++i) {
    const double rho = g.rho(i);
    const double w = band_taper(rho, chart, taper_margin);
    if (w == 0.0) continue;
    for (int K = 0; K < g.n_fields; ++K) {
      const FiberState f = initial_data_transform(data[K], chart, rho, p);
      for (int c = 0; c < n_comp; ++c) g.at(K, c, i) = w * f.v[c];
    }
  }
  return g;
}

// --- constraints ----------------------------------------------------------------

/// Pointwise residual of the constraints at time t, per field and node:
///   (rho/m) d_rho V4 - (V1 - (2-t) sqrt(t) V0)/2
/// together with the angular constraint (angular derivative of V4) -
/// V_Lambda / p(t), which in the rotationally invariant sector reduces to
/// |V_Lambda|/p(t). At t = 1 both reduce to the stated data constraints.
/// Radial derivative is spectral.
inline std::vector<std::vector<double>> constraint_residual(const GridField& g,
                                                            double t) {
  const double L = g.chart.period();
  std::vector<std::vector<double>> res(g.n_fields);
  for (int K = 0; K < g.n_fields; ++K) {
    std::vector<double> v4(g.comp(K, c_V4).begin(), g.comp(K, c_V4).end());
    auto dv4 = spectral_derivative(v4, L);
    res[K].resize(g.n_rho);
    for (int i = 0; i < g.n_rho; ++i) {
      const double radial = (g.rho(i) / g.chart.m) * dv4[i] -
                            0.5 * (g.at(K, c_V1, i) -
                                   (2.0 - t) * std::sqrt(t) * g.at(K, c_V0, i));
      const double ang =
          std::hypot(g.at(K, c_Vth, i), g.at(K, c_Vph, i)) / ptt(t);
      res[K][i] = std::hypot(radial, ang);
    }
  }
  return res;
}

// --- reconstruction -------------------------------------------------------------

/// Time-stamped history as stored by the solver.
struct FieldHistory {
  std::vector<GridField> snaps;  // decreasing t, snaps.front().t == 1

  const GridField& at(std::size_t k) const { return snaps[k]; }
  std::size_t size() const { return snaps.size(); }

  /// Linear-in-t, spectral-in-rho sample of one component.
  double sample(int K, int c, double t, double rho) const {
    if (snaps.empty()) throw std::domain_error("history: empty");
    if (t > snaps.front().t + 1e-12 || t < snaps.back().t - 1e-12)
      throw std::domain_error("history: time outside evolved range");
    std::size_t hi = 0;
    while (hi + 1 < snaps.size() && snaps[hi + 1].t >= t) ++hi;
    const std::size_t lo = std::min(hi + 1, snaps.size() - 1);
    const GridField& a = snaps[hi];  // larger t
    const GridField& b = snaps[lo];  // smaller t
    const double L = a.chart.period();
    const double x = a.chart.wrap(rho) + 3.0 * a.chart.rho0;
    std::vector<double> va(a.comp(K, c).begin(), a.comp(K, c).end());
    const double fa = fourier_interp(va, L, x);
    if (lo == hi || a.t == b.t) return fa;
    std::vector<double> vb(b.comp(K, c).begin(), b.comp(K, c).end());
    const double fb = fourier_interp(vb, L, x);
    const double w = (a.t - t) / (a.t - b.t);
    return (1.0 - w) * fa + w * fb;
  }
};

/// ubar^K at a physical point from the evolved V4, Eq.-level formula
///   ubar = [rbar/(rbar^2-tbar^2)] (1-tbar/rbar)^{1/2} (1+tbar/rbar)
///          * V4(1-tbar/rbar, (rbar/(rbar^2-tbar^2))^{1/m}, theta, phi).
inline std::vector<double> reconstruct_ubar(const FieldHistory& hist,
                                            const RadialChart& chart,
                                            const PhysicalPoint& p) {
  const CompactPoint q = psi(p);
  const double rho = std::pow(q.r, 1.0 / chart.m);
  if (!(rho > 0.0 && rho < chart.rho0))
    throw std::domain_error("reconstruct_ubar: point outside the physical band");
  const double amp = q.r * std::sqrt(q.t) * (2.0 - q.t);
  std::vector<double> u(hist.snaps.front().n_fields);
  for (int K = 0; K < int(u.size()); ++K)
    u[K] = amp * hist.sample(K, c_V4, q.t, rho);
  return u;
}

// --- named analytic profiles -----------------------------------------------------

/// "zero" | "gaussian_in_inverse_r" | "gaussian_in_rho" | "power_tail" |
/// "outgoing_wave". amplitude scales vbar and wbar together.
inline InitialDataFunctions make_profile(const std::string& name,
                                         double amplitude, double center,
                                         double width, double p_tail) {
  if (name == "zero") return InitialDataFunctions::zero();
  if (name == "gaussian_in_rho") {
    // vbar chosen so the transformed V4(1, rho) is a Gaussian bump
    // A exp(-(rho-center)^2/width^2) in the chart coordinate (for m = 1):
    // vbar(r) = A exp(-(1/r - center)^2/width^2)/r. Unlike a Gaussian in
    // rbar this keeps every field component exponentially small at both
    // band edges, so the extension taper only ever cuts negligible values.
    auto g = [=](double rho) {
      return amplitude * std::exp(-sq(rho - center) / sq(width));
    };
    auto v = [=](double r, double, double) { return g(1.0 / r) / r; };
    auto dv = [=](double r, double, double) {
      const double rho = 1.0 / r;
      const double gg = g(rho);
      // d/dr [g(1/r)/r] = -g/r^2 + g' * (-1/r^2) / r
      const double gp = gg * (-2.0) * (rho - center) / sq(width);
      return -gg / (r * r) - gp / (r * r * r);
    };
    auto w = [](double, double, double) { return 0.0; };
    return {v, w, dv, nullptr, nullptr};
  }
  if (name == "gaussian_in_inverse_r") {
    auto v = [=](double r, double, double) {
      return amplitude * std::exp(-sq(r - center) / sq(width));
    };
    auto dv = [=](double r, double, double) {
      return amplitude * std::exp(-sq(r - center) / sq(width)) * (-2.0) *
             (r - center) / sq(width);
    };
    auto w = [](double, double, double) { return 0.0; };
    return {v, w, dv, nullptr, nullptr};
  }
  if (name == "outgoing_gaussian_in_rho") {
    // purely outgoing data built from the same chart-coordinate bump:
    // ubar = F(rbar - tbar)/rbar with F(y) = g(1/y), so vbar = g(1/r)/r and
    // wbar = -F'(r)/r = g'(1/r)/r^3 (m = 1 parametrization of the bump).
    // With this pair the ingoing component vanishes and nothing O(delta)
    // migrates outward into the cutoff transition during the run.
    auto g = [=](double rho) {
      return amplitude * std::exp(-sq(rho - center) / sq(width));
    };
    auto gp = [=](double rho) {
      return g(rho) * (-2.0) * (rho - center) / sq(width);
    };
    auto v = [=](double r, double, double) { return g(1.0 / r) / r; };
    auto dv = [=](double r, double, double) {
      const double rho = 1.0 / r;
      return -g(rho) / (r * r) - gp(rho) / (r * r * r);
    };
    auto w = [=](double r, double, double) { return gp(1.0 / r) / (r * r * r); };
    return {v, w, dv, nullptr, nullptr};
  }
  if (name == "power_tail") {
    auto v = [=](double r, double, double) {
      return amplitude * std::pow(r, -p_tail);
    };
    auto dv = [=](double r, double, double) {
      return -amplitude * p_tail * std::pow(r, -p_tail - 1.0);
    };
    auto w = [](double, double, double) { return 0.0; };
    return {v, w, dv, nullptr, nullptr};
  }
  if (name == "outgoing_wave") {
    // ubar = F(rbar - tbar)/rbar with Gaussian pulse F: an exact solution of
    // the flat wave equation, used as the linear oracle's data.
    auto F = [=](double x) { return amplitude * std::exp(-sq(x - center) / sq(width)); };
    auto dF = [=](double x) {
      return amplitude * std::exp(-sq(x - center) / sq(width)) * (-2.0) *
             (x - center) / sq(width);
    };
    auto v = [=](double r, double, double) { return F(r) / r; };
    auto dv = [=](double r, double, double) { return dF(r) / r - F(r) / (r * r); };
    auto w = [=](double r, double, double) { return -dF(r) / r; };
    return {v, w, dv, nullptr, nullptr};
  }
  throw validation_error("/data/profile", "unknown profile '" + name + "'");
}

}  // namespace cylwave
