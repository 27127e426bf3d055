#pragma once

// Method-of-lines evolution of the extended system on the periodic radial
// grid in the rotationally invariant sector: pseudospectral in rho, classical
// RK4 with uniform steps in tau = ln(t/(2-t))/2 (so the physical step
// contracts like t(2-t)/2 toward the singular time).

#include <cmath>
#include <string>
#include <vector>

#include "cylwave/coefficients.hpp"
#include "cylwave/common.hpp"
#include "cylwave/fft.hpp"
#include "cylwave/geometry.hpp"
#include "cylwave/grid.hpp"
#include "cylwave/scalars.hpp"
#include "cylwave/system_ops.hpp"

namespace cylwave {

struct SolverConfig {
  double t_min = 0.25;
  double delta_tau = 1e-3;
  double cfl = 0.5;
  bool dealias = true;
  int snapshot_stride = 10;

  void validate() const {
    if (!(t_min >= 1e-4 && t_min < 1.0))
      throw validation_error("/solver/t_min",
                             "t_min must lie in [1e-4, 1); the source assembly's "
                             "cancellation error model floors the time at 1e-4");
    if (!(delta_tau > 0)) throw validation_error("/solver/delta_tau", "must be positive");
    if (!(cfl > 0)) throw validation_error("/solver/cfl", "must be positive");
    if (snapshot_stride < 1)
      throw validation_error("/solver/snapshot_stride", "must be >= 1");
  }
};

struct EvolveResult {
  enum class Status { ok, blowup, failed } status = Status::ok;
  FieldHistory history;
  double blowup_t = 0.0;
  long steps = 0;
  std::string message;
  bool ok() const { return status == Status::ok; }
};

namespace detail {

/// Everything the RHS needs that does not change during a run. The
/// rotationally invariant sector makes the coefficient data a single angular
/// sample.
struct RhsWorkspace {
  AngularCoefficientData ad;
  RadialChart chart;
  int n_fields = 0;
  int n_rho = 0;
  std::vector<double> chi_rho_over_m;  // chi(rho_i) rho_i / m
  bool dealias = true;
  bool has_source = false;

  static RhsWorkspace make(const CartesianCoefficients& coeffs,
                           const GridField& g, bool dealias) {
    RhsWorkspace ws;
    ws.ad = angular_data(coeffs, AngularPoint{0.5 * pi, 0.0});
    ws.chart = g.chart;
    ws.n_fields = g.n_fields;
    ws.n_rho = g.n_rho;
    ws.dealias = dealias;
    ws.has_source = !coeffs.all_zero();
    ws.chi_rho_over_m.resize(g.n_rho);
    for (int i = 0; i < g.n_rho; ++i) {
      const double rho = g.rho(i);
      ws.chi_rho_over_m[i] = cutoff_chi(rho, g.chart) * rho / g.chart.m;
    }
    return ws;
  }
};

/// dV/dt on the grid. Angular derivative terms vanish identically in this
/// sector; the B0 inverse is diagonal.
inline void rhs_time(const RhsWorkspace& ws, double t, const GridField& g,
                     GridField& out) {
  const int n = ws.n_rho, nf = ws.n_fields;
  const double L = g.chart.period();
  const OperatorSet op = operator_set(t);
  const Mat BP = op.Bcal * op.Pbb;
  const double inv_t = 1.0 / t;
  const double b0_inv[n_comp] = {1.0 / (2.0 - t), 1.0 / (2.0 - t),
                                 1.0 / (2.0 - t), 1.0 / (2.0 - t), 1.0};
  const double b1_diag[n_comp] = {t, -(2.0 - t), (2.0 - t) * qtt(t),
                                  (2.0 - t) * qtt(t), 0.0};

  // spectral d_rho of every component
  std::vector<std::vector<double>> dv(std::size_t(nf) * n_comp);
  for (int K = 0; K < nf; ++K)
    for (int c = 0; c < n_comp; ++c) {
      std::vector<double> v(g.comp(K, c).begin(), g.comp(K, c).end());
      dv[std::size_t(K) * n_comp + c] = spectral_derivative(v, L);
    }

  // quadratic source, dealiased when requested
  std::vector<std::vector<double>> src;
  if (ws.has_source) {
    const SourceContext ctx = SourceContext::make(ws.ad, t);
    src.assign(std::size_t(nf) * n_comp, std::vector<double>(n, 0.0));
    std::vector<FiberState> V(nf);
    for (int i = 0; i < n; ++i) {
      for (int K = 0; K < nf; ++K)
        for (int c = 0; c < n_comp; ++c) V[K].v[c] = g.at(K, c, i);
      const ExtendedSource es = source_extended(ctx, ws.chart, g.rho(i), V);
      for (int K = 0; K < nf; ++K)
        for (int c = 0; c < n_comp; ++c)
          src[std::size_t(K) * n_comp + c][i] = es.total[K].v[c];
    }
    if (ws.dealias)
      for (auto& s : src)
        if (max_abs(s) > 0) s = spectral_filter(s, n / 3);
  }

  for (int K = 0; K < nf; ++K) {
    for (int i = 0; i < n; ++i) {
      double v[n_comp], flux[n_comp], lower[n_comp];
      for (int c = 0; c < n_comp; ++c) v[c] = g.at(K, c, i);
      for (int c = 0; c < n_comp; ++c)
        flux[c] = -inv_t * ws.chi_rho_over_m[i] * b1_diag[c] *
                  dv[std::size_t(K) * n_comp + c][i];
      // (1/t) Bcal P v + Ccal v
      for (int c = 0; c < n_comp; ++c) {
        double s = 0;
        for (int c2 = 0; c2 < n_comp; ++c2)
          s += inv_t * BP(c, c2) * v[c2] + op.Ccal(c, c2) * v[c2];
        lower[c] = s;
      }
      for (int c = 0; c < n_comp; ++c) {
        double total = flux[c] + lower[c];
        if (ws.has_source) total += src[std::size_t(K) * n_comp + c][i];
        out.at(K, c, i) = b0_inv[c] * total;
      }
    }
  }
}

}  // namespace detail

/// Largest admissible tau step from the advection speeds: |d rho / d tau| is
/// bounded by (2-t) max|chi rho| / m over the grid; the cap keeps an RK4 +
/// spectral combination comfortably inside its stability region.
inline double cfl_tau_cap(const GridField& g, double cfl) {
  double chirho_max = 0;
  for (int i = 0; i < g.n_rho; ++i)
    chirho_max = std::max(chirho_max,
                          cutoff_chi(g.rho(i), g.chart) * std::abs(g.rho(i)));
  if (chirho_max == 0) return 1.0;
  return cfl * g.drho() * g.chart.m / (2.0 * chirho_max);
}

/// Backward evolution from t = 1 to config.t_min. Snapshots are stored every
/// `snapshot_stride` accepted steps plus the first and last.
inline EvolveResult evolve(const GridField& initial,
                           const CartesianCoefficients& coeffs,
                           const SolverConfig& config) {
  config.validate();
  if (!initial.all_finite())
    throw validation_error("", "initial data must be finite");
  if (!coeffs.all_zero()) validate_reduced(coeffs);

  EvolveResult res;
  auto ws = detail::RhsWorkspace::make(coeffs, initial, config.dealias);

  const double tau_end = tau_of_t(config.t_min);
  double dtau = std::min(config.delta_tau, cfl_tau_cap(initial, config.cfl));
  const long n_steps = long(std::ceil(-tau_end / dtau - 1e-12));
  dtau = -tau_end / double(n_steps);

  GridField state = initial;
  state.t = 1.0;
  res.history.snaps.push_back(state);

  GridField k1 = state, k2 = state, k3 = state, k4 = state, tmp = state;
  auto rhs_tau = [&](double tau, const GridField& s, GridField& out) {
    const double t = t_of_tau(tau);
    detail::rhs_time(ws, t, s, out);
    const double scale = t * (2.0 - t);
    for (double& x : out.data) x *= scale;
  };

  double tau = 0.0;
  for (long step = 0; step < n_steps; ++step) {
    const double h = -dtau;
    rhs_tau(tau, state, k1);
    for (std::size_t i = 0; i < state.data.size(); ++i)
      tmp.data[i] = state.data[i] + 0.5 * h * k1.data[i];
    rhs_tau(tau + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < state.data.size(); ++i)
      tmp.data[i] = state.data[i] + 0.5 * h * k2.data[i];
    rhs_tau(tau + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < state.data.size(); ++i)
      tmp.data[i] = state.data[i] + h * k3.data[i];
    rhs_tau(tau + h, tmp, k4);
    for (std::size_t i = 0; i < state.data.size(); ++i)
      state.data[i] += (h / 6.0) * (k1.data[i] + 2 * k2.data[i] +
                                    2 * k3.data[i] + k4.data[i]);
    tau += h;
    state.t = t_of_tau(tau);
    ++res.steps;
    if (!state.all_finite() || state.max_abs() > 1e12) {
      res.status = EvolveResult::Status::blowup;
      res.blowup_t = state.t;
      res.message = "solution left the finite range at t = " +
                    std::to_string(state.t);
      return res;
    }
    if (step % config.snapshot_stride == config.snapshot_stride - 1 ||
        step == n_steps - 1)
      res.history.snaps.push_back(state);
  }
  return res;
}

}  // namespace cylwave
