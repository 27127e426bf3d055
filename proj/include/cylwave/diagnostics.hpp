#pragma once

// Post-processing of evolved fields: reconstruction of the singular-time
// variables (W, X, Y), discrete norms and energies, decay-rate fits,
// residual of the second-order equation, verdicts for the decay bounds, and
// the empirical flow-assumption probe.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cylwave/asymptotics.hpp"
#include "cylwave/coefficients.hpp"
#include "cylwave/common.hpp"
#include "cylwave/fft.hpp"
#include "cylwave/geometry.hpp"
#include "cylwave/grid.hpp"
#include "cylwave/scalars.hpp"
#include "cylwave/solver.hpp"
#include "cylwave/system_ops.hpp"

namespace cylwave {

// --- discrete norms ---------------------------------------------------------------

/// L2 on the periodic grid (rectangle rule, exact for trigonometric data).
inline double grid_l2(const std::vector<double>& v, double drho) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s * drho);
}

/// Discrete H^k via spectral derivatives: sum of L2 norms of d^j, j <= k.
inline double grid_hk(const std::vector<double>& v, double period, int k) {
  double s = 0;
  std::vector<double> cur = v;
  const double drho = period / double(v.size());
  for (int j = 0; j <= k; ++j) {
    const double l2 = grid_l2(cur, drho);
    s += l2 * l2;
    if (j < k) cur = spectral_derivative(cur, period);
  }
  return std::sqrt(s);
}

// --- Fuchsian variables -----------------------------------------------------------

struct FuchsianSnapshot {
  double t = 1.0;
  int n_rho = 0;
  int n_fields = 0;
  // per field, per node
  std::vector<std::vector<double>> w;   // [K*n_comp+c][i], t^kappa d_rho V
  std::vector<std::vector<double>> x;   // [K*n_comp+c][i], t^-nu P V
  std::vector<std::vector<double>> y;   // [K][i], flow-inverted V0
  std::vector<char> y_ok;               // per node, backward flow defined
};

/// W by spectral differentiation scaled by t^kappa; X = t^{-nu} P V;
/// Y(t, y) = F(1, t, y, V0(t, y)), the backward flow per node.
inline FuchsianSnapshot fuchsian_variables(const GridField& g,
                                           const FuchsianParameters& params,
                                           const CartesianCoefficients& coeffs,
                                           const FlowOptions& opts) {
  FuchsianSnapshot fs;
  fs.t = g.t;
  fs.n_rho = g.n_rho;
  fs.n_fields = g.n_fields;
  const double L = g.chart.period();
  const double tk = std::pow(g.t, params.kappa);
  const double tn = std::pow(g.t, -params.nu);
  fs.w.resize(std::size_t(g.n_fields) * n_comp);
  fs.x.resize(std::size_t(g.n_fields) * n_comp);
  for (int K = 0; K < g.n_fields; ++K)
    for (int c = 0; c < n_comp; ++c) {
      std::vector<double> v(g.comp(K, c).begin(), g.comp(K, c).end());
      auto d = spectral_derivative(v, L);
      for (double& xx : d) xx *= tk;
      fs.w[std::size_t(K) * n_comp + c] = std::move(d);
      std::vector<double> xv(g.n_rho, 0.0);
      if (c != c_V0)
        for (int i = 0; i < g.n_rho; ++i) xv[i] = tn * g.at(K, c, i);
      fs.x[std::size_t(K) * n_comp + c] = std::move(xv);
    }
  fs.y.assign(g.n_fields, std::vector<double>(g.n_rho, 0.0));
  fs.y_ok.assign(g.n_rho, 1);
  const AngularPoint ref{0.5 * pi, 0.0};
  for (int i = 0; i < g.n_rho; ++i) {
    auto c = EffectiveCoefficient::at_point(coeffs, g.chart, g.rho(i), ref);
    AsymptoticState v0(g.n_fields);
    for (int K = 0; K < g.n_fields; ++K) v0[K] = g.at(K, c_V0, i);
    FlowResult r = flow(1.0, g.t, c, v0, opts);
    if (r.ok()) {
      for (int K = 0; K < g.n_fields; ++K) fs.y[K][i] = r.xi[K];
    } else {
      fs.y_ok[i] = 0;
    }
  }
  return fs;
}

// --- series ----------------------------------------------------------------------

struct DiagnosticsRow {
  double t;
  double v0_sup, v0_l2, v0_hk;
  double pv_l2, pv_hk;
  double dv_l2, dv_hk;
  double x_l2, w_l2, y_l2, y_sup;
  double piz_l2, piz_hk, piperp_l2;
  double energy;
  double constraint_max;
  double y_ok_fraction;
};

struct DiagnosticsSeries {
  int sobolev_k = 2;
  FuchsianParameters params;
  std::vector<DiagnosticsRow> rows;
  // Pi-perp block snapshots for the Cauchy-property check
  std::vector<std::vector<double>> piperp_block;  // [row][K*n + i] = Y values
};

inline DiagnosticsSeries compute_series(const FieldHistory& hist,
                                        const FuchsianParameters& params,
                                        const CartesianCoefficients& coeffs,
                                        const FlowOptions& opts,
                                        int sobolev_k = 2) {
  DiagnosticsSeries out;
  out.sobolev_k = sobolev_k;
  out.params = params;
  for (const GridField& g : hist.snaps) {
    const double L = g.chart.period();
    const double drho = g.drho();
    FuchsianSnapshot fs = fuchsian_variables(g, params, coeffs, opts);
    DiagnosticsRow r{};
    r.t = g.t;
    auto acc_l2 = [](double a, double b) { return std::sqrt(a * a + b * b); };
    for (int K = 0; K < g.n_fields; ++K) {
      std::vector<double> v0(g.comp(K, c_V0).begin(), g.comp(K, c_V0).end());
      r.v0_sup = std::max(r.v0_sup, max_abs(v0));
      r.v0_l2 = acc_l2(r.v0_l2, grid_l2(v0, drho));
      r.v0_hk = acc_l2(r.v0_hk, grid_hk(v0, L, sobolev_k));
      for (int c = 0; c < n_comp; ++c) {
        std::vector<double> v(g.comp(K, c).begin(), g.comp(K, c).end());
        auto dv = spectral_derivative(v, L);
        r.dv_l2 = acc_l2(r.dv_l2, grid_l2(dv, drho));
        r.dv_hk = acc_l2(r.dv_hk, grid_hk(dv, L, sobolev_k));
        if (c != c_V0) {
          r.pv_l2 = acc_l2(r.pv_l2, grid_l2(v, drho));
          r.pv_hk = acc_l2(r.pv_hk, grid_hk(v, L, sobolev_k));
        }
        r.w_l2 = acc_l2(r.w_l2, grid_l2(fs.w[std::size_t(K) * n_comp + c], drho));
        r.x_l2 = acc_l2(r.x_l2, grid_l2(fs.x[std::size_t(K) * n_comp + c], drho));
        r.piz_hk = acc_l2(r.piz_hk,
                          grid_hk(fs.w[std::size_t(K) * n_comp + c], L,
                                  std::max(0, sobolev_k - 1)));
        r.piz_hk = acc_l2(r.piz_hk,
                          grid_hk(fs.x[std::size_t(K) * n_comp + c], L,
                                  std::max(0, sobolev_k - 1)));
      }
      r.y_l2 = acc_l2(r.y_l2, grid_l2(fs.y[K], drho));
      r.y_sup = std::max(r.y_sup, max_abs(fs.y[K]));
    }
    r.piz_l2 = acc_l2(r.w_l2, r.x_l2);
    r.piperp_l2 = r.y_l2;
    // discrete energy: hc(Z, A0 Z) with the reduced W block
    double en = 0;
    const double b0d[n_comp] = {2 - g.t, 2 - g.t, 2 - g.t, 2 - g.t, 1.0};
    for (int K = 0; K < g.n_fields; ++K) {
      for (int c = 0; c < n_comp; ++c) {
        for (int i = 0; i < g.n_rho; ++i) {
          en += b0d[c] * sq(fs.w[std::size_t(K) * n_comp + c][i]) * drho;
          en += b0d[c] * sq(fs.x[std::size_t(K) * n_comp + c][i]) * drho;
        }
      }
      for (int i = 0; i < g.n_rho; ++i)
        en += (2 - g.t) * sq(fs.y[K][i]) * drho;
    }
    r.energy = en;
    double cmax = 0;
    for (const auto& res : constraint_residual(g, g.t))
      cmax = std::max(cmax, max_abs(res));
    r.constraint_max = cmax;
    int ok = 0;
    for (char c : fs.y_ok) ok += c;
    r.y_ok_fraction = double(ok) / double(fs.y_ok.size());
    out.rows.push_back(r);
    std::vector<double> blk;
    for (int K = 0; K < g.n_fields; ++K)
      blk.insert(blk.end(), fs.y[K].begin(), fs.y[K].end());
    out.piperp_block.push_back(std::move(blk));
  }
  return out;
}

// --- decay fits -------------------------------------------------------------------

struct DecayFit {
  double exponent = 0;
  double intercept = 0;  // log of the prefactor
  double r2 = 0;
  double stderr_exponent = 0;
  int n_samples = 0;
};

/// Least-squares slope of log(value) against log(t) over the window.
inline DecayFit decay_fit(const std::vector<double>& ts,
                          const std::vector<double>& vals, double t_lo,
                          double t_hi) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < t_lo || ts[i] > t_hi) continue;
    if (!(vals[i] > 0))
      throw std::domain_error("decay_fit: nonpositive value in window");
    xs.push_back(std::log(ts[i]));
    ys.push_back(std::log(vals[i]));
  }
  const int n = int(xs.size());
  if (n < 8) throw std::domain_error("decay_fit: need at least 8 samples in window");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += sq(xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += sq(ys[i] - my);
  }
  DecayFit f;
  f.n_samples = n;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double ssr = 0;
  for (int i = 0; i < n; ++i)
    ssr += sq(ys[i] - (f.intercept + f.exponent * xs[i]));
  f.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  f.stderr_exponent = n > 2 ? std::sqrt(ssr / ((n - 2) * sxx)) : 0.0;
  return f;
}

// --- bound verdicts ----------------------------------------------------------------

struct BoundVerdict {
  std::string name;
  double best_constant = 0;  // smallest C making the bound hold on the window
  double ceiling = 0;
  bool pass = false;
};

/// Best constant for quantity(t) <= C * t^exponent over the window.
inline double best_constant(const std::vector<double>& ts,
                            const std::vector<double>& vals, double expnt,
                            double t_lo, double t_hi) {
  double c = 0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] >= t_lo && ts[i] <= t_hi)
      c = std::max(c, vals[i] / std::pow(ts[i], expnt));
  return c;
}

struct UbarSample {
  double tbar, rbar;
  double value_norm;   // |ubar| (euclidean over fields)
  double weight;       // rbar/(rbar^2-tbar^2) (1-tbar/rbar)^{1-z}
};

/// The full verdict list of the decay theorem: best constants over the
/// window, PASS when the constant stays below `ceiling_factor` times the
/// t = 1 seed of the corresponding quantity.
inline std::vector<BoundVerdict> bound_check(
    const DiagnosticsSeries& s, const FieldHistory& hist,
    double ceiling_factor = 100.0, double t_lo = 0.0, double t_hi = 1.0,
    const std::vector<UbarSample>* ubar_samples = nullptr) {
  const auto& p = s.params;
  std::vector<double> ts;
  for (const auto& r : s.rows) ts.push_back(r.t);
  auto col = [&](double DiagnosticsRow::*f) {
    std::vector<double> v;
    for (const auto& r : s.rows) v.push_back(r.*f);
    return v;
  };
  std::vector<BoundVerdict> out;
  auto push = [&](const std::string& name, double c, double seed) {
    BoundVerdict v;
    v.name = name;
    v.best_constant = c;
    v.ceiling = ceiling_factor * std::max(seed, 1e-30);
    v.pass = c <= v.ceiling;
    out.push_back(v);
  };
  const DiagnosticsRow& first = s.rows.front();  // t = 1
  push("sup |V0| <= C", best_constant(ts, col(&DiagnosticsRow::v0_sup), 0.0,
                                      t_lo, t_hi),
       first.v0_sup);
  push("||V0||_Hk <= C t^-eps",
       best_constant(ts, col(&DiagnosticsRow::v0_hk), -p.epsilon, t_lo, t_hi),
       first.v0_hk);
  push("||P V||_Hk <= C t^nu",
       best_constant(ts, col(&DiagnosticsRow::pv_hk), p.nu, t_lo, t_hi),
       first.pv_hk);
  push("||D V||_Hk <= C t^-kappa",
       best_constant(ts, col(&DiagnosticsRow::dv_hk), -p.kappa, t_lo, t_hi),
       first.dv_hk);
  push("||Pi Z|| <= C t^(kappa-z)",
       best_constant(ts, col(&DiagnosticsRow::piz_hk), p.kappa - p.z, t_lo, t_hi),
       first.piz_hk);
  // Cauchy property of the unprojected block: for t < s,
  // || Piperp Z(t) - Piperp Z(s) || <= C s^(kappa - z).
  {
    double c = 0;
    const double drho = hist.snaps.front().drho();
    for (std::size_t a = 0; a + 1 < s.rows.size(); ++a) {
      if (s.rows[a].t < t_lo || s.rows[a].t > t_hi) continue;
      for (std::size_t b = a + 1; b < s.rows.size(); ++b) {
        if (s.rows[b].t < t_lo) continue;
        double d2 = 0;
        for (std::size_t i = 0; i < s.piperp_block[a].size(); ++i)
          d2 += sq(s.piperp_block[a][i] - s.piperp_block[b][i]);
        const double diff = std::sqrt(d2 * drho);
        c = std::max(c, diff / std::pow(s.rows[a].t, p.kappa - p.z));
      }
    }
    double seed = 0;
    for (double v : s.piperp_block.front()) seed = std::max(seed, std::abs(v));
    push("Cauchy: ||PiperpZ(t)-PiperpZ(s)|| <= C s^(kappa-z)", c, std::max(seed, 1.0));
  }
  if (ubar_samples) {
    double c = 0, seed = 0;
    for (const auto& u : *ubar_samples) {
      c = std::max(c, u.value_norm / u.weight);
      if (u.tbar == 0.0) seed = std::max(seed, u.value_norm / u.weight);
    }
    push("|ubar| <= C rbar/(rbar^2-tbar^2) (1-tbar/rbar)^(1-z)", c, seed);
  }
  return out;
}

/// Samples |ubar| at physical points of the evolved region together with the
/// pointwise-bound weight of the decay statement.
inline std::vector<UbarSample> sample_ubar_bound(const FieldHistory& hist,
                                                 const RadialChart& chart,
                                                 double z,
                                                 int n_r = 6, int n_t = 8) {
  std::vector<UbarSample> out;
  const double t_min = hist.snaps.back().t;
  const double r0 = std::pow(chart.rho0, chart.m);
  for (int qi = 0; qi < n_r; ++qi) {
    // compact radius within the physical band, away from the taper margins
    const double rho = chart.rho0 * (0.25 + 0.5 * qi / std::max(1, n_r - 1));
    const double r = chart.r_of_rho(rho);
    for (int ti = 0; ti < n_t; ++ti) {
      const double t = 1.0 - (1.0 - 1.05 * t_min) * ti / std::max(1, n_t - 1);
      const CompactPoint q{t, r, {0.5 * pi, 0.0}};
      const PhysicalPoint pp = psi_inverse(q);
      if (!(pp.rbar > 1.0 / r0) || !(pp.tbar >= 0)) continue;
      std::vector<double> u;
      try {
        u = reconstruct_ubar(hist, chart, pp);
      } catch (const std::domain_error&) {
        continue;
      }
      double nrm = 0;
      for (double x : u) nrm += x * x;
      UbarSample smp;
      smp.tbar = pp.tbar;
      smp.rbar = pp.rbar;
      smp.value_norm = std::sqrt(nrm);
      smp.weight = pp.rbar / (pp.rbar * pp.rbar - pp.tbar * pp.tbar) *
                   std::pow(1.0 - pp.tbar / pp.rbar, 1.0 - z);
      out.push_back(smp);
    }
  }
  return out;
}

// --- second-order residual -----------------------------------------------------------

/// Residual of the second-order conformal wave operator applied to
/// u = t^{-1/2} V4, with centered (nonuniform) time differences across the
/// three snapshots bracketing t_check and spectral radial derivatives, minus
/// the source. Returns per-field values on the requested nodes.
inline std::vector<std::vector<double>> wave_residual(
    const FieldHistory& hist, const CartesianCoefficients& coeffs,
    const RadialChart& chart, double t_check, const std::vector<int>& nodes) {
  if (hist.size() < 3)
    throw std::domain_error("wave_residual: need at least 3 snapshots");
  std::size_t j = 1;
  for (std::size_t k = 1; k + 1 < hist.size(); ++k)
    if (std::abs(hist.at(k).t - t_check) < std::abs(hist.at(j).t - t_check))
      j = k;
  const GridField& gm = hist.at(j - 1);  // larger t
  const GridField& g0 = hist.at(j);
  const GridField& gp = hist.at(j + 1);  // smaller t
  const double hp = gm.t - g0.t;         // toward larger t
  const double hm = g0.t - gp.t;
  const double t = g0.t;
  const double L = g0.chart.period();
  const int n = g0.n_rho;

  auto u_of = [&](const GridField& g, int K) {
    std::vector<double> u(g.comp(K, c_V4).begin(), g.comp(K, c_V4).end());
    const double s = 1.0 / std::sqrt(g.t);
    for (double& x : u) x *= s;
    return u;
  };

  const AngularPoint ref{0.5 * pi, 0.0};
  std::vector<std::vector<double>> res(g0.n_fields,
                                       std::vector<double>(nodes.size(), 0.0));
  const double m = double(chart.m);
  // state at the check time for the source
  std::vector<FiberState> V(g0.n_fields);
  for (int K = 0; K < g0.n_fields; ++K) {
    auto um = u_of(gm, K), u0 = u_of(g0, K), up = u_of(gp, K);
    std::vector<double> ut(n), utt(n);
    for (int i = 0; i < n; ++i) {
      ut[i] = (hm * hm * um[i] + (hp * hp - hm * hm) * u0[i] - hp * hp * up[i]) /
              (hm * hp * (hm + hp));
      utt[i] = 2.0 * (hm * um[i] - (hm + hp) * u0[i] + hp * up[i]) /
               (hm * hp * (hm + hp));
    }
    // Radial weights are applied pointwise AFTER the spectral derivatives;
    // products like rho * d_rho u are not periodic across the torus seam and
    // must never be differentiated spectrally themselves. In the chart
    // r = rho^m:  r^2 d_r^2 = (rho^2/m^2) d_rho^2 - ((m-1) rho / m^2) d_rho.
    auto du = spectral_derivative(u0, L);
    auto ddu = spectral_derivative(du, L);
    auto dut = spectral_derivative(ut, L);
    std::vector<double> lhs(n);
    for (int i = 0; i < n; ++i) {
      const double rho = g0.rho(i);
      const double r2drr =
          rho * rho / (m * m) * ddu[i] - (m - 1.0) * rho / (m * m) * du[i];
      const double rdut = rho / m * dut[i];
      lhs[i] = (t - 2.0) * t * utt[i] + r2drr + 2.0 * (1.0 - t) * rdut +
               2.0 * (t - 1.0) * ut[i];
    }
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const int i = nodes[a];
      for (int Kf = 0; Kf < g0.n_fields; ++Kf)
        for (int c = 0; c < n_comp; ++c) V[Kf].v[c] = g0.at(Kf, c, i);
      const double r = chart.r_of_rho(g0.rho(i));
      auto f = source_f(coeffs, t, r, ref, V);
      res[K][a] = lhs[i] - f[K];
    }
  }
  return res;
}

// --- flow assumption probe -----------------------------------------------------------

struct FlowProbeRow {
  double R;
  double omega;          // sup over samples and t of |F|
  double sup_teps_df;    // sup t^eps |DF|
  double sup_teps_dfinv; // sup t^eps |(DF)^{-1}|
};

struct FlowProbeReport {
  double epsilon;
  std::vector<FlowProbeRow> rows;  // decreasing R
  bool omega_monotone = true;
};

/// Measured flow-assumption constants on a decreasing radius sequence.
inline FlowProbeReport flow_assumption_probe(const CartesianCoefficients& coeffs,
                                             const RadialChart& chart,
                                             const std::vector<double>& radii,
                                             double epsilon,
                                             const FlowOptions& opts,
                                             std::uint64_t seed = 0) {
  FlowProbeReport rep;
  rep.epsilon = epsilon;
  std::vector<double> tgrid;
  for (int i = 0; i < 10; ++i)
    tgrid.push_back(std::pow(10.0, -2.5 * (i + 1) / 10.0));  // down to ~3e-3
  const SamplePlan plan = make_sample_plan(coeffs.n_fields(), chart,
                                           radii.front(), 6, 6, seed);
  for (double R : radii) {
    FlowProbeRow row{R, 0, 0, 0};
    for (double rho : plan.rhos) {
      if (cutoff_chi(rho, chart) == 0.0) continue;
      for (std::size_t ai = 0; ai < plan.angles.size(); ai += 5) {
        auto c = EffectiveCoefficient::at_point(coeffs, chart, rho,
                                                plan.angles[ai]);
        for (const auto& dir : plan.xi0s) {
          double nrm = 0;
          for (double x : dir) nrm += x * x;
          nrm = std::sqrt(nrm);
          if (nrm == 0) continue;
          AsymptoticState xi0 = dir;
          for (double& x : xi0) x *= R / nrm;
          for (double t : tgrid) {
            DflowResult d = dflow(t, 1.0, c, xi0, opts);
            if (!d.base.ok()) {
              rep.omega_monotone = false;
              continue;
            }
            double fn = 0;
            for (double x : d.base.xi) fn += x * x;
            row.omega = std::max(row.omega, std::sqrt(fn));
            const double te = std::pow(t, epsilon);
            row.sup_teps_df = std::max(row.sup_teps_df, te * d.d.frob());
            row.sup_teps_dfinv =
                std::max(row.sup_teps_dfinv, te * d.d_inv.frob());
          }
        }
      }
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
    if (rep.rows[i + 1].omega > rep.rows[i].omega * (1 + 1e-9))
      rep.omega_monotone = false;
  return rep;
}

}  // namespace cylwave
