#pragma once

// The asymptotic ODE flow: integration in the autonomizing variable tau,
// variational (derivative-with-respect-to-data) equations, blow-up location,
// and the bounded-weak-null classifier.

#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cylwave/coefficients.hpp"
#include "cylwave/common.hpp"
#include "cylwave/geometry.hpp"
#include "cylwave/scalars.hpp"
#include "cylwave/smallmat.hpp"

namespace cylwave {

using AsymptoticState = std::vector<double>;  // xi^K

/// chi(rho) rho^m bbar^K_{IJ} frozen at one spatial point.
struct EffectiveCoefficient {
  TripleArray c;
  int n() const { return c.n_fields; }
  double max_abs() const { return cylwave::max_abs(c.v); }

  static EffectiveCoefficient at_point(const CartesianCoefficients& coeffs,
                                       const RadialChart& chart, double rho,
                                       const AngularPoint& p) {
    EffectiveCoefficient e;
    e.c = bbar_at(coeffs, p);
    const double w = cutoff_chi(rho, chart) * chart.r_of_rho(rho);
    for (double& x : e.c.v) x *= w;
    return e;
  }
  /// scalar constructor for tests: N = 1, coefficient value c.
  static EffectiveCoefficient scalar(double cval) {
    EffectiveCoefficient e;
    e.c.n_fields = 1;
    e.c.v = {cval};
    return e;
  }
};

/// Q^K(xi) = -2 c^K_{IJ} xi^I xi^J.
inline AsymptoticState q_map(const EffectiveCoefficient& c,
                             const AsymptoticState& xi) {
  const int n = c.n();
  AsymptoticState q(n, 0.0);
  for (int K = 0; K < n; ++K) {
    double s = 0;
    for (int I = 0; I < n; ++I)
      for (int J = 0; J < n; ++J) s += c.c.at(K, I, J) * xi[I] * xi[J];
    q[K] = -2.0 * s;
  }
  return q;
}

/// L^K_J(xi) = -2 c-symmetrized contraction, the variational-equation matrix.
inline Mat q_jacobian(const EffectiveCoefficient& c, const AsymptoticState& xi) {
  const int n = c.n();
  Mat L(n);
  for (int K = 0; K < n; ++K)
    for (int J = 0; J < n; ++J) {
      double s = 0;
      for (int I = 0; I < n; ++I) s += (c.c.at(K, J, I) + c.c.at(K, I, J)) * xi[I];
      L(K, J) = -2.0 * s;
    }
  return L;
}

struct FlowOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double tau_min = -6.0;             // integration horizon in tau
  double blowup_threshold = 1e4;     // |xi| beyond which blow-up is declared

  void validate() const {
    if (!(rel_tol > 0 && rel_tol <= 1e-2) || !(abs_tol > 0 && abs_tol <= 1e-2))
      throw validation_error("/analyzer", "tolerances must lie in (0, 1e-2]");
    if (!(tau_min < 0)) throw validation_error("/analyzer/tau_min", "must be negative");
    if (!(blowup_threshold >= 1e3))
      throw validation_error("/analyzer/blowup_threshold", "must be >= 1e3");
  }
};

struct FlowResult {
  enum class Status { ok, blowup, failed } status = Status::ok;
  AsymptoticState xi;       // state at the requested time (ok only)
  double sup_norm = 0.0;    // max |xi| seen along the trajectory
  double blowup_t = 0.0;    // t* in (0,1) when status == blowup
  std::string message;
  bool ok() const { return status == Status::ok; }
};

namespace detail {

// Dormand-Prince 5(4) pair on std::vector<double>.
struct Rk45 {
  using Rhs = std::function<void(double, const std::vector<double>&,
                                 std::vector<double>&)>;

  /// Integrates y from x0 to x1 (either direction). `monitor`, when set, is
  /// called after every accepted step and may stop the integration by
  /// returning false (the step just taken is still reported via last_*).
  static bool integrate(const Rhs& f, double x0, double x1,
                        std::vector<double>& y, double rtol, double atol,
                        const std::function<bool(double, const std::vector<double>&)>&
                            monitor = nullptr) {
    static const double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
         -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double cc[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
    static const double er[7] = {71.0 / 57600,  0.0,          -71.0 / 16695,
                                 71.0 / 1920,   -17253.0 / 339200,
                                 22.0 / 525,    -1.0 / 40};
    const int n = int(y.size());
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    double x = x0;
    double h = dir * std::min(1e-2, std::abs(x1 - x0));
    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> ytmp(n), ynew(n);
    f(x, y, k[0]);
    int iter = 0;
    while (dir * (x1 - x) > 1e-15 * std::max(1.0, std::abs(x))) {
      if (++iter > 2000000)
        throw integration_error("rk45: step count exceeded", x, y);
      if (dir * (x + h - x1) > 0) h = x1 - x;
      for (int s = 1; s < 7; ++s) {
        for (int i = 0; i < n; ++i) {
          double acc = 0;
          for (int j = 0; j < s; ++j) acc += a[s][j] * k[j][i];
          ytmp[i] = y[i] + h * acc;
        }
        f(x + cc[s] * h, ytmp, k[s]);
      }
      // 5th-order solution is stage-7 input (FSAL form of the pair)
      ynew = ytmp;
      double errnorm = 0;
      for (int i = 0; i < n; ++i) {
        double e = 0;
        for (int s = 0; s < 7; ++s) e += er[s] * k[s][i];
        e *= h;
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        errnorm += sq(e / sc);
      }
      errnorm = std::sqrt(errnorm / n);
      if (errnorm <= 1.0) {
        x += h;
        y = ynew;
        k[0] = k[6];  // FSAL
        if (monitor && !monitor(x, y)) return false;
      }
      double fac = 0.9 * std::pow(std::max(errnorm, 1e-16), -0.2);
      fac = std::min(5.0, std::max(0.2, fac));
      h *= fac;
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x)))
        throw integration_error("rk45: step size underflow", x, y);
    }
    return true;
  }

  /// Fixed-step classical RK4, used by the bisection refinement.
  static void rk4_fixed(const Rhs& f, double x0, double x1,
                        std::vector<double>& y, int nstep) {
    const int n = int(y.size());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), yt(n);
    const double h = (x1 - x0) / nstep;
    double x = x0;
    for (int s = 0; s < nstep; ++s) {
      f(x, y, k1);
      for (int i = 0; i < n; ++i) yt[i] = y[i] + 0.5 * h * k1[i];
      f(x + 0.5 * h, yt, k2);
      for (int i = 0; i < n; ++i) yt[i] = y[i] + 0.5 * h * k2[i];
      f(x + 0.5 * h, yt, k3);
      for (int i = 0; i < n; ++i) yt[i] = y[i] + h * k3[i];
      f(x + h, yt, k4);
      for (int i = 0; i < n; ++i)
        y[i] += (h / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      x += h;
    }
  }
};

inline double norm2(const std::vector<double>& v, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

/// Refine the tau at which |xi| first reaches `level`, given a bracket
/// (tau_a, ya) below and tau_b beyond it.
inline double refine_crossing(const Rk45::Rhs& f, double tau_a,
                              std::vector<double> ya, double tau_b,
                              double level, int nxi) {
  for (int it = 0; it < 60 && std::abs(tau_b - tau_a) > 1e-14; ++it) {
    const double mid = 0.5 * (tau_a + tau_b);
    std::vector<double> ym = ya;
    Rk45::rk4_fixed(f, tau_a, mid, ym, 8);
    if (norm2(ym, nxi) >= level) {
      tau_b = mid;
    } else {
      tau_a = mid;
      ya = std::move(ym);
    }
  }
  return 0.5 * (tau_a + tau_b);
}

}  // namespace detail

/// The flow F(t, t0, y, xi0): solution of the asymptotic equation in tau,
/// integrated adaptively between tau(t0) and tau(t). Blow-up is reported with
/// the crossing time refined by bisection at threshold/2 and threshold and
/// Richardson-extrapolated in 1/threshold.
inline FlowResult flow(double t, double t0, const EffectiveCoefficient& c,
                       const AsymptoticState& xi0, const FlowOptions& opts) {
  const int n = c.n();
  FlowResult out;
  out.xi = xi0;
  out.sup_norm = detail::norm2(xi0, n);
  if (t == t0 || c.max_abs() == 0.0) return out;  // identity flow

  detail::Rk45::Rhs f = [&](double, const std::vector<double>& y,
                            std::vector<double>& dy) { dy = q_map(c, y); };
  const double tau0 = tau_of_t(t0), tau1 = tau_of_t(t);
  const double M = opts.blowup_threshold;

  double tau_prev = tau0;
  std::vector<double> y_prev = xi0;
  double cross_half = std::numeric_limits<double>::quiet_NaN();
  double cross_full = std::numeric_limits<double>::quiet_NaN();
  bool have_half = false;

  auto monitor = [&](double tau, const std::vector<double>& y) {
    const double r = detail::norm2(y, n);
    out.sup_norm = std::max(out.sup_norm, r);
    if (!have_half && r >= 0.5 * M) {
      cross_half = detail::refine_crossing(f, tau_prev, y_prev, tau, 0.5 * M, n);
      have_half = true;
    }
    if (r >= M) {
      cross_full = detail::refine_crossing(f, tau_prev, y_prev, tau, M, n);
      return false;
    }
    tau_prev = tau;
    y_prev = y;
    return true;
  };

  try {
    std::vector<double> y = xi0;
    const bool completed = detail::Rk45::integrate(f, tau0, tau1, y,
                                                   opts.rel_tol, opts.abs_tol,
                                                   monitor);
    if (completed) {
      out.xi = std::move(y);
      return out;
    }
    // threshold crossed; extrapolate tau* = 2 tau_M - tau_{M/2}
    const double tau_star =
        have_half ? 2.0 * cross_full - cross_half : cross_full;
    out.status = FlowResult::Status::blowup;
    out.blowup_t = t_of_tau(tau_star);
    out.message = "norm exceeded blow-up threshold";
    return out;
  } catch (const integration_error& e) {
    out.status = FlowResult::Status::failed;
    out.message = e.what();
    if (int(e.state_last.size()) == n) out.xi = e.state_last;  // last state
    return out;
  }
}

struct DflowResult {
  FlowResult base;       // carries the transported state
  Mat d;                 // D_xi F
  Mat d_inv;             // (D_xi F)^{-1}
  double cond = 0.0;     // 1-norm condition number of d
};

/// Variational flow: integrates the matrix equation alongside the base flow
/// and inverts the result numerically. Condition numbers above 1e12 raise.
inline DflowResult dflow(double t, double t0, const EffectiveCoefficient& c,
                         const AsymptoticState& xi0, const FlowOptions& opts) {
  const int n = c.n();
  DflowResult out;
  std::vector<double> y(std::size_t(n) + std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) y[i] = xi0[i];
  for (int i = 0; i < n; ++i) y[n + i * n + i] = 1.0;

  detail::Rk45::Rhs f = [&](double, const std::vector<double>& s,
                            std::vector<double>& ds) {
    ds.assign(s.size(), 0.0);
    AsymptoticState xi(s.begin(), s.begin() + n);
    auto q = q_map(c, xi);
    for (int i = 0; i < n; ++i) ds[i] = q[i];
    const Mat L = q_jacobian(c, xi);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int k = 0; k < n; ++k) acc += L(i, k) * s[n + k * n + j];
        ds[n + i * n + j] = acc;
      }
  };

  const double M = opts.blowup_threshold;
  auto monitor = [&](double, const std::vector<double>& s) {
    return detail::norm2(s, n) < M;
  };
  try {
    const bool completed = detail::Rk45::integrate(
        f, tau_of_t(t0), tau_of_t(t), y, opts.rel_tol, opts.abs_tol, monitor);
    if (!completed) {
      out.base.status = FlowResult::Status::blowup;
      out.base.message = "base flow blew up during variational integration";
      return out;
    }
  } catch (const integration_error& e) {
    out.base.status = FlowResult::Status::failed;
    out.base.message = e.what();
    return out;
  }
  out.base.xi.assign(y.begin(), y.begin() + n);
  out.d = Mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.d(i, j) = y[n + i * n + j];
  out.d_inv = inverse(out.d);
  out.cond = cond1(out.d, out.d_inv);
  if (!(out.cond < 1e12))
    throw std::domain_error("dflow: variational matrix ill-conditioned (cond " +
                            std::to_string(out.cond) + ")");
  return out;
}

/// Cross-check route: integrates the transpose equation for (D_xi F)^{-T}
/// directly, d/dtau (D^{-1})^T = -L^T (D^{-1})^T, and returns (D)^{-1}.
inline Mat dflow_inverse_by_transpose_equation(double t, double t0,
                                               const EffectiveCoefficient& c,
                                               const AsymptoticState& xi0,
                                               const FlowOptions& opts) {
  const int n = c.n();
  std::vector<double> y(std::size_t(n) + std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) y[i] = xi0[i];
  for (int i = 0; i < n; ++i) y[n + i * n + i] = 1.0;
  detail::Rk45::Rhs f = [&](double, const std::vector<double>& s,
                            std::vector<double>& ds) {
    ds.assign(s.size(), 0.0);
    AsymptoticState xi(s.begin(), s.begin() + n);
    auto q = q_map(c, xi);
    for (int i = 0; i < n; ++i) ds[i] = q[i];
    const Mat L = q_jacobian(c, xi);
    // s holds W = (D^{-1})^T; dW = -L^T W
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int k = 0; k < n; ++k) acc += L(k, i) * s[n + k * n + j];
        ds[n + i * n + j] = -acc;
      }
  };
  detail::Rk45::integrate(f, tau_of_t(t0), tau_of_t(t), y, opts.rel_tol,
                          opts.abs_tol);
  Mat w(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = y[n + i * n + j];
  return w.transposed();
}

/// L-operator of the Y change of variables: (D_xi F(t, 1, y, Y))^{-1}.
inline Mat lmap(double t, const EffectiveCoefficient& c,
                const AsymptoticState& y_state, const FlowOptions& opts) {
  auto d = dflow(t, 1.0, c, y_state, opts);
  if (!d.base.ok())
    throw std::domain_error("lmap: base flow not defined down to t (" +
                            d.base.message + ")");
  return d.d_inv;
}

// --- classifier -----------------------------------------------------------------

enum class FlowClass { Null, Bounded, BlowUp };

inline const char* to_string(FlowClass c) {
  switch (c) {
    case FlowClass::Null: return "Null";
    case FlowClass::Bounded: return "Bounded";
    case FlowClass::BlowUp: return "BlowUp";
  }
  return "?";
}

struct FlowSampleRecord {
  double rho = 0, theta = 0, phi = 0;
  AsymptoticState xi0;
  FlowResult::Status outcome = FlowResult::Status::ok;
  double sup_norm = 0;
  double blowup_t = 0;  // valid when outcome == blowup
};

struct FlowReport {
  FlowClass classification = FlowClass::Bounded;
  bool has_sup_bound = false;
  double sup_bound = 0;
  bool has_blowup = false;
  double earliest_blowup_t = 0;  // largest t* over blown samples
  int n_samples = 0;
  int n_inconclusive = 0;
  std::vector<FlowSampleRecord> samples;
};

/// y-grid over supp(chi) x angles (poles excluded), xi on spheres of radii
/// {R, R/2, R/4}; deterministic given `seed`.
struct SamplePlan {
  std::vector<double> rhos;
  std::vector<AngularPoint> angles;
  std::vector<AsymptoticState> xi0s;
};

inline SamplePlan make_sample_plan(int n_fields, const RadialChart& chart,
                                   double R, int n_xi, int n_y,
                                   std::uint64_t seed) {
  SamplePlan plan;
  // rho samples: anchor the plateau, then fill supp(chi) uniformly.
  plan.rhos = {chart.rho0, -chart.rho0, 0.5 * chart.rho0, -0.5 * chart.rho0};
  for (int i = 0; int(plan.rhos.size()) < std::max(n_y, 4); ++i) {
    const double x = -2.0 * chart.rho0 +
                     4.0 * chart.rho0 * (i + 0.5) / std::max(n_y, 4);
    plan.rhos.push_back(x);
  }
  plan.rhos.resize(std::max(n_y, 4));
  for (double th : {0.05, 0.25 * pi, 0.5 * pi, 0.75 * pi, pi - 0.05})
    for (double ph : {0.1, 0.5 * pi + 0.1, pi + 0.1, 1.5 * pi + 0.1})
      plan.angles.push_back({th, ph});
  // xi directions: +-e_1 always included, remainder seeded isotropic.
  std::vector<AsymptoticState> dirs;
  AsymptoticState e1(n_fields, 0.0);
  e1[0] = 1.0;
  dirs.push_back(e1);
  AsymptoticState me1 = e1;
  me1[0] = -1.0;
  dirs.push_back(me1);
  SplitMix64 rng(mix_seed(seed, 0xd1f));
  while (int(dirs.size()) < std::max(n_xi, 2)) {
    AsymptoticState d(n_fields);
    double nrm = 0;
    for (double& x : d) {
      x = rng.normal();
      nrm += x * x;
    }
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) continue;
    for (double& x : d) x /= nrm;
    dirs.push_back(d);
  }
  for (double radius : {R, 0.5 * R, 0.25 * R})
    for (const auto& d : dirs) {
      AsymptoticState x = d;
      for (double& v : x) v *= radius;
      plan.xi0s.push_back(x);
    }
  return plan;
}

/// Definition-level classifier: Null if the null form vanishes identically,
/// BlowUp if any sampled trajectory crosses the threshold, otherwise Bounded
/// with the measured sup. Per-sample integration failures are marked
/// inconclusive and do not abort the scan.
inline FlowReport check_bounded_weak_null(const CartesianCoefficients& coeffs,
                                          const RadialChart& chart, double R,
                                          int n_xi, int n_y,
                                          const FlowOptions& opts,
                                          std::uint64_t seed = 0,
                                          int threads = 1) {
  opts.validate();
  FlowReport rep;
  const SamplePlan plan =
      make_sample_plan(coeffs.n_fields(), chart, R, n_xi, n_y, seed);

  double bmax = 0;
  for (const auto& ang : plan.angles) bmax = std::max(bmax, bbar_max_abs(coeffs, ang));
  if (bmax < 1e-13) {
    rep.classification = FlowClass::Null;
    rep.has_sup_bound = true;
    rep.sup_bound = R;  // flow is the identity
    return rep;
  }

  struct Task {
    double rho;
    AngularPoint ang;
    const AsymptoticState* xi0;
  };
  std::vector<Task> tasks;
  for (double rho : plan.rhos)
    for (const auto& ang : plan.angles) {
      if (cutoff_chi(rho, chart) == 0.0) continue;
      for (const auto& xi0 : plan.xi0s) tasks.push_back({rho, ang, &xi0});
    }
  const double t_end = t_of_tau(opts.tau_min);
  rep.samples.resize(tasks.size());

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const Task& tk = tasks[s];
      auto c = EffectiveCoefficient::at_point(coeffs, chart, tk.rho, tk.ang);
      FlowResult r = flow(t_end, 1.0, c, *tk.xi0, opts);
      FlowSampleRecord& rec = rep.samples[s];
      rec.rho = tk.rho;
      rec.theta = tk.ang.theta;
      rec.phi = tk.ang.phi;
      rec.xi0 = *tk.xi0;
      rec.outcome = r.status;
      rec.sup_norm = r.sup_norm;
      rec.blowup_t = r.blowup_t;
    }
  };
  if (threads <= 1 || tasks.size() < 2) {
    run_range(0, tasks.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t nt = std::min<std::size_t>(threads, tasks.size());
    for (std::size_t w = 0; w < nt; ++w) {
      const std::size_t lo = tasks.size() * w / nt;
      const std::size_t hi = tasks.size() * (w + 1) / nt;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  rep.n_samples = int(rep.samples.size());
  double sup = 0;
  for (const auto& rec : rep.samples) {
    switch (rec.outcome) {
      case FlowResult::Status::blowup:
        rep.has_blowup = true;
        rep.earliest_blowup_t = std::max(rep.earliest_blowup_t, rec.blowup_t);
        break;
      case FlowResult::Status::failed:
        ++rep.n_inconclusive;
        break;
      case FlowResult::Status::ok:
        sup = std::max(sup, rec.sup_norm);
        break;
    }
  }
  if (rep.has_blowup) {
    rep.classification = FlowClass::BlowUp;
  } else {
    rep.classification = FlowClass::Bounded;
    rep.has_sup_bound = true;
    rep.sup_bound = sup;
  }
  return rep;
}

}  // namespace cylwave
