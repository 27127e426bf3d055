#pragma once

// Command implementations behind the CLI: analyze, evolve, verify,
// convergence, oracle. Each returns the process exit code and writes its
// reports under the configured output directory. Exit codes: 0 success,
// 1 configuration error (raised as validation_error to the caller),
// 2 inconclusive, 3 blow-up.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cylwave/config.hpp"
#include "cylwave/diagnostics.hpp"
#include "cylwave/freewave.hpp"
#include "cylwave/identities.hpp"
#include "cylwave/reports.hpp"

namespace cylwave {

inline int run_analyze(const RunConfig& cfg, std::uint64_t seed, int threads) {
  FlowReport rep =
      check_bounded_weak_null(cfg.coefficients, cfg.chart, cfg.analyzer_R,
                              cfg.analyzer_n_xi, cfg.analyzer_n_y,
                              cfg.analyzer, seed, threads);
  if (cfg.write_json)
    write_json_file(std::filesystem::path(cfg.out_dir) / "flow_report.json",
                    flow_report_json(rep));
  if (cfg.write_csv && !rep.samples.empty())
    detail::write_text(std::filesystem::path(cfg.out_dir) / "flow_samples.csv",
                       flow_samples_csv(rep));
  std::printf("classification: %s", to_string(rep.classification));
  if (rep.has_sup_bound) std::printf("  sup_bound: %.6g", rep.sup_bound);
  if (rep.has_blowup)
    std::printf("  earliest_blowup_t: %.6g", rep.earliest_blowup_t);
  std::printf("  (%d samples, %d inconclusive)\n", rep.n_samples,
              rep.n_inconclusive);
  if (rep.classification == FlowClass::BlowUp) return 3;
  if (rep.n_inconclusive > 0) return 2;
  return 0;
}

inline int run_evolve(const RunConfig& cfg, std::uint64_t seed, int threads) {
  (void)seed;
  (void)threads;
  GridField init = build_initial_data(cfg);
  EvolveResult res = evolve(init, cfg.coefficients, cfg.solver);
  const std::filesystem::path out(cfg.out_dir);

  std::vector<std::string> files;
  if (cfg.write_csv) {
    for (std::size_t k = 0; k < res.history.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k);
      detail::write_text(out / name, snapshot_csv(res.history.at(k)));
      files.push_back(name);
    }
  }
  if (cfg.write_json)
    write_json_file(out / "manifest.json",
                    manifest_json(cfg, res.history, files));

  if (!res.ok()) {
    std::printf("evolve: blow-up signalled at t = %.6g after %ld steps\n",
                res.blowup_t, res.steps);
    return 3;
  }

  DiagnosticsSeries series = compute_series(res.history, cfg.parameters,
                                            cfg.coefficients, cfg.analyzer);
  if (cfg.write_csv)
    detail::write_text(out / "series.csv", series_csv(series));

  std::vector<std::pair<std::string, DecayFit>> fits;
  const double fit_lo = std::max(2.0 * cfg.solver.t_min, 0.02);
  const double fit_hi = 0.5;
  std::vector<double> ts, pv;
  for (const auto& r : series.rows) {
    ts.push_back(r.t);
    pv.push_back(r.pv_l2);
  }
  try {
    fits.emplace_back("||P V||_L2", decay_fit(ts, pv, fit_lo, fit_hi));
  } catch (const std::domain_error&) {
    // window too small or vanishing data; fits are optional in the report
  }
  auto usamp = sample_ubar_bound(res.history, cfg.chart, cfg.parameters.z);
  auto verdicts = bound_check(series, res.history, 100.0, cfg.solver.t_min,
                              1.0, usamp.empty() ? nullptr : &usamp);
  json rep = verdicts_json(verdicts, fits);

  // linear oracle block for zero-coefficient outgoing-wave runs
  if (cfg.coefficients.all_zero() && !cfg.data.empty() &&
      cfg.data.front().profile == "outgoing_wave") {
    double max_err = 0;
    const auto& d = cfg.data.front();
    const GridField& last = res.history.snaps.back();
    for (int i : plateau_determined_nodes(last, cfg.taper_margin)) {
      const double rho = last.rho(i);
      if (!(rho > 0)) continue;
      const double xi = rho * std::pow(2.0 - last.t, 1.0 / last.chart.m);
      if (!(xi > cfg.taper_margin * cfg.chart.rho0 * 1.5 &&
            xi < cfg.chart.rho0 * (1.0 - 1.5 * cfg.taper_margin)))
        continue;
      const double r = last.chart.r_of_rho(rho);
      const double sg = 1.0 / (r * (2.0 - last.t));
      const double F = d.amplitude * std::exp(-sq(sg - d.center) / sq(d.width));
      const double dF = F * (-2.0) * (sg - d.center) / sq(d.width);
      const double v4 = std::sqrt(last.t) * F;
      const double v0 = 2.0 * sg * dF / (2.0 - last.t);
      for (int K = 0; K < last.n_fields; ++K) {
        max_err = std::max(max_err, std::abs(last.at(K, c_V4, i) - v4));
        max_err = std::max(max_err, std::abs(last.at(K, c_V0, i) - v0));
      }
    }
    rep["oracle_comparison"] = {{"profile", "outgoing_wave"},
                                {"max_error_at_t_min", max_err}};
  }
  if (cfg.write_json) write_json_file(out / "diagnostics.json", rep);

  int fails = 0;
  for (const auto& v : verdicts) {
    std::printf("%-55s best C = %.4g  ceiling = %.4g  %s\n", v.name.c_str(),
                v.best_constant, v.ceiling, v.pass ? "PASS" : "FAIL");
    if (!v.pass) ++fails;
  }
  for (const auto& [name, f] : fits)
    std::printf("decay %-20s exponent = %.4f (r2 = %.4f)\n", name.c_str(),
                f.exponent, f.r2);
  return fails == 0 ? 0 : 2;
}

inline int run_verify(std::uint64_t seed, const std::string& inject_fault) {
  FaultInjection fault = FaultInjection::none;
  if (inject_fault == "bcal-sign") {
    fault = FaultInjection::flip_bcal_sign;
  } else if (!inject_fault.empty()) {
    throw validation_error("/inject-fault", "unknown fault '" + inject_fault + "'");
  }
  auto checks = run_identity_suite(50, 200, seed, fault);
  int fails = 0;
  bool published_noted = false;
  for (const auto& c : checks) {
    std::printf("%-68s max violation %.3e (tol %.0e)  %s%s\n", c.name.c_str(),
                c.max_violation, c.tol, c.pass() ? "PASS" : "FAIL",
                (!c.pass() && c.published_form_known_false) ? " (known)" : "");
    if (!c.pass()) {
      if (c.published_form_known_false) {
        published_noted = true;
      } else {
        ++fails;
      }
    }
  }
  if (published_noted)
    std::printf("note: the published factor-2 relative bound and the "
                "kappa+nu <= 1/2 range are falsified by Y = e1 - e4 at t = 1; "
                "the sharp forms (factor 4, kappa+nu <= 1/4) hold and are "
                "verified above\n");
  return fails == 0 ? 0 : 1;
}

struct ConvergenceReport {
  std::vector<double> dtau, time_err;
  std::vector<int> nrho;
  std::vector<double> space_err;
  double time_order = 0;
  bool exact = false;
  bool pass = false;
  bool aliasing = false;
};

/// Temporal order by self-convergence (three tau steps against an 8x finer
/// reference on the same grid, so the spatial floor cancels) plus a
/// spatial-floor check of the oracle error on two grids.
inline ConvergenceReport convergence_study(const RunConfig& cfg,
                                           double sharpness = 26.0) {
  if (!cfg.coefficients.all_zero())
    throw validation_error("/coefficients",
                           "convergence study requires zero coefficients");
  ConvergenceReport rep;
  const double amp = cfg.data.empty() ? 1.0 : cfg.data.front().amplitude;
  if (amp == 0.0) {
    rep.exact = rep.pass = true;
    return rep;
  }
  const auto prof =
      TorusWaveProfile::standard(cfg.chart.rho0, amp, sharpness);
  const int nf = cfg.coefficients.n_fields();
  auto run_once = [&](int n, double dtau) {
    GridField init = free_wave_field(prof, cfg.chart, 1.0, n, nf);
    SolverConfig sc = cfg.solver;
    sc.delta_tau = dtau;
    sc.snapshot_stride = 1 << 20;  // only first/last needed
    EvolveResult r = evolve(init, cfg.coefficients, sc);
    if (!r.ok()) throw std::runtime_error("convergence run failed");
    return r.history.snaps.back();
  };
  // keep the sweep below the CFL cap or the steps would silently clamp
  {
    GridField probe = free_wave_field(prof, cfg.chart, 1.0, cfg.n_rho, nf);
    const double base =
        std::min(cfg.solver.delta_tau, 0.5 * cfl_tau_cap(probe, cfg.solver.cfl));
    const GridField ref = run_once(cfg.n_rho, base / 8.0);
    for (double f : {1.0, 0.5, 0.25}) {
      const GridField g = run_once(cfg.n_rho, base * f);
      rep.dtau.push_back(base * f);
      double e = 0;
      for (std::size_t i = 0; i < g.data.size(); ++i)
        e = std::max(e, std::abs(g.data[i] - ref.data[i]));
      rep.time_err.push_back(e);
    }
  }
  double order = 0;
  int cnt = 0;
  for (std::size_t i = 0; i + 1 < rep.time_err.size(); ++i) {
    if (rep.time_err[i + 1] <= 0 || rep.time_err[i] <= 0) continue;
    order += std::log2(rep.time_err[i] / rep.time_err[i + 1]);
    ++cnt;
  }
  rep.time_order = cnt ? order / cnt : 0.0;
  for (int n : {cfg.n_rho, 2 * cfg.n_rho}) {
    rep.nrho.push_back(n);
    rep.space_err.push_back(free_wave_error(prof, run_once(n, cfg.solver.delta_tau)));
  }
  // aliasing indicator on the coarse grid's data
  {
    GridField init = free_wave_field(prof, cfg.chart, 1.0, cfg.n_rho, nf);
    std::vector<double> v4(init.comp(0, c_V4).begin(), init.comp(0, c_V4).end());
    rep.aliasing = nyquist_band_fraction(v4) > 0.05;
  }
  const bool space_ok =
      rep.space_err.back() <= 1e-7 ||
      rep.space_err.back() < 0.1 * rep.space_err.front();
  rep.pass = rep.time_order >= 3.0 && space_ok && !rep.aliasing;
  return rep;
}

inline int run_convergence(const RunConfig& cfg, double sharpness = 26.0) {
  ConvergenceReport rep = convergence_study(cfg, sharpness);
  if (rep.exact) {
    std::printf("convergence: zero data, errors identically 0 (exact)  PASS\n");
    return 0;
  }
  for (std::size_t i = 0; i < rep.dtau.size(); ++i)
    std::printf("dtau = %-10.3g  Linf error = %.6e\n", rep.dtau[i],
                rep.time_err[i]);
  std::printf("observed time order: %.2f\n", rep.time_order);
  for (std::size_t i = 0; i < rep.nrho.size(); ++i)
    std::printf("n_rho = %-6d  Linf error = %.6e\n", rep.nrho[i],
                rep.space_err[i]);
  if (rep.aliasing)
    std::printf("note: top-of-spectrum energy fraction exceeds 5%% -- the grid "
                "does not resolve the data (aliasing)\n");
  std::printf("convergence: %s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 2;
}

inline int run_oracle(const RunConfig& cfg) {
  if (!cfg.coefficients.all_zero())
    throw validation_error("/coefficients", "oracle run requires zero coefficients");
  const double amp = cfg.data.empty() ? 1.0 : std::max(cfg.data.front().amplitude, 1e-300);
  const auto prof = TorusWaveProfile::standard(cfg.chart.rho0, amp);
  GridField init = free_wave_field(prof, cfg.chart, 1.0, cfg.n_rho,
                                   cfg.coefficients.n_fields());
  EvolveResult r = evolve(init, cfg.coefficients, cfg.solver);
  if (!r.ok()) return 3;
  json rows = json::array();
  double maxe = 0;
  for (const auto& g : r.history.snaps) {
    const double e = free_wave_error(prof, g);
    rows.push_back({{"t", g.t}, {"linf_error", e}});
    maxe = std::max(maxe, e);
  }
  json j;
  j["profile_sharpness"] = prof.sharpness;
  j["rows"] = rows;
  j["max_error"] = maxe;
  if (cfg.write_json)
    write_json_file(std::filesystem::path(cfg.out_dir) / "oracle.json", j);
  std::printf("oracle: max Linf error over run = %.6e\n", maxe);
  return 0;
}

}  // namespace cylwave
