#pragma once

// Report emission: FlowReport and diagnostics as JSON, sample tables and
// series as CSV, snapshot dumps with a JSON manifest. Key order and float
// formatting are fixed, so identical inputs produce byte-identical files.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylwave/asymptotics.hpp"
#include "cylwave/config.hpp"
#include "cylwave/diagnostics.hpp"
#include "cylwave/grid.hpp"

namespace cylwave {

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << s;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline json flow_report_json(const FlowReport& r) {
  json j;
  j["classification"] = to_string(r.classification);
  if (r.has_sup_bound) j["sup_bound"] = r.sup_bound;
  if (r.has_blowup) j["earliest_blowup_t"] = r.earliest_blowup_t;
  j["n_samples"] = r.n_samples;
  j["n_inconclusive"] = r.n_inconclusive;
  return j;
}

inline std::string flow_samples_csv(const FlowReport& r) {
  std::string s = "rho,theta,phi";
  const int n = r.samples.empty() ? 0 : int(r.samples.front().xi0.size());
  for (int k = 0; k < n; ++k) s += ",xi0_" + std::to_string(k);
  s += ",outcome,sup_norm,blowup_t\n";
  for (const auto& rec : r.samples) {
    s += detail::fmt(rec.rho) + "," + detail::fmt(rec.theta) + "," +
         detail::fmt(rec.phi);
    for (double x : rec.xi0) s += "," + detail::fmt(x);
    switch (rec.outcome) {
      case FlowResult::Status::ok: s += ",ok"; break;
      case FlowResult::Status::blowup: s += ",blowup"; break;
      case FlowResult::Status::failed: s += ",inconclusive"; break;
    }
    s += "," + detail::fmt(rec.sup_norm) + "," +
         (rec.outcome == FlowResult::Status::blowup ? detail::fmt(rec.blowup_t)
                                                    : std::string("")) +
         "\n";
  }
  return s;
}

inline std::string snapshot_csv(const GridField& g) {
  std::string s = "rho";
  static const char* comp_names[n_comp] = {"V0", "V1", "Vth", "Vph", "V4"};
  for (int K = 0; K < g.n_fields; ++K)
    for (int c = 0; c < n_comp; ++c)
      s += std::string(",") + comp_names[c] + "_" + std::to_string(K + 1);
  s += "\n";
  for (int i = 0; i < g.n_rho; ++i) {
    s += detail::fmt(g.rho(i));
    for (int K = 0; K < g.n_fields; ++K)
      for (int c = 0; c < n_comp; ++c) s += "," + detail::fmt(g.at(K, c, i));
    s += "\n";
  }
  return s;
}

inline json manifest_json(const RunConfig& cfg, const FieldHistory& hist,
                          const std::vector<std::string>& files) {
  json j;
  j["schema_version"] = 1;
  j["grid"] = {{"n_rho", cfg.n_rho},
               {"m", cfg.chart.m},
               {"rho0", cfg.chart.rho0},
               {"period", cfg.chart.period()}};
  j["parameters"] = {{"epsilon", cfg.parameters.epsilon},
                     {"kappa", cfg.parameters.kappa},
                     {"nu", cfg.parameters.nu},
                     {"z", cfg.parameters.z},
                     {"m", cfg.parameters.m}};
  json times = json::array();
  for (const auto& g : hist.snaps) times.push_back(g.t);
  j["times"] = times;
  j["snapshots"] = files;
  return j;
}

inline std::string series_csv(const DiagnosticsSeries& s) {
  std::string out =
      "t,v0_sup,v0_l2,v0_hk,pv_l2,pv_hk,dv_l2,dv_hk,x_l2,w_l2,y_l2,y_sup,"
      "piz_l2,piz_hk,piperp_l2,energy,constraint_max,y_ok_fraction\n";
  for (const auto& r : s.rows) {
    out += detail::fmt(r.t);
    for (double v : {r.v0_sup, r.v0_l2, r.v0_hk, r.pv_l2, r.pv_hk, r.dv_l2,
                     r.dv_hk, r.x_l2, r.w_l2, r.y_l2, r.y_sup, r.piz_l2,
                     r.piz_hk, r.piperp_l2, r.energy, r.constraint_max,
                     r.y_ok_fraction})
      out += "," + detail::fmt(v);
    out += "\n";
  }
  return out;
}

inline json verdicts_json(const std::vector<BoundVerdict>& verdicts,
                          const std::vector<std::pair<std::string, DecayFit>>&
                              fits) {
  json j;
  json vj = json::array();
  for (const auto& v : verdicts)
    vj.push_back({{"bound", v.name},
                  {"best_constant", v.best_constant},
                  {"ceiling", v.ceiling},
                  {"verdict", v.pass ? "PASS" : "FAIL"}});
  j["bounds"] = vj;
  json fj = json::array();
  for (const auto& [name, f] : fits)
    fj.push_back({{"quantity", name},
                  {"exponent", f.exponent},
                  {"stderr", f.stderr_exponent},
                  {"intercept", f.intercept},
                  {"r2", f.r2},
                  {"n_samples", f.n_samples}});
  j["decay_fits"] = fj;
  return j;
}

inline void write_json_file(const std::filesystem::path& p, const json& j) {
  detail::write_text(p, j.dump(2) + "\n");
}

}  // namespace cylwave
