#pragma once

// JSON run configuration: parsing and validation with JSON-path error
// reporting. Schema version 1; the full schema is documented in the README.

#include <string>
#include <vector>

#include <json.hpp>

#include "cylwave/asymptotics.hpp"
#include "cylwave/coefficients.hpp"
#include "cylwave/common.hpp"
#include "cylwave/geometry.hpp"
#include "cylwave/solver.hpp"
#include "cylwave/system_ops.hpp"

namespace cylwave {

using json = nlohmann::ordered_json;

struct DataProfileConfig {
  std::string profile = "zero";
  double amplitude = 0.0;
  double center = 2.0;
  double width = 0.5;
  double p_tail = 2.0;
};

struct RunConfig {
  int schema_version = 1;
  CartesianCoefficients coefficients;
  RadialChart chart;
  FuchsianParameters parameters;
  std::vector<DataProfileConfig> data;  // one per field
  double taper_margin = 0.1;            // fraction of rho0
  SolverConfig solver;
  int n_rho = 128;
  FlowOptions analyzer;
  double analyzer_R = 0.5;
  int analyzer_n_xi = 8;
  int analyzer_n_y = 8;
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
};

namespace detail {

inline double get_num(const json& j, const std::string& path,
                      const std::string& key, double defval,
                      bool required = false) {
  if (!j.contains(key)) {
    if (required) throw validation_error(path + "/" + key, "missing required field");
    return defval;
  }
  if (!j[key].is_number())
    throw validation_error(path + "/" + key, "expected a number");
  return j[key].get<double>();
}

inline int get_int(const json& j, const std::string& path,
                   const std::string& key, int defval, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw validation_error(path + "/" + key, "missing required field");
    return defval;
  }
  if (!j[key].is_number_integer())
    throw validation_error(path + "/" + key, "expected an integer");
  return j[key].get<int>();
}

inline CartesianCoefficients parse_coefficients(const json& j,
                                                const std::string& path) {
  if (!j.is_object()) throw validation_error(path, "expected an object");
  const int n = get_int(j, path, "n_fields", 0, true);
  if (n < 1) throw validation_error(path + "/n_fields", "must be >= 1");
  if (j.contains("a_hat")) {
    const json& a = j["a_hat"];
    CartesianCoefficients c(n);
    auto expect_array = [&](const json& x, std::size_t len,
                            const std::string& p) {
      if (!x.is_array() || x.size() != len)
        throw validation_error(p, "expected an array of length " +
                                      std::to_string(len));
    };
    expect_array(a, n, path + "/a_hat");
    for (int K = 0; K < n; ++K) {
      expect_array(a[K], n, path + "/a_hat/" + std::to_string(K));
      for (int I = 0; I < n; ++I) {
        expect_array(a[K][I], n,
                     path + "/a_hat/" + std::to_string(K) + "/" + std::to_string(I));
        for (int J = 0; J < n; ++J) {
          const std::string pj = path + "/a_hat/" + std::to_string(K) + "/" +
                                 std::to_string(I) + "/" + std::to_string(J);
          expect_array(a[K][I][J], 4, pj);
          for (int mu = 0; mu < 4; ++mu) {
            expect_array(a[K][I][J][mu], 4, pj + "/" + std::to_string(mu));
            for (int nu = 0; nu < 4; ++nu) {
              const json& e = a[K][I][J][mu][nu];
              if (!e.is_number())
                throw validation_error(pj + "/" + std::to_string(mu) + "/" +
                                           std::to_string(nu),
                                       "expected a number");
              c.at(K, I, J, mu, nu) = e.get<double>();
            }
          }
        }
      }
    }
    c.validate();
    return c;
  }
  if (j.contains("I_bar") || j.contains("C_bar")) {
    if (!j.contains("I_bar"))
      throw validation_error(path + "/I_bar", "missing (required with C_bar)");
    if (!j.contains("C_bar"))
      throw validation_error(path + "/C_bar", "missing (required with I_bar)");
    const json& ib = j["I_bar"];
    const json& cb = j["C_bar"];
    if (!ib.is_array() || int(ib.size()) != n)
      throw validation_error(path + "/I_bar", "expected an N x N array");
    Mat I(n);
    for (int i = 0; i < n; ++i) {
      if (!ib[i].is_array() || int(ib[i].size()) != n)
        throw validation_error(path + "/I_bar/" + std::to_string(i),
                               "expected a row of length N");
      for (int k = 0; k < n; ++k) {
        if (!ib[i][k].is_number())
          throw validation_error(path + "/I_bar/" + std::to_string(i) + "/" +
                                     std::to_string(k),
                                 "expected a number");
        I(i, k) = ib[i][k].get<double>();
      }
    }
    TripleArray C;
    C.n_fields = n;
    C.v.assign(std::size_t(n) * n * n, 0.0);
    if (!cb.is_array() || int(cb.size()) != n)
      throw validation_error(path + "/C_bar", "expected an N x N x N array");
    for (int L = 0; L < n; ++L)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          const json& e = cb[L][i][k];
          if (!e.is_number())
            throw validation_error(path + "/C_bar/" + std::to_string(L) + "/" +
                                       std::to_string(i) + "/" +
                                       std::to_string(k),
                                   "expected a number");
          C.at(L, i, k) = e.get<double>();
        }
    try {
      return model_condition_h(I, C);
    } catch (const validation_error& e) {
      throw validation_error(path + e.path(), e.what());
    }
  }
  if (j.contains("zero") && j["zero"].get<bool>()) return CartesianCoefficients(n);
  throw validation_error(path, "need one of: a_hat, I_bar + C_bar, zero");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw validation_error("", "config must be a JSON object");
  RunConfig cfg;
  cfg.schema_version = detail::get_int(j, "", "schema_version", 1);
  if (cfg.schema_version != 1)
    throw validation_error("/schema_version", "unsupported schema version");
  if (!j.contains("coefficients"))
    throw validation_error("/coefficients", "missing required block");
  cfg.coefficients = detail::parse_coefficients(j["coefficients"], "/coefficients");

  if (j.contains("chart")) {
    cfg.chart.m = detail::get_int(j["chart"], "/chart", "m", 1);
    cfg.chart.rho0 = detail::get_num(j["chart"], "/chart", "rho0", 1.0);
  }
  cfg.chart.validate();

  if (j.contains("parameters")) {
    const json& p = j["parameters"];
    const double eps = detail::get_num(p, "/parameters", "epsilon", 1.0 / 11.0);
    const double z = detail::get_num(p, "/parameters", "z", -1.0);
    if (p.contains("kappa") || p.contains("nu")) {
      cfg.parameters.epsilon = eps;
      cfg.parameters.kappa = detail::get_num(p, "/parameters", "kappa", 0.0, true);
      cfg.parameters.nu = detail::get_num(p, "/parameters", "nu", 0.0, true);
      cfg.parameters.z = z > 0 ? z : eps;
      cfg.parameters.m = cfg.chart.m;
      validate_parameters(cfg.parameters);
    } else {
      std::string recipe = p.value("recipe", "standard");
      if (recipe != "standard" && recipe != "small_z")
        throw validation_error("/parameters/recipe",
                               "expected 'standard' or 'small_z'");
      cfg.parameters = select_parameters(eps, z,
                                         recipe == "small_z"
                                             ? ParameterRecipe::small_z
                                             : ParameterRecipe::standard);
      cfg.parameters.m = cfg.chart.m;
    }
  } else {
    cfg.parameters.m = cfg.chart.m;
  }

  const int n = cfg.coefficients.n_fields();
  cfg.data.assign(n, DataProfileConfig{});
  if (j.contains("data")) {
    const json& d = j["data"];
    auto parse_one = [&](const json& x, const std::string& path) {
      DataProfileConfig pc;
      if (x.contains("profile")) {
        if (!x["profile"].is_string())
          throw validation_error(path + "/profile", "expected a string");
        pc.profile = x["profile"].get<std::string>();
      }
      pc.amplitude = detail::get_num(x, path, "amplitude", 0.0);
      pc.center = detail::get_num(x, path, "center", 2.0);
      pc.width = detail::get_num(x, path, "width", 0.5);
      pc.p_tail = detail::get_num(x, path, "p_tail", 2.0);
      return pc;
    };
    if (d.contains("fields")) {
      const json& f = d["fields"];
      if (!f.is_array() || int(f.size()) != n)
        throw validation_error("/data/fields",
                               "expected an array with one entry per field");
      for (int K = 0; K < n; ++K)
        cfg.data[K] = parse_one(f[K], "/data/fields/" + std::to_string(K));
    } else {
      const DataProfileConfig pc = parse_one(d, "/data");
      for (int K = 0; K < n; ++K) cfg.data[K] = pc;
    }
    cfg.taper_margin = detail::get_num(d, "/data", "taper_margin", 0.1);
    if (!(cfg.taper_margin > 0 && cfg.taper_margin < 0.5))
      throw validation_error("/data/taper_margin", "must lie in (0, 0.5)");
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    cfg.n_rho = detail::get_int(s, "/solver", "n_rho", 128);
    cfg.solver.t_min = detail::get_num(s, "/solver", "t_min", 0.25);
    cfg.solver.delta_tau = detail::get_num(s, "/solver", "delta_tau", 1e-3);
    cfg.solver.cfl = detail::get_num(s, "/solver", "cfl", 0.5);
    if (s.contains("dealias")) {
      if (!s["dealias"].is_boolean())
        throw validation_error("/solver/dealias", "expected a boolean");
      cfg.solver.dealias = s["dealias"].get<bool>();
    }
    cfg.solver.snapshot_stride = detail::get_int(s, "/solver", "snapshot_stride", 10);
  }
  if (cfg.n_rho < 16 || (cfg.n_rho & (cfg.n_rho - 1)) != 0)
    throw validation_error("/solver/n_rho", "must be a power of two, >= 16");
  cfg.solver.validate();

  if (j.contains("analyzer")) {
    const json& a = j["analyzer"];
    cfg.analyzer_R = detail::get_num(a, "/analyzer", "R", 0.5);
    cfg.analyzer_n_xi = detail::get_int(a, "/analyzer", "n_xi", 8);
    cfg.analyzer_n_y = detail::get_int(a, "/analyzer", "n_y", 8);
    cfg.analyzer.tau_min = detail::get_num(a, "/analyzer", "tau_min", -6.0);
    cfg.analyzer.blowup_threshold =
        detail::get_num(a, "/analyzer", "blowup_threshold", 1e4);
    cfg.analyzer.rel_tol = detail::get_num(a, "/analyzer", "rel_tol", 1e-10);
    cfg.analyzer.abs_tol = detail::get_num(a, "/analyzer", "abs_tol", 1e-13);
    if (!(cfg.analyzer_R > 0)) throw validation_error("/analyzer/R", "must be positive");
    if (cfg.analyzer_n_xi < 1 || cfg.analyzer_n_y < 1)
      throw validation_error("/analyzer", "sample counts must be >= 1");
    cfg.analyzer.validate();
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    if (o.contains("directory")) cfg.out_dir = o["directory"].get<std::string>();
    if (o.contains("formats")) {
      cfg.write_csv = cfg.write_json = false;
      for (const auto& f : o["formats"]) {
        const std::string s = f.get<std::string>();
        if (s == "csv") {
          cfg.write_csv = true;
        } else if (s == "json") {
          cfg.write_json = true;
        } else {
          throw validation_error("/output/formats", "unknown format '" + s + "'");
        }
      }
    }
  }
  return cfg;
}

/// Build the t = 1 grid data from the configured profiles.
inline GridField build_initial_data(const RunConfig& cfg) {
  std::vector<InitialDataFunctions> fns;
  for (const auto& d : cfg.data)
    fns.push_back(make_profile(d.profile, d.amplitude, d.center, d.width,
                               d.p_tail));
  return extend_to_S(fns, cfg.chart, cfg.n_rho,
                     cfg.taper_margin * cfg.chart.rho0);
}

}  // namespace cylwave
