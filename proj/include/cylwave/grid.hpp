#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "cylwave/common.hpp"

namespace cylwave {

/// Fiber component order of the first-order state V^K. Angular components are
/// stored in the orthonormal frame of the round sphere metric, which turns
/// every metric factor in the fiber inner product into a Kronecker delta.
enum FiberComp { c_V0 = 0, c_V1 = 1, c_Vth = 2, c_Vph = 3, c_V4 = 4 };
constexpr int n_comp = 5;

/// Radial chart r = rho^m on the torus built from [-3 rho0, 3 rho0].
struct RadialChart {
  int m = 1;
  double rho0 = 1.0;

  void validate() const {
    if (m < 1) throw validation_error("/chart/m", "m must be an integer >= 1");
    if (!(rho0 > 0)) throw validation_error("/chart/rho0", "rho0 must be positive");
  }
  double period() const { return 6.0 * rho0; }
  /// wrap into the fundamental domain [-3 rho0, 3 rho0)
  double wrap(double rho) const {
    const double L = period();
    double x = std::fmod(rho + 3.0 * rho0, L);
    if (x < 0) x += L;
    return x - 3.0 * rho0;
  }
  double r_of_rho(double rho) const {
    double r = 1.0;
    for (int k = 0; k < m; ++k) r *= rho;
    return r;
  }
};

/// The five-component state per field sampled on the uniform periodic
/// rho-grid, stamped with its time. Layout: component-major per field, nodes
/// contiguous, so spectral transforms act on contiguous spans.
struct GridField {
  double t = 1.0;
  int n_rho = 0;
  int n_fields = 0;
  RadialChart chart;
  std::vector<double> data;  // [(K*n_comp + comp)*n_rho + i]

  GridField() = default;
  GridField(double t_, int n_rho_, int n_fields_, RadialChart chart_)
      : t(t_), n_rho(n_rho_), n_fields(n_fields_), chart(chart_),
        data(std::size_t(n_rho_) * n_fields_ * n_comp, 0.0) {
    if (n_rho < 16 || (n_rho & (n_rho - 1)) != 0)
      throw validation_error("/solver/n_rho",
                             "n_rho must be a power of two and >= 16");
  }

  double rho(int i) const { return -3.0 * chart.rho0 + i * drho(); }
  double drho() const { return chart.period() / n_rho; }

  std::span<double> comp(int K, int c) {
    return {data.data() + (std::size_t(K) * n_comp + c) * n_rho,
            std::size_t(n_rho)};
  }
  std::span<const double> comp(int K, int c) const {
    return {data.data() + (std::size_t(K) * n_comp + c) * n_rho,
            std::size_t(n_rho)};
  }
  double& at(int K, int c, int i) {
    return data[(std::size_t(K) * n_comp + c) * n_rho + i];
  }
  double at(int K, int c, int i) const {
    return data[(std::size_t(K) * n_comp + c) * n_rho + i];
  }

  double max_abs() const {
    double mx = 0;
    for (double x : data) mx = std::max(mx, std::abs(x));
    return mx;
  }
  bool all_finite() const {
    for (double x : data)
      if (!is_finite(x)) return false;
    return true;
  }
};

}  // namespace cylwave
