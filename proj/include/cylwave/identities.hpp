#pragma once

// Random-vector verification of the algebraic structure: projection and
// commutation identities, h-symmetry, the lower and relative bounds on the
// time operators, their block-level counterparts, boundary-symbol
// semidefiniteness, and the 1/m scaling of the radial coefficient gradient.
//
// Two published constants are checked in both the stated and the sharp form.
// The stated relative bound h(Y, B0 Y) <= 2 h(Y, Bcal Y) is false for the
// displayed operators: the (V1, V4) block of 2*sym(Bcal) - B0 is
// [[0, 1/2], [1/2, 0]], indefinite, with counterexample Y = e1 - e4 giving
// h(Y, B0 Y) = 3 - t against 2 h(Y, Bcal Y) = 2 - t. The sharp constant is
// 4 (equality in that direction at t = 1): 4*sym(Bcal) - B0 has (V1, V4)
// block [[2 - t, 1], [1, 1]] with determinant 1 - t >= 0. The block bound
// kappa hc(Z, A0 Z) <= hc(Z, Acal Z) inherits this: it holds for
// kappa + nu <= 1/4 (sym(Bcal) - B0/4 has that block determinant
// (1 - t)/16 >= 0), not for the stated kappa + nu <= 1/2.

#include <cmath>
#include <string>
#include <vector>

#include "cylwave/common.hpp"
#include "cylwave/geometry.hpp"
#include "cylwave/system_ops.hpp"

namespace cylwave {

struct IdentityCheck {
  std::string name;
  double max_violation = 0.0;
  double tol = 1e-12;
  // true for the two checks that test the published constants verbatim;
  // these fail for the reasons documented above and are reported, not
  // counted against the verification exit code.
  bool published_form_known_false = false;
  bool pass() const { return max_violation <= tol; }
};

namespace detail {

inline std::vector<double> rand_fiber(SplitMix64& rng) {
  std::vector<double> y(n_comp);
  for (double& x : y) x = rng.uniform(-1.0, 1.0);
  return y;
}

inline ZStack rand_stack(SplitMix64& rng, int n_fields) {
  ZStack z(n_fields);
  for (double& x : z.v) x = rng.uniform(-1.0, 1.0);
  return z;
}

}  // namespace detail

/// Runs every identity over `n_t` times in (0,1] and ~`n_vec` random vectors.
inline std::vector<IdentityCheck> run_identity_suite(
    int n_t = 50, int n_vec = 200, std::uint64_t seed = 0,
    FaultInjection fault = FaultInjection::none) {
  double v_proj = 0, v_comm = 0, v_symm = 0, v_lowb = 0;
  double v_b0bc2 = 0, v_b0bc4 = 0;
  double v_bproj = 0, v_bap = 0, v_gam = 0;
  double v_kap_half = 0, v_kap_quarter = 0;
  double v_bsym = 0, v_a1b = 0, v_piq = 0;

  SplitMix64 rng(mix_seed(seed, 77));
  const Mat P = op_Pbb();
  {
    const Mat p2 = P * P - P;
    v_proj = std::max(p2.max_abs(), (P.transposed() - P).max_abs());
  }
  for (int it = 0; it < n_t; ++it) {
    const double t = (it + 1.0) / n_t;
    const OperatorSet s = operator_set(t, fault);
    v_comm = std::max({v_comm, (s.B0 * P - P * s.B0).max_abs(),
                       (s.B1 * P - P * s.B1).max_abs(),
                       (s.Bcal * P - P * s.Bcal).max_abs()});
    const double a = rng.uniform(0.0, 2 * pi);
    const Mat bs = s.bsigma(std::cos(a), std::sin(a));
    v_symm = std::max({v_symm, (s.B0 - s.B0.transposed()).max_abs(),
                       (s.B1 - s.B1.transposed()).max_abs(),
                       (bs - bs.transposed()).max_abs()});
    const int nv = std::max(1, n_vec / n_t);
    for (int v = 0; v <= nv; ++v) {
      // v == 0 probes the extremal direction of the (V1, V4) block; the
      // random draws cover the rest
      std::vector<double> y;
      if (v == 0) {
        y = {0.0, 1.0, 0.0, 0.0, -1.0};
      } else {
        y = detail::rand_fiber(rng);
      }
      const double hb0 = h_dot(y, s.B0.apply(y));
      const double hbc = h_dot(y, s.Bcal.apply(y));
      v_lowb = std::max(v_lowb, h_dot(y, y) - hb0);
      v_b0bc2 = std::max(v_b0bc2, hb0 - 2.0 * hbc);
      v_b0bc4 = std::max(v_b0bc4, hb0 - 4.0 * hbc);

      ZStack z = detail::rand_stack(rng, 2);
      if (v == 0) {
        z = ZStack(2);
        z.x(0, c_V1) = 1.0;
        z.x(0, c_V4) = -1.0;
      }
      ZStack pz = apply_Pi(z);
      ZStack ppz = apply_Pi(pz);
      double d = 0;
      for (std::size_t i = 0; i < z.v.size(); ++i)
        d = std::max(d, std::abs(ppz.v[i] - pz.v[i]));
      ZStack a0 = apply_A0(t, z);
      ZStack pa0 = apply_Pi(a0);
      ZStack a0p = apply_A0(t, pz);
      ZStack ac = apply_Acal(t, 0.2, 0.05, z, fault);
      ZStack pac = apply_Pi(ac);
      ZStack acp = apply_Acal(t, 0.2, 0.05, pz, fault);
      for (std::size_t i = 0; i < z.v.size(); ++i) {
        d = std::max(d, std::abs(pa0.v[i] - a0p.v[i]));
        d = std::max(d, std::abs(pac.v[i] - acp.v[i]));
      }
      v_bproj = std::max(v_bproj, d);

      ZStack a1 = apply_A1(t, z);
      ZStack pa1 = apply_Pi(a1);
      ZStack a1p = apply_A1(t, pz);
      ZStack as = apply_Asigma(t, std::cos(a), std::sin(a), z);
      ZStack perp_as = apply_Pi_perp(as);
      ZStack as_perp =
          apply_Asigma(t, std::cos(a), std::sin(a), apply_Pi_perp(z));
      double d2 = 0;
      for (std::size_t i = 0; i < z.v.size(); ++i) {
        d2 = std::max(d2, std::abs(pa1.v[i] - a1.v[i]));
        d2 = std::max(d2, std::abs(a1p.v[i] - a1.v[i]));
        d2 = std::max(d2, std::abs(perp_as.v[i]));
        d2 = std::max(d2, std::abs(as_perp.v[i]));
      }
      v_bap = std::max(v_bap, d2);

      const double hza0 = hc_dot(z, a0);
      v_gam = std::max(v_gam, hc_dot(z, z) - hza0);
      // 20 (kappa, nu) samples for each stated range
      for (int kv = 0; kv < 20; ++kv) {
        const double frac = kv / 19.0;
        const double mix = ((kv * 7) % 19) / 19.0;
        const double k_half = 0.5 * frac * (1.0 - mix);
        const double n_half = 0.5 * frac * mix;
        ZStack ach = apply_Acal(t, k_half, n_half, z, fault);
        v_kap_half = std::max(v_kap_half, k_half * hza0 - hc_dot(z, ach));
        const double k_q = 0.25 * frac * (1.0 - mix);
        const double n_q = 0.25 * frac * mix;
        ZStack acq = apply_Acal(t, k_q, n_q, z, fault);
        v_kap_quarter = std::max(v_kap_quarter, k_q * hza0 - hc_dot(z, acq));
      }
    }
  }
  // boundary symbols on a 100-point grid in (0,1)
  for (int i = 1; i <= 100; ++i) {
    const double t = i / 101.0;
    v_bsym = std::max(v_bsym,
                      boundary_symbol(t, BoundarySurface::gamma_minus).max_abs());
    auto ev = sym_eigenvalues(boundary_symbol(t, BoundarySurface::gamma_plus));
    v_bsym = std::max(v_bsym, ev.back());
  }
  // 1/m scaling of d_rho((chi rho / m) B1)
  {
    auto sup_grad = [&](int m) {
      RadialChart ch{m, 1.0};
      double sup = 0;
      const double hh = 1e-6;
      for (int i = 0; i < 400; ++i) {
        const double rho = -3.0 + 6.0 * (i + 0.5) / 400.0;
        const double gp = cutoff_chi(rho + hh, ch) * (rho + hh) / ch.m;
        const double gm2 = cutoff_chi(rho - hh, ch) * (rho - hh) / ch.m;
        const double grad = (gp - gm2) / (2 * hh);
        for (double t : {0.05, 0.3, 0.7, 1.0})
          sup = std::max(sup, std::abs(grad) * op_B1(t).max_abs());
      }
      return sup;
    };
    const double s1 = sup_grad(1), s2 = sup_grad(2), s4 = sup_grad(4);
    v_a1b =
        std::max(std::abs(s2 / s1 - 0.5) / 0.5, std::abs(s4 / s2 - 0.5) / 0.5);
  }
  // Pi Q = Q: the quadratic source sits in the W rows by construction
  {
    ZStack q(2);
    SplitMix64 r2(mix_seed(seed, 901));
    for (int K = 0; K < 2; ++K)
      for (int j = 0; j < 3; ++j) q.w(K, j, c_V0) = r2.uniform(-1, 1);
    ZStack pq = apply_Pi(q);
    for (std::size_t i = 0; i < q.v.size(); ++i)
      v_piq = std::max(v_piq, std::abs(pq.v[i] - q.v[i]));
  }

  std::vector<IdentityCheck> out;
  auto add = [&](const std::string& name, double viol, double tol,
                 bool published = false) {
    out.push_back({name, viol, tol, published});
  };
  add("Pbb projection/symmetry", v_proj, 1e-12);
  add("[B0,P]=[B1,P]=[Bcal,P]=0", v_comm, 1e-12);
  add("B0, B1, Bsigma.eta h-symmetric", v_symm, 1e-12);
  add("h(Y,Y) <= h(Y,B0 Y)", v_lowb, 1e-12);
  add("h(Y,B0 Y) <= 2 h(Y,Bcal Y)  [B0Bcbnd, published factor 2]", v_b0bc2,
      1e-12, true);
  add("h(Y,B0 Y) <= 4 h(Y,Bcal Y)  [B0Bcbnd, sharp factor 4]", v_b0bc4, 1e-12);
  add("Pi projection, [A0,Pi]=[Acal,Pi]=0", v_bproj, 1e-12);
  add("Pi A1 = A1 Pi = A1; Piperp Asigma = 0", v_bap, 1e-12);
  add("hc(Z,Z) <= hc(Z,A0 Z)", v_gam, 1e-12);
  add("kappa hc(Z,A0 Z) <= hc(Z,Acal Z), kappa+nu <= 1/2 [published]",
      v_kap_half, 1e-12, true);
  add("kappa hc(Z,A0 Z) <= hc(Z,Acal Z), kappa+nu <= 1/4 [sharp]",
      v_kap_quarter, 1e-12);
  add("boundary symbols negative semidefinite", v_bsym, 1e-12);
  add("|d_rho((chi rho/m) B1)| scales like 1/m (within 20%)", v_a1b, 0.2);
  add("Pi Q = Q (block structure of the quadratic source)", v_piq, 0.0);
  return out;
}

}  // namespace cylwave
