#include <doctest.h>

#include "cylwave/cylwave.hpp"
#include "oracles.hpp"

using namespace cylwave;

TEST_CASE("scalar coefficient functions q and p") {
  CHECK(qtt(1.0) == doctest::Approx(0.0));
  CHECK(ptt(1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(qtt(0.0) == doctest::Approx(-1.0));
  CHECK(ptt(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(qtt(0.5) == doctest::Approx(-5.0 / 17.0));
  CHECK(ptt(0.5) == doctest::Approx(std::sqrt(17.0 / 12.0)));
  // |q| <= 1 on [0,1] (used by the CFL bound)
  for (int i = 0; i <= 100; ++i) CHECK(std::abs(qtt(i / 100.0)) <= 1.0);
}

TEST_CASE("operator matrices: displayed entries") {
  OperatorSet s1 = operator_set(1.0);
  for (int i = 0; i < 5; ++i) CHECK(s1.B0(i, i) == doctest::Approx(1.0));
  const Mat P = op_Pbb();
  CHECK(P(0, 0) == 0.0);
  for (int i = 1; i < 5; ++i) CHECK(P(i, i) == 1.0);

  OperatorSet sh = operator_set(0.5);
  CHECK(sh.B1(0, 0) == doctest::Approx(0.5));
  CHECK(sh.B1(1, 1) == doctest::Approx(-1.5));
  CHECK(sh.B1(2, 2) == doctest::Approx(1.5 * (-5.0 / 17.0)));
  CHECK(sh.B1(3, 3) == doctest::Approx(1.5 * (-5.0 / 17.0)));
  CHECK(sh.B1(4, 4) == 0.0);
}

TEST_CASE("identity suite: true identities pass, published constants falsified") {
  auto checks = run_identity_suite(25, 60, 3);
  for (const auto& c : checks) {
    INFO(c.name);
    if (c.published_form_known_false) {
      CHECK_FALSE(c.pass());  // the documented counterexample must show up
    } else {
      CHECK(c.pass());
    }
  }
  // the counterexample direction Y = e1 - e4 at t = 1 violates the factor-2
  // bound by exactly 1
  const OperatorSet s = operator_set(1.0);
  std::vector<double> y{0, 1, 0, 0, -1};
  CHECK(h_dot(y, s.B0.apply(y)) - 2 * h_dot(y, s.Bcal.apply(y)) ==
        doctest::Approx(1.0));

  auto broken = run_identity_suite(25, 60, 3, FaultInjection::flip_bcal_sign);
  bool b0bc_sharp_failed = false;
  for (const auto& c : broken)
    if (c.name.find("sharp factor 4") != std::string::npos)
      b0bc_sharp_failed = !c.pass();
  CHECK(b0bc_sharp_failed);
}

TEST_CASE("boundary symbols") {
  const Mat gm = boundary_symbol(0.7, BoundarySurface::gamma_minus);
  CHECK(gm.max_abs() == 0.0);

  const Mat gp = boundary_symbol(0.5, BoundarySurface::gamma_plus);
  CHECK(gp(0, 0) == doctest::Approx(-0.75));        // -(1-t)(2-t)
  CHECK(gp(1, 1) == doctest::Approx(-15.0 / 4.0));  // -(2-t)(3-t)
  // -(2-t)(1 - (2-t) q(t)) with q(1/2) = -5/17
  CHECK(gp(2, 2) == doctest::Approx(-147.0 / 68.0));
  // the V4 slot carries -B0_44 = -1 (the published display shows 0 there,
  // but the co-normal contraction of the actual operators gives -1; still
  // negative semidefinite, which is all the construction needs)
  CHECK(gp(4, 4) == doctest::Approx(-1.0));
  for (int i = 1; i <= 100; ++i) {
    auto ev = sym_eigenvalues(boundary_symbol(i / 101.0, BoundarySurface::gamma_plus));
    CHECK(ev.back() <= 1e-14);
  }
}

TEST_CASE("parameter selection") {
  FuchsianParameters p = select_parameters(1.0 / 11.0);
  CHECK(p.kappa == doctest::Approx(5.0 / 22.0));
  CHECK(p.nu == doctest::Approx(1.0 / 11.0));
  validate_parameters(p);

  // small-z recipe at an admissible epsilon < 1/11
  FuchsianParameters q = select_parameters(1.0 / 12.0, -1.0,
                                           ParameterRecipe::small_z);
  CHECK(q.z == doctest::Approx(1.0 / 12.0));
  CHECK(q.nu == doctest::Approx(0.5 - 5.0 / 12.0));
  CHECK(q.kappa == doctest::Approx(0.25));
  validate_parameters(q);

  // the recipe formulas at epsilon = 1/11 give (3/11, 1/22); the boundary
  // case violates the strict inequality epsilon < 2 nu and is rejected
  CHECK(3.0 * (1.0 / 11.0) == doctest::Approx(3.0 / 11.0));
  CHECK(0.5 - 5.0 / 11.0 == doctest::Approx(1.0 / 22.0));
  CHECK_THROWS_AS(
      (void)select_parameters(1.0 / 11.0, -1.0, ParameterRecipe::small_z),
      validation_error);

  CHECK_THROWS_AS((void)select_parameters(0.2), validation_error);
}

TEST_CASE("variable inversion is consistent with the definitions") {
  // V0 = U0 - t^{-1/2} U1 and V1 = 2 U1 + (2-t) sqrt(t) V0 must hold after
  // inverting; this pins the corrected first relation of the inversion.
  SplitMix64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const double t = rng.uniform(0.01, 1.0);
    double v[n_comp], u[n_comp];
    for (double& x : v) x = rng.uniform(-2, 2);
    u_from_v(t, v, u);
    const double rt = std::sqrt(t);
    CHECK(u[0] - u[1] / rt == doctest::Approx(v[c_V0]).epsilon(1e-11));
    CHECK(2 * u[1] + (2 - t) * rt * v[c_V0] ==
          doctest::Approx(v[c_V1]).epsilon(1e-11));
    CHECK(ptt(t) * u[2] == doctest::Approx(v[c_Vth]));
    CHECK(u[4] == v[c_V4]);
  }
}

TEST_CASE("source: zero coefficients and zero state give zero") {
  CartesianCoefficients zero(2);
  std::vector<FiberState> V(2);
  V[0].v[c_V0] = 1.0;
  V[1].v[c_V4] = -2.0;
  auto f = source_f(zero, 0.5, 1.2, {1.0, 0.3}, V);
  CHECK(max_abs(f) == 0.0);

  auto c = oracles::random_coefficients(2, 5);
  std::vector<FiberState> V0(2);
  auto f2 = source_f(c, 0.5, 1.2, {1.0, 0.3}, V0);
  CHECK(max_abs(f2) == 0.0);
}

TEST_CASE("source matches the conformal-transformation oracle") {
  SplitMix64 rng(123);
  auto c = oracles::random_coefficients(2, 246);
  for (int k = 0; k < 25; ++k) {
    const double t = rng.uniform(0.1, 1.0);
    const double r = rng.uniform(0.3, 2.0);
    AngularPoint ang{rng.uniform(0.3, pi - 0.3), rng.uniform(0.0, 2 * pi)};
    std::vector<FiberState> V(2);
    for (auto& fs : V)
      for (double& x : fs.v) x = rng.uniform(-1, 1);
    auto f = source_f(c, t, r, ang, V);
    auto fo = oracles::source_oracle(c, t, r, ang, V);
    const double scale = std::max(max_abs(fo), 1e-6);
    CHECK(max_abs_diff(f, fo) / scale < 1e-6);
  }
}

TEST_CASE("extended source: splits, cutoff, singular-part dominance") {
  RadialChart ch{1, 1.0};
  // null form: Q = 0 and G = F
  {
    auto mink = oracles::minkowski_inverse_metric();
    auto ctx = SourceContext::make(
        angular_data(mink, AngularPoint{0.5 * pi, 0.0}), 0.4);
    std::vector<FiberState> V(1);
    V[0].v[c_V0] = 0.7;
    V[0].v[c_V1] = -0.3;
    V[0].v[c_V4] = 0.2;
    auto es = source_extended(ctx, ch, 0.5, V);
    CHECK(max_abs(es.q) < 1e-16);  // null form: bbar is 0 up to roundoff
    for (int cc = 0; cc < n_comp; ++cc)
      CHECK(es.g[0].v[cc] == doctest::Approx(es.total[0].v[cc]).epsilon(1e-14));
  }
  // outside the cutoff support everything vanishes
  {
    auto c = oracles::random_coefficients(1, 9);
    auto ctx = SourceContext::make(angular_data(c, AngularPoint{1.0, 2.0}), 0.4);
    std::vector<FiberState> V(1);
    for (double& x : V[0].v) x = 0.5;
    auto es = source_extended(ctx, ch, 2.5, V);
    CHECK(max_abs(es.q) == 0.0);
    for (int cc = 0; cc < n_comp; ++cc) CHECK(es.total[0].v[cc] == 0.0);
  }
  // t * F_{e0} -> Q as t -> 0 for a V0-only state
  {
    auto c = oracles::scalar_bbar_one();
    std::vector<FiberState> V(1);
    V[0].v[c_V0] = 0.8;
    const double rho = 0.6;
    const double t = 1e-5;
    auto ctx = SourceContext::make(angular_data(c, AngularPoint{1.2, 0.7}), t);
    auto es = source_extended(ctx, ch, rho, V);
    CHECK(std::abs(t * es.total[0].v[c_V0] - es.q[0]) <
          1e-4 * std::abs(es.q[0]));
  }
}

TEST_CASE("reduced-sector validation") {
  CHECK_NOTHROW(validate_reduced(oracles::condition_h_example()));
  CHECK_NOTHROW(validate_reduced(oracles::minkowski_inverse_metric()));
  auto bad = oracles::single_entry(1, 0, 0, 0, 0, 3, 1.0);
  CHECK_THROWS_AS(validate_reduced(bad), validation_error);
  // anisotropic spatial block
  auto aniso = oracles::minkowski_inverse_metric();
  aniso.at(0, 0, 0, 3, 3) = 2.0;
  CHECK_THROWS_AS(validate_reduced(aniso), validation_error);
}

TEST_CASE("source is exactly linear in the radius argument") {
  // every term of f carries exactly one power of r once the coefficient
  // radial structure is folded in; the extended system's cutoff substitution
  // relies on this
  auto c = oracles::random_coefficients(2, 5150);
  SplitMix64 rng(31);
  std::vector<FiberState> V(2);
  for (auto& fs : V)
    for (double& x : fs.v) x = rng.uniform(-1, 1);
  AngularPoint ang{1.1, 2.7};
  const double t = 0.37;
  auto f1 = source_f(c, t, 0.8, ang, V);
  auto f2 = source_f(c, t, 1.6, ang, V);
  for (int K = 0; K < 2; ++K)
    CHECK(f2[K] == doctest::Approx(2.0 * f1[K]).epsilon(1e-13));
}
