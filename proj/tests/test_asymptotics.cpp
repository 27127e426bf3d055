#include <doctest.h>

#include "cylwave/cylwave.hpp"
#include "oracles.hpp"

using namespace cylwave;

TEST_CASE("q_map values and homogeneity") {
  auto c = EffectiveCoefficient::scalar(1.0);
  CHECK(q_map(c, {0.0})[0] == 0.0);
  CHECK(q_map(c, {3.0})[0] == doctest::Approx(-18.0));
  SplitMix64 rng(1);
  EffectiveCoefficient c2;
  c2.c.n_fields = 2;
  c2.c.v.resize(8);
  for (double& x : c2.c.v) x = rng.uniform(-1, 1);
  AsymptoticState xi{0.3, -0.7};
  auto q1 = q_map(c2, xi);
  AsymptoticState xi2{0.6, -1.4};
  auto q2 = q_map(c2, xi2);
  CHECK(q2[0] == doctest::Approx(4.0 * q1[0]));
  CHECK(q2[1] == doctest::Approx(4.0 * q1[1]));
}

TEST_CASE("tau maps") {
  CHECK(tau_of_t(1.0) == doctest::Approx(0.0));
  for (double t : {1e-4, 0.3, 1.0})
    CHECK(t_of_tau(tau_of_t(t)) == doctest::Approx(t).epsilon(1e-14));
  const double t = 2.0 / (1.0 + std::exp(1.0));
  CHECK(tau_of_t(t) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK_THROWS_AS((void)tau_of_t(0.0), std::domain_error);
}

TEST_CASE("flow: identity, Riccati match, blow-up location") {
  FlowOptions opts;
  auto c = EffectiveCoefficient::scalar(1.0);

  FlowResult same = flow(0.5, 0.5, c, {0.3}, opts);
  CHECK(same.ok());
  CHECK(same.xi[0] == 0.3);

  // decaying branch, closed form to 1e-8 across t in [1e-4, 1]
  for (double t : {1.0, 0.5, 0.1, 1e-2, 1e-3, 1e-4}) {
    FlowResult r = flow(t, 1.0, c, {-1.0}, opts);
    REQUIRE(r.ok());
    CHECK(std::abs(r.xi[0] - oracles::riccati_xi(1.0, -1.0, t)) < 1e-8);
  }
  FlowResult half = flow(0.5, 1.0, c, {-1.0}, opts);
  CHECK(half.xi[0] == doctest::Approx(-0.476508).epsilon(1e-5));

  // blow-up branch: t* = 2/(1+e) to 1e-4
  FlowResult b = flow(1e-3, 1.0, c, {+1.0}, opts);
  REQUIRE(b.status == FlowResult::Status::blowup);
  const double tstar = 2.0 / (1.0 + std::exp(1.0));
  CHECK(std::abs(b.blowup_t - tstar) < 1e-4);
  CHECK(b.blowup_t == doctest::Approx(0.537883).epsilon(2e-4));
}

TEST_CASE("flow: group law and quadratic scaling") {
  FlowOptions opts;
  SplitMix64 rng(9);
  EffectiveCoefficient c;
  c.c.n_fields = 2;
  c.c.v.resize(8);
  for (double& x : c.c.v) x = rng.uniform(-1, 1);
  for (int k = 0; k < 5; ++k) {
    AsymptoticState xi{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    const double t0 = rng.uniform(0.6, 1.0);
    const double t1 = rng.uniform(0.2, 0.5);
    const double t2 = rng.uniform(0.06, 0.15);
    FlowResult a = flow(t1, t0, c, xi, opts);
    REQUIRE(a.ok());
    FlowResult ab = flow(t2, t1, c, a.xi, opts);
    REQUIRE(ab.ok());
    FlowResult direct = flow(t2, t0, c, xi, opts);
    REQUIRE(direct.ok());
    CHECK(max_abs_diff(ab.xi, direct.xi) < 1e-8);
  }
  // scaling: trajectory from s*xi at tau = 0 equals s * xi(s tau)
  for (double s : {0.5, 0.25}) {
    AsymptoticState xi{0.15, -0.1};
    const double tau_target = -1.3;
    AsymptoticState sxi{s * xi[0], s * xi[1]};
    FlowResult lhs = flow(t_of_tau(tau_target), 1.0, c, sxi, opts);
    FlowResult rhs = flow(t_of_tau(s * tau_target), 1.0, c, xi, opts);
    REQUIRE(lhs.ok());
    REQUIRE(rhs.ok());
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(lhs.xi[i] - s * rhs.xi[i]) < 1e-8);
  }
}

TEST_CASE("flow: Condition-H norm conservation") {
  auto coeffs = oracles::condition_h_example();
  RadialChart ch{1, 1.0};
  FlowOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-14;
  SplitMix64 rng(31);
  for (int k = 0; k < 10; ++k) {
    const double rho = rng.uniform(-1.0, 1.0);
    AngularPoint ang{rng.uniform(0.2, pi - 0.2), rng.uniform(0.0, 2 * pi)};
    auto c = EffectiveCoefficient::at_point(coeffs, ch, rho, ang);
    AsymptoticState xi{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const double n0 = std::hypot(xi[0], xi[1]);
    FlowResult r = flow(1e-3, 1.0, c, xi, opts);
    REQUIRE(r.ok());
    CHECK(std::abs(std::hypot(r.xi[0], r.xi[1]) - n0) < 1e-10);
  }
}

TEST_CASE("dflow: identity at zero coefficient, inverse, analytic value") {
  FlowOptions opts;
  auto z = EffectiveCoefficient::scalar(0.0);
  DflowResult dz = dflow(0.3, 1.0, z, {0.2}, opts);
  CHECK(dz.d(0, 0) == doctest::Approx(1.0));
  CHECK(dz.d_inv(0, 0) == doctest::Approx(1.0));

  // closed form: 1/(1 + ln 3)^2 = 0.2270574...
  auto c = EffectiveCoefficient::scalar(1.0);
  DflowResult d = dflow(0.5, 1.0, c, {-1.0}, opts);
  REQUIRE(d.base.ok());
  CHECK(d.d(0, 0) == doctest::Approx(0.2270574).epsilon(1e-5));
  CHECK(std::abs(d.d(0, 0) - oracles::riccati_dxi(1.0, -1.0, 0.5)) < 1e-9);

  // product D * D^{-1} = identity, multi-field random case
  SplitMix64 rng(12);
  EffectiveCoefficient c2;
  c2.c.n_fields = 3;
  c2.c.v.resize(27);
  for (double& x : c2.c.v) x = rng.uniform(-0.5, 0.5);
  AsymptoticState xi{0.1, -0.05, 0.08};
  DflowResult d2 = dflow(0.2, 1.0, c2, xi, opts);
  REQUIRE(d2.base.ok());
  Mat prod = d2.d * d2.d_inv;
  CHECK((prod - Mat::identity(3)).max_abs() < 1e-9);

  // cross-check: inverse from the transpose variational equation
  Mat inv2 = dflow_inverse_by_transpose_equation(0.2, 1.0, c2, xi, opts);
  CHECK((inv2 - d2.d_inv).max_abs() < 1e-8);
}

TEST_CASE("dflow matches central finite differences of the flow") {
  FlowOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-14;
  SplitMix64 rng(55);
  EffectiveCoefficient c;
  c.c.n_fields = 2;
  c.c.v.resize(8);
  for (double& x : c.c.v) x = rng.uniform(-1, 1);
  AsymptoticState xi{0.12, -0.2};
  const double t = 0.15;
  DflowResult d = dflow(t, 1.0, c, xi, opts);
  REQUIRE(d.base.ok());
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    AsymptoticState xp = xi, xm = xi;
    xp[j] += h;
    xm[j] -= h;
    FlowResult fp = flow(t, 1.0, c, xp, opts);
    FlowResult fm = flow(t, 1.0, c, xm, opts);
    REQUIRE(fp.ok());
    REQUIRE(fm.ok());
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(d.d(i, j) - (fp.xi[i] - fm.xi[i]) / (2 * h)) < 1e-5);
  }
}

TEST_CASE("lmap") {
  FlowOptions opts;
  auto z = EffectiveCoefficient::scalar(0.0);
  CHECK(lmap(0.4, z, {0.7}, opts)(0, 0) == doctest::Approx(1.0));
  auto c = EffectiveCoefficient::scalar(1.0);
  CHECK(lmap(1.0, c, {-1.0}, opts)(0, 0) == doctest::Approx(1.0));
  // reciprocal of the variational value: (1 + ln 3)^2 = 4.4041735...
  CHECK(lmap(0.5, c, {-1.0}, opts)(0, 0) ==
        doctest::Approx(1.0 / oracles::riccati_dxi(1.0, -1.0, 0.5))
            .epsilon(1e-8));
}

TEST_CASE("classifier: null form, Condition-H, scalar blow-up") {
  RadialChart ch{1, 1.0};
  FlowOptions opts;
  opts.tau_min = -5.0;

  FlowReport nullrep = check_bounded_weak_null(
      oracles::minkowski_inverse_metric(), ch, 1.0, 4, 4, opts);
  CHECK(nullrep.classification == FlowClass::Null);

  FlowReport hrep = check_bounded_weak_null(oracles::condition_h_example(), ch,
                                            0.5, 6, 6, opts);
  CHECK(hrep.classification == FlowClass::Bounded);
  REQUIRE(hrep.has_sup_bound);
  CHECK(hrep.sup_bound <= 0.5 + 1e-9);

  // n_y = 4 keeps the y-grid on the plateau anchors where chi rho^m = 1 and
  // the scalar Riccati value applies; transition-zone samples blow up
  // earlier because chi rho^m peaks above rho0^m there for any smooth cutoff
  FlowReport brep = check_bounded_weak_null(oracles::scalar_bbar_one(), ch,
                                            1.0, 4, 4, opts);
  CHECK(brep.classification == FlowClass::BlowUp);
  const double tstar = 2.0 / (1.0 + std::exp(1.0));
  CHECK(std::abs(brep.earliest_blowup_t - tstar) < 1e-3);

  FlowReport bdense = check_bounded_weak_null(oracles::scalar_bbar_one(), ch,
                                              1.0, 4, 16, opts);
  CHECK(bdense.classification == FlowClass::BlowUp);
  CHECK(bdense.earliest_blowup_t > tstar);
}

TEST_CASE("classifier determinism: same seed, same report") {
  RadialChart ch{1, 1.0};
  FlowOptions opts;
  opts.tau_min = -4.0;
  auto coeffs = oracles::condition_h_example();
  FlowReport a = check_bounded_weak_null(coeffs, ch, 0.4, 5, 5, opts, 42, 1);
  FlowReport b = check_bounded_weak_null(coeffs, ch, 0.4, 5, 5, opts, 42, 4);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.sup_bound == b.sup_bound);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].sup_norm == b.samples[i].sup_norm);
    CHECK(a.samples[i].rho == b.samples[i].rho);
  }
}
