#include <doctest.h>

#include "symred/generators.hpp"
#include "symred/moment.hpp"

using namespace symred;

TEST_CASE("momentum values on the resonance rep") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  CHECK(momentum(rep, {complexd(1, 0), complexd(1, 0)})[0] == doctest::Approx(0.0));
  CHECK(momentum(rep, {complexd(2, 0), complexd(1, 0)})[0] == doctest::Approx(-1.5));
  CHECK(momentum(rep, {complexd(0, 0), complexd(0, 0)})[0] == doctest::Approx(0.0));
}

TEST_CASE("level shifts the momentum by a constant") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine, {Rat(1, 2)});
  CHECK(momentum(rep, {complexd(1, 0), complexd(1, 0)})[0] == doctest::Approx(-0.5));
}

TEST_CASE("affine momentum is quadratic under scaling at level 0") {
  SplitMix64 rng(19);
  RepSpec rep = random_torus_rep(rng);
  cvec v = random_state(rng, rep.n);
  rvec phi = momentum(rep, v);
  cvec cv = v;
  complexd c(0.7, -1.1);
  for (auto& z : cv) z *= c;
  rvec phic = momentum(rep, cv);
  for (int a = 0; a < rep.d; ++a) CHECK(phic[a] == doctest::Approx(std::norm(c) * phi[a]).epsilon(1e-12));
  CHECK(yang_mills(rep, cv) ==
        doctest::Approx(std::norm(c) * std::norm(c) * yang_mills(rep, v)).epsilon(1e-12));
}

TEST_CASE("projective momentum uses the normalized weight average") {
  RepSpec rep = build_torus_rep({{1, 0, -1}}, PhaseMode::Projective);
  cvec bal{complexd(1, 0), complexd(1, 0), complexd(1, 0)};
  CHECK(momentum(rep, bal)[0] == doctest::Approx(0.0));
  cvec e1{complexd(1, 0), complexd(0, 0), complexd(0, 0)};
  CHECK(momentum(rep, e1)[0] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(momentum(rep, cvec(3, complexd(0, 0))), zero_vector_in_projective_mode);
}

TEST_CASE("yang-mills on the resonance rep") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  CHECK(yang_mills(rep, {complexd(2, 0), complexd(1, 0)}) == doctest::Approx(2.25));
  CHECK(yang_mills(rep, {complexd(1, 0), complexd(1, 0)}) == doctest::Approx(0.0));
}

TEST_CASE("gradient of yang-mills: pinned values and finite differences") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(2, 0), complexd(1, 0)};
  cvec g = grad_yang_mills(rep, v);
  CHECK(g[0].real() == doctest::Approx(6.0));
  CHECK(g[1].real() == doctest::Approx(-3.0));
  CHECK(std::abs(g[0].imag()) < 1e-14);

  cvec fd = fd_gradient([&](const cvec& x) { return yang_mills(rep, x); }, v);
  for (int j = 0; j < rep.n; ++j) CHECK(std::abs(fd[j] - g[j]) < 1e-6 * (1.0 + std::abs(g[j])));

  cvec zerolvl{complexd(1, 0), complexd(1, 0)};
  CHECK(norm2(grad_yang_mills(rep, zerolvl)) < 1e-14);
}

TEST_CASE("gradient is orthogonal to the orbit directions") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    RepSpec rep = trial % 2 ? random_su2_rep(rng) : random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    cvec g = grad_yang_mills(rep, v);
    for (int a = 0; a < rep.lie_dim(); ++a) {
      lievec e(rep.lie_dim(), 0.0);
      e[a] = 1.0;
      cvec orbit = act_infinitesimal(rep, e, v);
      CHECK(std::abs(rdot(g, orbit)) < 1e-10 * (1.0 + norm2(g) * norm2(orbit)));
    }
  }
}

TEST_CASE("projective gradient matches finite differences of the normalized functional") {
  SplitMix64 rng(29);
  TorusInstanceOptions o;
  o.mode = PhaseMode::Projective;
  for (int trial = 0; trial < 6; ++trial) {
    RepSpec rep = trial % 2 ? random_su2_rep(rng, 3, 2, PhaseMode::Projective) : random_torus_rep(rng, o);
    cvec v = random_state(rng, rep.n);
    double nv = norm2(v);
    for (auto& z : v) z /= nv;
    cvec g = grad_yang_mills(rep, v);
    cvec fd = fd_gradient(
        [&](const cvec& x) {
          cvec y = x;
          double n = norm2(y);
          for (auto& z : y) z /= n;
          return yang_mills(rep, y);
        },
        v);
    for (int j = 0; j < rep.n; ++j) CHECK(std::abs(fd[j] - g[j]) < 2e-5 * (1.0 + std::abs(g[j])));
    // tangent to the sphere and orthogonal to the phase fiber direction iv
    CHECK(std::abs(rdot(g, v)) < 1e-10 * (1.0 + norm2(g)));
    cvec iv = v;
    for (auto& z : iv) z *= complexd(0, 1);
    CHECK(std::abs(rdot(g, iv)) < 1e-10 * (1.0 + norm2(g)));
  }
}

TEST_CASE("kempf-ness value: closed forms and the derivative identity") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(1, 0), complexd(1, 0)};
  CHECK(kempf_ness_value(rep, v, {0.0}) == doctest::Approx(norm_sq(v)));
  double t = 0.6;
  CHECK(kempf_ness_value(rep, v, {t}) == doctest::Approx(std::exp(-2 * t) + std::exp(2 * t)));

  // d/dt at 0 of KN(t xi) equals 4 Phi^xi at level 0
  SplitMix64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    RepSpec r = trial % 2 ? random_su2_rep(rng) : random_torus_rep(rng);
    cvec x = random_state(rng, r.n);
    lievec xi = random_lie(rng, r.lie_dim());
    double h = 1e-6;
    lievec xp = xi, xm = xi;
    for (int a = 0; a < r.lie_dim(); ++a) {
      xp[a] = h * xi[a];
      xm[a] = -h * xi[a];
    }
    double deriv = (kempf_ness_value(r, x, xp) - kempf_ness_value(r, x, xm)) / (2 * h);
    double expect = 4.0 * phi_component(r, x, xi);
    CHECK(deriv == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("kempf-ness value is convex along lines for torus reps") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    RepSpec rep = random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    lievec xi = random_lie(rng, rep.d);
    lievec base = random_lie(rng, rep.d);
    auto at = [&](double t) {
      lievec z(rep.d);
      for (int a = 0; a < rep.d; ++a) z[a] = base[a] + t * xi[a];
      return kempf_ness_value(rep, v, z);
    };
    for (double t0 : {-0.8, -0.2, 0.1, 0.5}) {
      double h = 0.05;
      double second = at(t0 - h) - 2 * at(t0) + at(t0 + h);
      CHECK(second >= -1e-10 * (1.0 + std::abs(at(t0))));
    }
  }
}

TEST_CASE("identity residual suite") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    RepSpec rep = trial % 3 == 2 ? random_su2_rep(rng) : random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    lievec xi = random_lie(rng, rep.lie_dim());
    IdentityResiduals r = identity_residuals(rep, v, xi);
    CHECK(r.grad_identity < 1e-8);
    CHECK(r.angle_identity < 1e-8);
    CHECK(r.mu_identity < 1e-8);
    CHECK(r.isotropy < 1e-8);
  }
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  IdentityResiduals zero = identity_residuals(rep, cvec(2, complexd(0, 0)), {1.0});
  CHECK(zero.grad_identity == 0.0);
  CHECK(zero.angle_identity == 0.0);
  CHECK(zero.mu_identity == 0.0);
  CHECK(zero.isotropy == 0.0);
}

TEST_CASE("torus momentum is invariant under the compact torus") {
  SplitMix64 rng(43);
  RepSpec rep = random_torus_rep(rng);
  cvec v = random_state(rng, rep.n);
  lievec th = random_lie(rng, rep.d);
  cvec rotated(rep.n);
  for (int j = 0; j < rep.n; ++j) {
    double ang = 0.0;
    for (int a = 0; a < rep.d; ++a) ang += rep.weights[a][j] * th[a];
    rotated[j] = v[j] * std::exp(complexd(0, ang));
  }
  rvec p1 = momentum(rep, v), p2 = momentum(rep, rotated);
  for (int a = 0; a < rep.d; ++a) CHECK(p1[a] == doctest::Approx(p2[a]).epsilon(1e-12));
}

TEST_CASE("kempf-ness value signals divergence on extreme rays") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(1, 0), complexd(1, 0)};
  CHECK_THROWS_AS(kempf_ness_value(rep, v, {1e4}), overflow_error);
  RepSpec proj = build_torus_rep({{1, -1}}, PhaseMode::Projective);
  CHECK_THROWS_AS(kempf_ness_value(proj, v, {0.0}), dimension_mismatch);
}

TEST_CASE("section norm responds to the flow potential") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(2, 0), complexd(1, 0)};
  double s = section_norm_sq({1, 1}, v);
  CHECK(s == doctest::Approx(4.0 * std::exp(-M_PI * 5.0)));
  CHECK(section_norm_sq({1, 1}, cvec(2, complexd(0, 0))) == 0.0);
}
