#include <doctest.h>

#include "symred/flow.hpp"
#include "symred/generators.hpp"
#include "symred/invariants.hpp"

using namespace symred;

namespace {

cvec cubic_x2y() { return {complexd(0, 0), complexd(1, 0), complexd(0, 0), complexd(0, 0)}; }
cvec cubic_simple_roots() { return {complexd(1, 0), complexd(0, 0), complexd(0, 0), complexd(1, 0)}; }

}  // namespace

TEST_CASE("a zero-level start converges at t = 0") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(1, 0), complexd(1, 0)};
  FlowResult fr = integrate_flow(rep, v);
  CHECK(fr.converged);
  CHECK(fr.t_end == 0.0);
  CHECK(norm2(fr.limit) == doctest::Approx(norm2(v)));
  CHECK(fr.classification.tag == StabilityTag::Stable);
  CHECK(fr.classification.closed_orbit);
}

TEST_CASE("the unstable-side point flows to the vertex") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(1, 0), complexd(0, 0)};
  FlowResult fr = integrate_flow(rep, v);
  CHECK(fr.converged);
  CHECK(fr.phi_residual < 1e-6);
  CHECK(norm2(fr.limit) < 1e-3);
  CHECK(fr.classification.tag == StabilityTag::Semistable);
  CHECK_FALSE(fr.classification.closed_orbit);
}

TEST_CASE("mu is non-increasing and phases are frozen along torus flows") {
  SplitMix64 rng(51);
  for (int trial = 0; trial < 8; ++trial) {
    RepSpec rep = random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    FlowResult fr = integrate_flow(rep, v);
    for (size_t i = 1; i < fr.samples.size(); ++i)
      CHECK(fr.samples[i].mu <= fr.samples[i - 1].mu + 1e-9 * (1.0 + fr.samples[i - 1].mu));
    for (size_t i = 0; i < fr.samples.size(); ++i)
      for (int j = 0; j < rep.n; ++j) {
        if (std::abs(v[j]) == 0.0 || std::abs(fr.samples[i].state[j]) < 1e-300) continue;
        complexd ratio = fr.samples[i].state[j] / v[j];
        CHECK(std::abs(std::arg(ratio)) < 1e-12);
      }
  }
}

TEST_CASE("the origin is semistable but not stable") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  StabilityClass c = classify_point(rep, cvec(2, complexd(0, 0)));
  CHECK(c.tag == StabilityTag::Semistable);
  CHECK(c.closed_orbit);
}

TEST_CASE("binary cubics: the named projective points of the acceptance suite") {
  RepSpec proj = build_su2_rep({3}, PhaseMode::Projective);
  FlowOptions opts;

  FlowResult bad = integrate_flow(proj, cubic_x2y(), opts);
  CHECK(bad.phi_residual > 10 * opts.phi_tol);
  CHECK(bad.classification.tag == StabilityTag::Unstable);
  CHECK_FALSE(bad.classification.indeterminate);

  FlowResult good = integrate_flow(proj, cubic_simple_roots(), opts);
  CHECK(good.phi_residual <= opts.phi_tol);
  CHECK(good.classification.tag == StabilityTag::Stable);
  CHECK_FALSE(good.classification.indeterminate);

  RepSpec aff = build_su2_rep({3}, PhaseMode::Affine);
  OnePsResult r1 = one_ps_oracle(aff, cubic_x2y());
  CHECK(r1.destabilizer_found);
  OnePsResult r2 = one_ps_oracle(aff, cubic_simple_roots());
  CHECK_FALSE(r2.destabilizer_found);
  OnePsResult r0 = one_ps_oracle(aff, cvec(4, complexd(0, 0)));
  CHECK_FALSE(r0.destabilizer_found);
}

TEST_CASE("unstable affine su2 cubic flows into the null cone") {
  RepSpec aff = build_su2_rep({3}, PhaseMode::Affine);
  FlowResult fr = integrate_flow(aff, cubic_x2y());
  CHECK(fr.phi_residual < 1e-6);  // affine level-0 flows always reach the zero level
  CHECK(norm2(fr.limit) < 1e-2);  // by shrinking into the vertex
  CHECK_FALSE(fr.classification.closed_orbit);
}

TEST_CASE("kempf-ness minimization: pinned outcomes") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  KempfNessOutcome balanced = minimize_kempf_ness(rep, {complexd(1, 0), complexd(1, 0)});
  CHECK(balanced.status == KempfNessOutcome::Status::Minimum);
  CHECK(std::abs(balanced.xi[0]) < 1e-8);
  CHECK(balanced.value == doctest::Approx(2.0));

  KempfNessOutcome off = minimize_kempf_ness(rep, {complexd(1, 0), complexd(0, 0)});
  CHECK(off.status == KempfNessOutcome::Status::Divergent);

  RepSpec same = build_torus_rep({{1, 1}}, PhaseMode::Affine);
  KempfNessOutcome dec = minimize_kempf_ness(same, {complexd(1, 0), complexd(1, 0)});
  CHECK(dec.status == KempfNessOutcome::Status::Divergent);
  CHECK(dec.xi[0] > 0.0);  // norm decays where <w, xi> > 0
}

TEST_CASE("kempf-ness minimum implies zero momentum at the minimizer (level 0)") {
  SplitMix64 rng(57);
  int minima = 0;
  for (int trial = 0; trial < 40; ++trial) {
    RepSpec rep = random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    KempfNessOutcome kn = minimize_kempf_ness(rep, v);
    if (kn.status != KempfNessOutcome::Status::Minimum) continue;
    ++minima;
    cvec moved = act_imaginary(rep, kn.xi, 1.0, v);
    rvec phi = momentum(rep, moved);
    CHECK(norm2(phi) < 1e-6);
  }
  CHECK(minima > 5);
}

TEST_CASE("hull oracle: pinned resonance verdicts") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  HullVerdict h1 = hull_oracle(rep, {complexd(1, 0), complexd(1, 0)});
  CHECK(h1.semistable);
  CHECK(h1.closed);
  CHECK(h1.stable);
  HullVerdict h2 = hull_oracle(rep, {complexd(1, 0), complexd(0, 0)});
  CHECK(h2.semistable);
  CHECK_FALSE(h2.closed);
  CHECK_FALSE(h2.stable);
}

TEST_CASE("projective hull oracle: level outside the weight hull kills everything") {
  RepSpec rep = build_torus_rep({{1, 0, -1}}, PhaseMode::Projective, {Rat(2)});
  SplitMix64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    cvec v = random_state(rng, 3);
    HullVerdict h = hull_oracle(rep, v);
    CHECK_FALSE(h.semistable);
  }
}

TEST_CASE("closed-orbit verdicts agree with the hull oracle on affine instances") {
  SplitMix64 rng(67);
  FlowOptions opts;
  for (int trial = 0; trial < 40; ++trial) {
    RepSpec rep = random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    bool hull_closed = hull_oracle(rep, v).closed;
    bool kn_closed = minimize_kempf_ness(rep, v, opts).status == KempfNessOutcome::Status::Minimum;
    CHECK(hull_closed == kn_closed);
  }
}

TEST_CASE("projective classification agrees with the hull oracle") {
  SplitMix64 rng(71);
  TorusInstanceOptions o;
  o.mode = PhaseMode::Projective;
  FlowOptions opts;
  int indeterminate = 0;
  for (int trial = 0; trial < 25; ++trial) {
    RepSpec rep = random_torus_rep(rng, o);
    cvec v = random_state(rng, rep.n);
    StabilityClass c = classify_point(rep, v, opts);
    if (c.indeterminate) {
      ++indeterminate;
      continue;
    }
    HullVerdict h = hull_oracle(rep, v);
    StabilityTag expect =
        h.stable ? StabilityTag::Stable : (h.semistable ? StabilityTag::Semistable : StabilityTag::Unstable);
    CHECK(c.tag == expect);
    CHECK(c.closed_orbit == h.closed);
  }
  CHECK(indeterminate <= 1);
}

TEST_CASE("flow limits of points on one complexified orbit agree in moduli") {
  SplitMix64 rng(73);
  FlowOptions opts;
  for (int trial = 0; trial < 6; ++trial) {
    RepSpec rep = random_torus_rep(rng);
    cvec v = random_state(rng, rep.n);
    lievec xi = random_lie(rng, rep.d);
    lievec th = random_lie(rng, rep.d);
    cvec w(rep.n);
    for (int j = 0; j < rep.n; ++j) {
      double ang = 0.0, str = 0.0;
      for (int a = 0; a < rep.d; ++a) {
        ang += rep.weights[a][j] * th[a];
        str += rep.weights[a][j] * xi[a];
      }
      w[j] = v[j] * std::exp(complexd(0, ang)) * std::exp(-0.4 * str);
    }
    // coordinates below the limit-support threshold are decaying to zero and
    // are truncated before comparison (their finite-time values depend on
    // where the integrator stopped along the 1/sqrt(t) tail)
    auto moduli = [&](const cvec& limit) {
      rvec m;
      for (const auto& z : limit) m.push_back(std::abs(z) < kLimitSupportTol * norm2(v) ? 0.0 : std::abs(z));
      std::sort(m.begin(), m.end());
      return m;
    };
    rvec mv = moduli(integrate_flow(rep, v, opts).limit);
    rvec mw = moduli(integrate_flow(rep, w, opts).limit);
    for (size_t i = 0; i < mv.size(); ++i) CHECK(mv[i] == doctest::Approx(mw[i]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("orbital convexity probe") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  cvec v{complexd(1, 0), complexd(1, 0)};
  CHECK(orbital_convexity_probe(rep, v, {1.0}, 1.6, 201));
  CHECK(orbital_convexity_probe(rep, v, {0.0}, 1.6, 201));
  // the membership window around t = 0 has the predicted half-width
  double tstar = 0.5 * std::acosh(1.28);
  CHECK(norm2(act_imaginary(rep, {1.0}, 0.9 * tstar, v)) < 1.6);
  CHECK(norm2(act_imaginary(rep, {1.0}, 1.1 * tstar, v)) > 1.6);

  SplitMix64 rng(79);
  for (int trial = 0; trial < 30; ++trial) {
    RepSpec r = trial % 3 == 2 ? random_su2_rep(rng) : random_torus_rep(rng);
    cvec x = random_state(rng, r.n);
    lievec xi = random_lie(rng, r.lie_dim());
    double radius = 0.5 + 2.5 * rng.uniform01();
    CHECK(orbital_convexity_probe(r, x, xi, radius, 101));
  }
}

TEST_CASE("invariant section norms grow at rate 8 pi mu along the flow") {
  SplitMix64 rng(109);
  int checked = 0;
  while (checked < 6) {
    RepSpec rep = random_torus_rep(rng);
    HilbertBasis hb = hilbert_basis(rep, 8);
    if (hb.generators.empty()) continue;
    ++checked;
    cvec v = random_state(rng, rep.n);
    detail::TorusFlow tf{&rep, rep.level_double()};
    rvec u(rep.n);
    for (int j = 0; j < rep.n; ++j) u[j] = std::norm(v[j]);
    rvec du = tf.deriv(u);
    double mu = tf.mu(u);
    for (const auto& g : hb.generators) {
      // d/dt log<s,s> = sum_j a_j u_j'/u_j - pi sum_j u_j'
      double rate = 0.0, total = 0.0;
      for (int j = 0; j < rep.n; ++j) {
        if (g.exps[j] > 0) rate += g.exps[j] * du[j] / u[j];
        total += du[j];
      }
      rate -= M_PI * total;
      CHECK(rate == doctest::Approx(8.0 * M_PI * mu).epsilon(1e-9));
    }
  }
}

TEST_CASE("nonzero levels: momentum, hull, flow and kempf-ness stay consistent") {
  // level 1 pushes the zero level out of reach of w = (1): unstable
  RepSpec up = build_torus_rep({{1}}, PhaseMode::Affine, {Rat(1)});
  cvec e{complexd(1, 0)};
  HullVerdict h1 = hull_oracle(up, e);
  CHECK_FALSE(h1.semistable);
  CHECK_FALSE(h1.closed);
  StabilityClass c1 = classify_point(up, e);
  CHECK(c1.tag == StabilityTag::Unstable);
  CHECK_FALSE(c1.closed_orbit);
  CHECK(minimize_kempf_ness(up, e).status == KempfNessOutcome::Status::Divergent);

  // level -1/2 makes the zero level reachable but only in the orbit closure
  RepSpec down = build_torus_rep({{1}}, PhaseMode::Affine, {Rat(-1, 2)});
  HullVerdict h2 = hull_oracle(down, e);
  CHECK(h2.semistable);
  CHECK_FALSE(h2.closed);
  FlowResult f2 = integrate_flow(down, e);
  CHECK(f2.phi_residual < 1e-6);
  CHECK(std::abs(norm_sq(f2.limit) - 1.0) < 1e-5);  // |v|^2 flows to 1 where Phi = 0
  CHECK(f2.classification.tag == StabilityTag::Semistable);
  CHECK(minimize_kempf_ness(down, e).status == KempfNessOutcome::Status::Divergent);

  // shifted resonance: level 1/2 keeps the origin interior at full support
  RepSpec res = build_torus_rep({{1, -1}}, PhaseMode::Affine, {Rat(1, 2)});
  cvec v{complexd(1, 0), complexd(1, 0)};
  CHECK(hull_oracle(res, v).closed);
  KempfNessOutcome kn = minimize_kempf_ness(res, v);
  CHECK(kn.status == KempfNessOutcome::Status::Minimum);
  // at the twisted minimum the shifted-weight average vanishes
  cvec moved = act_imaginary(res, kn.xi, 1.0, v);
  double shifted = 0.0;
  for (int j = 0; j < 2; ++j) shifted += (res.weights[0][j] + 0.5) * std::norm(moved[j]);
  CHECK(std::abs(shifted) < 1e-6);

  // projective level inside the hull: stable; outside: unstable
  RepSpec pin = build_torus_rep({{1, -1}}, PhaseMode::Projective, {Rat(1, 2)});
  StabilityClass cp = classify_point(pin, v);
  CHECK(cp.tag == StabilityTag::Stable);
  CHECK(hull_oracle(pin, v).stable);
  RepSpec pout = build_torus_rep({{1, -1}}, PhaseMode::Projective, {Rat(2)});
  StabilityClass co = classify_point(pout, v);
  CHECK(co.tag == StabilityTag::Unstable);
  CHECK_FALSE(hull_oracle(pout, v).semistable);
}

TEST_CASE("randomized level agreement between flow, hull and kempf-ness") {
  SplitMix64 rng(113);
  FlowOptions opts;
  for (int trial = 0; trial < 30; ++trial) {
    TorusInstanceOptions o;
    o.mode = trial % 2 ? PhaseMode::Projective : PhaseMode::Affine;
    RepSpec rep = random_torus_rep(rng, o);
    for (Rat& l : rep.level) l = Rat(rng.uniform_int(-3, 3), 2);
    cvec v = random_state(rng, rep.n);
    HullVerdict h = hull_oracle(rep, v);
    StabilityClass c = classify_point(rep, v, opts);
    if (c.indeterminate) continue;
    CHECK(c.closed_orbit == h.closed);
    if (rep.mode == PhaseMode::Projective) {
      StabilityTag expect =
          h.stable ? StabilityTag::Stable : (h.semistable ? StabilityTag::Semistable : StabilityTag::Unstable);
      CHECK(c.tag == expect);
    } else {
      CHECK((c.tag != StabilityTag::Unstable) == h.semistable);
    }
  }
}

TEST_CASE("flow options validate") {
  FlowOptions bad;
  bad.grad_stop = 2.0;
  CHECK_THROWS_AS(bad.validate(), malformed_config);
  FlowOptions bad2;
  bad2.phi_tol = 1e-12;
  bad2.grad_stop = 1e-6;
  CHECK_THROWS_AS(bad2.validate(), malformed_config);
}
