#include <doctest.h>

#include <set>

#include "symred/generators.hpp"
#include "symred/invariants.hpp"

using namespace symred;

namespace {

std::set<std::vector<int>> gen_set(const HilbertBasis& hb) {
  std::set<std::vector<int>> s;
  for (const auto& g : hb.generators) s.insert(g.exps);
  return s;
}

// Brute-force oracle: every zero-weight vector of degree <= cap must be a sum
// of generators (checked by greedy-free recursive subtraction).
bool generated_by(const std::vector<int>& a, const std::vector<MonomialExponent>& gens) {
  if (std::all_of(a.begin(), a.end(), [](int x) { return x == 0; })) return true;
  for (const auto& g : gens) {
    bool leq = true;
    for (size_t j = 0; j < a.size(); ++j)
      if (g.exps[j] > a[j]) {
        leq = false;
        break;
      }
    if (!leq) continue;
    std::vector<int> rest(a.size());
    for (size_t j = 0; j < a.size(); ++j) rest[j] = a[j] - g.exps[j];
    if (generated_by(rest, gens)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("hilbert bases of the pinned reps") {
  RepSpec res = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  HilbertBasis hb = hilbert_basis(res, 6);
  CHECK(gen_set(hb) == std::set<std::vector<int>>{{1, 1}});
  CHECK(hb.complete_certified);

  RepSpec one = build_torus_rep({{1}}, PhaseMode::Affine);
  HilbertBasis empty = hilbert_basis(one, 6);
  CHECK(empty.generators.empty());
  CHECK(empty.complete_certified);

  RepSpec three = build_torus_rep({{1, 1, -1}}, PhaseMode::Affine);
  HilbertBasis hb3 = hilbert_basis(three, 6);
  CHECK(gen_set(hb3) == std::set<std::vector<int>>{{1, 0, 1}, {0, 1, 1}});
  CHECK(hb3.complete_certified);

  RepSpec skew = build_torus_rep({{2, -3}}, PhaseMode::Affine);
  HilbertBasis hbs = hilbert_basis(skew, 6);
  CHECK(gen_set(hbs) == std::set<std::vector<int>>{{3, 2}});
  CHECK(hbs.complete_certified);

  // a cap below the certificate bound is reported truncated
  HilbertBasis trunc = hilbert_basis(skew, 3);
  CHECK_FALSE(trunc.complete_certified);
  CHECK(trunc.generators.empty());
}

TEST_CASE("generators are minimal and generate (small instances)") {
  SplitMix64 rng(83);
  TorusInstanceOptions o;
  o.n_max = 4;
  o.w_max = 2;
  o.d_max = 2;
  for (int trial = 0; trial < 10; ++trial) {
    RepSpec rep = random_torus_rep(rng, o);
    HilbertBasis hb = hilbert_basis(rep, 10);
    // minimality: no generator is a componentwise sum of two others
    for (const auto& g : hb.generators)
      for (const auto& h : hb.generators) {
        if (&g == &h) continue;
        bool leq = true;
        for (int j = 0; j < rep.n; ++j)
          if (h.exps[j] > g.exps[j]) leq = false;
        if (!(&g != &h && leq)) continue;
        std::vector<int> rest(rep.n);
        for (int j = 0; j < rep.n; ++j) rest[j] = g.exps[j] - h.exps[j];
        bool rest_zero_weight = true;
        for (int a = 0; a < rep.d; ++a) {
          long long s = 0;
          for (int j = 0; j < rep.n; ++j) s += rep.weights[a][j] * rest[j];
          if (s != 0) rest_zero_weight = false;
        }
        bool rest_nonzero = std::any_of(rest.begin(), rest.end(), [](int x) { return x != 0; });
        bool decomposable = rest_zero_weight && rest_nonzero;
        CHECK_FALSE(decomposable);
      }
    // generation of the whole truncated monoid
    imat b(rep.d, ivec(rep.n));
    for (int a = 0; a < rep.d; ++a)
      for (int j = 0; j < rep.n; ++j) b[a][j] = rep.weights[a][j];
    std::vector<int> comp(rep.n, 0);
    for (int k = 1; k <= 10; ++k)
      detail::for_each_composition(k, rep.n, comp, 0, [&](const std::vector<int>& a) {
        bool zero = true;
        for (int r = 0; r < rep.d; ++r) {
          long long s = 0;
          for (int j = 0; j < rep.n; ++j) s += b[r][j] * a[j];
          if (s != 0) zero = false;
        }
        if (zero) CHECK(generated_by(a, hb.generators));
      });
  }
}

TEST_CASE("hilbert map evaluation") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  HilbertBasis hb = hilbert_basis(rep, 4);
  cvec sigma = hilbert_map(hb, {complexd(2, 0), complexd(1, 0)});
  REQUIRE(sigma.size() == 1);
  CHECK(std::abs(sigma[0] - complexd(2, 0)) < 1e-15);
  cvec at_zero = hilbert_map(hb, cvec(2, complexd(0, 0)));
  CHECK(norm2(at_zero) == 0.0);
}

TEST_CASE("hilbert map is constant along orbits, moduli invariant under the torus") {
  SplitMix64 rng(89);
  for (int trial = 0; trial < 8; ++trial) {
    auto [rep, v] = random_closed_orbit_instance(rng);
    HilbertBasis hb = hilbert_basis(rep, 8);
    cvec s0 = hilbert_map(hb, v);
    lievec xi = random_lie(rng, rep.d);
    cvec moved = act_imaginary(rep, xi, 0.6, v);
    cvec s1 = hilbert_map(hb, moved);
    for (size_t i = 0; i < s0.size(); ++i) CHECK(std::abs(s1[i] - s0[i]) < 1e-10 * (1.0 + std::abs(s0[i])));
    // compact-torus rotation leaves each |sigma_i| unchanged
    lievec th = random_lie(rng, rep.d);
    cvec rotated(rep.n);
    for (int j = 0; j < rep.n; ++j) {
      double ang = 0.0;
      for (int a = 0; a < rep.d; ++a) ang += rep.weights[a][j] * th[a];
      rotated[j] = v[j] * std::exp(complexd(0, ang));
    }
    cvec s2 = hilbert_map(hb, rotated);
    for (size_t i = 0; i < s0.size(); ++i)
      CHECK(std::abs(std::abs(s2[i]) - std::abs(s0[i])) < 1e-10 * (1.0 + std::abs(s0[i])));
  }
}

TEST_CASE("orbit separation on the resonance rep") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  HilbertBasis hb = hilbert_basis(rep, 4);
  cvec v{complexd(1, 0), complexd(1, 0)};
  cvec w{complexd(2, 0), complexd(2, 0)};
  CHECK(separates_closed_orbits(rep, hb, v, w, 1e-6));  // sigma: 1 vs 4
  cvec v21{complexd(2, 0), complexd(1, 0)};
  cvec v12{complexd(1, 0), complexd(2, 0)};
  CHECK_FALSE(separates_closed_orbits(rep, hb, v21, v12, 1e-6));  // same closed orbit, sigma = 2
  cvec moved = act_imaginary(rep, {0.35}, 1.0, v);
  CHECK_FALSE(separates_closed_orbits(rep, hb, v, moved, 1e-6));
  cvec bad{complexd(1, 0), complexd(0, 0)};
  CHECK_THROWS_AS(separates_closed_orbits(rep, hb, v, bad, 1e-6), not_closed_orbit);
}

TEST_CASE("strata of the resonance rep: vertex and complement") {
  RepSpec rep = build_torus_rep({{1, -1}}, PhaseMode::Affine);
  auto strata = enumerate_strata(rep);
  REQUIRE(strata.size() == 2);
  CHECK(strata[0].dimension == 0);
  CHECK(strata[0].stabilizer_dim == 1);  // the vertex is fixed by the whole torus
  CHECK(strata[0].supports == std::vector<std::vector<int>>{{}});
  CHECK(strata[1].dimension == 2);
  CHECK(strata[1].stabilizer_dim == 0);
  CHECK(strata[1].supports == std::vector<std::vector<int>>{{0, 1}});
}

TEST_CASE("a definite rep has only the vertex stratum") {
  RepSpec rep = build_torus_rep({{1}}, PhaseMode::Affine);
  auto strata = enumerate_strata(rep);
  REQUIRE(strata.size() == 1);
  CHECK(strata[0].dimension == 0);
  CHECK(strata[0].supports == std::vector<std::vector<int>>{{}});
}

TEST_CASE("projective strata of [1 0 -1]") {
  RepSpec rep = build_torus_rep({{1, 0, -1}}, PhaseMode::Projective);
  auto strata = enumerate_strata(rep);
  // the fixed point [0:1:0] carries the full stabilizer; the supports {0,2}
  // and {0,1,2} share the trivial kernel and merge into the top stratum
  REQUIRE(strata.size() == 2);
  CHECK(strata[0].stabilizer_dim == 1);
  CHECK(strata[0].supports == std::vector<std::vector<int>>{{1}});
  CHECK(strata[0].dimension == 0);
  CHECK(strata[1].stabilizer_dim == 0);
  CHECK(strata[1].supports == std::vector<std::vector<int>>{{0, 2}, {0, 1, 2}});
  CHECK(strata[1].dimension == 2);
}

TEST_CASE("stratum dimensions are even with a unique top stratum") {
  SplitMix64 rng(97);
  TorusInstanceOptions o;
  o.n_max = 5;
  for (int trial = 0; trial < 12; ++trial) {
    o.mode = trial % 2 ? PhaseMode::Projective : PhaseMode::Affine;
    RepSpec rep = random_torus_rep(rng, o);
    auto strata = enumerate_strata(rep);
    if (strata.empty()) continue;  // projective reps can have an empty zero level
    int top = -1, top_count = 0;
    for (const auto& s : strata) {
      CHECK(s.dimension % 2 == 0);
      if (s.dimension > top) {
        top = s.dimension;
        top_count = 1;
      } else if (s.dimension == top) {
        ++top_count;
      }
    }
    CHECK(top_count == 1);
  }
}
