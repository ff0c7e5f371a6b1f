#pragma once

#include "symred/hull.hpp"
#include "symred/rep.hpp"
#include "symred/rng.hpp"

namespace symred {

// Seeded instance generation shared by the CLI and the test suites. Draw
// order is part of the reproducibility contract (see README): rank d, then
// n, then weights row-major, then any state coordinates as complex normals.

struct TorusInstanceOptions {
  int n_min = 2;
  int n_max = 6;
  int d_min = 1;
  int d_max = 3;
  long long w_max = 3;
  PhaseMode mode = PhaseMode::Affine;
};

inline RepSpec random_torus_rep(SplitMix64& rng, const TorusInstanceOptions& o = {}) {
  int d = static_cast<int>(rng.uniform_int(o.d_min, o.d_max));
  int n = static_cast<int>(rng.uniform_int(std::max(o.n_min, o.mode == PhaseMode::Projective ? 2 : 1), o.n_max));
  std::vector<std::vector<long long>> w(d, std::vector<long long>(n));
  for (int a = 0; a < d; ++a)
    for (int j = 0; j < n; ++j) w[a][j] = rng.uniform_int(-o.w_max, o.w_max);
  return build_torus_rep(std::move(w), o.mode);
}

inline RepSpec random_su2_rep(SplitMix64& rng, int max_spin = 3, int max_summands = 2,
                              PhaseMode mode = PhaseMode::Affine) {
  int parts = static_cast<int>(rng.uniform_int(1, max_summands));
  std::vector<int> spins(parts);
  for (int& s : spins) s = static_cast<int>(rng.uniform_int(1, max_spin));
  return build_su2_rep(std::move(spins), mode);
}

inline cvec random_state(SplitMix64& rng, int n) {
  cvec v(n);
  for (auto& z : v) z = rng.complex_normal();
  return v;
}

inline lievec random_lie(SplitMix64& rng, int d) {
  lievec xi(d);
  for (double& x : xi) x = rng.normal();
  return xi;
}

// Rejection-samples a torus rep and point whose orbit is closed (exact hull
// certificate). Used to seed orbit-separation instances.
inline std::pair<RepSpec, cvec> random_closed_orbit_instance(SplitMix64& rng, const TorusInstanceOptions& o = {}) {
  for (int attempt = 0; attempt < 4000; ++attempt) {
    RepSpec rep = random_torus_rep(rng, o);
    cvec v = random_state(rng, rep.n);
    if (hull_oracle(rep, v).closed) return {std::move(rep), std::move(v)};
  }
  throw max_iterations_error("no closed-orbit instance found");
}

}  // namespace symred
