#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "symred/hull.hpp"
#include "symred/rep.hpp"

namespace symred {

struct MonomialExponent {
  std::vector<int> exps;
  std::vector<long long> weight;  // W . exps (raw, unshifted)
  int degree = 0;
};

struct HilbertBasis {
  std::vector<MonomialExponent> generators;
  bool complete_certified = false;
  int degree_cap = 0;
};

namespace detail {

// Level-shifted zero-weight equations: a satisfies W a = (deg a) lambda,
// cleared to one integer matrix B with B a = 0.
inline imat zero_weight_rows(const RepSpec& rep) {
  long long q = 1;
  for (const Rat& l : rep.level) q = lcm_ll(q, l.den());
  if (q == 0) q = 1;
  imat b(rep.d, ivec(rep.n));
  for (int a = 0; a < rep.d; ++a) {
    long long shift = rep.level[a].num() * (q / rep.level[a].den());
    for (int j = 0; j < rep.n; ++j) b[a][j] = checked_sub(checked_mul(q, rep.weights[a][j]), shift);
  }
  return b;
}

inline bool in_monoid(const imat& b, const std::vector<int>& a) {
  for (const auto& row : b) {
    long long s = 0;
    for (size_t j = 0; j < a.size(); ++j) s += row[j] * a[j];
    if (s != 0) return false;
  }
  return true;
}

template <typename F>
inline void for_each_composition(int degree, int parts, std::vector<int>& a, int pos, const F& f) {
  if (pos == parts - 1) {
    a[pos] = degree;
    f(a);
    return;
  }
  for (int c = 0; c <= degree; ++c) {
    a[pos] = c;
    for_each_composition(degree - c, parts, a, pos + 1, f);
  }
}

}  // namespace detail

// All minimal zero-weight exponent vectors of degree <= degree_cap, by
// breadth-first enumeration over degree shells with a minimality sieve.
// complete_certified reports whether the cap provably contains the whole
// basis: every extreme ray of the solution cone is represented and the cap
// covers the zonotope degree bound sum(deg r_i) - 1.
inline HilbertBasis hilbert_basis(const RepSpec& rep, int degree_cap) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("hilbert_basis is torus-only");
  if (degree_cap < 1) throw malformed_config("degree_cap must be >= 1");
  imat b = detail::zero_weight_rows(rep);
  HilbertBasis out;
  out.degree_cap = degree_cap;
  std::vector<int> a(rep.n, 0);
  for (int k = 1; k <= degree_cap; ++k) {
    detail::for_each_composition(k, rep.n, a, 0, [&](const std::vector<int>& cand) {
      if (!detail::in_monoid(b, cand)) return;
      for (const auto& g : out.generators) {
        bool leq = true;
        for (int j = 0; j < rep.n; ++j)
          if (g.exps[j] > cand[j]) {
            leq = false;
            break;
          }
        if (leq) return;  // decomposable
      }
      MonomialExponent m;
      m.exps = cand;
      m.degree = k;
      m.weight.assign(rep.d, 0);
      for (int r = 0; r < rep.d; ++r)
        for (int j = 0; j < rep.n; ++j) m.weight[r] += rep.weights[r][j] * cand[j];
      out.generators.push_back(std::move(m));
    });
  }
  std::vector<ivec> rays = extreme_rays(b, rep.n);
  if (rays.empty()) {
    out.complete_certified = true;
  } else {
    long long zono = 0, maxdeg = 0;
    for (const auto& r : rays) {
      long long deg = 0;
      for (long long x : r) deg += x;
      zono += deg;
      maxdeg = std::max(maxdeg, deg);
    }
    long long needed = rays.size() == 1 ? zono : std::max(maxdeg, zono - 1);
    out.complete_certified = degree_cap >= needed;
  }
  return out;
}

// sigma_i(v) = prod_j v_j^(a_ij): the Hilbert map into C^l.
inline cvec hilbert_map(const HilbertBasis& basis, const cvec& v) {
  cvec out(basis.generators.size());
  for (size_t i = 0; i < basis.generators.size(); ++i) {
    complexd p(1, 0);
    for (size_t j = 0; j < basis.generators[i].exps.size(); ++j)
      for (int e = 0; e < basis.generators[i].exps[j]; ++e) p *= v[j];
    out[i] = p;
  }
  return out;
}

// The Hilbert map is constant on closed orbits and separates distinct ones;
// both points must classify as closed (exact hull check), else
// not_closed_orbit.
inline bool separates_closed_orbits(const RepSpec& rep, const HilbertBasis& basis, const cvec& v, const cvec& w,
                                    double tol) {
  if (!hull_oracle(rep, v).closed) throw not_closed_orbit("first point");
  if (!hull_oracle(rep, w).closed) throw not_closed_orbit("second point");
  cvec sv = hilbert_map(basis, v);
  cvec sw = hilbert_map(basis, w);
  double dist = 0.0;
  for (size_t i = 0; i < sv.size(); ++i) dist += std::norm(sv[i] - sw[i]);
  return std::sqrt(dist) > tol;
}

struct StratumDescriptor {
  imat stabilizer_kernel;                  // canonical HNF basis of {xi in Z^d : <w_j,xi> = 0, j in S}
  std::vector<std::vector<int>> supports;  // support patterns merged into this stratum
  int dimension = 0;                       // real dimension inside the reduced space
  int stabilizer_dim = 0;
};

// Orbit-type stratification of the zero level: support patterns with a
// nonempty zero-level fiber, grouped by stabilizer kernel lattice. Patterns
// with equal kernels merge; the stratum dimension is that of its largest
// piece.
inline std::vector<StratumDescriptor> enumerate_strata(const RepSpec& rep) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("enumerate_strata is torus-only");
  if (rep.n > 16) throw dimension_too_large("support enumeration beyond n = 16");
  std::map<imat, StratumDescriptor> groups;
  for (int mask = 0; mask < (1 << rep.n); ++mask) {
    std::vector<int> s;
    for (int j = 0; j < rep.n; ++j)
      if (mask & (1 << j)) s.push_back(j);
    if (!zero_fiber_nonempty(rep, s)) continue;
    // kernel lattice of the support-restricted weights
    imat rows;
    for (int j : s) {
      ivec r(rep.d);
      for (int a = 0; a < rep.d; ++a) r[a] = rep.weights[a][j];
      rows.push_back(std::move(r));
    }
    imat kernel = rows.empty() ? [&] {
      imat id(rep.d, ivec(rep.d, 0));
      for (int a = 0; a < rep.d; ++a) id[a][a] = 1;
      return id;
    }()
                               : kernel_lattice(rows, rep.d);
    imat canon = hermite_normal_form(kernel, rep.d);

    int dim;
    if (rep.mode == PhaseMode::Affine) {
      ratmat m(rep.d, ratvec(s.size()));
      for (int a = 0; a < rep.d; ++a)
        for (size_t c = 0; c < s.size(); ++c) m[a][c] = Rat(rep.weights[a][s[c]]);
      int rk = s.empty() ? 0 : rank_rat(m);
      dim = 2 * (static_cast<int>(s.size()) - rk);
    } else {
      // rank of the weight differences on the support
      int rk = 0;
      if (s.size() > 1) {
        ratmat m(rep.d, ratvec(s.size() - 1));
        for (int a = 0; a < rep.d; ++a)
          for (size_t c = 1; c < s.size(); ++c)
            m[a][c - 1] = Rat(rep.weights[a][s[c]] - rep.weights[a][s[0]]);
        rk = rank_rat(m);
      }
      dim = 2 * (static_cast<int>(s.size()) - 1 - rk);
    }

    auto& g = groups[canon];
    if (g.supports.empty()) {
      g.stabilizer_kernel = canon;
      g.stabilizer_dim = static_cast<int>(canon.size());
      g.dimension = dim;
    }
    g.supports.push_back(s);
    g.dimension = std::max(g.dimension, dim);
  }
  std::vector<StratumDescriptor> out;
  for (auto& [k, v] : groups) out.push_back(std::move(v));
  std::sort(out.begin(), out.end(), [](const StratumDescriptor& a, const StratumDescriptor& b) {
    if (a.dimension != b.dimension) return a.dimension < b.dimension;
    return a.stabilizer_kernel < b.stabilizer_kernel;
  });
  return out;
}

}  // namespace symred
