#pragma once

#include <vector>

#include "symred/linear.hpp"
#include "symred/moment.hpp"
#include "symred/rep.hpp"

namespace symred {

struct Membership {
  bool contains = false;
  bool relint = false;
};

// Is the origin in conv(points)? In its relative interior? Decided by one
// exact LP: maximize t subject to c_j = t + s_j, s >= 0, sum c = 1, P c = 0.
// A point of a finite set lies in the relative interior of the hull iff it
// has a representation with all coefficients strictly positive.
inline Membership origin_in_hull(const std::vector<ratvec>& points) {
  if (points.empty()) return {false, false};
  const int m = static_cast<int>(points.size());
  const int dim = static_cast<int>(points[0].size());
  ratmat a(1 + dim, ratvec(1 + m));
  ratvec b(1 + dim);
  a[0][0] = Rat(m);
  for (int j = 0; j < m; ++j) a[0][1 + j] = Rat(1);
  b[0] = Rat(1);
  for (int r = 0; r < dim; ++r) {
    Rat colsum(0);
    for (int j = 0; j < m; ++j) {
      a[1 + r][1 + j] = points[j][r];
      colsum += points[j][r];
    }
    a[1 + r][0] = colsum;
    b[1 + r] = Rat(0);
  }
  ratvec c(1 + m);
  c[0] = Rat(1);
  LpResult lp = solve_lp(std::move(a), std::move(b), std::move(c));
  if (lp.status != LpStatus::Optimal) return {false, false};
  return {true, lp.objective > Rat(0)};
}

// Is rhs in cone(points)? In its relative interior (some strictly positive
// combination)? The auxiliary variable t is capped at 1 to keep the LP
// bounded; this does not change the sign of the optimum.
inline Membership rhs_in_cone(const std::vector<ratvec>& points, const ratvec& rhs) {
  const int dim = static_cast<int>(rhs.size());
  bool rhs_zero = true;
  for (const Rat& x : rhs)
    if (!x.is_zero()) rhs_zero = false;
  if (points.empty()) return {rhs_zero, rhs_zero};
  const int m = static_cast<int>(points.size());
  ratmat a(dim + 1, ratvec(m + 2));
  ratvec b(dim + 1);
  for (int r = 0; r < dim; ++r) {
    Rat colsum(0);
    for (int j = 0; j < m; ++j) {
      a[r][1 + j] = points[j][r];
      colsum += points[j][r];
    }
    a[r][0] = colsum;
    b[r] = rhs[r];
  }
  a[dim][0] = Rat(1);
  a[dim][m + 1] = Rat(1);
  b[dim] = Rat(1);
  ratvec c(m + 2);
  c[0] = Rat(1);
  LpResult lp = solve_lp(std::move(a), std::move(b), std::move(c));
  if (lp.status != LpStatus::Optimal) return {false, false};
  return {true, lp.objective > Rat(0)};
}

// Weight of coordinate j shifted by the level, w_j + lambda. The level enters
// the whole classification stack through this shift, matching the momentum
// convention Phi = -(weight average) - lambda: the momentum image is
// (-1) (hull of weights) - lambda, so "0 in the shifted hull" is exactly
// "0 in the momentum image".
inline ratvec shifted_weight(const RepSpec& rep, int j) {
  ratvec w(rep.d);
  for (int a = 0; a < rep.d; ++a) w[a] = Rat(rep.weights[a][j]) + rep.level[a];
  return w;
}

inline bool level_is_zero(const RepSpec& rep) {
  for (const Rat& x : rep.level)
    if (!x.is_zero()) return false;
  return true;
}

struct HullVerdict {
  bool semistable = false;
  bool closed = false;
  bool stable = false;
};

namespace detail {

inline int support_weight_rank(const RepSpec& rep, const std::vector<int>& s, bool shifted) {
  if (s.empty()) return 0;
  ratmat sub(rep.d, ratvec(s.size()));
  for (int a = 0; a < rep.d; ++a)
    for (size_t c = 0; c < s.size(); ++c) {
      sub[a][c] = Rat(rep.weights[a][s[c]]);
      if (shifted) sub[a][c] += rep.level[a];
    }
  return rank_rat(sub);
}

}  // namespace detail

// Exact combinatorial classification of a torus point from its support
// pattern alone; the independent cross-check for the flow classifier.
//   affine:     closed  <=> 0 in relint conv{shifted weights on supp},
//               stable  <=> closed and the raw weights on supp span R^d,
//               semistable <=> always at level 0, else the zero level is
//               reachable: -2 lambda in cone{raw weights on supp}.
//   projective: semistable <=> 0 in conv, closed/stable via relint, the
//               spanning test on the shifted weights (these carry the rank
//               of d Phi at the zero-level point).
inline HullVerdict hull_oracle(const RepSpec& rep, const cvec& v, double tol = 1e-12) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("hull_oracle is torus-only");
  rep.check_state(v);
  std::vector<int> s = support(v, tol);
  HullVerdict out;
  if (rep.mode == PhaseMode::Affine) {
    if (s.empty()) {  // the fixed point at the origin
      out.closed = true;
      out.stable = false;
      out.semistable = level_is_zero(rep);
      return out;
    }
    std::vector<ratvec> shifted;
    shifted.reserve(s.size());
    for (int j : s) shifted.push_back(shifted_weight(rep, j));
    Membership m = origin_in_hull(shifted);
    out.closed = m.relint;
    out.stable = m.relint && detail::support_weight_rank(rep, s, false) == rep.d;
    if (level_is_zero(rep)) {
      out.semistable = true;
    } else {
      std::vector<ratvec> raw;
      for (int j : s) {
        ratvec w(rep.d);
        for (int a = 0; a < rep.d; ++a) w[a] = Rat(rep.weights[a][j]);
        raw.push_back(std::move(w));
      }
      ratvec rhs(rep.d);
      for (int a = 0; a < rep.d; ++a) rhs[a] = Rat(-2) * rep.level[a];
      out.semistable = rhs_in_cone(raw, rhs).contains;
    }
    return out;
  }
  if (s.empty()) return out;  // below support threshold: nothing to certify
  std::vector<ratvec> shifted;
  shifted.reserve(s.size());
  for (int j : s) shifted.push_back(shifted_weight(rep, j));
  Membership m = origin_in_hull(shifted);
  out.semistable = m.contains;
  out.closed = m.relint;
  out.stable = m.relint && detail::support_weight_rank(rep, s, true) == rep.d;
  return out;
}

// Does { supp = S } meet the zero level? Strict positive-combination test on
// the momentum equation; used by the stratification.
inline bool zero_fiber_nonempty(const RepSpec& rep, const std::vector<int>& s) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("zero_fiber_nonempty is torus-only");
  if (rep.mode == PhaseMode::Affine) {
    if (s.empty()) return level_is_zero(rep);
    std::vector<ratvec> raw;
    for (int j : s) {
      ratvec w(rep.d);
      for (int a = 0; a < rep.d; ++a) w[a] = Rat(rep.weights[a][j]);
      raw.push_back(std::move(w));
    }
    ratvec rhs(rep.d);
    for (int a = 0; a < rep.d; ++a) rhs[a] = Rat(-2) * rep.level[a];
    return rhs_in_cone(raw, rhs).relint;
  }
  if (s.empty()) return false;
  std::vector<ratvec> shifted;
  for (int j : s) shifted.push_back(shifted_weight(rep, j));
  ratvec zero(rep.d, Rat(0));
  return rhs_in_cone(shifted, zero).relint;
}

}  // namespace symred
