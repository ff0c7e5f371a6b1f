#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "symred/linear.hpp"

namespace symred {

// H-polytope over the rationals: eq . x = eqr, ineq . x <= ineqr.
struct HPolytope {
  int n = 0;
  ratmat eq;
  ratvec eqr;
  ratmat ineq;
  ratvec ineqr;
};

namespace polydetail {

inline bool lex_less(const ratvec& a, const ratvec& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return false;
}

template <typename F>
inline void for_each_subset(int total, int choose, std::vector<int>& pick, int start, const F& f) {
  if (static_cast<int>(pick.size()) == choose) {
    f(pick);
    return;
  }
  for (int i = start; i <= total - (choose - static_cast<int>(pick.size())); ++i) {
    pick.push_back(i);
    for_each_subset(total, choose, pick, i + 1, f);
    pick.pop_back();
  }
}

}  // namespace polydetail

// All vertices, by brute-force active-set enumeration. The polytopes handled
// here are bounded (they sit in x >= 0 with a degree cap), so nonempty means
// at least one vertex.
inline std::vector<ratvec> enumerate_vertices(const HPolytope& p) {
  std::vector<ratvec> verts;
  int base_rank = p.eq.empty() ? 0 : rank_rat(p.eq);
  int need = p.n - base_rank;
  if (need < 0) return verts;
  auto try_active = [&](const std::vector<int>& act) {
    ratmat a = p.eq;
    ratvec b = p.eqr;
    for (int i : act) {
      a.push_back(p.ineq[i]);
      b.push_back(p.ineqr[i]);
    }
    auto x = solve_unique(a, b);
    if (!x) return;
    for (size_t i = 0; i < p.ineq.size(); ++i) {
      Rat lhs(0);
      for (int j = 0; j < p.n; ++j) lhs += p.ineq[i][j] * (*x)[j];
      if (lhs > p.ineqr[i]) return;
    }
    verts.push_back(*x);
  };
  std::vector<int> pick;
  polydetail::for_each_subset(static_cast<int>(p.ineq.size()), need, pick, 0, try_active);
  std::sort(verts.begin(), verts.end(), polydetail::lex_less);
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  return verts;
}

inline int affine_dim(const std::vector<ratvec>& verts) {
  if (verts.empty()) return -1;
  if (verts.size() == 1) return 0;
  ratmat diffs;
  for (size_t i = 1; i < verts.size(); ++i) {
    ratvec d(verts[0].size());
    for (size_t j = 0; j < d.size(); ++j) d[j] = verts[i][j] - verts[0][j];
    diffs.push_back(std::move(d));
  }
  return rank_rat(diffs);
}

namespace polydetail {

// Re-embeds points into coordinates on their affine span. Returns the
// embedded points and the span dimension.
inline std::pair<std::vector<ratvec>, int> affine_coords(const std::vector<ratvec>& pts) {
  const size_t m = pts[0].size();
  ratmat diffs;
  for (size_t i = 1; i < pts.size(); ++i) {
    ratvec d(m);
    for (size_t j = 0; j < m; ++j) d[j] = pts[i][j] - pts[0][j];
    diffs.push_back(std::move(d));
  }
  if (diffs.empty()) return {std::vector<ratvec>(pts.size()), 0};
  Rref r = rref(diffs);
  int dim = r.rank;
  ratmat basis(r.mat.begin(), r.mat.begin() + dim);  // rows span the difference space
  // coordinates: solve basis^T c = p - p0 (consistent, unique)
  ratmat bt(m, ratvec(dim));
  for (int k = 0; k < dim; ++k)
    for (size_t j = 0; j < m; ++j) bt[j][k] = basis[k][j];
  std::vector<ratvec> emb;
  for (const auto& p : pts) {
    ratvec rhs(m);
    for (size_t j = 0; j < m; ++j) rhs[j] = p[j] - pts[0][j];
    auto c = solve_unique(bt, rhs);
    emb.push_back(*c);
  }
  return {emb, dim};
}

// Triangulation of a V-polytope by apex-over-facets recursion; returns index
// tuples into pts.
inline std::vector<std::vector<int>> triangulate(const std::vector<ratvec>& pts_in) {
  auto [pts, dim] = affine_coords(pts_in);
  const int np = static_cast<int>(pts.size());
  std::vector<std::vector<int>> tri;
  if (dim == 0) {
    tri.push_back({0});
    return tri;
  }
  if (np == dim + 1) {
    std::vector<int> all(np);
    for (int i = 0; i < np; ++i) all[i] = i;
    tri.push_back(all);
    return tri;
  }
  std::set<std::vector<int>> facets;
  std::vector<int> pick;
  for_each_subset(np, dim, pick, 0, [&](const std::vector<int>& c) {
    ratmat d;
    for (size_t i = 1; i < c.size(); ++i) {
      ratvec row(dim);
      for (int j = 0; j < dim; ++j) row[j] = pts[c[i]][j] - pts[c[0]][j];
      d.push_back(std::move(row));
    }
    ratmat ns = d.empty() ? ratmat{ratvec{Rat(1)}} : rat_nullspace(d);
    if (ns.size() != 1) return;  // degenerate subset
    const ratvec& a = ns[0];
    Rat off(0);
    for (int j = 0; j < dim; ++j) off += a[j] * pts[c[0]][j];
    bool pos = false, neg = false;
    std::vector<int> on;
    for (int i = 0; i < np; ++i) {
      Rat s(0);
      for (int j = 0; j < dim; ++j) s += a[j] * pts[i][j];
      if (s > off)
        pos = true;
      else if (s < off)
        neg = true;
      else
        on.push_back(i);
    }
    if (pos && neg) return;
    facets.insert(on);
  });
  for (const auto& f : facets) {
    if (std::find(f.begin(), f.end(), 0) != f.end()) continue;
    std::vector<ratvec> sub;
    for (int i : f) sub.push_back(pts[i]);
    for (const auto& s : triangulate(sub)) {
      std::vector<int> simplex{0};
      for (int i : s) simplex.push_back(f[i]);
      tri.push_back(std::move(simplex));
    }
  }
  return tri;
}

inline Rat det_rat(ratmat a) {
  const int n = static_cast<int>(a.size());
  Rat det(1);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (!a[r][c].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    Rat inv = Rat(1) / a[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c].is_zero()) continue;
      Rat f = a[r][c] * inv;
      for (int j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

}  // namespace polydetail

// Normalized (lattice) volume of a polytope given by its vertices: the
// Euclidean volume in lattice coordinates on the affine span, times dim!.
// A point counts as 1; a primitive segment counts as 1.
inline Rat normalized_volume(const std::vector<ratvec>& verts, int ambient_n) {
  if (verts.empty()) throw malformed_config("volume of an empty polytope");
  int dim = affine_dim(verts);
  if (dim == 0) return Rat(1);
  if (dim > 6) throw dimension_too_large("volume beyond dimension 6");

  // Integral basis of the affine-span direction lattice: directions are the
  // kernel of the integer row system y with <y, dir> = 0.
  ratmat diffs;
  for (size_t i = 1; i < verts.size(); ++i) {
    ratvec d(ambient_n);
    for (int j = 0; j < ambient_n; ++j) d[j] = verts[i][j] - verts[0][j];
    diffs.push_back(std::move(d));
  }
  ratmat y = rat_nullspace(diffs);  // functionals vanishing on the span
  imat yint;
  for (const auto& row : y) {
    long long q = 1;
    for (const Rat& x : row) q = lcm_ll(q, x.den());
    ivec r(ambient_n);
    for (int j = 0; j < ambient_n; ++j) r[j] = checked_mul(row[j].num(), q / row[j].den());
    yint.push_back(std::move(r));
  }
  imat lattice = yint.empty() ? [&] {
    imat id(ambient_n, ivec(ambient_n, 0));
    for (int j = 0; j < ambient_n; ++j) id[j][j] = 1;
    return id;
  }()
                              : kernel_lattice(yint, ambient_n);
  if (static_cast<int>(lattice.size()) != dim)
    throw dimension_mismatch("affine span lattice rank disagrees with polytope dimension");

  // vertices in lattice coordinates
  ratmat bt(ambient_n, ratvec(dim));
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < ambient_n; ++j) bt[j][k] = Rat(lattice[k][j]);
  std::vector<ratvec> lat;
  for (const auto& v : verts) {
    ratvec rhs(ambient_n);
    for (int j = 0; j < ambient_n; ++j) rhs[j] = v[j] - verts[0][j];
    auto c = solve_unique(bt, rhs);
    if (!c) throw dimension_mismatch("vertex outside affine span lattice coordinates");
    lat.push_back(*c);
  }

  Rat vol(0);
  for (const auto& s : polydetail::triangulate(lat)) {
    ratmat edges;
    for (size_t i = 1; i < s.size(); ++i) {
      ratvec e(dim);
      for (int j = 0; j < dim; ++j) e[j] = lat[s[i]][j] - lat[s[0]][j];
      edges.push_back(std::move(e));
    }
    vol += polydetail::det_rat(edges).abs();
  }
  return vol;
}

// Lattice points of { x in Z^n : x >= 0, W x = target, sum x (=|<=) degree },
// counted by depth-first search with per-row achievability pruning.
inline long long count_lattice_points(const imat& w, const ivec& target, long long degree, bool degree_equality) {
  const int rows = static_cast<int>(w.size());
  const int n = rows ? static_cast<int>(w[0].size()) : 0;
  if (n == 0) return 0;
  std::vector<long long> partial(rows, 0);
  // suffix min/max of weights per row over columns >= j
  std::vector<std::vector<long long>> sufmin(rows, std::vector<long long>(n)), sufmax(rows, std::vector<long long>(n));
  for (int r = 0; r < rows; ++r)
    for (int j = n - 1; j >= 0; --j) {
      sufmin[r][j] = j + 1 < n ? std::min(w[r][j], sufmin[r][j + 1]) : w[r][j];
      sufmax[r][j] = j + 1 < n ? std::max(w[r][j], sufmax[r][j + 1]) : w[r][j];
    }
  long long count = 0;
  // Can the remaining columns >= j still hit the targets with total degree
  // rem (exactly, or at most)?
  auto feasible = [&](int j, long long rem) {
    for (int r = 0; r < rows; ++r) {
      long long need = target[r] - partial[r];
      long long lo, hi;
      if (j >= n) {
        lo = hi = 0;
      } else if (degree_equality) {
        lo = rem * sufmin[r][j];
        hi = rem * sufmax[r][j];
      } else {
        lo = std::min(0LL, rem * sufmin[r][j]);
        hi = std::max(0LL, rem * sufmax[r][j]);
      }
      if (need < lo || need > hi) return false;
    }
    return true;
  };
  std::function<void(int, long long)> rec = [&](int j, long long rem) {
    if (j == n) {
      if (degree_equality && rem != 0) return;
      for (int r = 0; r < rows; ++r)
        if (partial[r] != target[r]) return;
      ++count;
      return;
    }
    for (long long a = 0; a <= rem; ++a) {
      if (a > 0)
        for (int r = 0; r < rows; ++r) partial[r] += w[r][j];
      if (feasible(j + 1, rem - a)) rec(j + 1, rem - a);
    }
    for (int r = 0; r < rows; ++r) partial[r] -= w[r][j] * rem;
  };
  if (feasible(0, degree)) rec(0, degree);
  return count;
}

}  // namespace symred
