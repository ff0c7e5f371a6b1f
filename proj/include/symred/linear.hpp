#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "symred/rational.hpp"

namespace symred {

// ---------------------------------------------------------------------------
// Exact rational Gaussian elimination.
// ---------------------------------------------------------------------------

struct Rref {
  ratmat mat;
  std::vector<int> pivot_cols;
  int rank = 0;
};

inline Rref rref(ratmat a) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  Rref out;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (!a[i][c].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[r], a[piv]);
    Rat inv = Rat(1) / a[r][c];
    for (int j = c; j < cols; ++j) a[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      Rat f = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.rank = r;
  out.mat = std::move(a);
  return out;
}

inline int rank_rat(const ratmat& a) { return rref(a).rank; }

inline int rank_int(const std::vector<std::vector<long long>>& a) {
  ratmat m(a.size());
  for (size_t i = 0; i < a.size(); ++i) m[i] = ratvec(a[i].begin(), a[i].end());
  return rank_rat(m);
}

// Solves A x = b exactly. Returns the unique solution, or nullopt when the
// system is inconsistent or underdetermined.
inline std::optional<ratvec> solve_unique(const ratmat& a, const ratvec& b) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  ratmat aug(rows, ratvec(cols + 1));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) aug[i][j] = a[i][j];
    aug[i][cols] = b[i];
  }
  Rref r = rref(std::move(aug));
  for (int i = r.rank - 1; i >= 0; --i)
    if (r.pivot_cols[i] == cols) return std::nullopt;  // inconsistent
  if (r.rank < cols) return std::nullopt;              // underdetermined
  ratvec x(cols);
  for (int i = 0; i < r.rank; ++i) x[r.pivot_cols[i]] = r.mat[i][cols];
  return x;
}

// Basis of { x : A x = 0 } over the rationals.
inline ratmat rat_nullspace(const ratmat& a) {
  if (a.empty()) return {};
  const int cols = static_cast<int>(a[0].size());
  Rref r = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (int c : r.pivot_cols) is_pivot[c] = true;
  ratmat basis;
  for (int c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    ratvec v(cols);
    v[c] = Rat(1);
    for (int i = 0; i < r.rank; ++i) v[r.pivot_cols[i]] = -r.mat[i][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Integer lattice utilities (checked int64).
// ---------------------------------------------------------------------------

using ivec = std::vector<long long>;
using imat = std::vector<ivec>;

inline long long checked_mul(long long a, long long b) {
  __int128 p = (__int128)a * b;
  if (p > INT64_MAX || p < INT64_MIN) throw overflow_error("integer product out of range");
  return static_cast<long long>(p);
}

inline long long checked_sub(long long a, long long b) {
  __int128 p = (__int128)a - b;
  if (p > INT64_MAX || p < INT64_MIN) throw overflow_error("integer difference out of range");
  return static_cast<long long>(p);
}

inline ivec primitive(ivec v) {
  long long g = 0;
  for (long long x : v) g = std::gcd(g, x);
  if (g > 1)
    for (long long& x : v) x /= g;
  return v;
}

// Basis of the kernel lattice { x in Z^c : A x = 0 }, via unimodular column
// reduction of A against an identity companion.
inline imat kernel_lattice(const imat& a_in, int cols) {
  imat a = a_in;
  const int rows = static_cast<int>(a.size());
  imat u(cols, ivec(cols, 0));
  for (int j = 0; j < cols; ++j) u[j][j] = 1;  // u's rows are companion columns

  std::vector<bool> active(cols, true);
  auto col_axpy = [&](int dst, int src, long long f) {
    // column_dst -= f * column_src
    for (int i = 0; i < rows; ++i) a[i][dst] = checked_sub(a[i][dst], checked_mul(f, a[i][src]));
    for (int i = 0; i < cols; ++i) u[dst][i] = checked_sub(u[dst][i], checked_mul(f, u[src][i]));
  };

  for (int i = 0; i < rows; ++i) {
    while (true) {
      int j0 = -1, j1 = -1;
      for (int j = 0; j < cols; ++j) {
        if (!active[j] || a[i][j] == 0) continue;
        if (j0 < 0)
          j0 = j;
        else {
          j1 = j;
          break;
        }
      }
      if (j1 < 0) {
        if (j0 >= 0) active[j0] = false;  // pivot column for this row
        break;
      }
      // Reduce the larger entry against the smaller.
      if (std::llabs(a[i][j0]) < std::llabs(a[i][j1])) std::swap(j0, j1);
      long long f = a[i][j0] / a[i][j1];
      col_axpy(j0, j1, f);
    }
  }

  imat basis;
  for (int j = 0; j < cols; ++j)
    if (active[j]) basis.push_back(u[j]);
  return basis;
}

// Extreme rays of { x >= 0 : B x = 0 } by double description against each
// equality, followed by an exact extremality filter.
inline std::vector<ivec> extreme_rays(const imat& b, int n) {
  std::vector<ivec> rays;
  for (int j = 0; j < n; ++j) {
    ivec e(n, 0);
    e[j] = 1;
    rays.push_back(e);
  }
  for (const auto& row : b) {
    std::vector<ivec> zero, pos, neg;
    for (auto& r : rays) {
      long long s = 0;
      for (int j = 0; j < n; ++j) s += row[j] * r[j];
      if (s == 0)
        zero.push_back(r);
      else if (s > 0)
        pos.push_back(r);
      else
        neg.push_back(r);
    }
    std::vector<ivec> next = zero;
    for (const auto& rp : pos)
      for (const auto& rn : neg) {
        long long sp = 0, sn = 0;
        for (int j = 0; j < n; ++j) {
          sp += row[j] * rp[j];
          sn += row[j] * rn[j];
        }
        ivec comb(n);
        for (int j = 0; j < n; ++j) comb[j] = checked_sub(checked_mul(sp, rn[j]), checked_mul(sn, rp[j]));
        comb = primitive(std::move(comb));
        next.push_back(std::move(comb));
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    rays = std::move(next);
  }
  // extremality: the tight constraints at r must have rank n - 1
  std::vector<ivec> out;
  for (const auto& r : rays) {
    imat tight = b;
    for (int j = 0; j < n; ++j)
      if (r[j] == 0) {
        ivec e(n, 0);
        e[j] = 1;
        tight.push_back(e);
      }
    ratmat m(tight.size());
    for (size_t i = 0; i < tight.size(); ++i) m[i] = ratvec(tight[i].begin(), tight[i].end());
    if (rank_rat(m) == n - 1) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Unique row-style Hermite normal form of the lattice spanned by the rows of
// b. Two bases span the same lattice iff their forms coincide.
inline imat hermite_normal_form(imat b, int cols) {
  b.erase(std::remove_if(b.begin(), b.end(),
                         [](const ivec& v) { return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; }); }),
          b.end());
  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(b.size()); ++c) {
    // Euclid on the entries of column c among rows >= r.
    while (true) {
      int nz = -1, nz2 = -1;
      for (int i = r; i < static_cast<int>(b.size()); ++i) {
        if (b[i][c] == 0) continue;
        if (nz < 0)
          nz = i;
        else {
          nz2 = i;
          break;
        }
      }
      if (nz < 0) break;
      if (nz2 < 0) {
        std::swap(b[r], b[nz]);
        break;
      }
      if (std::llabs(b[nz][c]) > std::llabs(b[nz2][c])) std::swap(nz, nz2);
      long long f = b[nz2][c] / b[nz][c];
      for (int j = 0; j < cols; ++j) b[nz2][j] = checked_sub(b[nz2][j], checked_mul(f, b[nz][j]));
    }
    if (b[r][c] == 0) continue;
    if (b[r][c] < 0)
      for (int j = 0; j < cols; ++j) b[r][j] = -b[r][j];
    for (int i = 0; i < r; ++i) {
      long long f = b[i][c] / b[r][c];
      if (b[i][c] % b[r][c] != 0 && b[i][c] < 0) --f;  // reduce into [0, pivot)
      if (f != 0)
        for (int j = 0; j < cols; ++j) b[i][j] = checked_sub(b[i][j], checked_mul(f, b[r][j]));
    }
    ++r;
  }
  b.resize(r);
  return b;
}

// ---------------------------------------------------------------------------
// Exact simplex, standard form:  max c.x  s.t.  A x = b, x >= 0.
// Bland's rule throughout, so termination is unconditional.
// ---------------------------------------------------------------------------

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  ratvec x;
  Rat objective;
};

class SimplexTableau {
 public:
  SimplexTableau(ratmat a, ratvec b, ratvec c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    m_ = static_cast<int>(a_.size());
    n_ = m_ ? static_cast<int>(a_[0].size()) : 0;
    for (int i = 0; i < m_; ++i)
      if (b_[i] < Rat(0)) {
        for (int j = 0; j < n_; ++j) a_[i][j] = -a_[i][j];
        b_[i] = -b_[i];
      }
  }

  LpResult solve() {
    // Phase 1: artificial variables form the initial basis.
    ratmat t(m_, ratvec(n_ + m_ + 1));
    basis_.assign(m_, 0);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) t[i][j] = a_[i][j];
      t[i][n_ + i] = Rat(1);
      t[i][n_ + m_] = b_[i];
      basis_[i] = n_ + i;
    }
    ratvec obj1(n_ + m_);
    for (int j = n_; j < n_ + m_; ++j) obj1[j] = Rat(-1);
    Rat v1 = run(t, obj1, n_ + m_);
    if (v1 < Rat(0)) return {LpStatus::Infeasible, {}, Rat(0)};
    // Pivot any lingering artificial out of the basis (degenerate rows).
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int enter = -1;
      for (int j = 0; j < n_; ++j)
        if (!t[i][j].is_zero()) {
          enter = j;
          break;
        }
      if (enter >= 0) pivot(t, i, enter, n_ + m_);
      // else: the row is all zeros over real variables; harmless.
    }
    // Phase 2 over the real columns only.
    ratvec obj2(n_ + m_);
    for (int j = 0; j < n_; ++j) obj2[j] = c_[j];
    phase2_ = true;
    Rat v2 = run(t, obj2, n_ + m_);
    if (unbounded_) return {LpStatus::Unbounded, {}, Rat(0)};
    ratvec x(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = t[i][n_ + m_];
    return {LpStatus::Optimal, x, v2};
  }

 private:
  void pivot(ratmat& t, int row, int col, int width) {
    Rat inv = Rat(1) / t[row][col];
    for (int j = 0; j <= width; ++j) t[row][j] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row || t[i][col].is_zero()) continue;
      Rat f = t[i][col];
      for (int j = 0; j <= width; ++j) t[i][j] -= f * t[row][j];
    }
    basis_[row] = col;
  }

  Rat run(ratmat& t, const ratvec& obj, int width) {
    unbounded_ = false;
    while (true) {
      // Reduced costs: r_j = obj_j - y.col_j with y from the basic rows.
      ratvec y(m_);
      for (int i = 0; i < m_; ++i) y[i] = obj[basis_[i]];
      int enter = -1;
      for (int j = 0; j < width; ++j) {
        if (phase2_ && j >= n_) continue;  // artificials stay out in phase 2
        bool basic = false;
        for (int i = 0; i < m_; ++i)
          if (basis_[i] == j) basic = true;
        if (basic) continue;
        Rat rc = obj[j];
        for (int i = 0; i < m_; ++i) rc -= y[i] * t[i][j];
        if (rc > Rat(0)) {
          enter = j;  // Bland: first improving index
          break;
        }
      }
      if (enter < 0) break;
      int leave = -1;
      Rat best;
      for (int i = 0; i < m_; ++i) {
        if (t[i][enter] <= Rat(0)) continue;
        Rat ratio = t[i][width] / t[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) {
        unbounded_ = true;
        return Rat(0);
      }
      pivot(t, leave, enter, width);
    }
    Rat v(0);
    for (int i = 0; i < m_; ++i) v += obj[basis_[i]] * t[i][width];
    return v;
  }

  ratmat a_;
  ratvec b_;
  ratvec c_;
  int m_ = 0, n_ = 0;
  std::vector<int> basis_;
  bool phase2_ = false;
  bool unbounded_ = false;
};

inline LpResult solve_lp(ratmat a, ratvec b, ratvec c) {
  return SimplexTableau(std::move(a), std::move(b), std::move(c)).solve();
}

}  // namespace symred
