#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "symred/common.hpp"
#include "symred/linear.hpp"
#include "symred/rational.hpp"

namespace symred {

enum class GroupKind { Torus, SU2 };
enum class PhaseMode { Affine, Projective };

// Lie algebra coordinates. Torus: the standard basis of R^d. su(2): the
// orthonormal basis X_a = -(i/2) sigma_a for the inner product -2 tr(XY) on
// the defining representation, so [X_1,X_2] = X_3 cyclically and LieVector
// coordinates are unambiguous.
using lievec = rvec;

// Exponent magnitude at which the imaginary-direction action reports
// divergence instead of producing non-finite numbers.
inline constexpr double kExpBound = 500.0;

namespace su2 {

// Spin matrices on Sym^m(C^2) in the orthonormal monomial basis
// e_k ~ sqrt(C(m,k)) x^(m-k) y^k, k = 0..m: J3 = diag(m/2, ..., -m/2),
// J1 = (J+ + J-)/2, J2 = (J+ - J-)/(2i). All Hermitian.
struct SpinBlock {
  int m = 0;
  int offset = 0;     // first coordinate of this block in the state vector
  cmat j[3];          // J1, J2, J3
};

inline cmat zeros(int n) { return cmat(n, cvec(n, complexd(0, 0))); }

inline SpinBlock make_block(int m, int offset) {
  SpinBlock b;
  b.m = m;
  b.offset = offset;
  const int n = m + 1;
  const double j = m / 2.0;
  cmat jp = zeros(n), jm = zeros(n), j3 = zeros(n);
  for (int k = 0; k < n; ++k) {
    double mu = j - k;
    j3[k][k] = mu;
    if (k > 0) jp[k - 1][k] = std::sqrt(j * (j + 1) - mu * (mu + 1));  // raises mu
    if (k < n - 1) jm[k + 1][k] = std::sqrt(j * (j + 1) - mu * (mu - 1));
  }
  b.j[0] = zeros(n);
  b.j[1] = zeros(n);
  b.j[2] = j3;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      b.j[0][r][c] = 0.5 * (jp[r][c] + jm[r][c]);
      b.j[1][r][c] = complexd(0, -0.5) * (jp[r][c] - jm[r][c]);
    }
  return b;
}

inline double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline complexd ipow(complexd z, int e) {
  complexd r(1, 0);
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

// Sym^m of a 2x2 matrix in the orthonormal monomial basis. Exact closed form;
// this is how group elements act on each summand.
inline cmat symmetric_power(const complexd g[2][2], int m) {
  const int n = m + 1;
  cmat out = zeros(n);
  for (int k = 0; k <= m; ++k) {
    // (g00 x + g10 y)^(m-k) (g01 x + g11 y)^k, collected by y-degree l
    std::vector<complexd> coeff(n, complexd(0, 0));
    for (int s1 = 0; s1 <= m - k; ++s1) {
      complexd f1 = binom(m - k, s1) * ipow(g[0][0], m - k - s1) * ipow(g[1][0], s1);
      for (int s2 = 0; s2 <= k; ++s2) {
        complexd f2 = binom(k, s2) * ipow(g[0][1], k - s2) * ipow(g[1][1], s2);
        coeff[s1 + s2] += f1 * f2;
      }
    }
    for (int l = 0; l <= m; ++l) out[l][k] = coeff[l] * std::sqrt(binom(m, k) / binom(m, l));
  }
  return out;
}

// exp(t * (xi . sigma) / 2) as a 2x2 matrix (closed form; xi in su(2)
// coordinates). This is the positive-Hermitian SL(2,C) factor exp(i t xi).
inline void herm_exp_2x2(const lievec& xi, double t, complexd g[2][2]) {
  double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  if (r == 0.0) {
    g[0][0] = g[1][1] = complexd(1, 0);
    g[0][1] = g[1][0] = complexd(0, 0);
    return;
  }
  double ch = std::cosh(t * r / 2), sh = std::sinh(t * r / 2) / r;
  // xi.sigma = [[xi3, xi1 - i xi2], [xi1 + i xi2, -xi3]]
  g[0][0] = ch + sh * xi[2];
  g[0][1] = sh * complexd(xi[0], -xi[1]);
  g[1][0] = sh * complexd(xi[0], xi[1]);
  g[1][1] = ch - sh * xi[2];
}

}  // namespace su2

struct RepSpec {
  GroupKind kind = GroupKind::Torus;
  PhaseMode mode = PhaseMode::Affine;
  int n = 0;                                    // complex dimension
  int d = 0;                                    // torus rank (0 for su2)
  std::vector<std::vector<long long>> weights;  // d x n, torus only
  ratvec level;                                 // torus level in g* (length d)
  std::vector<int> spins;                       // su2 summands
  std::vector<su2::SpinBlock> blocks;           // su2 derived data

  int lie_dim() const { return kind == GroupKind::Torus ? d : 3; }

  lievec level_double() const {
    lievec out(level.size());
    for (size_t i = 0; i < level.size(); ++i) out[i] = level[i].to_double();
    return out;
  }

  void check_state(const cvec& v) const {
    if (static_cast<int>(v.size()) != n) throw dimension_mismatch("state has wrong length");
    if (!all_finite(v)) throw dimension_mismatch("state has non-finite entries");
    if (mode == PhaseMode::Projective && norm_sq(v) == 0.0) throw zero_vector_in_projective_mode();
  }

  void check_lie(const lievec& xi) const {
    if (static_cast<int>(xi.size()) != lie_dim()) throw dimension_mismatch("lie vector has wrong length");
    if (!all_finite(xi)) throw dimension_mismatch("lie vector has non-finite entries");
  }
};

inline RepSpec build_torus_rep(std::vector<std::vector<long long>> weights, PhaseMode mode, ratvec level = {}) {
  RepSpec r;
  r.kind = GroupKind::Torus;
  r.mode = mode;
  r.d = static_cast<int>(weights.size());
  if (r.d < 1) throw malformed_config("torus rank must be at least 1");
  r.n = static_cast<int>(weights[0].size());
  if (r.n < 1) throw malformed_config("representation must have n >= 1");
  for (const auto& row : weights)
    if (static_cast<int>(row.size()) != r.n) throw malformed_config("weight matrix rows have unequal lengths");
  if (mode == PhaseMode::Projective && r.n < 2) throw malformed_config("projective mode needs n >= 2");
  if (level.empty()) level.assign(r.d, Rat(0));
  if (static_cast<int>(level.size()) != r.d) throw malformed_config("level length must equal torus rank");
  r.weights = std::move(weights);
  r.level = std::move(level);
  return r;
}

inline RepSpec build_su2_rep(std::vector<int> spins, PhaseMode mode) {
  RepSpec r;
  r.kind = GroupKind::SU2;
  r.mode = mode;
  if (spins.empty()) throw malformed_config("su2 spin list must be nonempty");
  int n = 0;
  for (int m : spins) {
    if (m < 0) throw malformed_config("spins must be non-negative");
    r.blocks.push_back(su2::make_block(m, n));
    n += m + 1;
  }
  r.n = n;
  r.spins = std::move(spins);
  if (mode == PhaseMode::Projective && r.n < 2) throw malformed_config("projective mode needs n >= 2");
  return r;
}

// <w_j, xi> for the torus.
inline double weight_pairing(const RepSpec& rep, int j, const lievec& xi) {
  double s = 0.0;
  for (int a = 0; a < rep.d; ++a) s += static_cast<double>(rep.weights[a][j]) * xi[a];
  return s;
}

// The vector field xi_M at v: torus coordinates pick up i<w_j, xi>; su2 acts
// through rho(xi) = -i (xi1 J1 + xi2 J2 + xi3 J3) per block.
inline cvec act_infinitesimal(const RepSpec& rep, const lievec& xi, const cvec& v) {
  rep.check_state(v);
  rep.check_lie(xi);
  cvec out(rep.n, complexd(0, 0));
  if (rep.kind == GroupKind::Torus) {
    for (int j = 0; j < rep.n; ++j) out[j] = complexd(0, weight_pairing(rep, j, xi)) * v[j];
    return out;
  }
  for (const auto& b : rep.blocks) {
    const int nb = b.m + 1;
    for (int r = 0; r < nb; ++r) {
      complexd s(0, 0);
      for (int c = 0; c < nb; ++c) {
        complexd h = xi[0] * b.j[0][r][c] + xi[1] * b.j[1][r][c] + xi[2] * b.j[2][r][c];
        s += h * v[b.offset + c];
      }
      out[b.offset + r] = complexd(0, -1) * s;
    }
  }
  return out;
}

// exp(sqrt(-1) t xi) . v. Torus: coordinate j scales by exp(-t <w_j, xi>).
// su2: Sym^m of the 2x2 closed form per summand. Exponents past kExpBound
// signal divergence via overflow_error rather than returning inf.
inline cvec act_imaginary(const RepSpec& rep, const lievec& xi, double t, const cvec& v) {
  rep.check_state(v);
  rep.check_lie(xi);
  cvec out(rep.n, complexd(0, 0));
  if (rep.kind == GroupKind::Torus) {
    for (int j = 0; j < rep.n; ++j) {
      double e = -t * weight_pairing(rep, j, xi);
      // Decaying exponents underflow harmlessly; only growth can overflow.
      if (e > kExpBound && std::abs(v[j]) > 0.0)
        throw overflow_error("imaginary-direction exponent beyond bound");
      out[j] = v[j] * std::exp(e);
    }
    return out;
  }
  double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  for (const auto& b : rep.blocks) {
    if (std::abs(t) * r / 2.0 * std::max(1, b.m) > kExpBound)
      throw overflow_error("imaginary-direction exponent beyond bound");
    complexd g[2][2];
    su2::herm_exp_2x2(xi, t, g);
    cmat gm = su2::symmetric_power(g, b.m);
    const int nb = b.m + 1;
    for (int rr = 0; rr < nb; ++rr) {
      complexd s(0, 0);
      for (int c = 0; c < nb; ++c) s += gm[rr][c] * v[b.offset + c];
      out[b.offset + rr] = s;
    }
  }
  return out;
}

// supp(v) = { j : |v_j| > tol * ||v|| }.
inline std::vector<int> support(const cvec& v, double tol = 1e-12) {
  double nv = norm2(v);
  std::vector<int> s;
  for (int j = 0; j < static_cast<int>(v.size()); ++j)
    if (std::abs(v[j]) > tol * nv && v[j] != complexd(0, 0)) s.push_back(j);
  return s;
}

struct StabilizerInfo {
  int lie_dimension = 0;
  bool finite = false;
};

namespace detail {

// Numeric rank of a tall real matrix by modified Gram-Schmidt.
inline int numeric_rank(std::vector<rvec> cols, double tol) {
  int rank = 0;
  for (size_t c = 0; c < cols.size(); ++c) {
    for (size_t p = 0; p < c; ++p) {
      double proj = dot(cols[c], cols[p]);
      for (size_t i = 0; i < cols[c].size(); ++i) cols[c][i] -= proj * cols[p][i];
    }
    double nn = norm2(cols[c]);
    if (nn > tol) {
      for (double& x : cols[c]) x /= nn;
      ++rank;
    } else {
      std::fill(cols[c].begin(), cols[c].end(), 0.0);
    }
  }
  return rank;
}

}  // namespace detail

// Lie-algebra dimension of the stabilizer of v. Torus: d minus the exact rank
// of the weight matrix on supp(v). su2: numeric kernel of xi -> rho(xi) v.
inline StabilizerInfo stabilizer_rank(const RepSpec& rep, const cvec& v, double tol = 1e-12) {
  if (static_cast<int>(v.size()) != rep.n) throw dimension_mismatch("state has wrong length");
  std::vector<int> s = support(v, tol);
  if (rep.kind == GroupKind::Torus) {
    std::vector<std::vector<long long>> sub(rep.d, std::vector<long long>(s.size()));
    for (int a = 0; a < rep.d; ++a)
      for (size_t c = 0; c < s.size(); ++c) sub[a][c] = rep.weights[a][s[c]];
    int r = s.empty() ? 0 : rank_int(sub);
    return {rep.d - r, rep.d - r == 0};
  }
  std::vector<rvec> cols;
  for (int a = 0; a < 3; ++a) {
    lievec xi(3, 0.0);
    xi[a] = 1.0;
    cvec img = act_infinitesimal(rep, xi, v);
    rvec col(2 * rep.n);
    for (int j = 0; j < rep.n; ++j) {
      col[2 * j] = img[j].real();
      col[2 * j + 1] = img[j].imag();
    }
    cols.push_back(std::move(col));
  }
  int r = detail::numeric_rank(std::move(cols), 1e-8 * std::max(1.0, norm2(v)));
  return {3 - r, 3 - r == 0};
}

}  // namespace symred
