#pragma once

#include <algorithm>
#include <vector>

#include "symred/hull.hpp"
#include "symred/polytope.hpp"
#include "symred/rep.hpp"

namespace symred {

// All counting in this module is exact integer/rational arithmetic; floats
// live in the flow and moment modules only.

// The degree-k fiber at weight lambda: x >= 0, W x = k lambda, with the
// degree entering as sum x = k in projective mode and as the cap sum x <= k
// in affine mode (the affine cone is filtered by total degree).
struct FiberPolytope {
  const RepSpec* rep = nullptr;
  ratvec lambda;
  long long degree = 0;
  bool degree_equality = true;
  HPolytope h;
  std::vector<ratvec> verts;  // cached

  bool empty() const { return verts.empty(); }
  int dim() const { return affine_dim(verts); }
};

inline FiberPolytope fiber_polytope(const RepSpec& rep, const ratvec& lambda, long long k) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("fiber_polytope is torus-only");
  if (static_cast<int>(lambda.size()) != rep.d) throw dimension_mismatch("lambda has wrong length");
  if (k < 0) throw malformed_config("degree must be non-negative");
  FiberPolytope f;
  f.rep = &rep;
  f.lambda = lambda;
  f.degree = k;
  f.degree_equality = rep.mode == PhaseMode::Projective;
  f.h.n = rep.n;
  for (int a = 0; a < rep.d; ++a) {
    ratvec row(rep.n);
    for (int j = 0; j < rep.n; ++j) row[j] = Rat(rep.weights[a][j]);
    f.h.eq.push_back(std::move(row));
    f.h.eqr.push_back(Rat(k) * lambda[a]);
  }
  ratvec ones(rep.n, Rat(1));
  if (f.degree_equality) {
    f.h.eq.push_back(ones);
    f.h.eqr.push_back(Rat(k));
  } else {
    f.h.ineq.push_back(ones);
    f.h.ineqr.push_back(Rat(k));
  }
  for (int j = 0; j < rep.n; ++j) {
    ratvec row(rep.n, Rat(0));
    row[j] = Rat(-1);
    f.h.ineq.push_back(std::move(row));
    f.h.ineqr.push_back(Rat(0));
  }
  f.verts = enumerate_vertices(f.h);
  return f;
}

// Lattice-normalized volume of the fiber in its affine span.
inline Rat polytope_volume(const FiberPolytope& f) {
  if (f.empty()) throw malformed_config("polytope_volume of an empty fiber");
  return normalized_volume(f.verts, f.h.n);
}

namespace qdetail {

// Integer count of { a >= 0 : W a = k lambda, sum a (=|<=) k }. Returns 0
// outright when the target is not integral.
inline long long fiber_count(const RepSpec& rep, const ratvec& lambda, long long k, bool degree_equality) {
  imat w(rep.d, ivec(rep.n));
  ivec target(rep.d);
  for (int a = 0; a < rep.d; ++a) {
    Rat t = Rat(k) * lambda[a];
    if (!t.is_integer()) return 0;
    target[a] = t.num();
    for (int j = 0; j < rep.n; ++j) w[a][j] = rep.weights[a][j];
  }
  return count_lattice_points(w, target, k, degree_equality);
}

inline long long binom_ll(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  __int128 r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > INT64_MAX) throw overflow_error("binomial out of range");
  }
  return static_cast<long long>(r);
}

}  // namespace qdetail

// lambda-isotypic dimension of the degree-k graded piece: the exact lattice
// count #{ a in N^n : sum a = k, W a = k lambda }, through the polytope
// counting path. The enumeration path lives in invariant_dimension; the two
// serve as mutual oracles.
inline long long weight_multiplicity(const RepSpec& rep, const ratvec& lambda, long long k) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("weight_multiplicity is torus-only");
  if (static_cast<int>(lambda.size()) != rep.d) throw dimension_mismatch("lambda has wrong length");
  if (k < 0) throw malformed_config("degree must be non-negative");
  return qdetail::fiber_count(rep, lambda, k, true);
}

// Dimension of the zero-(shifted-)weight part of degree k by brute-force
// monomial enumeration. Independent code path from weight_multiplicity.
inline long long invariant_dimension(const RepSpec& rep, long long k, const ratvec& lambda_in = {}) {
  if (rep.kind != GroupKind::Torus) throw dimension_mismatch("invariant_dimension is torus-only");
  if (k < 0) throw malformed_config("degree must be non-negative");
  ratvec lambda = lambda_in.empty() ? ratvec(rep.d, Rat(0)) : lambda_in;
  if (qdetail::binom_ll(k + rep.n - 1, rep.n - 1) > 50'000'000LL)
    throw combinatorial_budget_exceeded("degree " + std::to_string(k));
  // integerized targets: q W a = q k lambda
  long long q = 1;
  for (const Rat& l : lambda) q = lcm_ll(q, l.den());
  std::vector<long long> target(rep.d);
  for (int a = 0; a < rep.d; ++a) {
    Rat t = Rat(q) * Rat(k) * lambda[a];
    if (!t.is_integer()) return 0;
    target[a] = t.num();
  }
  long long count = 0;
  std::vector<int> exps(rep.n, 0);
  std::function<void(int, long long)> rec = [&](int j, long long rem) {
    if (j == rep.n - 1) {
      exps[j] = static_cast<int>(rem);
      for (int a = 0; a < rep.d; ++a) {
        long long s = 0;
        for (int jj = 0; jj < rep.n; ++jj) s += q * rep.weights[a][jj] * exps[jj];
        if (s != target[a]) return;
      }
      ++count;
      return;
    }
    for (long long c = 0; c <= rem; ++c) {
      exps[j] = static_cast<int>(c);
      rec(j + 1, rem - c);
    }
  };
  rec(0, k);
  return count;
}

// Multiplicity of the (m+1)-dimensional irreducible in the degree-k part of
// the symmetric algebra, by weight-count differencing against the torus
// inside su(2): c(m) - c(m+2) in doubled-weight units.
inline long long su2_multiplicity(const RepSpec& rep, long long m, long long k) {
  if (rep.kind != GroupKind::SU2) throw dimension_mismatch("su2_multiplicity is su2-only");
  if (m < 0) throw malformed_config("highest weight must be >= 0");
  std::vector<long long> mu;  // doubled weights of the coordinates
  for (int s : rep.spins)
    for (int kk = 0; kk <= s; ++kk) mu.push_back(s - 2 * kk);
  long long wmax = 0;
  for (long long x : mu) wmax = std::max(wmax, std::llabs(x));
  const long long span = k * std::max<long long>(wmax, 1);
  const long long width = 2 * span + 1;
  // dp[deg][weight + span] over coordinates
  std::vector<std::vector<long long>> dp(k + 1, std::vector<long long>(width, 0));
  dp[0][span] = 1;
  for (long long w : mu) {
    std::vector<std::vector<long long>> next(k + 1, std::vector<long long>(width, 0));
    for (long long deg = 0; deg <= k; ++deg)
      for (long long off = 0; off < width; ++off) {
        if (dp[deg][off] == 0) continue;
        for (long long a = 0; deg + a <= k; ++a) {
          long long noff = off + a * w;
          if (noff < 0 || noff >= width) break;
          next[deg + a][noff] += dp[deg][off];
        }
      }
    dp = std::move(next);
  }
  auto weight_count = [&](long long target) -> long long {
    long long off = target + span;
    if (off < 0 || off >= width) return 0;
    return dp[k][off];
  };
  return weight_count(m) - weight_count(m + 2);
}

struct QrCheck {
  long long upstairs = 0;    // invariant/isotypic dimension by enumeration
  long long downstairs = 0;  // lattice count of the fiber polytope
  bool equal = false;
};

// Quantization commutes with reduction, executable form: the two independent
// counting paths must agree exactly.
inline QrCheck verify_qr(const RepSpec& rep, const ratvec& lambda, long long k) {
  QrCheck out;
  out.upstairs = invariant_dimension(rep, k, lambda);
  out.downstairs = weight_multiplicity(rep, lambda, k);
  out.equal = out.upstairs == out.downstairs;
  return out;
}

// Is lambda inside the hull of the weight columns? Multiplicities vanish
// outside (the momentum-image support rule).
inline bool lambda_in_weight_hull(const RepSpec& rep, const ratvec& lambda) {
  std::vector<ratvec> pts;
  for (int j = 0; j < rep.n; ++j) {
    ratvec p(rep.d);
    for (int a = 0; a < rep.d; ++a) p[a] = Rat(rep.weights[a][j]) - lambda[a];
    pts.push_back(std::move(p));
  }
  return origin_in_hull(pts).contains;
}

struct MultiplicityRow {
  ratvec lambda;
  long long degree = 0;
  long long count = 0;
  bool in_weight_hull = false;
};

inline std::vector<MultiplicityRow> multiplicity_table(const RepSpec& rep, const std::vector<ratvec>& lambdas,
                                                       const std::vector<long long>& degrees) {
  std::vector<MultiplicityRow> rows;
  for (const auto& l : lambdas)
    for (long long k : degrees) {
      MultiplicityRow r;
      r.lambda = l;
      r.degree = k;
      r.count = weight_multiplicity(rep, l, k);
      r.in_weight_hull = lambda_in_weight_hull(rep, l);
      rows.push_back(std::move(r));
    }
  return rows;
}

struct EhrhartFit {
  long long period = 1;  // q: smallest dilation making the fiber a lattice polytope
  int dim = 0;
  std::vector<std::pair<long long, long long>> samples;  // (r = s q, lattice count at degree r k0)
  ratvec coeffs;                                         // polynomial in s = r / q, ascending
  Rat leading;
  Rat normalized_vol;  // of the fiber at degree q k0
  bool leading_matches_volume = false;
};

// Counts lattice points of the dilated fibers at r = q, 2q, ..., fits the
// degree-dim polynomial exactly, checks the residual on the spare samples,
// and compares the leading coefficient against normalized volume / dim!.
inline EhrhartFit ehrhart_fit(const RepSpec& rep, const ratvec& lambda, long long k0, int num_samples) {
  FiberPolytope base = fiber_polytope(rep, lambda, k0);
  if (base.empty()) throw malformed_config("ehrhart_fit needs a nonempty fiber");
  EhrhartFit out;
  out.dim = base.dim();
  if (num_samples < out.dim + 2) throw malformed_config("need at least dim + 2 samples");

  long long q = 1;
  for (const auto& v : base.verts)
    for (const Rat& c : v) q = lcm_ll(q, c.den());
  for (const Rat& l : lambda) q = lcm_ll(q, (Rat(k0) * l).den());
  out.period = q;

  for (int s = 1; s <= num_samples; ++s) {
    long long deg = q * k0 * s;
    long long cnt = qdetail::fiber_count(rep, lambda, deg, base.degree_equality);
    out.samples.push_back({q * s, cnt});
  }

  // exact Vandermonde solve on s = 1..dim+1
  const int dd = out.dim;
  ratmat a(dd + 1, ratvec(dd + 1));
  ratvec b(dd + 1);
  for (int i = 0; i <= dd; ++i) {
    long long s = i + 1;
    Rat p(1);
    for (int j = 0; j <= dd; ++j) {
      a[i][j] = p;
      p *= Rat(s);
    }
    b[i] = Rat(out.samples[i].second);
  }
  auto coeffs = solve_unique(a, b);
  if (!coeffs) throw fit_residual_nonzero("vandermonde system degenerate");
  out.coeffs = *coeffs;
  for (int s = dd + 2; s <= num_samples; ++s) {
    Rat pred(0), p(1);
    for (int j = 0; j <= dd; ++j) {
      pred += out.coeffs[j] * p;
      p *= Rat(s);
    }
    if (pred != Rat(out.samples[s - 1].second))
      throw fit_residual_nonzero("sample s=" + std::to_string(s) + " off by " +
                                 (pred - Rat(out.samples[s - 1].second)).str());
  }
  out.leading = out.coeffs[dd];

  FiberPolytope at_q = fiber_polytope(rep, lambda, q * k0);
  out.normalized_vol = polytope_volume(at_q);
  Rat fact(1);
  for (int i = 2; i <= dd; ++i) fact *= Rat(i);
  out.leading_matches_volume = out.leading == out.normalized_vol / fact;
  return out;
}

}  // namespace symred
