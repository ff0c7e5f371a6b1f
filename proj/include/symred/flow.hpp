#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "symred/hull.hpp"
#include "symred/moment.hpp"
#include "symred/rep.hpp"

namespace symred {

struct FlowOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double grad_stop = 1e-10;  // stop when ||grad mu|| falls below this
  double t_max = 1e8;        // vertex-type limits decay like 1/t; adaptive steps make this cheap
  double phi_tol = 1e-6;     // zero-level threshold on ||Phi||
  double stab_tol = 1e-12;   // support threshold forwarded to stabilizer_rank
  int max_steps = 400000;
  int max_samples = 256;

  void validate() const {
    if (!(rel_tol > 0 && abs_tol > 0 && grad_stop > 0 && t_max > 0 && phi_tol > 0 && stab_tol > 0))
      throw malformed_config("flow options must be positive");
    if (!(grad_stop < 1)) throw malformed_config("grad_stop must be < 1");
    if (!(phi_tol >= grad_stop)) throw malformed_config("phi_tol must be >= grad_stop");
  }
};

enum class StabilityTag { Unstable, Semistable, Stable };

inline const char* to_string(StabilityTag t) {
  switch (t) {
    case StabilityTag::Unstable: return "unstable";
    case StabilityTag::Semistable: return "semistable";
    default: return "stable";
  }
}

struct StabilityClass {
  StabilityTag tag = StabilityTag::Unstable;
  bool closed_orbit = false;
  bool indeterminate = false;  // phi residual in (phi_tol, 10 phi_tol): surfaced, never resolved
};

struct FlowSample {
  double t = 0.0;
  cvec state;
  double mu = 0.0;
};

struct FlowResult {
  std::vector<FlowSample> samples;
  cvec limit;
  double phi_residual = 0.0;
  bool converged = false;
  bool polished = false;  // limit finished by the critical-point polish
  double t_end = 0.0;
  long steps = 0;
  StabilityClass classification;
};

// Relative modulus below which a coordinate of a numerical flow limit is
// treated as having left the support. Coordinates that genuinely decay do so
// at least like 1/sqrt(t) and sit around 1e-4 of the norm at t_max; surviving
// coordinates are O(1).
inline constexpr double kLimitSupportTol = 1e-3;

namespace detail {

struct OdeSystem {
  std::function<rvec(const rvec&)> deriv;
  std::function<double(const rvec&)> mu;
  std::function<double(const rvec&)> grad_norm;
  std::function<void(rvec&)> sanitize;
};

struct OdeOutcome {
  rvec y;
  double t = 0.0;
  bool converged = false;
  long steps = 0;
  std::vector<std::pair<double, rvec>> samples;
};

// Dormand-Prince 5(4) with embedded error control and a per-step
// mu-monotonicity guard: mu descent is the structural property of the flow
// and doubles as an integrator error detector (non_monotone_error is a bug
// signal, fatal in tests).
inline OdeOutcome rk45(const OdeSystem& sys, rvec y0, const FlowOptions& opts) {
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  OdeOutcome out;
  out.y = std::move(y0);
  sys.sanitize(out.y);
  const size_t dim = out.y.size();
  out.samples.push_back({0.0, out.y});

  double mu_cur = sys.mu(out.y);
  if (sys.grad_norm(out.y) <= opts.grad_stop) {
    out.converged = true;
    return out;
  }

  rvec k[7];
  k[0] = sys.deriv(out.y);
  double f0 = norm2(k[0]);
  double h = 1e-4 * (1.0 + norm2(out.y)) / (1.0 + f0);
  int sample_stride = 1, since_sample = 0;

  while (out.t < opts.t_max && out.steps < opts.max_steps) {
    h = std::min(h, opts.t_max - out.t);
    rvec ytmp(dim);
    for (int s = 1; s < 7; ++s) {
      for (size_t i = 0; i < dim; ++i) {
        double acc = out.y[i];
        for (int q = 0; q < s; ++q) acc += h * A[s][q] * k[q][i];
        ytmp[i] = acc;
      }
      k[s] = sys.deriv(ytmp);
    }
    rvec y5(dim);
    for (size_t i = 0; i < dim; ++i) {
      double v5 = out.y[i];
      for (int q = 0; q < 6; ++q) v5 += h * A[6][q] * k[q][i];
      y5[i] = v5;
    }
    k[6] = sys.deriv(y5);
    double err = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      double v4 = out.y[i];
      for (int q = 0; q < 7; ++q) v4 += h * B4[q] * k[q][i];
      double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(out.y[i]), std::abs(y5[i]));
      double e = (y5[i] - v4) / sc;
      err += e * e;
    }
    err = std::sqrt(err / dim);

    ++out.steps;
    if (err <= 1.0) {
      sys.sanitize(y5);
      double mu_new = sys.mu(y5);
      if (mu_new > mu_cur + 1e-9 * (1.0 + mu_cur)) {
        h *= 0.5;
        if (h < 1e-12 * std::max(1.0, out.t))
          throw non_monotone_error("mu rose by " + std::to_string(mu_new - mu_cur));
        continue;
      }
      out.t += h;
      out.y = std::move(y5);
      mu_cur = mu_new;
      k[0] = sys.deriv(out.y);
      if (++since_sample >= sample_stride) {
        since_sample = 0;
        out.samples.push_back({out.t, out.y});
        if (static_cast<int>(out.samples.size()) > opts.max_samples) {
          std::vector<std::pair<double, rvec>> thin;
          for (size_t i = 0; i < out.samples.size(); i += 2) thin.push_back(out.samples[i]);
          out.samples = std::move(thin);
          sample_stride *= 2;
        }
      }
      if (sys.grad_norm(out.y) <= opts.grad_stop) {
        out.converged = true;
        break;
      }
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err + 1e-300, -0.2)));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  if (out.samples.back().first != out.t) out.samples.push_back({out.t, out.y});
  return out;
}

// --- torus fast path: phases are flow-invariant, evolve squared moduli ----

struct TorusFlow {
  const RepSpec* rep;
  rvec lam;

  rvec momentum_sharp(const rvec& u) const {
    rvec m(rep->d, 0.0);
    double total = 0.0;
    if (rep->mode == PhaseMode::Projective)
      for (double x : u) total += x;
    for (int a = 0; a < rep->d; ++a) {
      double s = 0.0;
      for (int j = 0; j < rep->n; ++j) s += static_cast<double>(rep->weights[a][j]) * u[j];
      m[a] = rep->mode == PhaseMode::Affine ? -0.5 * s - lam[a] : -s / total - lam[a];
    }
    return m;
  }

  rvec deriv(const rvec& u) const {
    rvec m = momentum_sharp(u);
    rvec du(rep->n, 0.0);
    if (rep->mode == PhaseMode::Affine) {
      for (int j = 0; j < rep->n; ++j) {
        double p = 0.0;
        for (int a = 0; a < rep->d; ++a) p += static_cast<double>(rep->weights[a][j]) * m[a];
        du[j] = 4.0 * p * u[j];
      }
      return du;
    }
    double total = 0.0;
    for (double x : u) total += x;
    rvec avg(rep->d, 0.0);
    for (int a = 0; a < rep->d; ++a) avg[a] = -(m[a] + lam[a]);  // weight average
    for (int j = 0; j < rep->n; ++j) {
      double p = 0.0;
      for (int a = 0; a < rep->d; ++a) p += m[a] * (avg[a] - static_cast<double>(rep->weights[a][j]));
      du[j] = -8.0 * p * u[j] / total;
    }
    return du;
  }

  double mu(const rvec& u) const {
    rvec m = momentum_sharp(u);
    return dot(m, m);
  }

  double grad_norm(const rvec& u) const {
    rvec m = momentum_sharp(u);
    double s = 0.0;
    if (rep->mode == PhaseMode::Affine) {
      for (int j = 0; j < rep->n; ++j) {
        double p = 0.0;
        for (int a = 0; a < rep->d; ++a) p += static_cast<double>(rep->weights[a][j]) * m[a];
        s += 4.0 * p * p * u[j];
      }
      return std::sqrt(s);
    }
    double total = 0.0;
    for (double x : u) total += x;
    rvec avg(rep->d, 0.0);
    for (int a = 0; a < rep->d; ++a) avg[a] = -(m[a] + lam[a]);
    for (int j = 0; j < rep->n; ++j) {
      double p = 0.0;
      for (int a = 0; a < rep->d; ++a) p += m[a] * (avg[a] - static_cast<double>(rep->weights[a][j]));
      s += 16.0 * p * p * u[j] / (total * total);
    }
    return std::sqrt(s);
  }

  void sanitize(rvec& u) const {
    for (double& x : u) x = std::max(x, 0.0);
    if (rep->mode == PhaseMode::Projective) {
      double total = 0.0;
      for (double x : u) total += x;
      if (total > 0)
        for (double& x : u) x /= total;
    }
  }
};

inline rvec solve_spd(rvec h, rvec g, int d) {  // h is d x d row-major, solves h x = g
  for (int c = 0; c < d; ++c) {
    int p = c;
    for (int r = c + 1; r < d; ++r)
      if (std::abs(h[r * d + c]) > std::abs(h[p * d + c])) p = r;
    if (p != c) {
      for (int j = 0; j < d; ++j) std::swap(h[c * d + j], h[p * d + j]);
      std::swap(g[c], g[p]);
    }
    double piv = h[c * d + c];
    if (piv == 0.0) continue;
    for (int r = 0; r < d; ++r) {
      if (r == c || h[r * d + c] == 0.0) continue;
      double f = h[r * d + c] / piv;
      for (int j = 0; j < d; ++j) h[r * d + j] -= f * h[c * d + j];
      g[r] -= f * g[c];
    }
  }
  rvec x(d, 0.0);
  for (int c = 0; c < d; ++c)
    if (h[c * d + c] != 0.0) x[c] = g[c] / h[c * d + c];
  return x;
}

// After the explicit phase stalls near a critical set (the approach can be
// stiff or algebraically slow), finish the torus flow by an active-set
// quadratic program on the squared moduli: the momentum is linear there, so
// mu is a convex quadratic over the orthant (affine) or simplex (projective)
// and the subproblem steps land exactly on constrained Newton points. Each
// step decreases mu (the parabola along the step bottoms at its far end),
// so monotonicity survives the handoff.
inline bool polish_torus_limit(const TorusFlow& tf, rvec& u, const FlowOptions& opts) {
  const RepSpec& rep = *tf.rep;
  const int n = rep.n, d = rep.d;
  const bool projective = rep.mode == PhaseMode::Projective;
  tf.sanitize(u);
  std::vector<bool> is_free(n);
  for (int j = 0; j < n; ++j) is_free[j] = u[j] > 0.0;

  auto gradient = [&](const rvec& uu) {
    rvec phi = tf.momentum_sharp(uu);
    rvec grad(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < d; ++a)
        grad[j] += (projective ? -2.0 : -1.0) * phi[a] * static_cast<double>(rep.weights[a][j]);
    return grad;
  };

  for (int it = 0; it < 300; ++it) {
    if (tf.grad_norm(u) <= opts.grad_stop) {
      tf.sanitize(u);
      return true;
    }
    std::vector<int> fs;
    for (int j = 0; j < n; ++j)
      if (is_free[j]) fs.push_back(j);
    if (fs.empty()) break;
    const int m = static_cast<int>(fs.size());
    const int dim = m + (projective ? 1 : 0);
    rvec grad = gradient(u);
    rvec kkt(dim * dim, 0.0), rhs(dim, 0.0);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) {
        double h = 0.0;
        for (int a = 0; a < d; ++a)
          h += static_cast<double>(rep.weights[a][fs[r]]) * static_cast<double>(rep.weights[a][fs[c]]);
        kkt[r * dim + c] = (projective ? 2.0 : 0.5) * h + (r == c ? 1e-13 : 0.0);
      }
      rhs[r] = -grad[fs[r]];
      if (projective) {
        kkt[r * dim + m] = 1.0;
        kkt[m * dim + r] = 1.0;
      }
    }
    rvec sol = detail::solve_spd(kkt, rhs, dim);
    // full step to the subproblem optimum or partial step to the first
    // blocking bound
    double alpha = 1.0;
    int blocker = -1;
    for (int r = 0; r < m; ++r)
      if (sol[r] < 0.0 && u[fs[r]] + sol[r] < 0.0) {
        double a2 = -u[fs[r]] / sol[r];
        if (a2 < alpha) {
          alpha = a2;
          blocker = fs[r];
        }
      }
    double moved = 0.0;
    for (int r = 0; r < m; ++r) {
      double nu = std::max(0.0, u[fs[r]] + alpha * sol[r]);
      moved += std::abs(nu - u[fs[r]]);
      u[fs[r]] = nu;
    }
    if (blocker >= 0) {
      u[blocker] = 0.0;
      is_free[blocker] = false;
      continue;
    }
    // subproblem optimum reached: release a clamped coordinate whose
    // multiplier says the minimum lies inward, else this is the KKT point
    double nu_eq = projective ? sol[m] : 0.0;
    rvec gnew = gradient(u);
    int release = -1;
    double worst = -1e-10;
    for (int j = 0; j < n; ++j)
      if (!is_free[j] && gnew[j] + nu_eq < worst) {
        worst = gnew[j] + nu_eq;
        release = j;
      }
    if (release < 0 && moved <= 1e-14 * (1.0 + norm2(u))) break;
    if (release >= 0) is_free[release] = true;
  }
  tf.sanitize(u);
  return tf.grad_norm(u) <= opts.grad_stop;
}

// --- su(2): integrate the state itself -----------------------------------

inline rvec encode_state(const cvec& v) {
  rvec y(2 * v.size());
  for (size_t j = 0; j < v.size(); ++j) {
    y[2 * j] = v[j].real();
    y[2 * j + 1] = v[j].imag();
  }
  return y;
}

inline cvec decode_state(const rvec& y) {
  cvec v(y.size() / 2);
  for (size_t j = 0; j < v.size(); ++j) v[j] = complexd(y[2 * j], y[2 * j + 1]);
  return v;
}

// Does the torus Kempf-Ness value attain its infimum on the given support?
// Equivalently: does the balance cone { c >= 0 : sum c_j (w_j + lambda) = 0 }
// contain a strictly positive vector, i.e. do its extreme rays cover every
// index. Exact double-description computation, independent of the hull
// oracle's simplex route.
inline bool kn_minimum_attained(const RepSpec& rep, const std::vector<int>& s) {
  if (s.empty()) return true;  // fixed point
  long long q = 1;
  for (const Rat& l : rep.level) q = lcm_ll(q, l.den());
  const int m = static_cast<int>(s.size());
  imat b(rep.d, ivec(m));
  for (int a = 0; a < rep.d; ++a) {
    long long shift = rep.level[a].num() * (q / rep.level[a].den());
    for (int c = 0; c < m; ++c) b[a][c] = checked_mul(q, rep.weights[a][s[c]]) + shift;
  }
  std::vector<bool> covered(m, false);
  for (const auto& ray : extreme_rays(b, m))
    for (int c = 0; c < m; ++c)
      if (ray[c] > 0) covered[c] = true;
  return std::all_of(covered.begin(), covered.end(), [](bool x) { return x; });
}

// Mass of v on the non-negative eigenspaces of xi.J (unit xi); the value of
// ||exp(i t xi) v||^2 tends to 0 iff this vanishes.
inline double nondecaying_mass(const RepSpec& rep, const cvec& v, const lievec& xi) {
  double x = xi[0], y = xi[1], z = xi[2];
  double r = std::sqrt(x * x + y * y + z * z);
  x /= r;
  y /= r;
  z /= r;
  double theta = std::acos(std::clamp(z, -1.0, 1.0));
  double phi = std::atan2(y, x);
  complexd g[2][2];
  // columns: eigenvectors of xi.sigma for eigenvalues +1, -1
  g[0][0] = std::cos(theta / 2);
  g[1][0] = std::exp(complexd(0, phi)) * std::sin(theta / 2);
  g[0][1] = -std::exp(complexd(0, -phi)) * std::sin(theta / 2);
  g[1][1] = std::cos(theta / 2);
  double mass = 0.0;
  for (const auto& b : rep.blocks) {
    cmat e = su2::symmetric_power(g, b.m);
    const int nb = b.m + 1;
    for (int k = 0; k < nb; ++k) {
      double mu = b.m / 2.0 - k;  // eigenvalue of xi.J on column k
      if (mu < -1e-12) continue;
      complexd c(0, 0);
      for (int rr = 0; rr < nb; ++rr) c += std::conj(e[rr][k]) * v[b.offset + rr];
      mass += std::norm(c);
    }
  }
  return mass;
}

}  // namespace detail

struct KempfNessOutcome {
  enum class Status { Minimum, Divergent };
  Status status = Status::Minimum;
  lievec xi;      // minimizer, or unit witness ray when divergent
  double value = 0.0;
  int iterations = 0;
};

// Minimizes the Kempf-Ness value over xi. Torus: damped Newton on the
// log-sum-exp form log sum u_j exp(-2 <w_j + lambda, xi>), which is smooth
// and convex; a minimum exists iff the orbit is closed. Divergence is
// declared when the iterate escapes the trust region or the value decays
// below phi_tol * ||v||^2 along a ray; torus value functions are log-convex,
// so these ray tests are decisive. su(2) runs the balancing iteration (see
// below).
inline KempfNessOutcome minimize_kempf_ness(const RepSpec& rep, const cvec& v, const FlowOptions& opts = {},
                                            double xi_bound = 60.0, int max_iter = 2000) {
  if (rep.mode != PhaseMode::Affine) throw dimension_mismatch("minimize_kempf_ness requires affine mode");
  rep.check_state(v);
  KempfNessOutcome out;
  const int d = rep.lie_dim();
  out.xi.assign(d, 0.0);

  std::vector<int> s = support(v, opts.stab_tol);
  if (s.empty()) {
    out.status = KempfNessOutcome::Status::Minimum;
    out.value = 0.0;
    return out;
  }

  if (rep.kind == GroupKind::Torus) {
    // Attainment of the infimum is a combinatorial fact about the support:
    // decide it exactly (double description of the balance cone), then use
    // damped Newton on the log-sum-exp form only to locate the minimizer
    // or a witness escape ray. Torus value functions are log-convex, so the
    // ray structure is decisive.
    const bool attained = detail::kn_minimum_attained(rep, s);

    std::vector<rvec> wt;  // shifted weights on the support
    rvec logu;
    for (int j : s) {
      rvec w(d);
      for (int a = 0; a < d; ++a) w[a] = static_cast<double>(rep.weights[a][j]) + rep.level[a].to_double();
      wt.push_back(std::move(w));
      logu.push_back(2.0 * std::log(std::abs(v[j])));
    }
    const double f_floor = std::log(opts.phi_tol * norm_sq(v));
    lievec xi(d, 0.0);
    auto eval = [&](const lievec& x, rvec* grad, rvec* hess) {
      double mx = -1e300;
      rvec e(wt.size());
      for (size_t j = 0; j < wt.size(); ++j) {
        e[j] = logu[j] - 2.0 * dot(wt[j], x);
        mx = std::max(mx, e[j]);
      }
      double z = 0.0;
      for (double& ej : e) {
        ej = std::exp(ej - mx);
        z += ej;
      }
      double f = mx + std::log(z);
      if (grad) {
        grad->assign(d, 0.0);
        for (size_t j = 0; j < wt.size(); ++j)
          for (int a = 0; a < d; ++a) (*grad)[a] += -2.0 * (e[j] / z) * wt[j][a];
      }
      if (hess) {
        hess->assign(d * d, 0.0);
        for (size_t j = 0; j < wt.size(); ++j)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) (*hess)[a * d + b] += 4.0 * (e[j] / z) * wt[j][a] * wt[j][b];
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) (*hess)[a * d + b] -= (*grad)[a] * (*grad)[b];
      }
      return f;
    };

    rvec g, h;
    double f = eval(xi, &g, &h);
    int futile = 0;
    for (int it = 0; it < max_iter; ++it) {
      out.iterations = it;
      bool settled = norm2(g) <= 3e-11 || futile >= 3;
      bool escaped = norm2(xi) > xi_bound || f < f_floor;
      if ((attained && settled) || (!attained && (settled || escaped))) break;
      rvec hreg = h;
      double tr = 0.0;
      for (int a = 0; a < d; ++a) tr += h[a * d + a];
      for (int a = 0; a < d; ++a) hreg[a * d + a] += 1e-12 * (1.0 + tr);
      rvec step = detail::solve_spd(hreg, g, d);
      for (double& c : step) c = -c;
      // Near a hull boundary the Hessian degenerates and the raw Newton step
      // blows up; cap it so escape rays walk out at bounded speed.
      double sn = norm2(step);
      if (sn > 10.0)
        for (double& c : step) c *= 10.0 / sn;
      double t = 1.0;
      rvec trial(d);
      double ft = f;
      bool progressed = false;
      for (int bt = 0; bt < 60; ++bt) {
        for (int a = 0; a < d; ++a) trial[a] = xi[a] + t * step[a];
        ft = eval(trial, nullptr, nullptr);
        if (ft <= f + 1e-4 * t * dot(g, step)) {
          progressed = true;
          break;
        }
        t *= 0.5;
      }
      if (!progressed) {
        ++futile;
        continue;
      }
      double f_prev = f;
      xi = trial;
      f = eval(xi, &g, &h);
      futile = f_prev - f < 1e-15 * (1.0 + std::abs(f_prev)) ? futile + 1 : 0;
    }
    if (attained) {
      out.status = KempfNessOutcome::Status::Minimum;
      out.xi = xi;
      out.value = std::exp(f);
      return out;
    }
    out.status = KempfNessOutcome::Status::Divergent;
    out.xi = xi;
    double nx = norm2(xi);
    if (nx > 0)
      for (double& c : out.xi) c /= nx;
    else {  // escape along -grad when nothing moved
      double ng = norm2(g);
      for (int a = 0; a < d; ++a) out.xi[a] = ng > 0 ? -g[a] / ng : 0.0;
    }
    out.value = std::exp(f);
    return out;
  }

  // su(2): balancing iteration. Multiplicative steps w <- exp(-i c Phi#) w
  // descend the length function, whose group-level gradient is the momentum
  // (the angle identity); stationarity means ||Phi(w)|| ~ 0. A minimum is
  // attained iff no weight-space component collapsed along the way, which the
  // non-decaying mass in the last descent direction certifies (the su(2)
  // analogue of the torus softmax certificate).
  cvec w = v;
  complexd pmat[2][2] = {{complexd(1, 0), complexd(0, 0)}, {complexd(0, 0), complexd(1, 0)}};
  double total_motion = 0.0;
  const double vfloor = opts.phi_tol * norm_sq(v);
  lievec last_dir(3, 0.0);
  bool moved_any = false;
  int futile = 0;

  auto xi_from_accumulated = [&]() {
    // xi* with exp(i xi*) = (P+ P)^(1/2): Hermitian log of the polar part
    complexd h[2][2] = {{complexd(0, 0), complexd(0, 0)}, {complexd(0, 0), complexd(0, 0)}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) h[i][j] += std::conj(pmat[k][i]) * pmat[k][j];
    double alpha = 0.5 * (h[0][0].real() + h[1][1].real());
    double n1 = h[0][1].real() + h[1][0].real();
    double n2 = (h[1][0] - h[0][1]).imag();
    double n3 = h[0][0].real() - h[1][1].real();
    double beta = 0.5 * std::sqrt(n1 * n1 + n2 * n2 + n3 * n3);
    lievec xi(3, 0.0);
    if (beta < 1e-300) return xi;
    double lp = std::log(std::max(alpha + beta, 1e-300));
    xi[0] = lp * 0.5 * n1 / beta;
    xi[1] = lp * 0.5 * n2 / beta;
    xi[2] = lp * 0.5 * n3 / beta;
    return xi;
  };

  auto minimum_exit = [&]() {
    out.status = KempfNessOutcome::Status::Minimum;
    out.xi = xi_from_accumulated();
    out.value = norm_sq(w);
    return out;
  };
  auto divergent_exit = [&]() {
    out.status = KempfNessOutcome::Status::Divergent;
    out.xi = last_dir;
    double nd = norm2(out.xi);
    if (nd > 0)
      for (double& c : out.xi) c /= nd;
    out.value = norm_sq(w);
    return out;
  };

  int slow = 0;
  double value_prev = norm_sq(w);
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it;
    double value = norm_sq(w);
    if (value < vfloor || total_motion > 4 * xi_bound) return divergent_exit();
    slow = value_prev - value <= 1e-9 * (1.0 + value) ? slow + 1 : 0;
    value_prev = value;
    rvec phi = momentum(rep, w);
    double pn = norm2(phi);
    // Stationary enough to decide: either the momentum vanished, or progress
    // collapsed while it is already small (degenerate minima are approached
    // only at first-order rates). The mass certificate settles the verdict.
    bool stationary = pn <= 1e-9 * (1.0 + value) || (futile >= 3 && pn <= 1e-4 * (1.0 + value)) ||
                      (slow >= 50 && pn <= 1e-2 * (1.0 + value));
    if (stationary) {
      if (!moved_any) return minimum_exit();  // already stationary at v
      double mass = detail::nondecaying_mass(rep, w, last_dir);
      return mass >= 1e-6 * value ? minimum_exit() : divergent_exit();
    }
    if (futile >= 3) throw max_iterations_error("balancing iteration stalled away from stationarity (su2)");
    // step along -Phi# with backtracking on the value, then greedy doubling
    // so escapes to the null cone move at full speed
    double c = std::min(0.5, 0.25 / (1.0 + pn));
    bool progressed = false;
    cvec trial;
    for (int bt = 0; bt < 50; ++bt) {
      try {
        trial = act_imaginary(rep, phi, -c, w);
      } catch (const overflow_error&) {
        c *= 0.5;
        continue;
      }
      if (norm_sq(trial) <= value - 1e-4 * c * 4.0 * pn * pn) {
        progressed = true;
        break;
      }
      c *= 0.5;
    }
    for (int ext = 0; progressed && ext < 40; ++ext) {
      cvec wider;
      try {
        wider = act_imaginary(rep, phi, -2.0 * c, w);
      } catch (const overflow_error&) {
        break;
      }
      if (norm_sq(wider) >= norm_sq(trial)) break;
      c *= 2.0;
      trial = std::move(wider);
    }
    if (!progressed) {
      ++futile;
      continue;
    }
    futile = norm_sq(trial) > value - 1e-14 * (1.0 + value) ? futile + 1 : 0;
    complexd g2[2][2];
    su2::herm_exp_2x2(phi, -c, g2);
    complexd np[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) np[i][j] = g2[i][0] * pmat[0][j] + g2[i][1] * pmat[1][j];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) pmat[i][j] = np[i][j];
    w = trial;
    total_motion += c * pn;
    for (int a = 0; a < 3; ++a) last_dir[a] = -phi[a];
    moved_any = true;
  }
  throw max_iterations_error("kempf-ness minimization (su2)");
}

namespace detail {

inline bool projective_stabilizer_trivial(const RepSpec& rep, const cvec& v) {
  // kernel of xi -> P_{v-perp} rho(xi) v
  double n2 = norm_sq(v);
  std::vector<rvec> cols;
  for (int a = 0; a < rep.lie_dim(); ++a) {
    lievec e(rep.lie_dim(), 0.0);
    e[a] = 1.0;
    cvec img = act_infinitesimal(rep, e, v);
    complexd proj = hdot(img, v) / n2;
    for (size_t j = 0; j < img.size(); ++j) img[j] -= proj * v[j];
    rvec col(2 * rep.n);
    for (int j = 0; j < rep.n; ++j) {
      col[2 * j] = img[j].real();
      col[2 * j + 1] = img[j].imag();
    }
    cols.push_back(std::move(col));
  }
  return numeric_rank(std::move(cols), 1e-8 * std::max(1.0, norm2(v))) == rep.lie_dim();
}

// Can the orbit of a projective su(2) point reach the zero level? Descent on
// mu at exp(i xi) v over xi.
inline bool su2_orbit_reaches_zero_level(const RepSpec& rep, const cvec& v, const FlowOptions& opts) {
  lievec xi(3, 0.0);
  auto val = [&](const lievec& x) -> double {
    try {
      return yang_mills(rep, act_imaginary(rep, x, 1.0, v));
    } catch (const overflow_error&) {
      return 1e300;
    }
  };
  double f = val(xi);
  double step0 = 0.25;
  for (int it = 0; it < 600; ++it) {
    if (std::sqrt(f) <= opts.phi_tol * 10) return true;
    if (norm2(xi) > 40.0) return false;
    const double hfd = 1e-5;
    rvec g(3);
    lievec probe = xi;
    for (int a = 0; a < 3; ++a) {
      probe[a] = xi[a] + hfd;
      double fp = val(probe);
      probe[a] = xi[a] - hfd;
      double fm = val(probe);
      probe[a] = xi[a];
      g[a] = (fp - fm) / (2 * hfd);
    }
    double gn = norm2(g);
    if (gn <= 1e-13) break;
    double t = step0;
    lievec trial(3);
    double ft = f;
    for (int bt = 0; bt < 60; ++bt) {
      for (int a = 0; a < 3; ++a) trial[a] = xi[a] - t * g[a];
      ft = val(trial);
      if (ft < f) break;
      t *= 0.5;
    }
    if (ft >= f) break;
    xi = trial;
    f = ft;
    step0 = std::min(1.0, 2.0 * t);
  }
  return std::sqrt(f) <= opts.phi_tol * 10;
}

}  // namespace detail

// Integrates v' = -grad mu(v) until ||grad mu|| <= grad_stop or t_max, then
// classifies the start point from the limit. Torus states use the
// moduli-only reduction (phases are flow-invariant).
inline FlowResult integrate_flow(const RepSpec& rep, const cvec& v_in, const FlowOptions& opts = {}) {
  opts.validate();
  rep.check_state(v_in);
  cvec v = v_in;
  if (rep.mode == PhaseMode::Projective) {
    double nv = norm2(v);
    for (auto& z : v) z /= nv;  // explicit normalization of the representative
  }

  FlowResult res;
  detail::OdeOutcome ode;
  if (rep.kind == GroupKind::Torus) {
    detail::TorusFlow tf{&rep, rep.level_double()};
    rvec u(rep.n);
    cvec phase(rep.n);
    for (int j = 0; j < rep.n; ++j) {
      u[j] = std::norm(v[j]);
      phase[j] = std::abs(v[j]) > 0 ? v[j] / std::abs(v[j]) : complexd(0, 0);
    }
    detail::OdeSystem sys{[&tf](const rvec& y) { return tf.deriv(y); },
                          [&tf](const rvec& y) { return tf.mu(y); },
                          [&tf](const rvec& y) { return tf.grad_norm(y); },
                          [&tf](rvec& y) { tf.sanitize(y); }};
    FlowOptions rk_opts = opts;
    rk_opts.max_steps = std::min(opts.max_steps, 20000);
    ode = detail::rk45(sys, u, rk_opts);
    if (!ode.converged) {
      res.polished = true;
      ode.converged = detail::polish_torus_limit(tf, ode.y, opts);
    }
    auto decode = [&](const rvec& y) {
      cvec x(rep.n);
      for (int j = 0; j < rep.n; ++j) x[j] = phase[j] * std::sqrt(std::max(y[j], 0.0));
      return x;
    };
    res.limit = decode(ode.y);
    for (auto& [t, y] : ode.samples) {
      cvec st = decode(y);
      res.samples.push_back({t, st, tf.mu(y)});
    }
  } else {
    detail::OdeSystem sys{
        [&rep](const rvec& y) {
          cvec x = detail::decode_state(y);
          cvec g = grad_yang_mills(rep, x);
          for (auto& z : g) z = -z;
          return detail::encode_state(g);
        },
        [&rep](const rvec& y) { return yang_mills(rep, detail::decode_state(y)); },
        [&rep](const rvec& y) {
          cvec g = grad_yang_mills(rep, detail::decode_state(y));
          return norm2(g);
        },
        [&rep](rvec& y) {
          if (rep.mode == PhaseMode::Projective) {
            double n = norm2(y);
            if (n > 0)
              for (double& c : y) c /= n;
          }
        }};
    ode = detail::rk45(sys, detail::encode_state(v), opts);
    res.limit = detail::decode_state(ode.y);
    for (auto& [t, y] : ode.samples) {
      cvec st = detail::decode_state(y);
      res.samples.push_back({t, st, yang_mills(rep, st)});
    }
  }

  res.converged = ode.converged;
  res.t_end = ode.t;
  res.steps = ode.steps;
  rvec phi = momentum(rep, res.limit);
  res.phi_residual = norm2(phi);

  // Classification from the limit plus the closed-orbit certificate.
  StabilityClass cls;
  bool semis = res.phi_residual <= opts.phi_tol;
  cls.indeterminate = res.phi_residual > opts.phi_tol && res.phi_residual < 10 * opts.phi_tol;

  bool closed = false;
  if (rep.mode == PhaseMode::Affine) {
    closed = minimize_kempf_ness(rep, v, opts).status == KempfNessOutcome::Status::Minimum;
  } else if (rep.kind == GroupKind::Torus) {
    // the orbit meets the zero level iff the shifted Kempf-Ness value
    // attains its infimum on the affine cone over the support
    closed = detail::kn_minimum_attained(rep, support(v, opts.stab_tol));
  } else {
    closed = semis && detail::su2_orbit_reaches_zero_level(rep, v, opts);
  }

  bool finite_stab;
  if (rep.kind == GroupKind::Torus) {
    std::vector<int> s = support(v, opts.stab_tol);
    finite_stab = detail::support_weight_rank(rep, s, rep.mode == PhaseMode::Projective) == rep.d;
  } else {
    finite_stab = rep.mode == PhaseMode::Affine ? stabilizer_rank(rep, v, opts.stab_tol).finite
                                                : detail::projective_stabilizer_trivial(rep, v);
  }

  cls.closed_orbit = closed;
  bool stable = semis && closed && finite_stab;
  cls.tag = stable ? StabilityTag::Stable : (semis ? StabilityTag::Semistable : StabilityTag::Unstable);
  res.classification = cls;
  return res;
}

inline StabilityClass classify_point(const RepSpec& rep, const cvec& v, const FlowOptions& opts = {}) {
  return integrate_flow(rep, v, opts).classification;
}

// ---------------------------------------------------------------------------
// Hilbert-Mumford style direction probe for su(2) (cross-check only).
// ---------------------------------------------------------------------------

struct OnePsOptions {
  int grid = 240;
  int refine_rounds = 9;
  int refine_points = 48;
  double found_tol = 1e-10;  // relative non-decaying mass below which decay is declared
  double clear_tol = 1e-4;   // relative mass above which no destabilizer exists nearby
};

struct OnePsResult {
  bool destabilizer_found = false;
  lievec witness;
  double min_mass = 0.0;  // relative
};

// Samples unit directions xi on a Fibonacci sphere grid plus local
// refinement. destabilizer_found means the Kempf-Ness value decays to zero
// along exp(i t xi) v; mass thresholds between found_tol and clear_tol are
// surfaced as inconclusive_grid rather than resolved.
inline OnePsResult one_ps_oracle(const RepSpec& rep, const cvec& v, const OnePsOptions& po = {}) {
  if (rep.kind != GroupKind::SU2) throw dimension_mismatch("one_ps_oracle is su2-only");
  if (static_cast<int>(v.size()) != rep.n) throw dimension_mismatch("state has wrong length");
  OnePsResult out;
  double vn = norm_sq(v);
  if (vn == 0.0) return out;  // the origin is fixed; nothing destabilizes it

  auto mass_at = [&](const lievec& xi) { return detail::nondecaying_mass(rep, v, xi) / vn; };

  std::vector<lievec> dirs;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < po.grid; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / po.grid;
    double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    double ph = golden * i;
    dirs.push_back({rad * std::cos(ph), rad * std::sin(ph), z});
  }
  for (int a = 0; a < 3; ++a)
    for (int sgn : {-1, 1}) {
      lievec e(3, 0.0);
      e[a] = sgn;
      dirs.push_back(e);
    }

  lievec best;
  double best_mass = 1e300;
  for (const auto& xi : dirs) {
    double m = mass_at(xi);
    if (m < best_mass) {
      best_mass = m;
      best = xi;
    }
  }

  double radius = 2.0 * std::sqrt(4.0 * M_PI / po.grid);
  for (int round = 0; round < po.refine_rounds && best_mass > po.found_tol; ++round) {
    // orthonormal frame around the current best direction
    lievec t1(3), t2(3);
    int ax = std::abs(best[0]) < 0.9 ? 0 : 1;
    lievec e(3, 0.0);
    e[ax] = 1.0;
    double be = dot(best, e);
    for (int a = 0; a < 3; ++a) t1[a] = e[a] - be * best[a];
    double n1 = norm2(t1);
    for (double& c : t1) c /= n1;
    t2 = {best[1] * t1[2] - best[2] * t1[1], best[2] * t1[0] - best[0] * t1[2], best[0] * t1[1] - best[1] * t1[0]};
    for (int i = 0; i < po.refine_points; ++i) {
      double alpha = 2 * M_PI * i / po.refine_points;
      double rr = radius * (0.3 + 0.7 * ((i % 3) + 1) / 3.0);
      lievec xi(3);
      for (int a = 0; a < 3; ++a)
        xi[a] = best[a] * std::cos(rr) + (t1[a] * std::cos(alpha) + t2[a] * std::sin(alpha)) * std::sin(rr);
      double m = mass_at(xi);
      if (m < best_mass) {
        best_mass = m;
        best = xi;
      }
    }
    radius *= 0.25;
  }

  out.min_mass = best_mass;
  out.witness = best;
  if (best_mass <= po.found_tol) {
    out.destabilizer_found = true;
    return out;
  }
  if (best_mass >= po.clear_tol) {
    out.destabilizer_found = false;
    return out;
  }
  throw inconclusive_grid("minimal non-decaying mass " + std::to_string(best_mass));
}

// Membership of exp(i t xi) v in the ball of the given radius, sampled on a
// symmetric grid; true iff the membership set is one contiguous run.
inline bool orbital_convexity_probe(const RepSpec& rep, const cvec& v, const lievec& xi, double radius,
                                    int samples, double t_span = 4.0) {
  if (rep.mode != PhaseMode::Affine) throw dimension_mismatch("orbital convexity probe requires affine mode");
  rep.check_state(v);
  rep.check_lie(xi);
  std::vector<bool> in(samples);
  for (int i = 0; i < samples; ++i) {
    double t = samples == 1 ? 0.0 : -t_span + 2.0 * t_span * i / (samples - 1);
    bool inside;
    try {
      inside = norm2(act_imaginary(rep, xi, t, v)) < radius;
    } catch (const overflow_error&) {
      inside = false;
    }
    in[i] = inside;
  }
  int first = -1, last = -1;
  for (int i = 0; i < samples; ++i)
    if (in[i]) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) return true;
  for (int i = first; i <= last; ++i)
    if (!in[i]) return false;
  return true;
}

}  // namespace symred
