#pragma once

#include <cmath>
#include <functional>

#include "symred/rep.hpp"

namespace symred {

// Momentum map value, identified with a Lie algebra vector through the
// invariant inner product. Sign convention: omega = -Im ds^2, which forces
// the affine torus formula Phi^xi(v) = -1/2 sum_j <w_j,xi> |v_j|^2 - <lambda,xi>.
// The executable arbiter of the sign is the finite-difference check in
// identity_residuals: residual (a) vanishes exactly for this convention.
// Projective mode is Fubini-Study scaled so that
// Phi([v]) = -(sum_j w_j |v_j|^2)/||v||^2 - lambda.
inline rvec momentum(const RepSpec& rep, const cvec& v) {
  rep.check_state(v);
  rvec phi(rep.lie_dim(), 0.0);
  if (rep.kind == GroupKind::Torus) {
    for (int a = 0; a < rep.d; ++a) {
      double s = 0.0;
      for (int j = 0; j < rep.n; ++j) s += static_cast<double>(rep.weights[a][j]) * std::norm(v[j]);
      phi[a] = -0.5 * s;
    }
    if (rep.mode == PhaseMode::Projective) {
      double n2 = norm_sq(v);
      for (int a = 0; a < rep.d; ++a) phi[a] = 2.0 * phi[a] / n2;
    }
    for (int a = 0; a < rep.d; ++a) phi[a] -= rep.level[a].to_double();
    return phi;
  }
  for (int a = 0; a < 3; ++a) {
    double s = 0.0;
    for (const auto& b : rep.blocks) {
      const int nb = b.m + 1;
      for (int r = 0; r < nb; ++r) {
        complexd acc(0, 0);
        for (int c = 0; c < nb; ++c) acc += b.j[a][r][c] * v[b.offset + c];
        s += (acc * std::conj(v[b.offset + r])).real();
      }
    }
    phi[a] = 0.5 * s;
  }
  if (rep.mode == PhaseMode::Projective) {
    double n2 = norm_sq(v);
    for (int a = 0; a < 3; ++a) phi[a] = 2.0 * phi[a] / n2;
  }
  return phi;
}

inline double phi_component(const RepSpec& rep, const cvec& v, const lievec& xi) {
  rvec phi = momentum(rep, v);
  double s = 0.0;
  for (size_t a = 0; a < phi.size(); ++a) s += phi[a] * xi[a];
  return s;
}

inline double yang_mills(const RepSpec& rep, const cvec& v) {
  rvec phi = momentum(rep, v);
  return dot(phi, phi);
}

// grad mu = 2 J Phi(v)_M,v. Affine mode this is literally
// 2 i * act_infinitesimal(Phi#); projective mode uses the Fubini-Study
// gradient of the normalized functional, which is tangent to the sphere
// representative and orthogonal to the phase direction i v.
inline cvec grad_yang_mills(const RepSpec& rep, const cvec& v) {
  rep.check_state(v);
  rvec phi = momentum(rep, v);
  if (rep.mode == PhaseMode::Affine) {
    cvec inf = act_infinitesimal(rep, phi, v);
    for (auto& z : inf) z *= complexd(0, 2);
    return inf;
  }
  const double n2 = norm_sq(v);
  cvec g(rep.n, complexd(0, 0));
  if (rep.kind == GroupKind::Torus) {
    rvec avg(rep.d, 0.0);  // norm-weighted average of the weights
    for (int a = 0; a < rep.d; ++a) {
      double s = 0.0;
      for (int j = 0; j < rep.n; ++j) s += static_cast<double>(rep.weights[a][j]) * std::norm(v[j]);
      avg[a] = s / n2;
    }
    for (int j = 0; j < rep.n; ++j) {
      double c = 0.0;
      for (int a = 0; a < rep.d; ++a) c += phi[a] * (avg[a] - static_cast<double>(rep.weights[a][j]));
      g[j] = (4.0 / n2) * c * v[j];
    }
    return g;
  }
  double mu = dot(phi, phi);
  for (const auto& b : rep.blocks) {
    const int nb = b.m + 1;
    for (int r = 0; r < nb; ++r) {
      complexd acc(0, 0);
      for (int c = 0; c < nb; ++c) {
        complexd h = phi[0] * b.j[0][r][c] + phi[1] * b.j[1][r][c] + phi[2] * b.j[2][r][c];
        acc += h * v[b.offset + c];
      }
      g[b.offset + r] = (4.0 / n2) * (acc - mu * v[b.offset + r]);
    }
  }
  return g;
}

// Kempf-Ness value r^2(exp(sqrt(-1) xi) v) with the level twist
// exp(-2 <lambda, xi>) in affine mode: the twisted value equals the plain
// length function of the level-shifted weights w_j + lambda, so stationarity
// matches the hull oracle's shifted-origin test at every level.
inline double kempf_ness_value(const RepSpec& rep, const cvec& v, const lievec& xi) {
  if (rep.mode != PhaseMode::Affine) throw dimension_mismatch("kempf_ness_value requires affine mode");
  cvec moved = act_imaginary(rep, xi, 1.0, v);
  double value = norm_sq(moved);
  if (rep.kind == GroupKind::Torus) {
    double twist = 0.0;
    for (int a = 0; a < rep.d; ++a) twist += rep.level[a].to_double() * xi[a];
    if (std::abs(2.0 * twist) > kExpBound) throw overflow_error("level twist exponent beyond bound");
    value *= std::exp(-2.0 * twist);
  }
  return value;
}

// Central-difference real gradient of a scalar function of the state,
// step h = 1e-6 (1 + ||v||), encoded as a complex vector g with
// df(u) = <g, u>_R.
inline cvec fd_gradient(const std::function<double(const cvec&)>& f, const cvec& v) {
  const double h = 1e-6 * (1.0 + norm2(v));
  cvec g(v.size());
  cvec x = v;
  for (size_t j = 0; j < v.size(); ++j) {
    double parts[2];
    for (int im = 0; im < 2; ++im) {
      complexd dz = im ? complexd(0, h) : complexd(h, 0);
      x[j] = v[j] + dz;
      double fp = f(x);
      x[j] = v[j] - dz;
      double fm = f(x);
      x[j] = v[j];
      parts[im] = (fp - fm) / (2.0 * h);
    }
    g[j] = complexd(parts[0], parts[1]);
  }
  return g;
}

struct IdentityResiduals {
  double grad_identity = 0.0;   // J xi_M - grad Phi^xi (finite differences)
  double angle_identity = 0.0;  // <grad r^2, grad Phi^xi> - 4 Phi^xi
  double mu_identity = 0.0;     // <grad r^2, grad mu> - 8 mu
  double isotropy = 0.0;        // omega(xi_M, eta_M) over basis pairs, torus only
};

// Pointwise residuals of the structural identities, relative scale. Affine
// mode; the angle and mu identities assume level 0.
inline IdentityResiduals identity_residuals(const RepSpec& rep, const cvec& v, const lievec& xi) {
  if (rep.mode != PhaseMode::Affine) throw dimension_mismatch("identity_residuals requires affine mode");
  rep.check_state(v);
  rep.check_lie(xi);
  IdentityResiduals out;

  // (a) J xi_M(v) = grad Phi^xi(v), gradient by central differences.
  cvec exact = act_infinitesimal(rep, xi, v);
  for (auto& z : exact) z *= complexd(0, 1);
  cvec fd = fd_gradient([&](const cvec& x) { return phi_component(rep, x, xi); }, v);
  double diff = 0.0;
  for (size_t j = 0; j < fd.size(); ++j) diff += std::norm(fd[j] - exact[j]);
  out.grad_identity = std::sqrt(diff) / (1.0 + norm2(exact));

  // (b) <grad r^2, grad Phi^xi> = 4 Phi^xi.
  cvec two_v = v;
  for (auto& z : two_v) z *= 2.0;
  double lhs = rdot(exact, two_v);
  double rhs = 4.0 * phi_component(rep, v, xi);
  out.angle_identity = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));

  // (c) <grad r^2, grad mu> = 8 mu.
  cvec gmu = grad_yang_mills(rep, v);
  double lhs_mu = rdot(gmu, two_v);
  double rhs_mu = 8.0 * yang_mills(rep, v);
  out.mu_identity = std::abs(lhs_mu - rhs_mu) / (1.0 + std::abs(rhs_mu));

  // (d) torus orbits are isotropic: omega(xi_M, eta_M) = 0 on basis pairs.
  if (rep.kind == GroupKind::Torus) {
    double worst = 0.0;
    std::vector<cvec> fields(rep.d);
    for (int a = 0; a < rep.d; ++a) {
      lievec e(rep.d, 0.0);
      e[a] = 1.0;
      fields[a] = act_infinitesimal(rep, e, v);
    }
    for (int a = 0; a < rep.d; ++a)
      for (int b = a + 1; b < rep.d; ++b) {
        double w = std::abs(omega_form(fields[a], fields[b]));
        worst = std::max(worst, w / (1.0 + norm2(fields[a]) * norm2(fields[b])));
      }
    out.isotropy = worst;
  }
  return out;
}

// Squared norm of the invariant monomial section z^a in the flat prequantum
// metric: |v^a|^2 exp(-pi ||v||^2). Along the descent flow this is
// non-decreasing for zero-weight exponents, with rate 8 pi mu.
inline double section_norm_sq(const std::vector<int>& exps, const cvec& v) {
  double logmod = 0.0;
  for (size_t j = 0; j < exps.size(); ++j) {
    if (exps[j] == 0) continue;
    double m = std::abs(v[j]);
    if (m == 0.0) return 0.0;
    logmod += 2.0 * exps[j] * std::log(m);
  }
  return std::exp(logmod - M_PI * norm_sq(v));
}

}  // namespace symred
