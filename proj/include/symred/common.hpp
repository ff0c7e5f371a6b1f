#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symred {

using complexd = std::complex<double>;
using cvec = std::vector<complexd>;
using rvec = std::vector<double>;
using cmat = std::vector<cvec>;  // row-major

// ---------------------------------------------------------------------------
// Error taxonomy. Everything recoverable is an exception carrying a message;
// soft conditions (Truncated, NoConvergence, Indeterminate) travel as flags
// on result types instead.
// ---------------------------------------------------------------------------

struct malformed_config : std::runtime_error {
  explicit malformed_config(const std::string& m) : std::runtime_error("malformed config: " + m) {}
};
struct dimension_mismatch : std::runtime_error {
  explicit dimension_mismatch(const std::string& m) : std::runtime_error("dimension mismatch: " + m) {}
};
struct overflow_error : std::runtime_error {
  explicit overflow_error(const std::string& m) : std::runtime_error("overflow: " + m) {}
};
struct zero_vector_in_projective_mode : std::runtime_error {
  zero_vector_in_projective_mode() : std::runtime_error("zero vector is not a projective point") {}
};
struct non_monotone_error : std::runtime_error {
  explicit non_monotone_error(const std::string& m) : std::runtime_error("mu increased along flow: " + m) {}
};
struct max_iterations_error : std::runtime_error {
  explicit max_iterations_error(const std::string& m) : std::runtime_error("iteration budget exhausted: " + m) {}
};
struct not_closed_orbit : std::runtime_error {
  explicit not_closed_orbit(const std::string& m) : std::runtime_error("point is not on a closed orbit: " + m) {}
};
struct combinatorial_budget_exceeded : std::runtime_error {
  explicit combinatorial_budget_exceeded(const std::string& m)
      : std::runtime_error("combinatorial budget exceeded: " + m) {}
};
struct dimension_too_large : std::runtime_error {
  explicit dimension_too_large(const std::string& m) : std::runtime_error("dimension too large: " + m) {}
};
struct fit_residual_nonzero : std::runtime_error {
  explicit fit_residual_nonzero(const std::string& m) : std::runtime_error("polynomial fit residual nonzero: " + m) {}
};
struct inconclusive_grid : std::runtime_error {
  explicit inconclusive_grid(const std::string& m) : std::runtime_error("direction grid inconclusive: " + m) {}
};

// ---------------------------------------------------------------------------
// Small complex-vector helpers. The Hermitian form is linear in the first
// argument; the real inner product and symplectic form derive from it:
//   <u,v>_R = Re h(u,v),   omega(u,v) = -Im h(u,v).
// ---------------------------------------------------------------------------

inline complexd hdot(const cvec& u, const cvec& v) {
  complexd s{0.0, 0.0};
  for (size_t j = 0; j < u.size(); ++j) s += u[j] * std::conj(v[j]);
  return s;
}

inline double rdot(const cvec& u, const cvec& v) { return hdot(u, v).real(); }

inline double omega_form(const cvec& u, const cvec& v) { return -hdot(u, v).imag(); }

inline double norm_sq(const cvec& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

inline double norm2(const cvec& v) { return std::sqrt(norm_sq(v)); }

inline double dot(const rvec& a, const rvec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const rvec& a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(const cvec& v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

inline bool all_finite(const rvec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace symred
