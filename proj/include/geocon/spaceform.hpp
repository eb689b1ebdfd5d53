#pragma once

// Quadrics X^{n+1}_{p,eps} = {<x,x>_p = eps} in R^{n+2}, their geodesics and
// the eps-trigonometric functions (cos, sin, atan for eps=1; cosh, sinh,
// atanh/acoth for eps=-1).

#include <cmath>
#include <numbers>

#include "geocon/errors.hpp"
#include "geocon/jet.hpp"
#include "geocon/pseudolinalg.hpp"

namespace geocon {

class SpaceForm {
 public:
  SpaceForm(int n, int p, int eps_quadric = 1) : n_(n), p_(p), eps_(eps_quadric) {
    if (n < 1) throw GeoError(ErrorKind::invalid_argument, "hypersurface dimension must be positive");
    if (p < 0 || p > n + 2) throw GeoError(ErrorKind::invalid_argument, "signature index out of range");
    if (eps_quadric != 1 && eps_quadric != -1) throw GeoError(ErrorKind::invalid_argument, "quadric sign must be +-1");
  }

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int p() const noexcept { return p_; }
  [[nodiscard]] int eps_quadric() const noexcept { return eps_; }
  [[nodiscard]] SignatureSpace space() const { return {n_ + 2, p_}; }

 private:
  int n_;
  int p_;
  int eps_;
};

inline void require_sign(int eps) {
  if (eps != 1 && eps != -1) throw GeoError(ErrorKind::invalid_argument, "sign must be +1 or -1");
}

class EpsTrig {
 public:
  explicit EpsTrig(int eps) : eps_(eps) { require_sign(eps); }

  [[nodiscard]] int eps() const noexcept { return eps_; }

  template <class T>
  [[nodiscard]] T cos(const T& t) const {
    using std::cos, std::cosh;
    return eps_ > 0 ? T(cos(t)) : T(cosh(t));
  }
  template <class T>
  [[nodiscard]] T sin(const T& t) const {
    using std::sin, std::sinh;
    return eps_ > 0 ? T(sin(t)) : T(sinh(t));
  }
  // tan^-1 for eps=1; tanh^-1 (|t|<1) or coth^-1 (|t|>1) for eps=-1.
  template <class T>
  [[nodiscard]] T arctan(const T& t) const {
    using std::atan, std::atanh;
    if (eps_ > 0) return T(atan(t));
    const double a = std::abs(value_of(t));
    if (a == 1.0 || std::abs(a - 1.0) < 1e-14) throw GeoError(ErrorKind::pole, "arctan_eps pole at |t| = 1");
    if (a < 1.0) return T(atanh(t));
    return T(acoth(t));
  }

 private:
  int eps_;
};

template <class T = double>
T cos_eps(int eps, const T& t) { return EpsTrig(eps).cos(t); }
template <class T = double>
T sin_eps(int eps, const T& t) { return EpsTrig(eps).sin(t); }
inline double arctan_eps(int eps, double t) { return EpsTrig(eps).arctan(t); }

inline bool on_quadric(const SpaceForm& sf, const Vector& x, double tol) {
  require_dim(sf.space(), x.size(), "on_quadric");
  return std::abs(inner(sf.space(), x, x) - sf.eps_quadric()) <= tol;
}

// Causal character of a direction; null directions are rejected.
inline int direction_sign(const SignatureSpace& s, const Vector& v) {
  const double vv = inner(s, v, v);
  const double scale = v.squaredNorm();
  if (scale == 0.0 || std::abs(vv) <= 1e-8 * scale) {
    throw GeoError(ErrorKind::null_direction, "geodesic direction is null");
  }
  return vv > 0 ? 1 : -1;
}

inline Vector geodesic_point(const SignatureSpace& s, const Vector& x, const Vector& v, double t) {
  require_dim(s, x.size(), "geodesic_point");
  require_dim(s, v.size(), "geodesic_point");
  const EpsTrig trig(direction_sign(s, v));
  return trig.cos(t) * x + trig.sin(t) * v;
}

// (x_1..x_p, x_{p+1}..x_{n+2}) -> (x_{p+1}..x_{n+2}, x_1..x_p); maps <.,.>_p
// to minus <.,.>_{dim-p}.
inline Vector anti_isometry(const Vector& x, int p) {
  const auto dim = x.size();
  if (p < 0 || p > dim) throw GeoError(ErrorKind::invalid_argument, "signature index out of range");
  Vector out(dim);
  out.head(dim - p) = x.tail(dim - p);
  out.tail(p) = x.head(p);
  return out;
}

}  // namespace geocon
