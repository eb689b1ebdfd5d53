#pragma once

// Spaces of oriented non-null geodesics L^{+-}(X^{n+1}_{p,1}) as decomposable
// bivectors x ^ y, with the structures J, J', J'' = J J', the metrics G, G',
// the symplectic form omega, and curvature computed from the second
// fundamental form of the embedding into (Lambda^2, <<.,.>>).

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/jet.hpp"
#include "geocon/pseudolinalg.hpp"
#include "geocon/spaceform.hpp"

namespace geocon {

// ---------------------------------------------------------------------------
// Canonical complex/para rotation on an oriented nondegenerate 2-plane.

// Matrix M of J' in an oriented basis (b1, b2) with Gram matrix g:
// J' b_j = sum_i M_ij b_i. Definite planes get a rotation (J'^2 = -1),
// indefinite ones the reflection exchanging the null lines (J'^2 = +1).
inline Matrix plane_rotation(const Matrix& g) {
  const double det = g.determinant();
  Matrix omega(2, 2);
  omega << 0.0, 1.0, -1.0, 0.0;
  omega *= std::sqrt(std::abs(det));
  const double c = (det > 0 && g(0, 0) < 0) ? -1.0 : 1.0;
  return -c * g.inverse() * omega;
}

class GeodesicPoint {
 public:
  GeodesicPoint(SignatureSpace space, Vector x, Vector y, double tol = 1e-10)
      : space_(space), x_(std::move(x)), y_(std::move(y)), bivector_(space.dim()) {
    validate(tol);
    complement_ = orthonormal_complement(space_, x_, y_);
  }

  // With an explicit oriented orthonormal complement frame.
  GeodesicPoint(SignatureSpace space, Vector x, Vector y, std::vector<Vector> frame, double tol = 1e-10)
      : space_(space), x_(std::move(x)), y_(std::move(y)), bivector_(space.dim()) {
    validate(tol);
    if (static_cast<int>(frame.size()) != space_.dim() - 2) {
      throw GeoError(ErrorKind::invalid_argument, "complement frame has the wrong size");
    }
    for (std::size_t i = 0; i < frame.size(); ++i) {
      const double nn = inner(space_, frame[i], frame[i]);
      if (std::abs(std::abs(nn) - 1.0) > 1e-8) throw GeoError(ErrorKind::invalid_argument, "complement frame not unit");
      complement_.signs.push_back(nn > 0 ? 1 : -1);
    }
    complement_.vectors = std::move(frame);
  }

  [[nodiscard]] const SignatureSpace& space() const noexcept { return space_; }
  [[nodiscard]] int n() const noexcept { return space_.dim() - 2; }
  [[nodiscard]] const Vector& x() const noexcept { return x_; }
  [[nodiscard]] const Vector& y() const noexcept { return y_; }
  [[nodiscard]] int eps() const noexcept { return eps_; }
  [[nodiscard]] const Bivector& bivector() const noexcept { return bivector_; }
  [[nodiscard]] const Frame& complement() const noexcept { return complement_; }

  [[nodiscard]] int eps_prime() const {
    require_surface_case();
    return complement_.signs[0] * complement_.signs[1];
  }

  // Ambient operator of J on span(x,y), zero on the complement.
  [[nodiscard]] Matrix plane_J() const { return bivector_operator(space_, bivector_); }

  // Ambient operator of J' on the complement, zero on span(x,y).
  [[nodiscard]] Matrix complement_Jprime() const {
    require_surface_case();
    const auto& e = complement_.vectors;
    Matrix g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = inner(space_, e[static_cast<std::size_t>(i)], e[static_cast<std::size_t>(j)]);
    const Matrix M = plane_rotation(g);
    Matrix basis(space_.dim(), 2);
    basis.col(0) = e[0];
    basis.col(1) = e[1];
    // Coordinates of v on (e1,e2): eps_i <v, e_i>.
    Matrix coords(2, space_.dim());
    for (int i = 0; i < 2; ++i) {
      coords.row(i) = static_cast<double>(complement_.signs[static_cast<std::size_t>(i)]) *
                      (space_.metric() * e[static_cast<std::size_t>(i)]).transpose();
    }
    return basis * M * coords;
  }

  void require_surface_case() const {
    if (n() != 2) throw GeoError(ErrorKind::unsupported_dimension, "J' and G' exist only for n = 2");
  }

 private:
  void validate(double tol) {
    require_dim(space_, x_.size(), "GeodesicPoint");
    require_dim(space_, y_.size(), "GeodesicPoint");
    const double scale = std::max({1.0, x_.squaredNorm(), y_.squaredNorm()});
    if (std::abs(inner(space_, x_, x_) - 1.0) > tol * scale) {
      throw GeoError(ErrorKind::invalid_argument, "base point is not on the quadric");
    }
    if (std::abs(inner(space_, x_, y_)) > tol * scale) {
      throw GeoError(ErrorKind::invalid_argument, "direction is not orthogonal to the base point");
    }
    const double yy = inner(space_, y_, y_);
    if (std::abs(std::abs(yy) - 1.0) > tol * scale) {
      if (std::abs(yy) < 1e-8 * y_.squaredNorm()) throw GeoError(ErrorKind::null_direction, "null geodesic");
      throw GeoError(ErrorKind::invalid_argument, "direction is not unit");
    }
    eps_ = yy > 0 ? 1 : -1;
    bivector_ = wedge(x_, y_);
  }

  SignatureSpace space_;
  Vector x_;
  Vector y_;
  int eps_ = 1;
  Bivector bivector_;
  Frame complement_;
};

using GeodesicPointPtr = std::shared_ptr<const GeodesicPoint>;

// A tangent vector x ^ X + y ^ Y at a geodesic, X and Y orthogonal to x, y.
class TangentAtGeodesic {
 public:
  TangentAtGeodesic(GeodesicPointPtr base, Vector X, Vector Y, double tol = 1e-8)
      : base_(std::move(base)), X_(std::move(X)), Y_(std::move(Y)), bivector_(base_->space().dim()) {
    const auto& s = base_->space();
    require_dim(s, X_.size(), "TangentAtGeodesic");
    require_dim(s, Y_.size(), "TangentAtGeodesic");
    const double scale = std::max({1.0, X_.norm(), Y_.norm()}) * std::max(base_->x().norm(), base_->y().norm());
    for (const Vector* v : {&X_, &Y_}) {
      if (std::abs(inner(s, *v, base_->x())) > tol * scale || std::abs(inner(s, *v, base_->y())) > tol * scale) {
        throw GeoError(ErrorKind::invalid_argument, "tangent components must be orthogonal to x and y");
      }
    }
    bivector_ = wedge(base_->x(), X_) + wedge(base_->y(), Y_);
  }

  // Tangential part of an arbitrary bivector B: X = B(x), Y = eps B(y),
  // with components along x and y removed.
  static TangentAtGeodesic from_bivector(const GeodesicPointPtr& base, const Bivector& B) {
    const auto& s = base->space();
    const Matrix op = bivector_operator(s, B);
    const int eps = base->eps();
    auto strip = [&](Vector v) {
      v -= inner(s, v, base->x()) * base->x();
      v -= eps * inner(s, v, base->y()) * base->y();
      return v;
    };
    return {base, strip(op * base->x()), strip(static_cast<double>(eps) * (op * base->y()))};
  }

  [[nodiscard]] const GeodesicPointPtr& base() const noexcept { return base_; }
  [[nodiscard]] const Vector& X() const noexcept { return X_; }
  [[nodiscard]] const Vector& Y() const noexcept { return Y_; }
  [[nodiscard]] const Bivector& bivector() const noexcept { return bivector_; }

  friend TangentAtGeodesic operator+(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
    a.require_same_base(b);
    return {a.base_, a.X_ + b.X_, a.Y_ + b.Y_, 1e300};
  }
  friend TangentAtGeodesic operator*(double c, const TangentAtGeodesic& a) { return {a.base_, c * a.X_, c * a.Y_, 1e300}; }

  void require_same_base(const TangentAtGeodesic& o) const {
    if (base_ == o.base_) return;
    if (base_->space() == o.base_->space() && base_->x() == o.base_->x() && base_->y() == o.base_->y()) return;
    throw GeoError(ErrorKind::invalid_argument, "tangents live at different geodesics");
  }

 private:
  GeodesicPointPtr base_;
  Vector X_;
  Vector Y_;
  Bivector bivector_;
};

inline GeodesicPointPtr make_geodesic(SignatureSpace space, Vector x, Vector y) {
  return std::make_shared<const GeodesicPoint>(space, std::move(x), std::move(y));
}

// Frame E_i = x ^ e_i, E_{n+i} = y ^ e_i with G(E_a, E_a) = (eps_i, eps eps_i).
struct TangentFrame {
  std::vector<TangentAtGeodesic> vectors;
  std::vector<int> signs;
};

inline TangentFrame frame_E(const GeodesicPointPtr& base) {
  TangentFrame f;
  const int n = base->n();
  const auto& c = base->complement();
  const Vector zero = Vector::Zero(base->space().dim());
  for (int i = 0; i < n; ++i) {
    f.vectors.emplace_back(base, c.vectors[static_cast<std::size_t>(i)], zero);
    f.signs.push_back(c.signs[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < n; ++i) {
    f.vectors.emplace_back(base, zero, c.vectors[static_cast<std::size_t>(i)]);
    f.signs.push_back(base->eps() * c.signs[static_cast<std::size_t>(i)]);
  }
  return f;
}

// Coordinates of T on frame_E(base).
inline Vector frame_coords(const TangentAtGeodesic& T) {
  const auto& b = *T.base();
  const int n = b.n();
  Vector c(2 * n);
  for (int i = 0; i < n; ++i) {
    const auto& e = b.complement().vectors[static_cast<std::size_t>(i)];
    const int s = b.complement().signs[static_cast<std::size_t>(i)];
    c[i] = s * inner(b.space(), T.X(), e);
    c[n + i] = s * inner(b.space(), T.Y(), e);
  }
  return c;
}

inline double metric_G(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  a.require_same_base(b);
  return wedge_inner(a.base()->space(), a.bivector(), b.bivector());
}

// J(x ^ X + y ^ Y) = y ^ X - eps x ^ Y.
inline TangentAtGeodesic apply_J(const TangentAtGeodesic& t) {
  return {t.base(), -static_cast<double>(t.base()->eps()) * t.Y(), t.X(), 1e300};
}

inline TangentAtGeodesic apply_Jprime(const TangentAtGeodesic& t) {
  const Matrix jp = t.base()->complement_Jprime();
  return {t.base(), jp * t.X(), jp * t.Y(), 1e300};
}

inline TangentAtGeodesic apply_Jsecond(const TangentAtGeodesic& t) { return apply_J(apply_Jprime(t)); }

inline double metric_Gprime(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  a.require_same_base(b);
  return -a.base()->eps() * metric_G(a, apply_Jprime(apply_J(b)));
}

inline double omega(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  return a.base()->eps() * metric_G(apply_J(a), b);
}

// The same form assembled from (J', G').
inline double omega_prime(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  return a.base()->eps_prime() * metric_Gprime(apply_Jprime(a), b);
}

// h(v^V, w^W) = -<v,w><V,W> xbar + varpi(v,w) V^W with varpi = eps <J.,.>;
// on x ^ X1 + y ^ Y1 and x ^ X2 + y ^ Y2 this is
// -(<X1,X2> + eps <Y1,Y2>) xbar + X1 ^ Y2 - Y1 ^ X2.
inline Bivector second_fund_iota(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  a.require_same_base(b);
  const auto& base = *a.base();
  const auto& s = base.space();
  const double coef = -(inner(s, a.X(), b.X()) + base.eps() * inner(s, a.Y(), b.Y()));
  return coef * base.bivector() + wedge(a.X(), b.Y()) - wedge(a.Y(), b.X());
}

// G(R(a,b)c, d) from the Gauss equation in the flat ambient Lambda^2.
inline double riemann_G(const TangentAtGeodesic& a, const TangentAtGeodesic& b, const TangentAtGeodesic& c,
                        const TangentAtGeodesic& d) {
  const auto& s = a.base()->space();
  return wedge_inner(s, second_fund_iota(a, c), second_fund_iota(b, d)) -
         wedge_inner(s, second_fund_iota(a, d), second_fund_iota(b, c));
}

// ---------------------------------------------------------------------------
// Curvature tensors in the E frame.

class Tensor4 {
 public:
  explicit Tensor4(int m = 0) : m_(m), v_(static_cast<std::size_t>(m * m * m * m), 0.0) {}
  double& operator()(int a, int b, int c, int d) { return v_[index(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return v_[index(a, b, c, d)]; }
  [[nodiscard]] int dim() const noexcept { return m_; }
  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }
  [[nodiscard]] std::span<const double> values() const noexcept { return v_; }

 private:
  [[nodiscard]] std::size_t index(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * m_ + b) * m_ + c) * m_ + d);
  }
  int m_;
  std::vector<double> v_;
};

// Kulkarni-Nomizu product of symmetric bilinear forms.
inline Tensor4 kulkarni_nomizu(const Matrix& h, const Matrix& k) {
  const int m = static_cast<int>(h.rows());
  Tensor4 t(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
          t(a, b, c, d) = h(a, c) * k(b, d) + h(b, d) * k(a, c) - h(a, d) * k(b, c) - h(b, c) * k(a, d);
  return t;
}

struct MetricCurvature {
  Matrix metric;   // Gram matrix on the E frame
  Tensor4 riemann; // (a,b,c,d) -> metric(R(E_a,E_b)E_c, E_d)
  Matrix ricci;
  double scalar = 0.0;
  Tensor4 weyl;
};

namespace detail {

inline MetricCurvature finish_curvature(Matrix metric, Tensor4 riemann) {
  const int m = riemann.dim();
  const Matrix inv = metric.inverse();
  Matrix ric = Matrix::Zero(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      double acc = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) acc += inv(a, b) * riemann(x, a, y, b);
      ric(x, y) = acc;
    }
  const double scalar = (inv.cwiseProduct(ric)).sum();
  // W = R - (Ric - S g / (2(m-1))) o g / (m-2).
  const Matrix schouten = (ric - scalar / (2.0 * (m - 1)) * metric) / (m - 2.0);
  const Tensor4 kn = kulkarni_nomizu(schouten, metric);
  Tensor4 weyl(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) weyl(a, b, c, d) = riemann(a, b, c, d) - kn(a, b, c, d);
  return {std::move(metric), std::move(riemann), std::move(ric), scalar, std::move(weyl)};
}

}  // namespace detail

inline MetricCurvature curvature_G(const GeodesicPointPtr& base) {
  const TangentFrame f = frame_E(base);
  const int m = static_cast<int>(f.vectors.size());
  std::vector<Bivector> h;
  h.reserve(static_cast<std::size_t>(m * m));
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) h.push_back(second_fund_iota(f.vectors[static_cast<std::size_t>(a)], f.vectors[static_cast<std::size_t>(c)]));
  const auto H = [&](int a, int c) -> const Bivector& { return h[static_cast<std::size_t>(a * m + c)]; };
  const auto& s = base->space();
  Tensor4 R(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
          R(a, b, c, d) = wedge_inner(s, H(a, c), H(b, d)) - wedge_inner(s, H(a, d), H(b, c));
  Matrix G(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) G(a, b) = metric_G(f.vectors[static_cast<std::size_t>(a)], f.vectors[static_cast<std::size_t>(b)]);
  return detail::finish_curvature(std::move(G), std::move(R));
}

// G' shares the Levi-Civita connection of G, so
// G'(R(a,b)c, d) = -eps G(R(a,b)c, J'J d).
inline MetricCurvature curvature_Gprime(const GeodesicPointPtr& base) {
  base->require_surface_case();
  const MetricCurvature g = curvature_G(base);
  const TangentFrame f = frame_E(base);
  const int m = static_cast<int>(f.vectors.size());
  // Matrix of J'J on the frame: column d holds the coordinates of J'J E_d.
  Matrix jpj(m, m);
  for (int d = 0; d < m; ++d) jpj.col(d) = frame_coords(apply_Jprime(apply_J(f.vectors[static_cast<std::size_t>(d)])));
  const int eps = base->eps();
  Tensor4 R(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          double acc = 0.0;
          for (int e = 0; e < m; ++e) acc += g.riemann(a, b, c, e) * jpj(e, d);
          R(a, b, c, d) = -eps * acc;
        }
  Matrix Gp(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) Gp(a, b) = metric_Gprime(f.vectors[static_cast<std::size_t>(a)], f.vectors[static_cast<std::size_t>(b)]);
  return detail::finish_curvature(std::move(Gp), std::move(R));
}

namespace detail {

inline double contract4(const Tensor4& t, const TangentAtGeodesic& a, const TangentAtGeodesic& b,
                        const TangentAtGeodesic& c, const TangentAtGeodesic& d) {
  a.require_same_base(b);
  a.require_same_base(c);
  a.require_same_base(d);
  const Vector ca = frame_coords(a), cb = frame_coords(b), cc = frame_coords(c), cd = frame_coords(d);
  const int m = t.dim();
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) acc += t(i, j, k, l) * ca[i] * cb[j] * cc[k] * cd[l];
  return acc;
}

inline double contract2(const Matrix& t, const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  a.require_same_base(b);
  return frame_coords(a).dot(t * frame_coords(b));
}

}  // namespace detail

inline double ricci_G(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  return detail::contract2(curvature_G(a.base()).ricci, a, b);
}
inline double scalar_G(const GeodesicPointPtr& base) { return curvature_G(base).scalar; }
inline double weyl_G(const TangentAtGeodesic& a, const TangentAtGeodesic& b, const TangentAtGeodesic& c,
                     const TangentAtGeodesic& d) {
  return detail::contract4(curvature_G(a.base()).weyl, a, b, c, d);
}
inline double riemann_Gprime(const TangentAtGeodesic& a, const TangentAtGeodesic& b, const TangentAtGeodesic& c,
                             const TangentAtGeodesic& d) {
  return detail::contract4(curvature_Gprime(a.base()).riemann, a, b, c, d);
}
inline double ricci_Gprime(const TangentAtGeodesic& a, const TangentAtGeodesic& b) {
  return detail::contract2(curvature_Gprime(a.base()).ricci, a, b);
}
inline double scalar_Gprime(const GeodesicPointPtr& base) { return curvature_Gprime(base).scalar; }
inline double weyl_Gprime(const TangentAtGeodesic& a, const TangentAtGeodesic& b, const TangentAtGeodesic& c,
                          const TangentAtGeodesic& d) {
  return detail::contract4(curvature_Gprime(a.base()).weyl, a, b, c, d);
}

// ---------------------------------------------------------------------------
// Structure descriptor for n = 2.

enum class StructureType { complex, para };

constexpr std::string_view to_string(StructureType t) { return t == StructureType::complex ? "complex" : "para"; }

struct StructureDescriptor {
  int eps = 1;
  int eps_prime = 1;
  std::array<int, 4> signature{};
  StructureType J = StructureType::complex;
  StructureType Jprime = StructureType::complex;
  StructureType Jsecond = StructureType::complex;

  friend bool operator==(const StructureDescriptor&, const StructureDescriptor&) = default;
};

struct StructureTableRow {
  int p;
  int sign;
  std::string_view space_form;
  std::string_view geodesic_space;
  StructureDescriptor expected;
};

// Published reference table for the six three-dimensional cases.
inline constexpr std::array<StructureTableRow, 6> kReferenceStructureTable{{
    {0, 1, "S3", "L(S3)", {1, 1, {1, 1, 1, 1}, StructureType::complex, StructureType::complex, StructureType::para}},
    {1, 1, "dS3", "L+(dS3)", {1, -1, {1, -1, 1, -1}, StructureType::complex, StructureType::para, StructureType::complex}},
    {1, -1, "dS3", "L-(dS3)", {-1, -1, {1, 1, -1, -1}, StructureType::para, StructureType::complex, StructureType::complex}},
    {2, 1, "AdS3", "L+(AdS3)", {1, 1, {-1, -1, -1, -1}, StructureType::complex, StructureType::complex, StructureType::para}},
    {2, -1, "AdS3", "L-(AdS3)", {-1, -1, {1, -1, -1, 1}, StructureType::para, StructureType::para, StructureType::para}},
    {3, -1, "H3", "L-(H3)", {-1, 1, {-1, -1, 1, 1}, StructureType::para, StructureType::complex, StructureType::complex}},
}};

// True when L^sign(X^{n+1}_{p,1}) contains a geodesic.
inline bool geodesic_space_nonempty(int n, int p, int sign) {
  const int q = n + 2 - p;
  return sign > 0 ? q >= 2 : (q >= 1 && p >= 1);
}

// A canonical geodesic of the requested type: x spacelike, y of sign `sign`.
// Random geodesic of the requested causal type, rejection-sampled from
// Gaussian coordinates.
template <class Engine>
GeodesicPointPtr random_geodesic(const SpaceForm& sf, int sign, Engine& engine) {
  require_sign(sign);
  if (!geodesic_space_nonempty(sf.n(), sf.p(), sign)) {
    throw GeoError(ErrorKind::empty_space, "no geodesics of the requested causal type");
  }
  const SignatureSpace s = sf.space();
  std::normal_distribution<double> normal;
  auto draw = [&] {
    Vector v(s.dim());
    for (int k = 0; k < s.dim(); ++k) v[k] = normal(engine);
    return v;
  };
  for (;;) {
    Vector x = draw();
    const double xx = inner(s, x, x);
    if (xx < 0.05 * x.squaredNorm()) continue;
    x /= std::sqrt(xx);
    Vector y = draw();
    y -= inner(s, y, x) * x;
    const double yy = inner(s, y, y);
    if (yy * sign < 0.05 * y.squaredNorm()) continue;
    y /= std::sqrt(std::abs(yy));
    return make_geodesic(s, x, y);
  }
}

inline GeodesicPointPtr canonical_geodesic(const SpaceForm& sf, int sign) {
  require_sign(sign);
  const int dim = sf.n() + 2;
  const int p = sf.p();
  if (!geodesic_space_nonempty(sf.n(), p, sign)) {
    throw GeoError(ErrorKind::empty_space, "no geodesics of the requested causal type");
  }
  const Vector x = Vector::Unit(dim, dim - 1);
  const Vector y = sign > 0 ? Vector::Unit(dim, dim - 2) : Vector::Unit(dim, 0);
  return make_geodesic(sf.space(), x, y);
}

namespace detail {

inline StructureType square_type(const std::function<TangentAtGeodesic(const TangentAtGeodesic&)>& op,
                                 const TangentFrame& f) {
  // op^2 = -Id -> complex, +Id -> para.
  double minus = 0.0, plus = 0.0;
  for (const auto& v : f.vectors) {
    const Vector sq = frame_coords(op(op(v)));
    const Vector id = frame_coords(v);
    minus = std::max(minus, (sq + id).cwiseAbs().maxCoeff());
    plus = std::max(plus, (sq - id).cwiseAbs().maxCoeff());
  }
  if (minus < 1e-10) return StructureType::complex;
  if (plus < 1e-10) return StructureType::para;
  throw GeoError(ErrorKind::invalid_argument, "structure squares to neither -Id nor +Id");
}

}  // namespace detail

inline StructureDescriptor structure_descriptor(const GeodesicPointPtr& base) {
  base->require_surface_case();
  StructureDescriptor d;
  d.eps = base->eps();
  d.eps_prime = base->eps_prime();
  // Spacelike complement vector first, matching the table's listing.
  const auto& c = base->complement();
  std::array<int, 2> s{c.signs[0], c.signs[1]};
  if (s[0] < s[1]) std::swap(s[0], s[1]);
  d.signature = {s[0], s[1], d.eps * s[0], d.eps * s[1]};
  const TangentFrame f = frame_E(base);
  d.J = detail::square_type(apply_J, f);
  d.Jprime = detail::square_type(apply_Jprime, f);
  d.Jsecond = detail::square_type(apply_Jsecond, f);
  return d;
}

inline StructureDescriptor structure_table(const SpaceForm& sf, int sign) {
  if (sf.n() != 2) throw GeoError(ErrorKind::unsupported_dimension, "the structure table covers n = 2");
  return structure_descriptor(canonical_geodesic(sf, sign));
}

// ---------------------------------------------------------------------------
// Closedness of omega on local charts of L.

// Exponential via scaling and squaring with a Taylor series; generic over
// double and Jet entries.
template <class T>
SmallMatrix<T> matrix_exp(const SmallMatrix<T>& a) {
  const int n = a.rows();
  double norm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) norm = std::max(norm, std::abs(value_of(a(i, j))));
  int squarings = 0;
  while (norm * n > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  const SmallMatrix<T> scaled = std::ldexp(1.0, -squarings) * a;
  SmallMatrix<T> result = SmallMatrix<T>::identity(n);
  SmallMatrix<T> term = SmallMatrix<T>::identity(n);
  for (int k = 1; k <= 18; ++k) {
    term = (1.0 / k) * (term * scaled);
    result = result + term;
  }
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

struct ChartSample {
  std::vector<Jet> x;
  std::vector<Jet> y;
  std::vector<std::vector<Jet>> frame;  // optional oriented complement frame
};

// Local chart of L: jets of the chart variables -> jets of (x, y[, frame]).
using GeodesicChart = std::function<ChartSample(std::span<const Jet>)>;

// s -> exp(M(s)) applied to (x, y, e_i), with
// M(s) = sum_i a_i (x ^ e_i)^# + b_i (y ^ e_i)^#, an element of so(p,q).
inline GeodesicChart exponential_chart(const GeodesicPointPtr& base) {
  return [base](std::span<const Jet> s) {
    const auto& space = base->space();
    const int dim = space.dim();
    const int n = base->n();
    if (static_cast<int>(s.size()) != 2 * n) throw GeoError(ErrorKind::invalid_argument, "chart expects 2n variables");
    SmallMatrix<Jet> M(dim, dim);
    for (int i = 0; i < n; ++i) {
      const Vector& e = base->complement().vectors[static_cast<std::size_t>(i)];
      const Matrix gx = bivector_operator(space, wedge(base->x(), e));
      const Matrix gy = bivector_operator(space, wedge(base->y(), e));
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
          M(r, c) += s[static_cast<std::size_t>(i)] * gx(r, c) + s[static_cast<std::size_t>(n + i)] * gy(r, c);
    }
    const SmallMatrix<Jet> E = matrix_exp(M);
    auto apply = [&](const Vector& v) {
      std::vector<Jet> out(static_cast<std::size_t>(dim));
      for (int r = 0; r < dim; ++r) {
        Jet acc(0.0);
        for (int c = 0; c < dim; ++c) acc += E(r, c) * v[c];
        out[static_cast<std::size_t>(r)] = acc;
      }
      return out;
    };
    ChartSample out{apply(base->x()), apply(base->y()), {}};
    for (const auto& e : base->complement().vectors) out.frame.push_back(apply(e));
    return out;
  };
}

enum class SymplecticSource { from_G, from_Gprime };

// Matrix of omega(d_a, d_b) on the coordinate vectors of a chart.
inline Matrix pulled_back_omega(const SignatureSpace& space, const GeodesicChart& chart, std::span<const double> s,
                                SymplecticSource source) {
  const auto vars = seed_variables(s, 1);
  const ChartSample sample = chart(vars);
  const int dim = space.dim();
  auto values = [&](const std::vector<Jet>& v) {
    Vector out(dim);
    for (int k = 0; k < dim; ++k) out[k] = v[static_cast<std::size_t>(k)].value();
    return out;
  };
  GeodesicPointPtr base;
  if (sample.frame.empty()) {
    base = std::make_shared<const GeodesicPoint>(space, values(sample.x), values(sample.y), 1e-8);
  } else {
    std::vector<Vector> frame;
    for (const auto& e : sample.frame) frame.push_back(values(e));
    base = std::make_shared<const GeodesicPoint>(space, values(sample.x), values(sample.y), std::move(frame), 1e-8);
  }
  const auto B = wedge_t<Jet>(sample.x, sample.y);
  const int m = static_cast<int>(s.size());
  std::vector<TangentAtGeodesic> tangents;
  for (int a = 0; a < m; ++a) {
    Vector c(static_cast<Eigen::Index>(B.size()));
    for (std::size_t k = 0; k < B.size(); ++k) c[static_cast<Eigen::Index>(k)] = B[k].d(a);
    tangents.push_back(TangentAtGeodesic::from_bivector(base, Bivector(dim, c)));
  }
  Matrix w(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const auto& ta = tangents[static_cast<std::size_t>(a)];
      const auto& tb = tangents[static_cast<std::size_t>(b)];
      w(a, b) = source == SymplecticSource::from_G ? omega(ta, tb) : omega_prime(ta, tb);
    }
  return w;
}

// Field of 2-form components on R^m.
using FormField = std::function<Matrix(std::span<const double>)>;

// max |d omega(d_a, d_b, d_c)| with central differences of step h.
inline double closedness_residual(const FormField& field, std::span<const double> point, double h) {
  const int m = static_cast<int>(point.size());
  std::vector<Matrix> plus, minus;
  for (int a = 0; a < m; ++a) {
    std::vector<double> s(point.begin(), point.end());
    s[static_cast<std::size_t>(a)] += h;
    plus.push_back(field(s));
    s[static_cast<std::size_t>(a)] -= 2.0 * h;
    minus.push_back(field(s));
  }
  auto deriv = [&](int a, int b, int c) {
    return (plus[static_cast<std::size_t>(a)](b, c) - minus[static_cast<std::size_t>(a)](b, c)) / (2.0 * h);
  };
  double worst = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c)
        worst = std::max(worst, std::abs(deriv(a, b, c) - deriv(b, a, c) + deriv(c, a, b)));
  return worst;
}

inline double closedness_residual(const SignatureSpace& space, const GeodesicChart& chart,
                                  std::span<const double> point, double h,
                                  SymplecticSource source = SymplecticSource::from_G) {
  const FormField field = [&](std::span<const double> s) { return pulled_back_omega(space, chart, s, source); };
  return closedness_residual(field, point, h);
}

}  // namespace geocon
