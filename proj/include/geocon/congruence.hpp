#pragma once

// Normal congruence phi ^ N of a hypersurface as a Lagrangian submanifold of
// L^{+-}: induced metrics, cubic forms, Lagrangian angle, mean curvature
// vectors and the flatness / Weingarten and marginally trapped tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/geodesic_space.hpp"
#include "geocon/hypersurface.hpp"
#include "geocon/jet.hpp"
#include "geocon/pseudolinalg.hpp"

namespace geocon {

// plane_rotation over doubles or jets.
template <class T>
SmallMatrix<T> plane_rotation_generic(const SmallMatrix<T>& g) {
  using std::abs, std::sqrt;
  const T det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  const T root = sqrt(abs(det));
  const double c = (value_of(det) > 0 && value_of(g(0, 0)) < 0) ? -1.0 : 1.0;
  SmallMatrix<T> omega(2, 2);
  omega(0, 1) = root;
  omega(1, 0) = -root;
  return (-c) * (inverse(g) * omega);
}

// ---------------------------------------------------------------------------
// Gauss map.

inline GeodesicPointPtr gauss_point(const SignatureSpace& s, const PointGeometry& pg) {
  return make_geodesic(s, pg.phi, pg.normal);
}

// dphibar(d_i) = d_i phi ^ N + A d_i phi ^ phi, i.e. X = -A d_i phi, Y = -d_i phi.
inline std::vector<TangentAtGeodesic> gauss_differential(const GeodesicPointPtr& base, const PointGeometry& pg) {
  std::vector<TangentAtGeodesic> out;
  const auto n = static_cast<int>(pg.tangents.size());
  for (int i = 0; i < n; ++i) {
    Vector shape_image = Vector::Zero(pg.phi.size());
    for (int k = 0; k < n; ++k) shape_image += pg.shape(k, i) * pg.tangents[static_cast<std::size_t>(k)];
    out.emplace_back(base, -shape_image, -pg.tangents[static_cast<std::size_t>(i)]);
  }
  return out;
}

class GaussMap {
 public:
  explicit GaussMap(Immersion imm) : imm_(std::move(imm)) {
    if (imm_.space_form().eps_quadric() != 1) {
      throw GeoError(ErrorKind::invalid_argument, "Gauss map needs a hypersurface of the unit quadric");
    }
  }

  [[nodiscard]] const Immersion& source() const noexcept { return imm_; }

  [[nodiscard]] GeodesicPointPtr eval(std::span<const double> u) const {
    return gauss_point(imm_.space_form().space(), point_geometry(imm_, u));
  }

  [[nodiscard]] std::vector<TangentAtGeodesic> differential(std::span<const double> u) const {
    const auto pg = point_geometry(imm_, u);
    return gauss_differential(gauss_point(imm_.space_form().space(), pg), pg);
  }

 private:
  Immersion imm_;
};

inline double lagrangian_residual(const std::vector<TangentAtGeodesic>& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) worst = std::max(worst, std::abs(omega(d[i], d[j])));
  return worst;
}

inline double lagrangian_residual(const GaussMap& gm, std::span<const double> u) {
  return lagrangian_residual(gm.differential(u));
}

// ---------------------------------------------------------------------------
// Induced metrics.

inline Matrix gbar_formula(const PointGeometry& pg) {
  return pg.eps * pg.g + pg.shape.transpose() * pg.g * pg.shape;
}

inline Matrix gbar_pullback(const std::vector<TangentAtGeodesic>& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = metric_G(d[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(j)]);
  return m;
}

inline Matrix gbar_prime_formula(const PointGeometry& pg) {
  if (pg.g.rows() != 2) throw GeoError(ErrorKind::unsupported_dimension, "gbar' exists only for surfaces");
  const Matrix M = plane_rotation(pg.g);
  return pg.g * (pg.shape * M - M * pg.shape);
}

inline Matrix gbar_prime_pullback(const std::vector<TangentAtGeodesic>& d) {
  if (d.size() != 2) throw GeoError(ErrorKind::unsupported_dimension, "gbar' exists only for surfaces");
  Matrix m(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = metric_Gprime(d[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(j)]);
  return m;
}

struct PrimeSignature {
  std::string kind;          // indefinite, degenerate-umbilic, definite, degenerate-nondiagonal, unclassified
  bool degenerate = false;   // predicted from the shape class
  bool consistent = true;    // the matrix agrees with the prediction
};

inline PrimeSignature signature_report_prime(const PointGeometry& pg, const Matrix& gbar_prime, double tol = 1e-8) {
  PrimeSignature out;
  const double scale = std::max(1.0, pg.shape.cwiseAbs().maxCoeff()) * std::max(1.0, pg.g.cwiseAbs().maxCoeff());
  const double det = gbar_prime.determinant();
  const bool zero_det = std::abs(det) <= tol * scale * scale;
  if (!pg.classification) {
    out.kind = "unclassified";
    return out;
  }
  if (const auto* r = std::get_if<RealDiagonal>(&*pg.classification)) {
    if (r->umbilic) {
      out.kind = "degenerate-umbilic";
      out.degenerate = true;
      out.consistent = gbar_prime.cwiseAbs().maxCoeff() <= tol * scale;
    } else {
      out.kind = "indefinite";
      out.consistent = !zero_det && det < 0;
    }
  } else if (std::holds_alternative<ComplexDiagonal>(*pg.classification)) {
    out.kind = "definite";
    out.consistent = !zero_det && det > 0;
  } else if (std::holds_alternative<NonDiagonal>(*pg.classification)) {
    out.kind = "degenerate-nondiagonal";
    out.degenerate = true;
    out.consistent = zero_det;
  } else {
    out.kind = "unclassified";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cubic forms.

namespace detail {

inline double second_partial(const Jet& f, int i, int j) {
  std::array<int, kMaxJetVars> alpha{};
  ++alpha[static_cast<std::size_t>(i)];
  ++alpha[static_cast<std::size_t>(j)];
  return f.partial(std::span<const int>(alpha.data(), static_cast<std::size_t>(f.layout()->nvars())));
}

// d_i d_j (phi ^ N) as an ambient bivector.
inline Bivector second_derivative_bivector(const SurfaceJets& sj, int i, int j) {
  const auto dim = static_cast<Eigen::Index>(sj.phi.size());
  Vector phi(dim), N(dim), phi_i(dim), phi_j(dim), N_i(dim), N_j(dim), phi_ij(dim), N_ij(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto& p = sj.phi[static_cast<std::size_t>(c)];
    const auto& q = sj.normal[static_cast<std::size_t>(c)];
    phi[c] = p.value();
    N[c] = q.value();
    phi_i[c] = p.d(i);
    phi_j[c] = p.d(j);
    N_i[c] = q.d(i);
    N_j[c] = q.d(j);
    phi_ij[c] = second_partial(p, i, j);
    N_ij[c] = second_partial(q, i, j);
  }
  return wedge(phi_ij, N) + wedge(phi_j, N_i) + wedge(phi_i, N_j) + wedge(phi, N_ij);
}

}  // namespace detail

struct CubicForms {
  Tensor3 ambient;             // G(D_i dphibar_j, J dphibar_k)
  Tensor3 nabla;               // -eps (nabla_i h)(j, k)
  Tensor3 ambient_prime;       // G'(nabla_i dphibar_j, J' dphibar_k), n = 2
  double gap = 0.0;            // max |ambient - nabla|
  double trisymmetry = 0.0;    // max over index swaps of the ambient form
};

inline double trisymmetry_residual(const Tensor3& t) {
  const int n = t.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        worst = std::max(worst, std::abs(t(a, b, c) - t(b, a, c)));
        worst = std::max(worst, std::abs(t(a, b, c) - t(a, c, b)));
      }
  return worst;
}

inline CubicForms cubic_forms(const SurfaceJets& sj, const ConnectionData& cd, const GeodesicPointPtr& base,
                              const std::vector<TangentAtGeodesic>& d) {
  if (sj.order < 3) throw GeoError(ErrorKind::invalid_argument, "cubic form needs jets of order >= 3");
  const int n = sj.g.rows();
  CubicForms out;
  out.ambient = Tensor3(n);
  out.nabla = Tensor3(n);
  std::vector<TangentAtGeodesic> Jd;
  for (const auto& x : d) Jd.push_back(apply_J(x));
  const bool surface = n == 2;
  std::vector<TangentAtGeodesic> Jpd;
  if (surface) {
    out.ambient_prime = Tensor3(n);
    for (const auto& x : d) Jpd.push_back(apply_Jprime(x));
  }
  const auto& s = base->space();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Bivector D = detail::second_derivative_bivector(sj, i, j);
      for (int k = 0; k < n; ++k) out.ambient(i, j, k) = wedge_inner(s, D, Jd[static_cast<std::size_t>(k)].bivector());
      if (surface) {
        const auto tangential = TangentAtGeodesic::from_bivector(base, D);
        for (int k = 0; k < n; ++k) out.ambient_prime(i, j, k) = metric_Gprime(tangential, Jpd[static_cast<std::size_t>(k)]);
      }
      for (int k = 0; k < n; ++k) out.nabla(i, j, k) = -sj.eps * cd.nabla_h(i, j, k);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out.gap = std::max(out.gap, std::abs(out.ambient(i, j, k) - out.nabla(i, j, k)));
  out.trisymmetry = trisymmetry_residual(out.ambient);
  return out;
}

// ---------------------------------------------------------------------------
// Lagrangian angle, n = 2: beta = -arctan_eps(2H / (1 - eps K)).

struct LagrangianAngle {
  std::optional<double> value;   // empty at the eps = -1 pole
  std::vector<double> gradient;  // d beta in coordinates
  bool pole = false;
};

inline LagrangianAngle lagrangian_angle(const SurfaceJets& sj) {
  if (sj.g.rows() != 2) throw GeoError(ErrorKind::unsupported_dimension, "closed-form Lagrangian angle is for surfaces");
  const int eps = sj.eps;
  const auto& A = sj.shape;
  const Jet H = 0.5 * (A(0, 0) + A(1, 1));
  const Jet K = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const Jet x = 1.0 - eps * K;
  const Jet y = 2.0 * H;
  LagrangianAngle out;
  const double xv = x.value(), yv = y.value();
  const double denom = xv * xv + eps * yv * yv;
  const double scale = std::max(1.0, xv * xv + yv * yv);
  if (eps < 0 && std::abs(denom) <= 1e-12 * scale) {
    out.pole = true;
    return out;
  }
  for (int l = 0; l < 2; ++l) out.gradient.push_back(-(xv * y.d(l) - yv * x.d(l)) / denom);
  if (eps > 0) {
    out.value = -std::atan2(yv, xv);
  } else {
    out.value = std::abs(yv) < std::abs(xv) ? -std::atanh(yv / xv) : -std::atanh(xv / yv);
  }
  return out;
}

// -sum arctan_eps(kappa_i) for real principal curvatures.
inline double lagrangian_angle_kappas(std::span<const double> kappas, int eps) {
  double b = 0.0;
  for (double k : kappas) b -= arctan_eps(eps, k);
  return b;
}

// ---------------------------------------------------------------------------
// Mean curvature vectors, as combinations sum_m c^m J dphibar_m.

inline TangentAtGeodesic combine(const std::vector<TangentAtGeodesic>& basis, const Vector& coeffs) {
  Vector X = Vector::Zero(basis.front().X().size());
  Vector Y = Vector::Zero(X.size());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    X += coeffs[static_cast<Eigen::Index>(m)] * basis[m].X();
    Y += coeffs[static_cast<Eigen::Index>(m)] * basis[m].Y();
  }
  return {basis.front().base(), X, Y, 1e300};
}

inline double frame_max_abs(const TangentAtGeodesic& t) { return frame_coords(t).cwiseAbs().maxCoeff(); }

// Trace of the second fundamental form for a metric G_sel whose normal space
// is spanned by the sel(dphibar) and G_sel(sel a, sel b) = sign G_sel(a, b).
inline Vector trace_mean_curvature(const Tensor3& cubic, const Matrix& metric, int sign) {
  const int n = cubic.dim();
  const Matrix inv = metric.inverse();
  Vector out = Vector::Zero(n);
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out[m] += inv(j, k) * sign * inv(m, l) * cubic(j, k, l);
  return out / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Per-point congruence geometry.

struct CongruenceOptions {
  int jet_order = 4;
  double tol = 1e-6;
};

struct CongruencePoint {
  PointGeometry geometry;
  GeodesicPointPtr point;
  std::vector<TangentAtGeodesic> differential;
  ConnectionData connection;

  double lagrangian = 0.0;
  Matrix gbar, gbar_pullback;
  double gbar_gap = 0.0;
  bool gbar_degenerate = false;
  std::optional<Matrix> gbar_prime, gbar_prime_pullback;
  double gbar_prime_gap = 0.0;
  std::optional<PrimeSignature> prime_signature;
  bool gbar_prime_degenerate = false;
  double omega_shared = 0.0;  // |eps' G'(J'a,b) - eps G(Ja,b)| on dphibar and J dphibar

  std::optional<CubicForms> hbar;  // empty when gbar is degenerate
  std::optional<LagrangianAngle> beta;

  std::optional<Vector> hvec_trace, hvec_beta;  // coefficients on J dphibar_m
  double hvec_gap = 0.0;
  double hvec_norm = 0.0;  // max |E-frame component|
  double hvec_G = 0.0;     // G(H, H)
  std::optional<double> nondiagonal_identity_gap;

  std::optional<Vector> hvec_prime;                // coefficients on J' dphibar_m
  std::optional<Vector> hvec_prime_display;        // the principal-frame closed form, same basis
  double hvec_prime_norm = 0.0;
  double hvec_prime_Gprime = 0.0;

  double codazzi = 0.0;
  double gauss = 0.0;
  std::optional<double> weingarten;        // |d kappa1 ^ d kappa2|, |dH ^ d lambda|, or |dH ^ dK| where kappas merge
  std::optional<double> curvature_gbar;    // Gauss curvature of gbar
  std::optional<double> curvature_gbar_prime;

  std::vector<std::string> notes;
};

namespace detail {

inline SmallMatrix<Jet> gbar_jets(const SurfaceJets& sj) {
  return static_cast<double>(sj.eps) * sj.g + sj.shape.transpose() * sj.g * sj.shape;
}

inline SmallMatrix<Jet> gbar_prime_jets(const SurfaceJets& sj) {
  const auto M = plane_rotation_generic(sj.g);
  return sj.g * (sj.shape * M - M * sj.shape);
}

// dH ^ dK / sqrt|det g|, converted to principal or complex coordinates.
inline double weingarten_residual(const SurfaceJets& sj, double tol) {
  const auto& A = sj.shape;
  const Jet H = 0.5 * (A(0, 0) + A(1, 1));
  const Jet K = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const Matrix g = sj.g.values();
  const double wedge = (H.d(0) * K.d(1) - H.d(1) * K.d(0)) / std::sqrt(std::abs(g.determinant()));
  const double disc = H.value() * H.value() - K.value();
  const double scale = std::max(1.0, H.value() * H.value() + std::abs(K.value()));
  if (std::abs(disc) <= tol * scale) return std::abs(wedge);  // umbilic or non-diagonalizable: plain dH ^ dK
  if (disc > 0) return std::abs(wedge / std::sqrt(disc));  // |d kappa1 ^ d kappa2| = |dH ^ dK| / sqrt(disc)
  return std::abs(wedge / (2.0 * std::sqrt(-disc)));         // |dH ^ d lambda|
}

}  // namespace detail

inline CongruencePoint congruence_point(const Immersion& imm, std::span<const double> u,
                                        const CongruenceOptions& opts = {}) {
  if (imm.space_form().eps_quadric() != 1) {
    throw GeoError(ErrorKind::invalid_argument, "Gauss map needs a hypersurface of the unit quadric");
  }
  const int order = std::max(3, opts.jet_order);
  const auto sj = surface_jets(imm, u, order);
  const int n = imm.n();
  CongruencePoint cp;
  cp.geometry = point_geometry_from(sj, u);
  const auto& pg = cp.geometry;
  const auto& space = imm.space_form().space();
  cp.point = gauss_point(space, pg);
  cp.differential = gauss_differential(cp.point, pg);
  cp.connection = connection_data_from(sj);
  const auto& d = cp.differential;

  cp.codazzi = cp.connection.codazzi_residual;
  if (n == 2) cp.gauss = gauss_check_from(sj, imm.space_form().eps_quadric()).residual;
  cp.lagrangian = lagrangian_residual(d);
  cp.gbar = gbar_formula(pg);
  cp.gbar_pullback = gbar_pullback(d);
  cp.gbar_gap = (cp.gbar - cp.gbar_pullback).cwiseAbs().maxCoeff();
  cp.gbar_degenerate = is_degenerate(cp.gbar);

  const bool surface = n == 2;
  if (surface) {
    cp.gbar_prime = gbar_prime_formula(pg);
    cp.gbar_prime_pullback = gbar_prime_pullback(d);
    cp.gbar_prime_gap = (*cp.gbar_prime - *cp.gbar_prime_pullback).cwiseAbs().maxCoeff();
    cp.prime_signature = signature_report_prime(pg, *cp.gbar_prime);
    cp.gbar_prime_degenerate = cp.prime_signature->degenerate || is_degenerate(*cp.gbar_prime);
    const int eps = pg.eps;
    const int eps_prime = cp.point->eps_prime();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto& a = d[static_cast<std::size_t>(i)];
        const auto b = apply_J(d[static_cast<std::size_t>(j)]);
        for (const auto* x : {&a, &b}) {
          for (const auto* y : {&a, &b}) {
            const double lhs = eps_prime * metric_Gprime(apply_Jprime(*x), *y);
            const double rhs = eps * metric_G(apply_J(*x), *y);
            cp.omega_shared = std::max(cp.omega_shared, std::abs(lhs - rhs));
          }
        }
      }
  }

  if (cp.gbar_degenerate) {
    cp.notes.emplace_back("gbar degenerate: second fundamental form undefined");
  } else {
    cp.hbar = cubic_forms(sj, cp.connection, cp.point, d);
    std::vector<TangentAtGeodesic> Jd;
    for (const auto& x : d) Jd.push_back(apply_J(x));
    cp.hvec_trace = trace_mean_curvature(cp.hbar->ambient, cp.gbar, pg.eps);
    const auto hv = combine(Jd, *cp.hvec_trace);
    cp.hvec_norm = frame_max_abs(hv);
    cp.hvec_G = metric_G(hv, hv);
    if (surface) {
      cp.beta = lagrangian_angle(sj);
      if (cp.beta->pole) {
        cp.notes.emplace_back("Lagrangian angle at the arctan_eps pole");
      } else {
        const Vector grad = Eigen::Map<const Vector>(cp.beta->gradient.data(), 2);
        cp.hvec_beta = (static_cast<double>(pg.eps) / n) * (cp.gbar.inverse() * grad);
        cp.hvec_gap = (*cp.hvec_trace - *cp.hvec_beta).cwiseAbs().maxCoeff();
      }
      if (const auto* nd = pg.classification ? std::get_if<NonDiagonal>(&*pg.classification) : nullptr) {
        // G(2H, J dphibar(e2)) = -2 e2(H) / (1 + eps H^2) in the null frame.
        const Jet Hj = 0.5 * (sj.shape(0, 0) + sj.shape(1, 1));
        const Vector e2 = nd->frame.col(1);
        const double e2H = e2[0] * Hj.d(0) + e2[1] * Hj.d(1);
        Vector c(2);
        c << e2[0], e2[1];
        const auto Je2 = apply_J(combine(d, c));
        const double lhs = 2.0 * metric_G(hv, Je2);
        const double rhs = -2.0 * e2H / (1.0 + pg.eps * nd->H * nd->H);
        cp.nondiagonal_identity_gap = std::abs(lhs - rhs);
      }
    }
  }

  if (surface && !cp.gbar_prime_degenerate && !cp.gbar_degenerate) {
    const int eps_prime = cp.point->eps_prime();
    cp.hvec_prime = trace_mean_curvature(cp.hbar->ambient_prime, *cp.gbar_prime, eps_prime);
    std::vector<TangentAtGeodesic> Jpd;
    for (const auto& x : d) Jpd.push_back(apply_Jprime(x));
    const auto hp = combine(Jpd, *cp.hvec_prime);
    cp.hvec_prime_norm = frame_max_abs(hp);
    cp.hvec_prime_Gprime = metric_Gprime(hp, hp);
    if (cp.connection.principal) {
      // -eps / (2 (k2 - k1)^2) (eps1 e1(k2) J'E1 + eps2 e2(k1) J'E2), E_i = dphibar(e_i)
      const auto& pf = *cp.connection.principal;
      const double gap = pf.kappas[1] - pf.kappas[0];
      const double pre = -pg.eps / (2.0 * gap * gap);
      Vector principal(2);
      principal << pre * pf.signs[0] * pf.e_kappa(0, 1), pre * pf.signs[1] * pf.e_kappa(1, 0);
      cp.hvec_prime_display = pf.frame * principal;
    }
  } else if (surface) {
    cp.notes.emplace_back(cp.connection.umbilic ? "gbar' degenerate at an umbilic point"
                                                : "gbar' degenerate (non-diagonalizable shape operator)");
  }

  if (surface && order >= 4) {
    cp.weingarten = detail::weingarten_residual(sj, 1e-9);
    try {
      cp.curvature_gbar = sectional_curvature(detail::gbar_jets(sj));
    } catch (const GeoError&) {
    }
    if (!cp.gbar_prime_degenerate) {
      try {
        cp.curvature_gbar_prime = sectional_curvature(detail::gbar_prime_jets(sj));
      } catch (const GeoError&) {
      }
    }
  }
  return cp;
}

}  // namespace geocon
