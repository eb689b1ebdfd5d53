#pragma once

// Parametrized hypersurfaces phi : U -> X^{n+1}_{p,1}: fundamental forms,
// shape operator, Levi-Civita data, parallel families and the search for a
// minimal parallel surface.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/jet.hpp"
#include "geocon/pseudolinalg.hpp"
#include "geocon/spaceform.hpp"

namespace geocon {

// Axis-aligned parameter rectangle; periodic axes wrap at hi.
struct Domain {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> periodic;

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(lo.size()); }

  void validate() const {
    if (lo.size() != hi.size() || lo.size() != periodic.size() || lo.empty()) {
      throw GeoError(ErrorKind::invalid_argument, "domain bounds and periodic flags disagree in size");
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(hi[i] > lo[i])) throw GeoError(ErrorKind::invalid_argument, "domain axis has hi <= lo");
    }
  }
};

// Sample coordinates along one axis: periodic axes omit the endpoint.
inline std::vector<double> axis_samples(const Domain& d, int axis, int count) {
  if (count < 2) throw GeoError(ErrorKind::invalid_argument, "need at least two samples per axis");
  const auto a = static_cast<std::size_t>(axis);
  const double span = d.hi[a] - d.lo[a];
  const double step = d.periodic[a] ? span / count : span / (count - 1);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = d.lo[a] + k * step;
  return out;
}

// Row-major grid of parameter points (last axis fastest).
inline std::vector<std::vector<double>> grid_points(const Domain& d, std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != d.dim()) throw GeoError(ErrorKind::invalid_argument, "grid rank mismatch");
  std::vector<std::vector<double>> axes;
  for (int a = 0; a < d.dim(); ++a) axes.push_back(axis_samples(d, a, counts[static_cast<std::size_t>(a)]));
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    next.reserve(out.size() * axis.size());
    for (const auto& prefix : out)
      for (double x : axis) {
        auto p = prefix;
        p.push_back(x);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

// u -> jets of the n+2 ambient components in the n parameters.
using JetMap = std::function<std::vector<Jet>(std::span<const double>, int)>;

class Immersion {
 public:
  Immersion(SpaceForm sf, Domain domain, JetMap map, std::string name = "immersion")
      : sf_(sf), domain_(std::move(domain)), map_(std::move(map)), name_(std::move(name)) {
    domain_.validate();
    if (domain_.dim() != sf_.n()) throw GeoError(ErrorKind::invalid_argument, "domain rank must equal n");
    if (sf_.n() > kMaxJetVars) throw GeoError(ErrorKind::unsupported_dimension, "too many parameters for jets");
  }

  // Wrap a generic callable F(span<const Jet>) -> vector<Jet>.
  template <class F>
  static Immersion from_function(SpaceForm sf, Domain domain, F f, std::string name = "immersion") {
    JetMap map = [f = std::move(f)](std::span<const double> u, int order) {
      const auto vars = seed_variables(u, order);
      return f(std::span<const Jet>(vars));
    };
    return {sf, std::move(domain), std::move(map), std::move(name)};
  }

  [[nodiscard]] const SpaceForm& space_form() const noexcept { return sf_; }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] int n() const noexcept { return sf_.n(); }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  [[nodiscard]] std::vector<Jet> eval(std::span<const double> u, int order) const {
    if (static_cast<int>(u.size()) != n()) throw GeoError(ErrorKind::invalid_argument, "parameter point has wrong rank");
    if (order < 0 || order > kMaxJetOrder) throw GeoError(ErrorKind::invalid_argument, "jet order out of range");
    auto out = map_(u, order);
    if (static_cast<int>(out.size()) != n() + 2) {
      throw GeoError(ErrorKind::invalid_argument, "immersion must have n+2 components");
    }
    const JetLayout& layout = JetLayout::get(n(), order);
    for (auto& c : out) {
      if (c.is_constant()) c = Jet::constant(layout, c.value());
    }
    return out;
  }

  [[nodiscard]] Vector value(std::span<const double> u) const {
    const auto jets = eval(u, 0);
    Vector v(static_cast<Eigen::Index>(jets.size()));
    for (std::size_t i = 0; i < jets.size(); ++i) v[static_cast<Eigen::Index>(i)] = jets[i].value();
    return v;
  }

 private:
  SpaceForm sf_;
  Domain domain_;
  JetMap map_;
  std::string name_;
};

// Largest |<phi,phi> - eps_quadric| over the points.
inline double quadric_defect(const Immersion& imm, const std::vector<std::vector<double>>& pts) {
  const auto s = imm.space_form().space();
  double worst = 0.0;
  for (const auto& u : pts) {
    const Vector x = imm.value(u);
    worst = std::max(worst, std::abs(inner(s, x, x) - imm.space_form().eps_quadric()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Jet-level frame of the immersion.

struct SurfaceJets {
  int order = 0;                         // order of phi
  std::vector<Jet> phi;                  // order k
  std::vector<std::vector<Jet>> dphi;    // [i][c], order k-1
  std::vector<Jet> normal;               // order k-1
  int eps = 1;                           // <N,N>
  SmallMatrix<Jet> g;                    // order k-1
  SmallMatrix<Jet> h;                    // order k-2
  SmallMatrix<Jet> shape;                // A = g^-1 h, order k-2
};

namespace detail {

template <class T>
T inner_generic(const SignatureSpace& s, const std::vector<T>& a, const std::vector<T>& b) {
  T acc(0.0);
  for (int i = 0; i < s.dim(); ++i) acc += static_cast<double>(s.sigma(i)) * (a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)]);
  return acc;
}

// Unit normal to span(phi, d_1 phi, ..., d_n phi), oriented so that
// det(phi, d_1 phi, ..., d_n phi, N) > 0.
template <class T>
std::pair<std::vector<T>, int> oriented_normal(const SignatureSpace& s, const std::vector<T>& phi,
                                               const std::vector<std::vector<T>>& dphi) {
  const int dim = s.dim();
  std::vector<const std::vector<T>*> cols{&phi};
  for (const auto& d : dphi) cols.push_back(&d);
  // Cofactors of the last column of [phi, dphi..., w].
  std::vector<T> cof(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    SmallMatrix<T> minor(dim - 1, dim - 1);
    for (int r = 0, rr = 0; r < dim; ++r) {
      if (r == k) continue;
      for (int c = 0; c < dim - 1; ++c) minor(rr, c) = (*cols[static_cast<std::size_t>(c)])[static_cast<std::size_t>(r)];
      ++rr;
    }
    const double sign = ((k + dim - 1) % 2 == 0) ? 1.0 : -1.0;
    cof[static_cast<std::size_t>(k)] = sign * determinant(minor);
  }
  std::vector<T> raised(cof.size());
  double scale = 0.0;
  for (int k = 0; k < dim; ++k) {
    raised[static_cast<std::size_t>(k)] = static_cast<double>(s.sigma(k)) * cof[static_cast<std::size_t>(k)];
    scale += value_of(cof[static_cast<std::size_t>(k)]) * value_of(cof[static_cast<std::size_t>(k)]);
  }
  const T nn = inner_generic(s, raised, raised);
  if (scale == 0.0 || std::abs(value_of(nn)) <= 1e-8 * scale) {
    throw GeoError(ErrorKind::null_normal, "normal direction is null");
  }
  const int eps = value_of(nn) > 0 ? 1 : -1;
  using std::sqrt, std::abs;
  const T len = sqrt(abs(nn));
  for (auto& c : raised) c = (static_cast<double>(eps) * c) / len;
  return {raised, eps};
}

inline void require_nondegenerate(const Matrix& g) {
  if (is_degenerate(g)) throw GeoError(ErrorKind::degenerate_metric, "induced metric is degenerate");
}

}  // namespace detail

inline SurfaceJets surface_jets(const Immersion& imm, std::span<const double> u, int order) {
  if (order < 2) throw GeoError(ErrorKind::invalid_argument, "surface jets need order >= 2");
  const auto s = imm.space_form().space();
  const int n = imm.n();
  SurfaceJets sj;
  sj.order = order;
  sj.phi = imm.eval(u, order);
  sj.dphi.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i)
    for (const auto& c : sj.phi) sj.dphi[static_cast<std::size_t>(i)].push_back(c.derivative(i));
  sj.g = SmallMatrix<Jet>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sj.g(i, j) = detail::inner_generic(s, sj.dphi[static_cast<std::size_t>(i)], sj.dphi[static_cast<std::size_t>(j)]);
  detail::require_nondegenerate(sj.g.values());
  auto [normal, eps] = detail::oriented_normal(s, sj.phi, sj.dphi);
  sj.normal = std::move(normal);
  sj.eps = eps;
  sj.h = SmallMatrix<Jet>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<Jet> second;
      for (const auto& c : sj.dphi[static_cast<std::size_t>(i)]) second.push_back(c.derivative(j));
      sj.h(i, j) = detail::inner_generic(s, second, sj.normal);
    }
  sj.shape = inverse(sj.g) * sj.h;
  return sj;
}

// ---------------------------------------------------------------------------
// Pointwise geometry.

struct PointGeometry {
  std::vector<double> u;
  Vector phi;
  std::vector<Vector> tangents;  // d_i phi
  Vector normal;
  int eps = 1;
  Matrix g;
  Matrix shape;  // A in the coordinate frame: dN = -dphi o A
  Matrix h;
  double H = 0.0;  // tr A / n
  double K = 0.0;  // det A
  std::optional<ShapeClassification> classification;
};

namespace detail {
inline Vector to_vector(const std::vector<Jet>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].value();
  return out;
}
}  // namespace detail

inline PointGeometry point_geometry_from(const SurfaceJets& sj, std::span<const double> u, double tol = 1e-7) {
  PointGeometry pg;
  pg.u.assign(u.begin(), u.end());
  pg.phi = detail::to_vector(sj.phi);
  for (const auto& d : sj.dphi) pg.tangents.push_back(detail::to_vector(d));
  pg.normal = detail::to_vector(sj.normal);
  pg.eps = sj.eps;
  pg.g = sj.g.values();
  pg.h = sj.h.values();
  pg.h = (0.5 * (pg.h + pg.h.transpose())).eval();
  pg.shape = sj.shape.values();
  const auto n = pg.g.rows();
  pg.H = pg.shape.trace() / static_cast<double>(n);
  pg.K = pg.shape.determinant();
  if (n == 2) {
    pg.classification = classify_shape(pg.g, pg.shape, tol);
  } else {
    pg.classification = classify_operator(pg.g, pg.shape, tol);
  }
  return pg;
}

inline PointGeometry point_geometry(const Immersion& imm, std::span<const double> u, double tol = 1e-7) {
  return point_geometry_from(surface_jets(imm, u, 2), u, tol);
}

// ---------------------------------------------------------------------------
// Levi-Civita data.

// Dense n x n x n array.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n * n * n), 0.0) {}
  [[nodiscard]] int dim() const noexcept { return n_; }
  double& operator()(int a, int b, int c) { return v_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return v_[index(a, b, c)]; }
  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }
  [[nodiscard]] std::span<const double> values() const noexcept { return v_; }

 private:
  [[nodiscard]] std::size_t index(int a, int b, int c) const {
    return static_cast<std::size_t>((a * n_ + b) * n_ + c);
  }
  int n_ = 0;
  std::vector<double> v_;
};

// Christoffel symbols Gamma[k](i,j) = Gamma^k_ij as jets one order below g.
inline std::vector<SmallMatrix<Jet>> christoffel_jets(const SmallMatrix<Jet>& g) {
  const int n = g.rows();
  const SmallMatrix<Jet> ginv = inverse(g);
  std::vector<SmallMatrix<Jet>> dg;
  for (int a = 0; a < n; ++a) {
    SmallMatrix<Jet> m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(i, j).derivative(a);
    dg.push_back(std::move(m));
  }
  std::vector<SmallMatrix<Jet>> gamma(static_cast<std::size_t>(n), SmallMatrix<Jet>(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet acc(0.0);
        for (int l = 0; l < n; ++l) {
          const Jet first = dg[static_cast<std::size_t>(i)](l, j) + dg[static_cast<std::size_t>(j)](l, i) -
                            dg[static_cast<std::size_t>(l)](i, j);
          acc += ginv(k, l) * first;
        }
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * acc;
      }
  return gamma;
}

// R(d_1, d_2, d_2, d_1) = g(R(d_1,d_2)d_2, d_1) divided by det g: the
// sectional curvature of a 2-dimensional metric given as jets of order >= 2.
inline double sectional_curvature(const SmallMatrix<Jet>& g) {
  if (g.rows() != 2) throw GeoError(ErrorKind::unsupported_dimension, "sectional curvature needs a 2x2 metric");
  const auto gamma = christoffel_jets(g);
  const Matrix gv = g.values();
  // R^l_{kij} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik with
  // i=1, j=2, k=2 (0-based i=0, j=1, k=1).
  auto G = [&](int l, int a, int b) { return gamma[static_cast<std::size_t>(l)](a, b); };
  double r0 = 0.0;
  for (int l = 0; l < 2; ++l) {
    double rl = G(l, 1, 1).d(0) - G(l, 0, 1).d(1);
    for (int m = 0; m < 2; ++m) rl += G(l, 0, m).value() * G(m, 1, 1).value() - G(l, 1, m).value() * G(m, 0, 1).value();
    r0 += gv(l, 0) * rl;
  }
  return r0 / gv.determinant();
}

struct PrincipalFrameData {
  Matrix frame;                 // columns e_1, e_2 in coordinates
  std::array<int, 2> signs{};   // g(e_i, e_i)
  std::array<double, 2> kappas{};
  Matrix e_kappa;               // (i, j) = e_i(kappa_j)
  Tensor3 omega;                // omega(i,j,k) = g(nabla_{e_i} e_j, e_k)
  double codazzi_residual = 0.0;
};

struct ConnectionData {
  std::vector<Matrix> christoffel;  // christoffel[k](i,j) = Gamma^k_ij
  Tensor3 nabla_h;                  // (nabla_{d_i} h)(d_j, d_k)
  double codazzi_residual = 0.0;    // max |(nabla_i h)_jk - (nabla_j h)_ik|
  bool umbilic = false;
  std::optional<PrincipalFrameData> principal;
  std::string note;
};

namespace detail {

inline bool umbilic_kappas(double k1, double k2) {
  return std::abs(k1 - k2) < 1e-7 * std::max(1.0, std::abs(k1) + std::abs(k2));
}

// Principal curvatures and frame as jets, following the ordering and
// orientation rules of classify_shape's real case.
struct PrincipalJets {
  std::array<Jet, 2> kappa;
  std::array<std::array<Jet, 2>, 2> frame;  // frame[i][a]: component a of e_i
  std::array<int, 2> signs{};
};

inline PrincipalJets principal_jets(const SmallMatrix<Jet>& g, const SmallMatrix<Jet>& A) {
  const Jet half = 0.5 * (A(0, 0) + A(1, 1));
  const Jet det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const Jet disc = 4.0 * (half * half) - 4.0 * det;
  const Jet root = sqrt(disc);
  PrincipalJets pj;
  std::array<Jet, 2> k{half - 0.5 * root, half + 0.5 * root};
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    SmallMatrix<Jet> M = A;
    M(0, 0) -= k[ii];
    M(1, 1) -= k[ii];
    const double n0 = std::hypot(M(0, 0).value(), M(0, 1).value());
    const double n1 = std::hypot(M(1, 0).value(), M(1, 1).value());
    const int row = n0 >= n1 ? 0 : 1;
    std::array<Jet, 2> v{-M(row, 1), M(row, 0)};
    const Jet nn = v[0] * (g(0, 0) * v[0] + g(0, 1) * v[1]) + v[1] * (g(1, 0) * v[0] + g(1, 1) * v[1]);
    const Jet len = sqrt(abs(nn));
    pj.frame[ii] = {v[0] / len, v[1] / len};
    pj.signs[ii] = nn.value() > 0 ? 1 : -1;
    pj.kappa[ii] = k[ii];
  }
  if (pj.signs[0] != pj.signs[1] && pj.signs[0] > 0) {
    std::swap(pj.frame[0], pj.frame[1]);
    std::swap(pj.signs[0], pj.signs[1]);
    std::swap(pj.kappa[0], pj.kappa[1]);
  }
  const double orient = pj.frame[0][0].value() * pj.frame[1][1].value() - pj.frame[0][1].value() * pj.frame[1][0].value();
  if (orient < 0) pj.frame[1] = {-pj.frame[1][0], -pj.frame[1][1]};
  return pj;
}

}  // namespace detail

inline ConnectionData connection_data_from(const SurfaceJets& sj) {
  if (sj.order < 3) throw GeoError(ErrorKind::invalid_argument, "connection data needs jets of order >= 3");
  const int n = sj.g.rows();
  ConnectionData cd;
  const auto gamma = christoffel_jets(sj.g);
  for (const auto& gk : gamma) cd.christoffel.push_back(gk.values());
  cd.nabla_h = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = sj.h(j, k).d(i);
        for (int l = 0; l < n; ++l) {
          v -= cd.christoffel[static_cast<std::size_t>(l)](i, j) * sj.h(l, k).value();
          v -= cd.christoffel[static_cast<std::size_t>(l)](i, k) * sj.h(j, l).value();
        }
        cd.nabla_h(i, j, k) = v;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        cd.codazzi_residual = std::max(cd.codazzi_residual, std::abs(cd.nabla_h(i, j, k) - cd.nabla_h(j, i, k)));

  if (n != 2) return cd;
  const Matrix A = sj.shape.values();
  const double half = 0.5 * A.trace();
  const double disc = half * half - A.determinant();
  if (disc < 0.0 && (A - half * Matrix::Identity(2, 2)).norm() > 1e-7 * std::max(1.0, A.norm())) {
    cd.note = "shape operator is not real diagonalizable";
    return cd;
  }
  const double root = std::sqrt(std::max(0.0, disc));
  if (detail::umbilic_kappas(half - root, half + root)) {
    cd.umbilic = true;
    cd.note = "umbilic point: principal frame undefined";
    return cd;
  }
  const Matrix gv = sj.g.values();
  if (disc <= 1e-14 * std::max(1.0, A.squaredNorm())) {
    cd.note = "shape operator is not diagonalizable";
    return cd;
  }
  const auto pj = detail::principal_jets(sj.g, sj.shape);
  PrincipalFrameData pf;
  pf.frame.resize(2, 2);
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    pf.frame(0, i) = pj.frame[ii][0].value();
    pf.frame(1, i) = pj.frame[ii][1].value();
    pf.kappas[ii] = pj.kappa[ii].value();
    pf.signs[ii] = pj.signs[ii];
  }
  pf.e_kappa.resize(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double v = 0.0;
      for (int a = 0; a < 2; ++a) v += pf.frame(a, i) * pj.kappa[static_cast<std::size_t>(j)].d(a);
      pf.e_kappa(i, j) = v;
    }
  // nabla_{e_i} e_j = e_i^a (d_a e_j^c + Gamma^c_ab e_j^b) d_c.
  pf.omega = Tensor3(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Vector cov = Vector::Zero(2);
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a) {
          double inner_term = pj.frame[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)].d(a);
          for (int b = 0; b < 2; ++b) inner_term += cd.christoffel[static_cast<std::size_t>(c)](a, b) * pf.frame(b, j);
          cov[c] += pf.frame(a, i) * inner_term;
        }
      for (int k = 0; k < 2; ++k) pf.omega(i, j, k) = cov.dot(gv * pf.frame.col(k));
    }
  // (kappa_j - kappa_i) omega^j_{ji} = eps_j e_i(kappa_j) for i != j.
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const auto ji = static_cast<std::size_t>(j);
    const double lhs = (pf.kappas[ji] - pf.kappas[static_cast<std::size_t>(i)]) * pf.omega(j, j, i);
    const double rhs = pf.signs[ji] * pf.e_kappa(i, j);
    pf.codazzi_residual = std::max(pf.codazzi_residual, std::abs(lhs - rhs));
  }
  cd.principal = std::move(pf);
  return cd;
}

inline ConnectionData connection_data(const Immersion& imm, std::span<const double> u) {
  return connection_data_from(surface_jets(imm, u, 3));
}

struct GaussCheck {
  double intrinsic = 0.0;  // g(R(e1,e2)e2,e1) in a g-orthonormal frame
  double extrinsic = 0.0;  // eps'(eps_q + eps K)
  double residual = 0.0;
};

inline GaussCheck gauss_check_from(const SurfaceJets& sj, int eps_quadric) {
  if (sj.g.rows() != 2) throw GeoError(ErrorKind::unsupported_dimension, "Gauss relation is checked for surfaces");
  if (sj.order < 3) throw GeoError(ErrorKind::invalid_argument, "Gauss relation needs jets of order >= 3");
  const Matrix gv = sj.g.values();
  const int eps_prime = gv.determinant() > 0 ? 1 : -1;
  const double K = sj.shape.values().determinant();
  GaussCheck gc;
  gc.intrinsic = eps_prime * sectional_curvature(sj.g);
  gc.extrinsic = eps_prime * (eps_quadric + sj.eps * K);
  gc.residual = std::abs(gc.intrinsic - gc.extrinsic);
  return gc;
}

inline double gauss_residual(const Immersion& imm, std::span<const double> u) {
  return gauss_check_from(surface_jets(imm, u, 3), imm.space_form().eps_quadric()).residual;
}

// ---------------------------------------------------------------------------
// Parallel families.

inline Matrix shape_parallel(const Matrix& A, double t, int eps) {
  const EpsTrig trig(eps);
  const double c = trig.cos(t);
  const double s = trig.sin(t);
  const auto n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix denom = c * I - s * A;
  const double det = denom.determinant();
  if (std::abs(det) <= 1e-12 * std::max(1.0, std::pow(denom.norm(), static_cast<double>(n)))) {
    throw GeoError(ErrorKind::singular_parallel, "cos_eps(t) Id - sin_eps(t) A is singular (det " + std::to_string(det) + ")");
  }
  return (c * A + (eps * s) * I) * denom.inverse();
}

namespace detail {

// Jets of (phi, N) at the given order, computed from phi at order+1.
inline std::pair<std::vector<Jet>, std::vector<Jet>> point_and_normal(const Immersion& imm, std::span<const double> u,
                                                                      int order, int& eps) {
  const auto s = imm.space_form().space();
  const auto phi = imm.eval(u, order + 1);
  std::vector<std::vector<Jet>> dphi(static_cast<std::size_t>(imm.n()));
  for (int i = 0; i < imm.n(); ++i)
    for (const auto& c : phi) dphi[static_cast<std::size_t>(i)].push_back(c.derivative(i));
  auto [normal, e] = oriented_normal(s, phi, dphi);
  eps = e;
  std::vector<Jet> p;
  for (const auto& c : phi) p.push_back(c.truncated(order));
  return {p, normal};
}

}  // namespace detail

// phi_t = cos_eps(t) phi + sin_eps(t) N.
inline Immersion parallel(const Immersion& imm, double t) {
  auto base = std::make_shared<const Immersion>(imm);
  JetMap map = [base, t](std::span<const double> u, int order) {
    int eps = 1;
    auto [phi, normal] = detail::point_and_normal(*base, u, order, eps);
    const EpsTrig trig(eps);
    std::vector<Jet> out;
    for (std::size_t i = 0; i < phi.size(); ++i) out.push_back(trig.cos(t) * phi[i] + trig.sin(t) * normal[i]);
    return out;
  };
  return {imm.space_form(), imm.domain(), std::move(map), imm.name() + "-parallel"};
}

// N_t = cos_eps(t) N - eps sin_eps(t) phi, lying in X_{p, eps}.
inline Immersion polar(const Immersion& imm, double t = 0.0) {
  auto base = std::make_shared<const Immersion>(imm);
  std::vector<double> center;
  for (int a = 0; a < imm.n(); ++a) {
    center.push_back(0.5 * (imm.domain().lo[static_cast<std::size_t>(a)] + imm.domain().hi[static_cast<std::size_t>(a)]));
  }
  int eps = 1;
  (void)detail::point_and_normal(imm, center, 0, eps);
  JetMap map = [base, t](std::span<const double> u, int order) {
    int e = 1;
    auto [phi, normal] = detail::point_and_normal(*base, u, order, e);
    const EpsTrig trig(e);
    std::vector<Jet> out;
    for (std::size_t i = 0; i < phi.size(); ++i) out.push_back(trig.cos(t) * normal[i] - (e * trig.sin(t)) * phi[i]);
    return out;
  };
  const SpaceForm& sf = imm.space_form();
  return {SpaceForm(sf.n(), sf.p(), eps), imm.domain(), std::move(map), imm.name() + "-polar"};
}

struct MinimalParallel {
  double t0 = 0.0;
  bool on_polar = false;
  double ratio = 0.0;        // 2H/(K - eps), signed; infinite in the C = infinity branch
  bool infinite_ratio = false;
  std::string branch;        // "arctan", "arctanh", "arccoth" or "minimal"
  double max_trace = 0.0;    // max |tr A_{t0}| over the samples
};

namespace detail {

// Shape operator of the polar member N_t with respect to phi_t.
inline Matrix shape_polar(const Matrix& A, double t, int eps) {
  const EpsTrig trig(eps);
  const double c = trig.cos(t);
  const double s = trig.sin(t);
  const auto n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix denom = c * A + (eps * s) * I;
  const double det = denom.determinant();
  if (std::abs(det) <= 1e-12 * std::max(1.0, std::pow(denom.norm(), static_cast<double>(n)))) {
    throw GeoError(ErrorKind::singular_parallel, "polar member is not immersed (det " + std::to_string(det) + ")");
  }
  return (c * I - s * A) * denom.inverse();
}

}  // namespace detail

inline MinimalParallel find_minimal_parallel(const Immersion& imm, const std::vector<std::vector<double>>& samples,
                                             double tol = 1e-6) {
  if (imm.n() != 2) throw GeoError(ErrorKind::unsupported_dimension, "minimal parallel search is for surfaces");
  if (samples.empty()) throw GeoError(ErrorKind::invalid_argument, "no samples");
  std::vector<Matrix> shapes;
  int eps = 0;
  double hmax = 0.0;
  std::vector<double> ratios;
  int infinite = 0;
  for (const auto& u : samples) {
    const auto pg = point_geometry(imm, u);
    if (eps == 0) eps = pg.eps;
    if (pg.eps != eps) throw GeoError(ErrorKind::invalid_argument, "normal changes causal character");
    shapes.push_back(pg.shape);
    hmax = std::max(hmax, std::abs(pg.H));
    const double den = pg.K - eps;
    if (std::abs(den) <= tol * std::max(1.0, std::abs(pg.H))) {
      if (std::abs(pg.H) <= tol) {
        ratios.push_back(0.0);
      } else {
        ++infinite;
      }
    } else {
      ratios.push_back(2.0 * pg.H / den);
    }
  }
  MinimalParallel out;
  if (hmax <= tol) {
    out.branch = "minimal";
    return out;
  }
  if (infinite > 0 && !ratios.empty()) throw GeoError(ErrorKind::not_weingarten, "Weingarten ratio is not constant");
  if (infinite == 0) {
    const auto [lo, hi] = std::ranges::minmax(ratios);
    if (hi - lo > tol * std::max(1.0, std::abs(hi))) {
      throw GeoError(ErrorKind::not_weingarten,
                     "Weingarten ratio is not constant (range " + std::to_string(lo) + " .. " + std::to_string(hi) + ")");
    }
    out.ratio = 0.5 * (lo + hi);
  } else {
    out.infinite_ratio = true;
    out.ratio = std::numeric_limits<double>::infinity();
  }
  const double C = std::abs(out.ratio);
  if (eps < 0 && !out.infinite_ratio && std::abs(C - 1.0) <= tol) {
    throw GeoError(ErrorKind::excluded_case, "(eps, C) = (-1, 1) is excluded");
  }

  auto trace_at = [&](double t, bool on_polar) {
    double worst = 0.0;
    for (const auto& A : shapes) {
      const Matrix At = on_polar ? detail::shape_polar(A, t, eps) : shape_parallel(A, t, eps);
      worst = std::max(worst, std::abs(At.trace()));
    }
    return worst;
  };

  std::vector<double> candidates;
  if (eps > 0) {
    out.branch = "arctan";
    const double base = out.infinite_ratio ? std::numbers::pi / 4 : 0.5 * std::atan(out.ratio);
    for (int k = -2; k <= 2; ++k) candidates.push_back(base + k * std::numbers::pi / 2);
    std::ranges::sort(candidates, [](double a, double b) { return std::abs(a) < std::abs(b); });
  } else if (C < 1.0 && !out.infinite_ratio) {
    out.branch = "arctanh";
    candidates.push_back(0.5 * std::atanh(out.ratio));
  } else {
    out.branch = "arccoth";
    out.on_polar = true;
    candidates.push_back(out.infinite_ratio ? 0.0 : 0.5 * acoth(out.ratio));
  }
  std::string last_failure = "no immersive member";
  for (double t : candidates) {
    try {
      const double tr = trace_at(t, out.on_polar);
      if (tr > tol) {
        last_failure = "trace " + std::to_string(tr) + " at t = " + std::to_string(t);
        continue;
      }
      out.t0 = t;
      out.max_trace = tr;
      return out;
    } catch (const GeoError& e) {
      if (e.kind() != ErrorKind::singular_parallel) throw;
      last_failure = e.what();
    }
  }
  throw GeoError(ErrorKind::singular_family, "no minimal immersed member of the parallel family: " + last_failure);
}

}  // namespace geocon
