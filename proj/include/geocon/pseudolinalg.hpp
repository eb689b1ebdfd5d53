#pragma once

// Signature-aware linear algebra on R^{dim} with the form
//   <x,y>_p = -sum_{i<=p} x_i y_i + sum_{i>p} x_i y_i,
// bivectors on the lexicographic basis {e_i ^ e_j, i<j}, and the canonical
// forms of 2x2 g-symmetric operators.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/jet.hpp"

namespace geocon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SignatureSpace {
 public:
  SignatureSpace(int dim, int p) : dim_(dim), p_(p) {
    if (dim < 1 || p < 0 || p > dim) throw GeoError(ErrorKind::invalid_argument, "signature out of range");
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int p() const noexcept { return p_; }
  // sigma_k = -1 for the leading p coordinates (0-based k).
  [[nodiscard]] int sigma(int k) const noexcept { return k < p_ ? -1 : 1; }
  [[nodiscard]] Vector sigma_vector() const {
    Vector s(dim_);
    for (int k = 0; k < dim_; ++k) s[k] = sigma(k);
    return s;
  }
  [[nodiscard]] Matrix metric() const { return sigma_vector().asDiagonal(); }

  friend bool operator==(const SignatureSpace&, const SignatureSpace&) = default;

 private:
  int dim_;
  int p_;
};

inline void require_dim(const SignatureSpace& s, Eigen::Index n, const char* what) {
  if (n != s.dim()) throw GeoError(ErrorKind::invalid_argument, std::string(what) + ": dimension mismatch");
}

inline double inner(const SignatureSpace& s, const Vector& x, const Vector& y) {
  require_dim(s, x.size(), "inner");
  require_dim(s, y.size(), "inner");
  double acc = 0.0;
  for (int k = 0; k < s.dim(); ++k) acc += s.sigma(k) * x[k] * y[k];
  return acc;
}

// Same form on generic scalar sequences (used with jets).
template <class T>
T inner_t(const SignatureSpace& s, std::span<const T> x, std::span<const T> y) {
  T acc(0.0);
  for (int k = 0; k < s.dim(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (s.sigma(k) < 0) acc -= x[kk] * y[kk];
    else acc += x[kk] * y[kk];
  }
  return acc;
}

inline int pair_count(int dim) { return dim * (dim - 1) / 2; }

// Position of e_i ^ e_j (i<j, 0-based) in the lexicographic basis.
inline int pair_index(int dim, int i, int j) { return i * dim - i * (i + 1) / 2 + (j - i - 1); }

class Bivector {
 public:
  explicit Bivector(int dim) : dim_(dim), coords_(Vector::Zero(pair_count(dim))) {}
  Bivector(int dim, Vector coords) : dim_(dim), coords_(std::move(coords)) {
    if (coords_.size() != pair_count(dim)) throw GeoError(ErrorKind::invalid_argument, "bivector size");
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const Vector& coords() const noexcept { return coords_; }
  Vector& coords() noexcept { return coords_; }

  // Coefficient of e_i ^ e_j for any ordered pair (antisymmetric extension).
  [[nodiscard]] double at(int i, int j) const {
    if (i == j) return 0.0;
    return i < j ? coords_[pair_index(dim_, i, j)] : -coords_[pair_index(dim_, j, i)];
  }

  // Antisymmetric matrix M with M_ij = coefficient of e_i ^ e_j.
  [[nodiscard]] Matrix to_matrix() const {
    Matrix m = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = i + 1; j < dim_; ++j) {
        m(i, j) = coords_[pair_index(dim_, i, j)];
        m(j, i) = -m(i, j);
      }
    }
    return m;
  }

  static Bivector from_matrix(const Matrix& m) {
    const int dim = static_cast<int>(m.rows());
    Bivector b(dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) b.coords_[pair_index(dim, i, j)] = 0.5 * (m(i, j) - m(j, i));
    }
    return b;
  }

  Bivector& operator+=(const Bivector& o) {
    coords_ += o.coords_;
    return *this;
  }
  Bivector& operator-=(const Bivector& o) {
    coords_ -= o.coords_;
    return *this;
  }
  Bivector& operator*=(double s) {
    coords_ *= s;
    return *this;
  }
  friend Bivector operator+(Bivector a, const Bivector& b) { return a += b; }
  friend Bivector operator-(Bivector a, const Bivector& b) { return a -= b; }
  friend Bivector operator*(double s, Bivector a) { return a *= s; }
  friend Bivector operator*(Bivector a, double s) { return a *= s; }
  friend Bivector operator-(Bivector a) { return a *= -1.0; }

 private:
  int dim_;
  Vector coords_;
};

inline Bivector wedge(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw GeoError(ErrorKind::invalid_argument, "wedge: dimension mismatch");
  const int dim = static_cast<int>(x.size());
  Bivector b(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) b.coords()[pair_index(dim, i, j)] = x[i] * y[j] - x[j] * y[i];
  }
  return b;
}

template <class T>
std::vector<T> wedge_t(std::span<const T> x, std::span<const T> y) {
  const int dim = static_cast<int>(x.size());
  std::vector<T> b(static_cast<std::size_t>(pair_count(dim)));
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const auto ii = static_cast<std::size_t>(i);
      const auto jj = static_cast<std::size_t>(j);
      b[static_cast<std::size_t>(pair_index(dim, i, j))] = x[ii] * y[jj] - x[jj] * y[ii];
    }
  }
  return b;
}

inline double wedge_inner(const SignatureSpace& s, const Bivector& a, const Bivector& b) {
  if (a.dim() != s.dim() || b.dim() != s.dim()) {
    throw GeoError(ErrorKind::invalid_argument, "wedge_inner: dimension mismatch");
  }
  double acc = 0.0;
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = i + 1; j < s.dim(); ++j) {
      const int k = pair_index(s.dim(), i, j);
      acc += s.sigma(i) * s.sigma(j) * a.coords()[k] * b.coords()[k];
    }
  }
  return acc;
}

template <class T>
T wedge_inner_t(const SignatureSpace& s, std::span<const T> a, std::span<const T> b) {
  T acc(0.0);
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = i + 1; j < s.dim(); ++j) {
      const auto k = static_cast<std::size_t>(pair_index(s.dim(), i, j));
      if (s.sigma(i) * s.sigma(j) < 0) acc -= a[k] * b[k];
      else acc += a[k] * b[k];
    }
  }
  return acc;
}

// Action of the derivation extension of a linear map L on a bivector:
// L(u ^ w) = (Lu) ^ w + u ^ (Lw).
inline Bivector derivation(const Matrix& L, const Bivector& b) {
  const Matrix m = b.to_matrix();
  return Bivector::from_matrix(L * m + m * L.transpose());
}

// The map v -> <x,v> y - <y,v> x associated with x ^ y, as a matrix.
inline Matrix bivector_operator(const SignatureSpace& s, const Bivector& b) {
  // (x^y)(v) = sum_ij M_ij e_i... with M_ij = x_i y_j - x_j y_i gives
  // v -> sum_{ij} M_ij sigma_i v_i e_j.
  return b.to_matrix().transpose() * s.metric();
}

struct Frame {
  std::vector<Vector> vectors;
  std::vector<int> signs;
};

inline double det_columns(const std::vector<Vector>& cols) {
  Matrix m(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = cols[k];
  return m.determinant();
}

// Orthonormal basis of span(x,y)^perp. Vectors are chosen greedily by the
// largest |<w,w>| among the projected coordinate axes; the last vector is
// flipped when needed so that (x, y, e_1, ..., e_n) is positively oriented.
inline Frame orthonormal_complement(const SignatureSpace& s, const Vector& x, const Vector& y) {
  require_dim(s, x.size(), "orthonormal_complement");
  require_dim(s, y.size(), "orthonormal_complement");
  const double gxx = inner(s, x, x), gxy = inner(s, x, y), gyy = inner(s, y, y);
  const double det = gxx * gyy - gxy * gxy;
  const double scale = std::max({std::abs(gxx), std::abs(gyy), std::abs(gxy), 1e-300});
  if (std::abs(det) < 1e-10 * scale * scale) {
    throw GeoError(ErrorKind::degenerate_subspace, "span(x,y) is degenerate");
  }
  std::vector<Vector> basis{x, y};
  std::vector<double> norms{gxx, gyy};
  // Orthogonalise y against x first when they are not orthogonal.
  if (std::abs(gxy) > 0.0) {
    if (std::abs(gxx) > 1e-12 * scale) {
      basis[1] = y - (gxy / gxx) * x;
      norms[1] = inner(s, basis[1], basis[1]);
    } else {
      // x null: replace the pair by an orthogonal basis of the same plane.
      const Vector a = x + y * (gxx - gyy >= 0 ? 1.0 : 1.0);
      const Vector b = x - y;
      basis = {a, b - (inner(s, a, b) / inner(s, a, a)) * a};
      norms = {inner(s, basis[0], basis[0]), inner(s, basis[1], basis[1])};
    }
  }
  auto project = [&](Vector w) {
    for (std::size_t k = 0; k < basis.size(); ++k) w -= (inner(s, w, basis[k]) / norms[k]) * basis[k];
    return w;
  };
  std::vector<Vector> candidates;
  for (int k = 0; k < s.dim(); ++k) candidates.push_back(project(Vector::Unit(s.dim(), k)));
  Frame frame;
  const int n = s.dim() - 2;
  for (int step = 0; step < n; ++step) {
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double v = std::abs(inner(s, candidates[k], candidates[k]));
      if (v > best_val + 1e-12) {
        best_val = v;
        best = k;
      }
    }
    if (best_val < 1e-12) throw GeoError(ErrorKind::degenerate_subspace, "complement has no non-null vector");
    const double nn = inner(s, candidates[best], candidates[best]);
    const Vector e = candidates[best] / std::sqrt(std::abs(nn));
    const int sign = nn > 0 ? 1 : -1;
    frame.vectors.push_back(e);
    frame.signs.push_back(sign);
    for (auto& c : candidates) c -= (inner(s, c, e) * sign) * e;
  }
  std::vector<Vector> cols{x, y};
  cols.insert(cols.end(), frame.vectors.begin(), frame.vectors.end());
  if (n > 0 && det_columns(cols) < 0) frame.vectors.back() = -frame.vectors.back();
  return frame;
}

// ---------------------------------------------------------------------------
// Small dense matrices over a generic scalar (double or Jet).

template <class T>
class SmallMatrix {
 public:
  SmallMatrix() = default;
  SmallMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), T(0.0)) {}

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

  static SmallMatrix identity(int n) {
    SmallMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  [[nodiscard]] SmallMatrix transpose() const {
    SmallMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  [[nodiscard]] Matrix values() const {
    Matrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = value_of((*this)(i, j));
    return m;
  }

  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
    SmallMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        T acc(0.0);
        for (int k = 0; k < a.cols_; ++k) acc += a(i, k) * b(k, j);
        c(i, j) = acc;
      }
    return c;
  }
  friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }
  friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
    return a;
  }
  friend SmallMatrix operator*(double s, SmallMatrix a) {
    for (auto& x : a.a_) x = x * s;
    return a;
  }
  friend SmallMatrix operator*(const T& s, SmallMatrix a)
    requires(!std::is_same_v<T, double>)
  {
    for (auto& x : a.a_) x = x * s;
    return a;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> a_;
};

namespace detail {

// Laplace expansion along the first row; exact for jets whose values vanish.
template <class T>
T laplace_determinant(const SmallMatrix<T>& m) {
  const int n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  T det(0.0);
  SmallMatrix<T> minor(n - 1, n - 1);
  for (int c = 0; c < n; ++c) {
    for (int r = 1; r < n; ++r)
      for (int k = 0, kk = 0; k < n; ++k) {
        if (k == c) continue;
        minor(r - 1, kk++) = m(r, k);
      }
    const T term = m(0, c) * laplace_determinant(minor);
    if (c % 2 == 0) det += term; else det -= term;
  }
  return det;
}

}  // namespace detail

// Determinant: elimination with pivoting for doubles, Laplace expansion for
// jets (elimination would have to pivot on a jet with zero value).
template <class T>
T determinant(SmallMatrix<T> m) {
  if constexpr (!std::is_same_v<T, double>) {
    if (m.rows() == 0) return T(1.0);
    return detail::laplace_determinant(m);
  }
  const int n = m.rows();
  T det(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(m(r, c))) > std::abs(value_of(m(piv, c)))) piv = r;
    if (value_of(m(piv, c)) == 0.0) return T(0.0);
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      det = -det;
    }
    det = det * m(c, c);
    for (int r = c + 1; r < n; ++r) {
      const T f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

template <class T>
SmallMatrix<T> inverse(const SmallMatrix<T>& in) {
  const int n = in.rows();
  SmallMatrix<T> m = in;
  SmallMatrix<T> inv = SmallMatrix<T>::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(m(r, c))) > std::abs(value_of(m(piv, c)))) piv = r;
    if (value_of(m(piv, c)) == 0.0) throw GeoError(ErrorKind::degenerate_metric, "singular matrix");
    if (piv != c) {
      for (int j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    }
    const T d = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) = m(c, j) / d;
      inv(c, j) = inv(c, j) / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = m(r, c);
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

// Scale-free degeneracy test |det| < 1e-8 (max row norm)^n.
inline bool is_degenerate(const Matrix& g, double rel = 1e-8) {
  const double row = g.rowwise().norm().maxCoeff();
  if (row == 0.0) return true;
  return std::abs(g.determinant()) < rel * std::pow(row, static_cast<double>(g.rows()));
}

// ---------------------------------------------------------------------------
// Canonical forms of g-symmetric operators. Frames are columns expressed in
// the coordinate basis of the input matrices; A maps coordinates to
// coordinates (A e_j = sum_i A_ij e_i).

struct RealDiagonal {
  std::vector<double> kappas;
  Matrix frame;
  std::vector<int> signs;
  bool umbilic = false;
};

struct ComplexDiagonal {
  double H = 0.0;
  double lambda = 0.0;
  Matrix frame;  // columns e1 (timelike), e2 (spacelike)
};

// g = [[0,1],[1,0]] and A = [[H, sign],[0, H]] in the frame.
struct NonDiagonal {
  double H = 0.0;
  int sign = 1;
  Matrix frame;
};

struct Unclassified {
  std::string reason;
};

using ShapeClassification = std::variant<RealDiagonal, ComplexDiagonal, NonDiagonal, Unclassified>;

inline std::string_view class_name(const ShapeClassification& c) {
  switch (c.index()) {
    case 0: return "real";
    case 1: return "complex";
    case 2: return "nondiagonal";
    default: return "unclassified";
  }
}

namespace detail {

inline double frame_orientation(const Matrix& f) { return f.determinant(); }

// Orthonormal frame of a nondegenerate symmetric 2x2 form, timelike first
// when indefinite, positively oriented.
inline Matrix orthonormal_frame_2d(const Matrix& g, std::vector<int>& signs) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  Matrix f(2, 2);
  signs.assign(2, 1);
  for (int k = 0; k < 2; ++k) {
    const double ev = es.eigenvalues()[k];
    f.col(k) = es.eigenvectors().col(k) / std::sqrt(std::abs(ev));
    signs[static_cast<std::size_t>(k)] = ev > 0 ? 1 : -1;
  }
  if (frame_orientation(f) < 0) f.col(1) = -f.col(1);
  return f;
}

}  // namespace detail

inline ShapeClassification classify_shape(const Matrix& g, const Matrix& A, double tol) {
  if (g.rows() != 2 || g.cols() != 2 || A.rows() != 2 || A.cols() != 2) {
    throw GeoError(ErrorKind::invalid_argument, "classify_shape expects 2x2 matrices");
  }
  if (is_degenerate(g)) throw GeoError(ErrorKind::degenerate_metric, "g is degenerate");
  const Matrix h = g * A;
  const double anorm = A.norm();
  const double asym = (h - h.transpose()).norm();
  if (asym > tol * std::max(1.0, anorm * g.norm())) {
    throw GeoError(ErrorKind::invalid_argument, "A is not g-symmetric (" + std::to_string(asym) + ")");
  }
  const double tr = A.trace();
  const double det = A.determinant();
  const double disc = tr * tr - 4.0 * det;
  const double scale = std::max(1.0, anorm * anorm);
  const double half = 0.5 * tr;
  const bool umbilic = (A - half * Matrix::Identity(2, 2)).norm() <= tol * std::max(1.0, anorm);

  if (umbilic) {
    RealDiagonal r;
    r.frame = detail::orthonormal_frame_2d(g, r.signs);
    r.kappas = {half, half};
    r.umbilic = true;
    return r;
  }
  if (disc > tol * scale) {
    const double root = std::sqrt(disc);
    const std::array<double, 2> k{half - 0.5 * root, half + 0.5 * root};
    Matrix f(2, 2);
    std::vector<int> signs(2);
    for (int i = 0; i < 2; ++i) {
      const Matrix M = A - k[static_cast<std::size_t>(i)] * Matrix::Identity(2, 2);
      // Eigenvector from the row of largest norm of A - kappa Id.
      const int row = M.row(0).norm() >= M.row(1).norm() ? 0 : 1;
      Vector v(2);
      v << -M(row, 1), M(row, 0);
      const double nn = v.dot(g * v);
      f.col(i) = v / std::sqrt(std::abs(nn));
      signs[static_cast<std::size_t>(i)] = nn > 0 ? 1 : -1;
    }
    RealDiagonal r;
    r.kappas = {k[0], k[1]};
    // Timelike first when g is indefinite.
    if (signs[0] != signs[1] && signs[0] > 0) {
      f.col(0).swap(f.col(1));
      std::swap(signs[0], signs[1]);
      std::swap(r.kappas[0], r.kappas[1]);
    }
    if (detail::frame_orientation(f) < 0) f.col(1) = -f.col(1);
    r.frame = f;
    r.signs = signs;
    return r;
  }
  if (disc < -tol * scale) {
    std::vector<int> signs;
    Matrix f = detail::orthonormal_frame_2d(g, signs);
    if (signs[0] == signs[1]) {
      throw GeoError(ErrorKind::invalid_argument, "complex eigenvalues with a definite metric");
    }
    // Boost the Lorentz frame until the diagonal of A is balanced.
    const auto hform = [&](const Vector& a, const Vector& b) { return a.dot(g * A * b); };
    const double h11 = hform(f.col(0), f.col(0));
    const double h22 = hform(f.col(1), f.col(1));
    const double h12 = hform(f.col(0), f.col(1));
    const double s = 0.5 * std::atanh(-(h11 + h22) / (2.0 * h12));
    const Vector e1 = std::cosh(s) * f.col(0) + std::sinh(s) * f.col(1);
    const Vector e2 = std::sinh(s) * f.col(0) + std::cosh(s) * f.col(1);
    ComplexDiagonal c;
    c.frame.resize(2, 2);
    c.frame.col(0) = e1;
    c.frame.col(1) = e2;
    c.H = half;
    c.lambda = -hform(e1, e2);
    return c;
  }
  // Nilpotent part A - H Id is nonzero: non-diagonalizable.
  const Matrix M = A - half * Matrix::Identity(2, 2);
  const int col = M.col(0).norm() >= M.col(1).norm() ? 0 : 1;
  const Vector v = M.col(col);  // spans the kernel and the image of M
  Vector w(2);
  {
    // Second null direction of g: solve g(w,w) = 0 with w independent of v.
    const double a = g(0, 0), b = g(0, 1), c = g(1, 1);
    Vector r1(2), r2(2);
    if (std::abs(a) > 1e-14 * g.norm()) {
      const double d = std::sqrt(std::max(0.0, b * b - a * c));
      r1 << (-b + d) / a, 1.0;
      r2 << (-b - d) / a, 1.0;
    } else {
      r1 << 1.0, 0.0;
      r2 << -c, 2.0 * b;
    }
    const auto cosang = [&](const Vector& u) { return std::abs(u.normalized().dot(v.normalized())); };
    w = cosang(r1) < cosang(r2) ? r1 : r2;
  }
  const double gvw = v.dot(g * w);
  const Vector Mw = M * w;
  const double c0 = Mw.dot(v) / v.squaredNorm();
  const int sign = c0 * gvw > 0 ? 1 : -1;
  const double b = 1.0 / std::sqrt(std::abs(c0 * gvw));
  const double a = b * c0 * sign;
  NonDiagonal nd;
  nd.H = half;
  nd.sign = sign;
  nd.frame.resize(2, 2);
  nd.frame.col(0) = a * v;
  nd.frame.col(1) = b * w;
  return nd;
}

// Rebuild (g, A) in coordinates from a classification.
inline std::pair<Matrix, Matrix> canonical_forms(const ShapeClassification& c) {
  Matrix gc(2, 2), ac(2, 2);
  Matrix f;
  if (const auto* r = std::get_if<RealDiagonal>(&c)) {
    gc << r->signs[0], 0, 0, r->signs[1];
    ac << r->kappas[0], 0, 0, r->kappas[1];
    f = r->frame;
  } else if (const auto* z = std::get_if<ComplexDiagonal>(&c)) {
    gc << -1, 0, 0, 1;
    ac << z->H, z->lambda, -z->lambda, z->H;
    f = z->frame;
  } else if (const auto* n = std::get_if<NonDiagonal>(&c)) {
    gc << 0, 1, 1, 0;
    ac << n->H, n->sign, 0, n->H;
    f = n->frame;
  } else {
    throw GeoError(ErrorKind::invalid_argument, "unclassified operator");
  }
  const Matrix finv = f.inverse();
  return {finv.transpose() * gc * finv, f * ac * finv};
}

// Classification for n >= 3: only real-diagonalizable operators.
inline ShapeClassification classify_operator(const Matrix& g, const Matrix& A, double tol) {
  if (A.rows() == 2) return classify_shape(g, A, tol);
  if (is_degenerate(g)) throw GeoError(ErrorKind::degenerate_metric, "g is degenerate");
  Eigen::EigenSolver<Matrix> es(A);
  const double scale = std::max(1.0, A.norm());
  const auto n = A.rows();
  RealDiagonal r;
  r.frame.resize(n, n);
  std::vector<std::pair<double, Eigen::Index>> order;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(es.eigenvalues()[k].imag()) > tol * scale) return Unclassified{"complex eigenvalues"};
    order.emplace_back(es.eigenvalues()[k].real(), k);
  }
  std::ranges::sort(order);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector v = es.eigenvectors().col(order[static_cast<std::size_t>(i)].second).real();
    const double nn = v.dot(g * v);
    if (std::abs(nn) < tol * v.squaredNorm() * g.norm()) return Unclassified{"null eigenvector"};
    r.frame.col(i) = v / std::sqrt(std::abs(nn));
    r.signs.push_back(nn > 0 ? 1 : -1);
    r.kappas.push_back(order[static_cast<std::size_t>(i)].first);
  }
  const Matrix check = r.frame.transpose() * g * r.frame;
  Matrix expected = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) expected(i, i) = r.signs[static_cast<std::size_t>(i)];
  if ((check - expected).norm() > 1e-6) return Unclassified{"repeated eigenvalue without orthonormal eigenbasis"};
  if (r.frame.determinant() < 0) r.frame.col(n - 1) = -r.frame.col(n - 1);
  return r;
}

}  // namespace geocon
