#pragma once

// Frame grids of a normal congruence, their CSV form, and recovery of the
// hypersurface from a grid of frames (e1 on the quadric, e2 along the geodesic).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/hypersurface.hpp"
#include "geocon/pseudolinalg.hpp"
#include "geocon/spaceform.hpp"

namespace geocon {

// Two-parameter grid of frames, row-major with axis 1 fastest.
struct FrameGrid {
  int p = 0;
  std::array<std::vector<double>, 2> axes;  // sample coordinates per axis
  std::array<bool, 2> periodic{false, false};
  std::vector<Vector> e1, e2;               // ambient R^4 vectors

  [[nodiscard]] int count(int a) const { return static_cast<int>(axes[static_cast<std::size_t>(a)].size()); }
  [[nodiscard]] std::size_t at(int i, int j) const { return static_cast<std::size_t>(i * count(1) + j); }
  [[nodiscard]] SignatureSpace space() const { return {4, p}; }
};

// Frames (phi, N) of the Gauss map, optionally turned inside the geodesic
// plane by phase(u): e1 = cos_eps(phase) phi + sin_eps(phase) N, e2 = de1/dphase.
inline FrameGrid gauss_frames(const Immersion& imm, const std::array<int, 2>& counts,
                              const std::function<double(std::span<const double>)>& phase = {}) {
  if (imm.n() != 2) throw GeoError(ErrorKind::unsupported_dimension, "frame grids need a surface (n = 2)");
  if (imm.space_form().eps_quadric() != 1) {
    throw GeoError(ErrorKind::invalid_argument, "frame grids need eps_quadric = 1");
  }
  FrameGrid fg;
  fg.p = imm.space_form().p();
  for (int a = 0; a < 2; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    fg.axes[sa] = axis_samples(imm.domain(), a, counts[sa]);
    fg.periodic[sa] = imm.domain().periodic[sa];
  }
  const std::vector<int> c{counts[0], counts[1]};
  for (const auto& u : grid_points(imm.domain(), c)) {
    const auto pg = point_geometry(imm, u);
    const EpsTrig trig(pg.eps);
    const double th = phase ? phase(u) : 0.0;
    fg.e1.push_back(trig.cos(th) * pg.phi + trig.sin(th) * pg.normal);
    fg.e2.push_back(-pg.eps * trig.sin(th) * pg.phi + trig.cos(th) * pg.normal);
  }
  return fg;
}

// A congruence that is not normal: e2 leans from N towards the unit tangent
// along axis 0 by theta = tilt * sin(u_1). Needs <N,N> = <T,T> = 1.
inline FrameGrid tilted_gauss_frames(const Immersion& imm, const std::array<int, 2>& counts, double tilt) {
  FrameGrid fg = gauss_frames(imm, counts);
  const auto s = fg.space();
  const std::vector<int> c{counts[0], counts[1]};
  const auto pts = grid_points(imm.domain(), c);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto pg = point_geometry(imm, pts[k]);
    const double tt = inner(s, pg.tangents[0], pg.tangents[0]);
    if (pg.eps != 1 || !(tt > 0.0)) {
      throw GeoError(ErrorKind::invalid_argument, "tilted frames need a spacelike normal and tangent");
    }
    const Vector tangent = pg.tangents[0] / std::sqrt(tt);
    const double th = tilt * std::sin(pts[k][1]);
    fg.e2[k] = std::cos(th) * pg.normal + std::sin(th) * tangent;
  }
  return fg;
}

// ---------------------------------------------------------------------------
// CSV: i,j,u,v,p,periodic_u,periodic_v,e1_0..e1_3,e2_0..e2_3

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) {
    throw GeoError(ErrorKind::parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

inline int parse_int(const std::string& s, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') {
    throw GeoError(ErrorKind::parse, "line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return static_cast<int>(v);
}

inline const char* kFrameHeader =
    "i,j,u,v,p,periodic_u,periodic_v,e1_0,e1_1,e1_2,e1_3,e2_0,e2_1,e2_2,e2_3";

}  // namespace detail

inline void write_frames_csv(std::ostream& out, const FrameGrid& fg) {
  out << detail::kFrameHeader << '\n';
  for (int i = 0; i < fg.count(0); ++i) {
    for (int j = 0; j < fg.count(1); ++j) {
      const auto k = fg.at(i, j);
      out << i << ',' << j << ',' << detail::fmt17(fg.axes[0][static_cast<std::size_t>(i)]) << ','
          << detail::fmt17(fg.axes[1][static_cast<std::size_t>(j)]) << ',' << fg.p << ',' << int(fg.periodic[0]) << ','
          << int(fg.periodic[1]);
      for (const auto* e : {&fg.e1[k], &fg.e2[k]})
        for (Eigen::Index c = 0; c < 4; ++c) out << ',' << detail::fmt17((*e)[c]);
      out << '\n';
    }
  }
}

inline FrameGrid read_frames_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw GeoError(ErrorKind::parse, "empty frame file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != detail::kFrameHeader) throw GeoError(ErrorKind::parse, "line 1: unexpected frame header");

  struct Row {
    int i, j;
    double u, v;
    int p, pu, pv;
    Vector e1, e2;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 15) throw GeoError(ErrorKind::parse, "line " + std::to_string(lineno) + ": expected 15 columns");
    Row r{detail::parse_int(cells[0], lineno), detail::parse_int(cells[1], lineno),
          detail::parse_double(cells[2], lineno), detail::parse_double(cells[3], lineno),
          detail::parse_int(cells[4], lineno), detail::parse_int(cells[5], lineno),
          detail::parse_int(cells[6], lineno), Vector(4), Vector(4)};
    for (int c = 0; c < 4; ++c) {
      r.e1[c] = detail::parse_double(cells[static_cast<std::size_t>(7 + c)], lineno);
      r.e2[c] = detail::parse_double(cells[static_cast<std::size_t>(11 + c)], lineno);
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw GeoError(ErrorKind::parse, "frame file has no rows");

  FrameGrid fg;
  fg.p = rows.front().p;
  fg.periodic = {rows.front().pu != 0, rows.front().pv != 0};
  int ni = 0, nj = 0;
  for (const auto& r : rows) {
    ni = std::max(ni, r.i + 1);
    nj = std::max(nj, r.j + 1);
  }
  if (static_cast<std::size_t>(ni) * static_cast<std::size_t>(nj) != rows.size()) {
    throw GeoError(ErrorKind::parse, "frame rows do not form a full grid");
  }
  fg.axes[0].assign(static_cast<std::size_t>(ni), 0.0);
  fg.axes[1].assign(static_cast<std::size_t>(nj), 0.0);
  fg.e1.assign(rows.size(), Vector());
  fg.e2.assign(rows.size(), Vector());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.i < 0 || r.j < 0 || fg.at(r.i, r.j) != k) {
      throw GeoError(ErrorKind::parse, "line " + std::to_string(k + 2) + ": rows must be in row-major order");
    }
    if (r.p != fg.p || (r.pu != 0) != fg.periodic[0] || (r.pv != 0) != fg.periodic[1]) {
      throw GeoError(ErrorKind::parse, "line " + std::to_string(k + 2) + ": grid metadata changes between rows");
    }
    fg.axes[0][static_cast<std::size_t>(r.i)] = r.u;
    fg.axes[1][static_cast<std::size_t>(r.j)] = r.v;
    fg.e1[k] = r.e1;
    fg.e2[k] = r.e2;
  }
  if (fg.p < 0 || fg.p > 4) throw GeoError(ErrorKind::parse, "signature index out of range");
  return fg;
}

// ---------------------------------------------------------------------------
// Differentiation and quadrature along one grid axis.

namespace detail {

// First-derivative weights at x0 from the given nodes (exact on polynomials
// of degree < nodes); offsets are scaled by h to keep the system well posed.
inline std::vector<double> stencil_first(const std::vector<double>& x, double x0, double h) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix v(n, n);
  Vector rhs = Vector::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) v(r, c) = std::pow((x[static_cast<std::size_t>(c)] - x0) / h, static_cast<double>(r));
  rhs[1] = 1.0;
  const Vector w = v.fullPivLu().solve(rhs);
  std::vector<double> out(x.size());
  for (Eigen::Index c = 0; c < n; ++c) out[static_cast<std::size_t>(c)] = w[c] / h;
  return out;
}

// Dense first-derivative matrix: Fourier on periodic axes, 7-point
// sixth-order stencils (clamped near the ends) otherwise.
inline Matrix derivative_matrix(const std::vector<double>& x, bool periodic) {
  const auto n = static_cast<int>(x.size());
  Matrix d = Matrix::Zero(n, n);
  if (periodic) {
    const double h = x[1] - x[0];
    const double period = h * n;
    const double scale = 2.0 * std::numbers::pi / period;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (j == k) continue;
        const int m = j - k;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        const double arg = m * std::numbers::pi / n;
        d(j, k) = scale * 0.5 * sgn * ((n % 2 == 0) ? 1.0 / std::tan(arg) : 1.0 / std::sin(arg));
      }
    return d;
  }
  if (n < 7) throw GeoError(ErrorKind::invalid_argument, "non-periodic axes need at least 7 samples");
  for (int j = 0; j < n; ++j) {
    const int start = std::clamp(j - 3, 0, n - 7);
    const std::vector<double> nodes(x.begin() + start, x.begin() + start + 7);
    const auto w = stencil_first(nodes, x[static_cast<std::size_t>(j)], x[1] - x[0]);
    for (int k = 0; k < 7; ++k) d(j, start + k) = w[static_cast<std::size_t>(k)];
  }
  return d;
}

// Weights w with sum w_m f(x_m) = integral of the interpolant over [lo, hi].
inline std::vector<double> interval_weights(const std::vector<double>& x, double lo, double hi, double h) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix v(n, n);
  Vector moments(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) v(r, c) = std::pow((x[static_cast<std::size_t>(c)] - lo) / h, static_cast<double>(r));
    moments[r] = std::pow((hi - lo) / h, static_cast<double>(r + 1)) / static_cast<double>(r + 1);
  }
  const Vector w = v.fullPivLu().solve(moments);
  std::vector<double> out(x.size());
  for (Eigen::Index c = 0; c < n; ++c) out[static_cast<std::size_t>(c)] = w[c] * h;
  return out;
}

// F[m] = integral from x_0 to x_m. Periodic axes integrate the trigonometric
// interpolant (the Nyquist mode is dropped); other axes integrate 6-point
// interpolants interval by interval, windows clamped at the ends.
inline std::vector<double> cumulative(const std::vector<double>& x, const std::vector<double>& f, bool periodic) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size(), 0.0);
  const double h = x[1] - x[0];
  if (periodic) {
    const double w = 2.0 * std::numbers::pi / (h * n);
    const int kmax = (n - 1) / 2;
    double mean = 0.0;
    for (double v : f) mean += v;
    mean /= n;
    std::vector<double> ca(static_cast<std::size_t>(kmax + 1)), cb(static_cast<std::size_t>(kmax + 1));
    for (int k = 1; k <= kmax; ++k) {
      double re = 0.0, im = 0.0;
      for (int m = 0; m < n; ++m) {
        const double arg = 2.0 * std::numbers::pi * k * m / n;
        re += f[static_cast<std::size_t>(m)] * std::cos(arg);
        im += f[static_cast<std::size_t>(m)] * std::sin(arg);
      }
      ca[static_cast<std::size_t>(k)] = 2.0 * re / n;  // f ~ mean + sum ca cos + cb sin, phase from x_0
      cb[static_cast<std::size_t>(k)] = 2.0 * im / n;
    }
    for (int m = 1; m < n; ++m) {
      double s = mean * m * h;
      for (int k = 1; k <= kmax; ++k) {
        const double arg = 2.0 * std::numbers::pi * k * m / n;
        s += (ca[static_cast<std::size_t>(k)] * std::sin(arg) + cb[static_cast<std::size_t>(k)] * (1.0 - std::cos(arg))) / (k * w);
      }
      out[static_cast<std::size_t>(m)] = s;
    }
    return out;
  }
  if (n < 6) throw GeoError(ErrorKind::invalid_argument, "non-periodic axes need at least 6 samples");
  for (int k = 0; k + 1 < n; ++k) {
    const int start = std::clamp(k - 2, 0, n - 6);
    const std::vector<double> nodes(x.begin() + start, x.begin() + start + 6);
    const auto wts = interval_weights(nodes, x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(k + 1)], h);
    double s = 0.0;
    for (int m = 0; m < 6; ++m) s += wts[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(start + m)];
    out[static_cast<std::size_t>(k + 1)] = out[static_cast<std::size_t>(k)] + s;
  }
  return out;
}

// Integral over one full period.
inline double loop_integral(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * (x[1] - x[0]);
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct ReconstructOptions {
  double base_t = 0.0;
  std::array<int, 2> base_index{0, 0};
  double closed_tol = 1e-4;  // path-independence tolerance
  double frame_tol = 1e-8;   // orthonormality of the input frames
};

struct Reconstruction {
  int p = 0;
  int eps = 1;
  std::array<std::vector<double>, 2> axes;
  std::vector<double> t;
  std::vector<Vector> points;
  double closedness_residual = 0.0;  // max |t(row-first) - t(column-first)|
  double curl_residual = 0.0;        // max |d_u alpha_v - d_v alpha_u|
  double quadric_residual = 0.0;
  std::array<std::optional<double>, 2> monodromy;  // change of t around periodic axes
  std::vector<std::string> warnings;
};

// t = base_t - eps * integral of alpha = <de1, e2> from the base index,
// phi = cos_eps(t) e1 + sin_eps(t) e2.
inline Reconstruction reconstruct_hypersurface(const FrameGrid& fg, const ReconstructOptions& opts = {}) {
  const int ni = fg.count(0), nj = fg.count(1);
  if (ni < 2 || nj < 2) throw GeoError(ErrorKind::invalid_argument, "frame grid needs at least 2 samples per axis");
  const auto [bi, bj] = opts.base_index;
  if (bi < 0 || bi >= ni || bj < 0 || bj >= nj) throw GeoError(ErrorKind::invalid_argument, "base index outside the grid");
  const auto s = fg.space();

  Reconstruction rec;
  rec.p = fg.p;
  rec.axes = fg.axes;
  const double n22 = inner(s, fg.e2.front(), fg.e2.front());
  rec.eps = n22 > 0 ? 1 : -1;
  for (std::size_t k = 0; k < fg.e1.size(); ++k) {
    const double a = inner(s, fg.e1[k], fg.e1[k]) - 1.0;
    const double b = inner(s, fg.e2[k], fg.e2[k]) - rec.eps;
    const double c = inner(s, fg.e1[k], fg.e2[k]);
    if (std::max({std::abs(a), std::abs(b), std::abs(c)}) > opts.frame_tol) {
      throw GeoError(ErrorKind::invalid_argument,
                     "frame " + std::to_string(k) + " is not orthonormal (<e1,e1> = 1, <e2,e2> = +-1, <e1,e2> = 0)");
    }
  }

  // alpha_a = <d_a e1, e2> on the grid.
  std::array<std::vector<double>, 2> alpha;
  for (auto& a : alpha) a.assign(fg.e1.size(), 0.0);
  const Matrix d0 = detail::derivative_matrix(fg.axes[0], fg.periodic[0]);
  const Matrix d1 = detail::derivative_matrix(fg.axes[1], fg.periodic[1]);
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      Vector du = Vector::Zero(4), dv = Vector::Zero(4);
      for (int m = 0; m < ni; ++m)
        if (d0(i, m) != 0.0) du += d0(i, m) * fg.e1[fg.at(m, j)];
      for (int m = 0; m < nj; ++m)
        if (d1(j, m) != 0.0) dv += d1(j, m) * fg.e1[fg.at(i, m)];
      alpha[0][fg.at(i, j)] = inner(s, du, fg.e2[fg.at(i, j)]);
      alpha[1][fg.at(i, j)] = inner(s, dv, fg.e2[fg.at(i, j)]);
    }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      double a10 = 0.0, a01 = 0.0;
      for (int m = 0; m < ni; ++m) a10 += d0(i, m) * alpha[1][fg.at(m, j)];
      for (int m = 0; m < nj; ++m) a01 += d1(j, m) * alpha[0][fg.at(i, m)];
      rec.curl_residual = std::max(rec.curl_residual, std::abs(a10 - a01));
    }

  // Along axis 0 at fixed j, and along axis 1 at fixed i.
  auto column = [&](int j) {
    std::vector<double> f(static_cast<std::size_t>(ni));
    for (int i = 0; i < ni; ++i) f[static_cast<std::size_t>(i)] = alpha[0][fg.at(i, j)];
    return f;
  };
  auto row = [&](int i) {
    std::vector<double> f(static_cast<std::size_t>(nj));
    for (int j = 0; j < nj; ++j) f[static_cast<std::size_t>(j)] = alpha[1][fg.at(i, j)];
    return f;
  };
  std::vector<std::vector<double>> cum0(static_cast<std::size_t>(nj)), cum1(static_cast<std::size_t>(ni));
  for (int j = 0; j < nj; ++j) cum0[static_cast<std::size_t>(j)] = detail::cumulative(fg.axes[0], column(j), fg.periodic[0]);
  for (int i = 0; i < ni; ++i) cum1[static_cast<std::size_t>(i)] = detail::cumulative(fg.axes[1], row(i), fg.periodic[1]);
  auto c0 = [&](int j, int i) { return cum0[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]; };
  auto c1 = [&](int i, int j) { return cum1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };

  const EpsTrig trig(rec.eps);
  rec.t.resize(fg.e1.size());
  rec.points.resize(fg.e1.size());
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      // staircase: along axis 0 on the base column, then along axis 1
      const double row_first = (c0(bj, i) - c0(bj, bi)) + (c1(i, j) - c1(i, bj));
      const double col_first = (c1(bi, j) - c1(bi, bj)) + (c0(j, i) - c0(j, bi));
      rec.closedness_residual = std::max(rec.closedness_residual, std::abs(row_first - col_first));
      const auto k = fg.at(i, j);
      const double t = opts.base_t - rec.eps * row_first;
      rec.t[k] = t;
      rec.points[k] = trig.cos(t) * fg.e1[k] + trig.sin(t) * fg.e2[k];
      rec.quadric_residual = std::max(rec.quadric_residual, std::abs(inner(s, rec.points[k], rec.points[k]) - 1.0));
    }

  if (rec.closedness_residual > opts.closed_tol) {
    std::ostringstream msg;
    msg << "alpha = <de1, e2> is not closed: path residual " << rec.closedness_residual << " exceeds "
        << opts.closed_tol;
    throw GeoError(ErrorKind::not_lagrangian, msg.str());
  }

  for (int a = 0; a < 2; ++a) {
    if (!fg.periodic[static_cast<std::size_t>(a)]) continue;
    const double loop = a == 0 ? detail::loop_integral(fg.axes[0], column(bj)) : detail::loop_integral(fg.axes[1], row(bi));
    const double dt = -rec.eps * loop;
    rec.monodromy[static_cast<std::size_t>(a)] = dt;
    const double off = rec.eps > 0 ? std::remainder(dt, 2.0 * std::numbers::pi) : dt;
    if (std::abs(off) > opts.closed_tol) {
      std::ostringstream msg;
      msg << "monodromy " << dt << " around axis " << a << ": the surface closes up on a different parallel sheet";
      rec.warnings.push_back(msg.str());
    }
  }
  return rec;
}

// CSV: i,j,u,v,t,x0..x3
inline void write_reconstruction_csv(std::ostream& out, const Reconstruction& rec) {
  out << "i,j,u,v,t,x0,x1,x2,x3\n";
  const auto nj = static_cast<int>(rec.axes[1].size());
  for (int i = 0; i < static_cast<int>(rec.axes[0].size()); ++i)
    for (int j = 0; j < nj; ++j) {
      const auto k = static_cast<std::size_t>(i * nj + j);
      out << i << ',' << j << ',' << detail::fmt17(rec.axes[0][static_cast<std::size_t>(i)]) << ','
          << detail::fmt17(rec.axes[1][static_cast<std::size_t>(j)]) << ',' << detail::fmt17(rec.t[k]);
      for (Eigen::Index c = 0; c < 4; ++c) out << ',' << detail::fmt17(rec.points[k][c]);
      out << '\n';
    }
}

}  // namespace geocon
