#pragma once

// Curvature, structure and closedness checks on L^sign(X^{n+1}_{p,1}) at
// random geodesics with random oriented complement frames.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/geodesic_space.hpp"
#include "geocon/spaceform.hpp"

namespace geocon {

struct BatteryOptions {
  int points = 100;
  int charts = 20;
  std::uint64_t seed = 20240611;
};

struct BatteryCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool below = true;  // pass when value < threshold, else value > threshold
  bool pass = false;
};

struct BatteryResult {
  int n = 2;
  int p = 0;
  int sign = 1;
  int eps = 1;
  double scalar_expected = 0.0;
  double scalar_observed = 0.0;
  std::vector<BatteryCheck> checks;

  [[nodiscard]] bool pass() const {
    return std::ranges::all_of(checks, [](const BatteryCheck& c) { return c.pass; });
  }
};

namespace detail {

inline void add_check(BatteryResult& r, std::string name, double value, double threshold, bool below = true) {
  const bool ok = std::isfinite(value) && (below ? value < threshold : value > threshold);
  r.checks.push_back({std::move(name), value, threshold, below, ok});
}

// Same geodesic, complement frame moved by exp(diag(signs) S), S skew.
template <class Engine>
GeodesicPointPtr with_random_frame(const GeodesicPointPtr& base, Engine& engine) {
  const auto& c = base->complement();
  const int m = static_cast<int>(c.vectors.size());
  std::normal_distribution<double> normal(0.0, 0.6);
  SmallMatrix<double> a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double s = normal(engine);
      a(i, j) = c.signs[static_cast<std::size_t>(i)] * s;
      a(j, i) = -c.signs[static_cast<std::size_t>(j)] * s;
    }
  const auto rot = matrix_exp(a);
  std::vector<Vector> frame;
  for (int j = 0; j < m; ++j) {
    Vector f = Vector::Zero(base->space().dim());
    for (int i = 0; i < m; ++i) f += rot(i, j) * c.vectors[static_cast<std::size_t>(i)];
    frame.push_back(f);
  }
  return std::make_shared<const GeodesicPoint>(base->space(), base->x(), base->y(), std::move(frame), 1e-8);
}

// chart(s + c * (s_{i+1}^2)_i): omega stays closed, but the central-difference
// remainder no longer cancels as it does on bare exponential charts of S3 and AdS3.
inline GeodesicChart warped_chart(GeodesicChart chart, double c = 0.4) {
  return [chart = std::move(chart), c](std::span<const Jet> s) {
    std::vector<Jet> w(s.begin(), s.end());
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m; ++i) w[i] = s[i] + c * s[(i + 1) % m] * s[(i + 1) % m];
    return chart(w);
  };
}

}  // namespace detail

inline BatteryResult structure_battery(int n, int p, int sign, const BatteryOptions& opts = {}) {
  if (n != 2 && n != 3) throw GeoError(ErrorKind::unsupported_dimension, "the battery covers n = 2 and n = 3");
  require_sign(sign);
  const SpaceForm sf(n, p);
  if (!geodesic_space_nonempty(n, p, sign)) {
    throw GeoError(ErrorKind::empty_space, "L" + std::string(sign > 0 ? "+" : "-") + " is empty for n = " +
                                               std::to_string(n) + ", p = " + std::to_string(p));
  }
  BatteryResult r;
  r.n = n;
  r.p = p;
  r.sign = sign;
  r.eps = sign;
  r.scalar_expected = 2.0 * sign * n * n;

  std::mt19937_64 engine(opts.seed + static_cast<std::uint64_t>(100 * n + 10 * p + (sign > 0 ? 1 : 2)));
  double einstein = 0.0, scalar = 0.0, scalar_prime = 0.0, weyl_prime = 0.0, ricci_shared = 0.0;
  double weyl_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.points; ++k) {
    const auto base = detail::with_random_frame(random_geodesic(sf, sign, engine), engine);
    const auto cg = curvature_G(base);
    einstein = std::max(einstein, (cg.ricci - static_cast<double>(base->eps() * n) * cg.metric).cwiseAbs().maxCoeff());
    scalar = std::max(scalar, std::abs(cg.scalar - r.scalar_expected));
    r.scalar_observed = cg.scalar;
    weyl_min = std::min(weyl_min, cg.weyl.max_abs());
    if (n == 2) {
      const auto cp = curvature_Gprime(base);
      scalar_prime = std::max(scalar_prime, std::abs(cp.scalar));
      weyl_prime = std::max(weyl_prime, cp.weyl.max_abs());
      ricci_shared = std::max(ricci_shared, (cp.ricci - cg.ricci).cwiseAbs().maxCoeff());
    }
  }
  detail::add_check(r, "einstein", einstein, 1e-9);
  detail::add_check(r, "scalar", scalar, 1e-9);
  detail::add_check(r, "weyl-nonzero", weyl_min, 0.5, false);
  if (n == 2) {
    detail::add_check(r, "scalar-prime", scalar_prime, 1e-9);
    detail::add_check(r, "weyl-prime", weyl_prime, 1e-9);
    detail::add_check(r, "ricci-shared", ricci_shared, 1e-9);
  }

  // Closedness of omega on warped exponential charts; central differences
  // leave an O(h^2) remainder, so the residual should drop ~100x per decade.
  std::uniform_real_distribution<double> coord(-0.3, 0.3);
  double closed = 0.0, decay_min = std::numeric_limits<double>::infinity();
  double decay_max = 0.0;
  for (int k = 0; k < opts.charts; ++k) {
    const auto base = random_geodesic(sf, sign, engine);
    const auto chart = detail::warped_chart(exponential_chart(base));
    std::vector<double> s(static_cast<std::size_t>(2 * n));
    for (auto& v : s) v = coord(engine);
    const double coarse = closedness_residual(base->space(), chart, s, 1e-2);
    const double fine = closedness_residual(base->space(), chart, s, 1e-3);
    closed = std::max(closed, fine);
    const double ratio = coarse / fine;
    decay_min = std::min(decay_min, ratio);
    decay_max = std::max(decay_max, ratio);
  }
  detail::add_check(r, "closed", closed, 1e-4);
  detail::add_check(r, "closed-decay-min", decay_min, 30.0, false);
  detail::add_check(r, "closed-decay-max", decay_max, 300.0);

  if (n == 2) {
    const auto got = structure_table(sf, sign);
    double match = 0.0;
    for (const auto& row : kReferenceStructureTable)
      if (row.p == p && row.sign == sign) match = got == row.expected ? 1.0 : 0.0;
    detail::add_check(r, "structure-table", match, 0.5, false);
  }
  return r;
}

}  // namespace geocon
