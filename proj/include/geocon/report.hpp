#pragma once

// Grid sweeps of the congruence geometry with summary flags, plus the
// environment-driven defaults shared by the CLI and the test suites.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "geocon/congruence.hpp"
#include "geocon/errors.hpp"
#include "geocon/hypersurface.hpp"

namespace geocon {

struct Config {
  int jet_order = 4;
  double tol = 1e-6;

  // GEOCON_JET_ORDER and GEOCON_TOL override the defaults.
  static Config from_env() {
    Config c;
    if (const char* s = std::getenv("GEOCON_JET_ORDER"); s && *s) {
      char* end = nullptr;
      const long v = std::strtol(s, &end, 10);
      if (*end != '\0' || v < 3 || v > kMaxJetOrder) {
        throw GeoError(ErrorKind::invalid_argument,
                       "GEOCON_JET_ORDER must be an integer in 3.." + std::to_string(kMaxJetOrder));
      }
      c.jet_order = static_cast<int>(v);
    }
    if (const char* s = std::getenv("GEOCON_TOL"); s && *s) {
      char* end = nullptr;
      const double v = std::strtod(s, &end);
      if (*end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
        throw GeoError(ErrorKind::invalid_argument, "GEOCON_TOL must be a positive number");
      }
      c.tol = v;
    }
    return c;
  }
};

struct ReportRow {
  std::vector<int> index;
  std::vector<double> u;
  std::optional<CongruencePoint> point;  // empty for masked rows
  std::string reason;                    // why the row is masked
  std::optional<double> beta_unwrapped;
};

struct ReportSummary {
  int rows = 0;
  int masked = 0;
  int eps = 0;
  std::string shape_classes;  // distinct classes seen, comma separated

  double max_lagrangian = 0.0;
  double max_gbar_gap = 0.0;
  double max_gbar_prime_gap = 0.0;
  double max_hbar_gap = 0.0;
  double max_trisymmetry = 0.0;
  double max_hvec_gap = 0.0;
  double max_omega_shared = 0.0;
  double max_codazzi = 0.0;
  double max_gauss = 0.0;
  double max_hbar = 0.0;
  double max_nabla_h = 0.0;
  double max_hvec = 0.0;
  double max_hvec_G = 0.0;          // max |G(H,H)|
  double max_hvec_prime = 0.0;
  double max_hvec_prime_Gprime = 0.0;
  double max_weingarten = 0.0;
  double max_curvature_gbar = 0.0;
  double max_curvature_gbar_prime = 0.0;
  std::optional<double> beta_min, beta_max;

  bool umbilic = false;
  bool gbar_degenerate = false;
  bool gbar_prime_degenerate = false;
  bool totally_geodesic = false;
  bool minimal_G = false;
  bool minimal_Gprime = false;
  bool flat_G = false;
  bool flat_Gprime = false;
  bool weingarten = false;
  bool marginally_trapped_G = false;
  bool marginally_trapped_Gprime = false;
  bool trapped_degenerate_Gprime = false;  // H' vanishes identically

  std::optional<MinimalParallel> minimal_parallel;
  std::string minimal_parallel_note;
};

struct CongruenceReport {
  std::string surface;
  int p = 0;
  std::vector<int> counts;
  Config config;
  std::vector<ReportRow> rows;
  ReportSummary summary;
};

namespace detail {

inline void fill_summary(CongruenceReport& rep, const Immersion& imm) {
  auto& s = rep.summary;
  const double tol = rep.config.tol;
  s.rows = static_cast<int>(rep.rows.size());
  bool all_umbilic = true, all_nondiagonal = true, all_prime = true, all_curv = true, all_curv_prime = true;
  bool any_valid = false;
  std::vector<std::string> classes;
  for (const auto& r : rep.rows) {
    if (!r.point) {
      ++s.masked;
      continue;
    }
    any_valid = true;
    const auto& cp = *r.point;
    s.eps = cp.geometry.eps;
    const std::string cls = cp.geometry.classification ? std::string(class_name(*cp.geometry.classification)) : "n/a";
    if (std::ranges::find(classes, cls) == classes.end()) classes.push_back(cls);
    if (!cp.connection.umbilic) all_umbilic = false;
    if (cls != "nondiagonal") all_nondiagonal = false;
    s.max_lagrangian = std::max(s.max_lagrangian, cp.lagrangian);
    s.max_gbar_gap = std::max(s.max_gbar_gap, cp.gbar_gap);
    s.max_gbar_prime_gap = std::max(s.max_gbar_prime_gap, cp.gbar_prime_gap);
    s.max_omega_shared = std::max(s.max_omega_shared, cp.omega_shared);
    s.max_codazzi = std::max(s.max_codazzi, cp.codazzi);
    s.max_gauss = std::max(s.max_gauss, cp.gauss);
    s.max_nabla_h = std::max(s.max_nabla_h, cp.connection.nabla_h.max_abs());
    s.gbar_degenerate = s.gbar_degenerate || cp.gbar_degenerate;
    s.gbar_prime_degenerate = s.gbar_prime_degenerate || cp.gbar_prime_degenerate;
    if (cp.hbar) {
      s.max_hbar_gap = std::max(s.max_hbar_gap, cp.hbar->gap);
      s.max_trisymmetry = std::max(s.max_trisymmetry, cp.hbar->trisymmetry);
      s.max_hbar = std::max(s.max_hbar, cp.hbar->ambient.max_abs());
    }
    s.max_hvec_gap = std::max(s.max_hvec_gap, cp.hvec_gap);
    s.max_hvec = std::max(s.max_hvec, cp.hvec_norm);
    s.max_hvec_G = std::max(s.max_hvec_G, std::abs(cp.hvec_G));
    if (cp.hvec_prime) {
      s.max_hvec_prime = std::max(s.max_hvec_prime, cp.hvec_prime_norm);
      s.max_hvec_prime_Gprime = std::max(s.max_hvec_prime_Gprime, std::abs(cp.hvec_prime_Gprime));
    } else {
      all_prime = false;
    }
    if (cp.weingarten) s.max_weingarten = std::max(s.max_weingarten, *cp.weingarten);
    if (cp.curvature_gbar) {
      s.max_curvature_gbar = std::max(s.max_curvature_gbar, std::abs(*cp.curvature_gbar));
    } else {
      all_curv = false;
    }
    if (cp.curvature_gbar_prime) {
      s.max_curvature_gbar_prime = std::max(s.max_curvature_gbar_prime, std::abs(*cp.curvature_gbar_prime));
    } else {
      all_curv_prime = false;
    }
    if (r.beta_unwrapped) {
      s.beta_min = std::min(s.beta_min.value_or(*r.beta_unwrapped), *r.beta_unwrapped);
      s.beta_max = std::max(s.beta_max.value_or(*r.beta_unwrapped), *r.beta_unwrapped);
    }
  }
  for (std::size_t k = 0; k < classes.size(); ++k) s.shape_classes += (k ? "," : "") + classes[k];
  if (!any_valid) return;
  s.umbilic = all_umbilic;
  s.totally_geodesic = !s.gbar_degenerate && s.max_hbar < tol;
  s.minimal_G = !s.gbar_degenerate && s.max_hvec < tol;
  s.minimal_Gprime = all_prime && s.max_hvec_prime < tol;
  s.flat_G = all_curv && s.max_curvature_gbar < tol;
  s.flat_Gprime = all_curv_prime && s.max_curvature_gbar_prime < tol;
  s.weingarten = s.max_weingarten < tol;
  s.marginally_trapped_G = all_nondiagonal && s.max_hvec_G < tol && s.max_hvec > tol;
  s.marginally_trapped_Gprime = all_prime && s.max_hvec_prime_Gprime < tol;
  s.trapped_degenerate_Gprime = s.marginally_trapped_Gprime && s.max_hvec_prime < tol;

  if (imm.n() == 2) {
    std::vector<std::vector<double>> pts;
    for (const auto& r : rep.rows)
      if (r.point) pts.push_back(r.u);
    try {
      s.minimal_parallel = find_minimal_parallel(imm, pts, tol);
    } catch (const GeoError& e) {
      s.minimal_parallel_note = e.what();
    }
  }
}

// Unwrap beta along each row of the grid (period pi when eps = 1).
inline void unwrap_beta(std::vector<ReportRow>& rows, const std::vector<int>& counts) {
  if (counts.size() != 2) {
    for (auto& r : rows)
      if (r.point && r.point->beta && r.point->beta->value) r.beta_unwrapped = r.point->beta->value;
    return;
  }
  const int nu = counts[0], nv = counts[1];
  for (int i = 0; i < nu; ++i) {
    std::optional<double> prev;
    for (int j = 0; j < nv; ++j) {
      auto& r = rows[static_cast<std::size_t>(i * nv + j)];
      if (!r.point || !r.point->beta || !r.point->beta->value) continue;
      double b = *r.point->beta->value;
      if (r.point->geometry.eps > 0 && prev) b = *prev + std::remainder(b - *prev, std::numbers::pi);
      r.beta_unwrapped = b;
      prev = b;
    }
  }
}

}  // namespace detail

// Evaluate the congruence on a grid (row-major, last axis fastest). Rows are
// split across hardware threads; the result does not depend on the split.
inline CongruenceReport congruence_report(const Immersion& imm, const std::vector<int>& counts, const Config& config,
                                          unsigned threads = 0) {
  CongruenceReport rep;
  rep.surface = imm.name();
  rep.p = imm.space_form().p();
  rep.counts = counts;
  rep.config = config;
  const auto pts = grid_points(imm.domain(), counts);
  rep.rows.resize(pts.size());
  const CongruenceOptions opts{config.jet_order, config.tol};
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto& row = rep.rows[k];
      row.u = pts[k];
      std::size_t rest = k;
      row.index.assign(counts.size(), 0);
      for (std::size_t a = counts.size(); a-- > 0;) {
        row.index[a] = static_cast<int>(rest % static_cast<std::size_t>(counts[a]));
        rest /= static_cast<std::size_t>(counts[a]);
      }
      try {
        row.point = congruence_point(imm, pts[k], opts);
      } catch (const GeoError& e) {
        row.reason = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pts.size()));
  if (threads <= 1) {
    work(0, pts.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (pts.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(pts.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  detail::unwrap_beta(rep.rows, counts);
  detail::fill_summary(rep, imm);
  return rep;
}

// ---------------------------------------------------------------------------
// Grid-level views used by the flatness and trapped-surface statements.

struct FlatnessResult {
  double weingarten_residual = 0.0;
  double curvature_gbar_prime = 0.0;
  double curvature_gbar = 0.0;
  bool verdicts_agree = true;  // per sample: flat(gbar) == flat(gbar')
};

inline FlatnessResult flatness_weingarten(const CongruenceReport& rep) {
  FlatnessResult out;
  const double tol = rep.config.tol;
  for (const auto& r : rep.rows) {
    if (!r.point) continue;
    const auto& cp = *r.point;
    if (!cp.curvature_gbar_prime) {
      throw GeoError(ErrorKind::degenerate_metric, "gbar' is degenerate on the grid");
    }
    out.weingarten_residual = std::max(out.weingarten_residual, cp.weingarten.value_or(0.0));
    out.curvature_gbar_prime = std::max(out.curvature_gbar_prime, std::abs(*cp.curvature_gbar_prime));
    const double cg = cp.curvature_gbar ? std::abs(*cp.curvature_gbar) : 0.0;
    out.curvature_gbar = std::max(out.curvature_gbar, cg);
    if ((cg < tol) != (std::abs(*cp.curvature_gbar_prime) < tol)) out.verdicts_agree = false;
  }
  return out;
}

struct TrappedFlags {
  bool G = false;
  bool Gprime = false;
  bool Gprime_degenerate_subcase = false;
};

inline TrappedFlags marginally_trapped(const CongruenceReport& rep) {
  return {rep.summary.marginally_trapped_G, rep.summary.marginally_trapped_Gprime,
          rep.summary.trapped_degenerate_Gprime};
}

}  // namespace geocon
