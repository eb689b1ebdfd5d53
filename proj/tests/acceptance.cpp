// Acceptance suite: one PASS/FAIL line per criterion.
//   geocon_acceptance            run all twelve
//   geocon_acceptance 4 9        run a subset

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "geocon/geocon.hpp"

using namespace geocon;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Space {
  int n, p, sign;
};

std::vector<Space> battery_spaces() {
  std::vector<Space> out;
  for (const auto& row : kReferenceStructureTable) out.push_back({2, row.p, row.sign});
  for (int p = 0; p <= 2; ++p)
    for (int s : {1, -1})
      if (geodesic_space_nonempty(3, p, s)) out.push_back({3, p, s});
  return out;
}

std::string label(const Space& s) {
  return "n" + std::to_string(s.n) + "p" + std::to_string(s.p) + (s.sign > 0 ? "+" : "-");
}

const BatteryCheck& check_named(const BatteryResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("battery has no check " + name);
}

std::vector<Immersion> all_catalog() {
  std::vector<Immersion> out;
  for (const auto& e : catalog::entries())
    for (int p : e.signatures) out.push_back(catalog_surface(e.name, {}, p));
  return out;
}

std::string tag(const Immersion& imm) { return imm.name() + "/p" + std::to_string(imm.space_form().p()); }

CongruenceReport sweep(const Immersion& imm, int per_axis) {
  return congruence_report(imm, {per_axis, per_axis}, Config{});
}

// ---------------------------------------------------------------------------

void criterion_1(Outcome& o) {
  double einstein = 0.0, scalar = 0.0;
  for (const auto& s : battery_spaces()) {
    BatteryOptions opts;
    opts.points = 100;
    opts.charts = 1;
    const auto r = structure_battery(s.n, s.p, s.sign, opts);
    einstein = std::max(einstein, check_named(r, "einstein").value);
    scalar = std::max(scalar, check_named(r, "scalar").value);
    o.require(check_named(r, "einstein").pass && check_named(r, "scalar").pass, label(s));
  }
  o.detail << "11 spaces x 100 points: max |Ric - eps n G| = " << einstein << ", max |S - 2 eps n^2| = " << scalar;
}

void criterion_2(Outcome& o) {
  double sp = 0.0, wp = 0.0, wmin = 1e300;
  for (const auto& row : kReferenceStructureTable) {
    BatteryOptions opts;
    opts.points = 100;
    opts.charts = 1;
    const auto r = structure_battery(2, row.p, row.sign, opts);
    sp = std::max(sp, check_named(r, "scalar-prime").value);
    wp = std::max(wp, check_named(r, "weyl-prime").value);
    wmin = std::min(wmin, check_named(r, "weyl-nonzero").value);
    o.require(check_named(r, "scalar-prime").pass && check_named(r, "weyl-prime").pass &&
                  check_named(r, "weyl-nonzero").pass,
              std::string(row.geodesic_space));
  }
  o.detail << "6 spaces x 100 points: max |S'| = " << sp << ", max |Weyl'| = " << wp
           << ", min over points of max |Weyl(G)| = " << wmin;
}

void criterion_3(Outcome& o) {
  double closed = 0.0, dmin = 1e300, dmax = 0.0;
  for (const auto& s : battery_spaces()) {
    BatteryOptions opts;
    opts.points = 1;
    opts.charts = 20;
    const auto r = structure_battery(s.n, s.p, s.sign, opts);
    closed = std::max(closed, check_named(r, "closed").value);
    dmin = std::min(dmin, check_named(r, "closed-decay-min").value);
    dmax = std::max(dmax, check_named(r, "closed-decay-max").value);
    o.require(check_named(r, "closed").pass && check_named(r, "closed-decay-min").pass &&
                  check_named(r, "closed-decay-max").pass,
              label(s));
  }
  o.detail << "11 spaces x 20 charts: max residual(h=1e-3) = " << closed << ", residual ratio h=1e-2 vs 1e-3 in ["
           << dmin << ", " << dmax << "]";
}

void criterion_4(Outcome& o) {
  int matches = 0;
  for (const auto& row : kReferenceStructureTable) {
    const auto got = structure_table(SpaceForm(2, row.p), row.sign);
    if (got == row.expected) {
      ++matches;
    } else {
      o.require(false, std::string(row.geodesic_space) + " computed eps=" + std::to_string(got.eps) +
                           " eps'=" + std::to_string(got.eps_prime) + " J'=" + std::string(to_string(got.Jprime)) +
                           " expected eps'=" + std::to_string(row.expected.eps_prime) +
                           " J'=" + std::string(to_string(row.expected.Jprime)));
    }
  }
  o.detail << matches << "/6 rows reproduced exactly";
}

void criterion_5(Outcome& o) {
  double g = 0.0, gp = 0.0;
  int surfaces = 0;
  for (const auto& imm : all_catalog()) {
    const auto rep = sweep(imm, 20);
    ++surfaces;
    g = std::max(g, rep.summary.max_gbar_gap);
    gp = std::max(gp, rep.summary.max_gbar_prime_gap);
    o.require(rep.summary.masked == 0, tag(imm) + " has masked rows");
    o.require(rep.summary.max_gbar_gap < 1e-6 && rep.summary.max_gbar_prime_gap < 1e-6, tag(imm));
  }
  o.detail << surfaces << " catalog surfaces on 20x20: max gap gbar = " << g << ", gbar' = " << gp;
}

void criterion_6(Outcome& o) {
  double gap = 0.0, tri = 0.0;
  int used = 0;
  for (const auto& imm : all_catalog()) {
    const auto rep = sweep(imm, 20);
    if (rep.summary.gbar_degenerate) continue;
    ++used;
    for (const auto& r : rep.rows) {
      o.require(r.point && r.point->hbar, tag(imm) + " lacks hbar at a grid point");
      if (!r.point || !r.point->hbar) break;
    }
    gap = std::max(gap, rep.summary.max_hbar_gap);
    tri = std::max(tri, rep.summary.max_trisymmetry);
    o.require(rep.summary.max_hbar_gap < 1e-5 && rep.summary.max_trisymmetry < 1e-6, tag(imm));
  }
  o.require(used > 0, "no surface with nondegenerate gbar");
  o.detail << used << " surfaces with nondegenerate gbar: max |hbar - eps nabla h| = " << gap
           << ", tri-symmetry = " << tri;
}

void criterion_7(Outcome& o) {
  double clifford = 0.0, equator = 0.0, dbeta = 0.0;
  clifford = sweep(catalog::clifford_tube(kPi / 4), 20).summary.max_hvec;
  for (int p = 0; p <= 3; ++p) equator = std::max(equator, sweep(catalog::equator(p), 20).summary.max_hvec);
  o.require(clifford < 1e-7, "Clifford torus H");
  o.require(equator < 1e-7, "equator H");
  std::vector<Immersion> spheres;
  for (double r : {0.3, 0.6, 1.0}) spheres.push_back(catalog::distance_sphere(r, 0));
  spheres.push_back(catalog::distance_sphere(0.6, 1));
  spheres.push_back(catalog::distance_sphere(0.6, 3));
  for (const auto& s : spheres) {
    for (const auto& r : sweep(s, 20).rows) {
      if (!r.point || !r.point->beta) {
        o.require(false, tag(s) + " missing beta");
        continue;
      }
      for (double d : r.point->beta->gradient) dbeta = std::max(dbeta, std::abs(d));
    }
  }
  o.require(dbeta < 1e-7, "distance-sphere d beta");
  const auto pert = sweep(catalog::perturbed_torus(), 20);
  o.require(pert.summary.max_hvec > 1e-3, "perturbed torus is minimal");
  o.require(pert.summary.max_hvec_gap < 1e-5, "H computations disagree on the perturbed torus");
  o.detail << "|H| Clifford = " << clifford << ", equator = " << equator << "; max |d beta| on spheres = " << dbeta
           << "; perturbed torus |H| = " << pert.summary.max_hvec << ", H gap = " << pert.summary.max_hvec_gap;
}

void criterion_8(Outcome& o) {
  for (double r : {0.3, 0.6, 1.0}) {
    const auto imm = catalog::distance_sphere(r, 0);
    const auto pts = grid_points(imm.domain(), std::vector<int>{20, 20});
    try {
      const auto mp = find_minimal_parallel(imm, pts, 1e-6);
      const auto member = mp.on_polar ? polar(imm, mp.t0) : parallel(imm, mp.t0);
      const double defect = quadric_defect(member, pts);
      double min_det = 1e300;
      for (const auto& u : pts) min_det = std::min(min_det, std::abs(point_geometry(member, u).g.determinant()));
      o.require(mp.max_trace < 1e-7, "r=" + std::to_string(r) + " trace");
      o.require(defect < 1e-10, "r=" + std::to_string(r) + " off the quadric");
      o.require(min_det > 1e-6, "r=" + std::to_string(r) + " not immersed");
      o.detail << "r=" << r << ": t0=" << mp.t0 << " max|tr A|=" << mp.max_trace << " quadric defect=" << defect
               << " min|det g|=" << min_det << "; ";
    } catch (const GeoError& e) {
      o.require(false, "r=" + std::to_string(r) + ": " + e.what());
    }
  }
}

void criterion_9(Outcome& o) {
  std::vector<Immersion> tubes;
  for (double r : {0.3, 0.6, kPi / 4, 1.0}) tubes.push_back(catalog::clifford_tube(r, 0));
  for (int p : {1, 2, 3}) tubes.push_back(catalog::clifford_tube(0.5, p));
  double tube_curv = 0.0, tube_w = 0.0;
  bool agree = true;
  std::string disagree_on;
  for (const auto& t : tubes) {
    try {
      const auto f = flatness_weingarten(sweep(t, 20));
      tube_curv = std::max(tube_curv, f.curvature_gbar_prime);
      tube_w = std::max(tube_w, f.weingarten_residual);
      if (!f.verdicts_agree) {
        agree = false;
        disagree_on += tag(t) + " ";
      }
    } catch (const GeoError& e) {
      o.require(false, tag(t) + ": " + e.what());
    }
  }
  o.require(tube_curv < 1e-5, "tube gbar' curvature");
  o.require(tube_w < 1e-8, "tube Weingarten residual");
  const auto pert = flatness_weingarten(sweep(catalog::perturbed_torus(), 20));
  o.require(pert.curvature_gbar_prime > 1e-3, "perturbed torus gbar' flat");
  o.require(pert.weingarten_residual > 1e-3, "perturbed torus Weingarten");
  if (!pert.verdicts_agree) {
    agree = false;
    disagree_on += "perturbed-torus ";
  }
  o.require(agree, "G and G' flatness verdicts differ on " + disagree_on);
  o.detail << "tubes: max K(gbar') = " << tube_curv << ", Weingarten = " << tube_w
           << "; perturbed torus: K(gbar') = " << pert.curvature_gbar_prime << ", Weingarten = "
           << pert.weingarten_residual << ", K(gbar) = " << pert.curvature_gbar;
}

void criterion_10(Outcome& o) {
  const auto ns = sweep(catalog::null_scroll(), 20);
  o.require(ns.summary.masked == 0 && ns.summary.shape_classes == "nondiagonal", "null scroll classes " + ns.summary.shape_classes);
  o.require(ns.summary.max_hvec_G < 1e-8, "null scroll G(H,H)");
  o.require(ns.summary.max_hvec > 1e-3, "null scroll H vanishes");
  double gp = 0.0;
  std::vector<Immersion> surfaces;
  for (double r : {0.3, 0.6, 1.0}) surfaces.push_back(catalog::clifford_tube(r, 0));
  for (int p : {1, 2, 3}) surfaces.push_back(catalog::clifford_tube(0.5, p));
  surfaces.push_back(catalog::revolution(catalog::kDefaultProfile, 0));
  surfaces.push_back(catalog::revolution(catalog::kDefaultProfile, 2));
  for (const auto& s : surfaces) {
    const auto rep = sweep(s, 20);
    gp = std::max(gp, rep.summary.max_hvec_prime_Gprime);
    o.require(rep.summary.marginally_trapped_Gprime && rep.summary.max_hvec_prime_Gprime < 1e-8, tag(s));
  }
  o.detail << "null scroll: classes=" << ns.summary.shape_classes << " max|G(H,H)| = " << ns.summary.max_hvec_G
           << ", max|H| = " << ns.summary.max_hvec << "; tubes and revolution: max|G'(H',H')| = " << gp;
}

void criterion_11(Outcome& o) {
  double round_trip = 0.0, offset = 0.0;
  int surfaces = 0;
  for (const auto& imm : all_catalog()) {
    std::array<int, 2> counts{};
    for (int a = 0; a < 2; ++a) counts[static_cast<std::size_t>(a)] = imm.domain().periodic[static_cast<std::size_t>(a)] ? 32 : 41;
    const auto fg = gauss_frames(imm, counts);
    auto gap = [&](const Reconstruction& rec, const Immersion& target) {
      double worst = 0.0;
      for (int i = 0; i < fg.count(0); ++i)
        for (int j = 0; j < fg.count(1); ++j) {
          const std::vector<double> u{fg.axes[0][static_cast<std::size_t>(i)], fg.axes[1][static_cast<std::size_t>(j)]};
          worst = std::max(worst, (rec.points[fg.at(i, j)] - target.value(u)).lpNorm<Eigen::Infinity>());
        }
      return worst;
    };
    try {
      const double g0 = gap(reconstruct_hypersurface(fg), imm);
      ReconstructOptions opts;
      opts.base_t = 0.3;
      const double g1 = gap(reconstruct_hypersurface(fg, opts), parallel(imm, 0.3));
      round_trip = std::max(round_trip, g0);
      offset = std::max(offset, g1);
      o.require(g0 < 1e-6 && g1 < 1e-6, tag(imm));
      ++surfaces;
    } catch (const GeoError& e) {
      o.require(false, tag(imm) + ": " + e.what());
    }
  }
  double residual = 0.0;
  const auto tilted = tilted_gauss_frames(catalog::clifford_tube(kPi / 4), {16, 16}, 0.2);
  try {
    (void)reconstruct_hypersurface(tilted);
    o.require(false, "tilted congruence accepted");
  } catch (const GeoError& e) {
    o.require(e.kind() == ErrorKind::not_lagrangian, std::string("wrong error: ") + e.what());
    ReconstructOptions loose;
    loose.closed_tol = 1e300;
    residual = reconstruct_hypersurface(tilted, loose).closedness_residual;
    o.require(residual > 1e-3, "counterexample residual too small");
  }
  o.detail << surfaces << " catalog Gauss maps: max round-trip error = " << round_trip
           << ", max error vs parallel(0.3) = " << offset << "; counterexample rejected, residual = " << residual;
}

void criterion_12(Outcome& o) {
  double sphere = 0.0;
  for (double r : {0.3, 0.6, 1.0}) {
    for (const auto& row : sweep(catalog::distance_sphere(r, 0), 20).rows) {
      if (!row.point || !row.point->gbar_prime) {
        o.require(false, "distance sphere gbar' missing");
        continue;
      }
      sphere = std::max(sphere, row.point->gbar_prime->cwiseAbs().maxCoeff());
    }
  }
  o.require(sphere < 1e-8, "distance sphere gbar' not zero");

  double min_abs_eig = 1e300;
  bool definite = true;
  for (const auto& row : sweep(catalog::complex_saddle(), 20).rows) {
    if (!row.point || !row.point->gbar_prime) {
      definite = false;
      continue;
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> es(*row.point->gbar_prime);
    const auto ev = es.eigenvalues();
    definite = definite && ev[0] * ev[1] > 0.0;
    min_abs_eig = std::min(min_abs_eig, ev.cwiseAbs().minCoeff());
  }
  o.require(definite && min_abs_eig > 1e-8, "complex saddle gbar' not definite");

  double sigma_min = 0.0;
  for (const auto& row : sweep(catalog::null_scroll(), 20).rows) {
    if (!row.point || !row.point->gbar_prime) {
      o.require(false, "null scroll gbar' missing");
      continue;
    }
    const Eigen::JacobiSVD<Matrix> svd(*row.point->gbar_prime);
    sigma_min = std::max(sigma_min, svd.singularValues().minCoeff());
  }
  o.require(sigma_min < 1e-8, "null scroll gbar' has rank 2");
  o.detail << "distance spheres max|gbar'| = " << sphere << "; complex saddle definite, min |eigenvalue| = "
           << min_abs_eig << "; null scroll max smallest singular value = " << sigma_min;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"Einstein metric and scalar curvature of G", criterion_1},
      {"G' scalar flat and conformally flat, G never conformally flat", criterion_2},
      {"closedness of the symplectic form", criterion_3},
      {"structure table of the six three-dimensional cases", criterion_4},
      {"gbar and gbar' formulas match pullbacks", criterion_5},
      {"cubic form equals eps nabla h and is tri-symmetric", criterion_6},
      {"minimality of congruences", criterion_7},
      {"minimal parallel surface of distance spheres", criterion_8},
      {"flatness versus Weingarten", criterion_9},
      {"marginally trapped congruences", criterion_10},
      {"reconstruction from a Lagrangian congruence", criterion_11},
      {"degeneracy trichotomy of gbar'", criterion_12},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) {
    const int c = std::atoi(argv[k]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[k]);
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty())
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) selected.push_back(c);

  bool all = true;
  for (int c : selected) {
    Outcome o;
    try {
      criteria[static_cast<std::size_t>(c - 1)].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::printf("criterion %2d: %s  %s | %s\n", c, o.pass ? "PASS" : "FAIL", criteria[static_cast<std::size_t>(c - 1)].first,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
