#pragma once

// Built-in surfaces in X^3_{p,1} and immersions from component expressions.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/exprparse.hpp"
#include "geocon/hypersurface.hpp"

namespace geocon {

using CatalogParams = std::map<std::string, std::string>;

namespace catalog {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Domain torus_domain() { return {{0.0, 0.0}, {kTwoPi, kTwoPi}, {true, true}}; }
inline Domain sphere_domain() { return {{0.0, -1.2}, {kTwoPi, 1.2}, {true, false}}; }

// phi = (cos u cos v, sin u cos v, sin v, 0) for p=0; the round sphere in the
// spacelike coordinates for p=1; a hyperbolic plane x3=0 for p=2, 3.
inline Immersion equator(int p = 0) {
  if (p == 0 || p == 1) {
    return Immersion::from_function(SpaceForm(2, p), sphere_domain(), [p](std::span<const Jet> u) {
      const Jet a = cos(u[0]) * cos(u[1]);
      const Jet b = sin(u[0]) * cos(u[1]);
      const Jet c = sin(u[1]);
      return p == 0 ? std::vector<Jet>{a, b, c, Jet(0.0)} : std::vector<Jet>{Jet(0.0), a, b, c};
    }, "equator");
  }
  if (p == 2 || p == 3) {
    const Domain d{{0.0, 0.2}, {kTwoPi, 1.5}, {true, false}};
    return Immersion::from_function(SpaceForm(2, p), d, [](std::span<const Jet> u) {
      return std::vector<Jet>{sinh(u[1]) * cos(u[0]), sinh(u[1]) * sin(u[0]), Jet(0.0), cosh(u[1])};
    }, "equator");
  }
  throw GeoError(ErrorKind::invalid_argument, "equator exists for p in {0,1,2,3}");
}

// Geodesic sphere of radius r about a point.
inline Immersion distance_sphere(double r, int p = 0) {
  if (!(r > 0.0)) throw GeoError(ErrorKind::invalid_argument, "radius must be positive");
  if (p == 0 && r >= std::numbers::pi) throw GeoError(ErrorKind::invalid_argument, "radius must be below pi");
  auto omega = [](std::span<const Jet> u) {
    return std::array<Jet, 3>{cos(u[0]) * cos(u[1]), sin(u[0]) * cos(u[1]), sin(u[1])};
  };
  switch (p) {
    case 0:
      return Immersion::from_function(SpaceForm(2, 0), sphere_domain(), [r, omega](std::span<const Jet> u) {
        const auto w = omega(u);
        return std::vector<Jet>{Jet(std::cos(r)), std::sin(r) * w[0], std::sin(r) * w[1], std::sin(r) * w[2]};
      }, "distance-sphere");
    case 1:
      return Immersion::from_function(SpaceForm(2, 1), sphere_domain(), [r, omega](std::span<const Jet> u) {
        const auto w = omega(u);
        return std::vector<Jet>{Jet(std::sinh(r)), std::cosh(r) * w[0], std::cosh(r) * w[1], std::cosh(r) * w[2]};
      }, "distance-sphere");
    case 3:
      return Immersion::from_function(SpaceForm(2, 3), sphere_domain(), [r, omega](std::span<const Jet> u) {
        const auto w = omega(u);
        return std::vector<Jet>{std::sinh(r) * w[0], std::sinh(r) * w[1], std::sinh(r) * w[2], Jet(std::cosh(r))};
      }, "distance-sphere");
    default:
      throw GeoError(ErrorKind::invalid_argument, "distance-sphere exists for p in {0,1,3}");
  }
}

// Equidistant tube about a geodesic; r = pi/4, p = 0 is the Clifford torus.
inline Immersion clifford_tube(double r, int p = 0) {
  if (!(r > 0.0)) throw GeoError(ErrorKind::invalid_argument, "radius must be positive");
  switch (p) {
    case 0:
      if (r >= std::numbers::pi / 2) throw GeoError(ErrorKind::invalid_argument, "radius must be below pi/2");
      return Immersion::from_function(SpaceForm(2, 0), torus_domain(), [r](std::span<const Jet> u) {
        return std::vector<Jet>{std::cos(r) * cos(u[0]), std::cos(r) * sin(u[0]), std::sin(r) * cos(u[1]),
                                std::sin(r) * sin(u[1])};
      }, "clifford-tube");
    case 1:
      if (r >= std::numbers::pi / 2) throw GeoError(ErrorKind::invalid_argument, "radius must be below pi/2");
      return Immersion::from_function(SpaceForm(2, 1), Domain{{-1.0, 0.0}, {1.0, kTwoPi}, {false, true}},
                                      [r](std::span<const Jet> u) {
                                        return std::vector<Jet>{std::cos(r) * sinh(u[0]), std::cos(r) * cosh(u[0]),
                                                                std::sin(r) * cos(u[1]), std::sin(r) * sin(u[1])};
                                      }, "clifford-tube");
    case 2:
      return Immersion::from_function(SpaceForm(2, 2), torus_domain(), [r](std::span<const Jet> u) {
        return std::vector<Jet>{std::sinh(r) * cos(u[0]), std::sinh(r) * sin(u[0]), std::cosh(r) * cos(u[1]),
                                std::cosh(r) * sin(u[1])};
      }, "clifford-tube");
    case 3:
      return Immersion::from_function(SpaceForm(2, 3), Domain{{0.0, -1.0}, {kTwoPi, 1.0}, {true, false}},
                                      [r](std::span<const Jet> u) {
                                        return std::vector<Jet>{std::sinh(r) * cos(u[0]), std::sinh(r) * sin(u[0]),
                                                                std::cosh(r) * sinh(u[1]), std::cosh(r) * cosh(u[1])};
                                      }, "clifford-tube");
    default:
      throw GeoError(ErrorKind::invalid_argument, "clifford-tube exists for p in {0,1,2,3}");
  }
}

inline constexpr std::string_view kDefaultProfile = "0.7 + 0.25*sin(u1)";

// Surface swept by rotating a profile curve; rotation acts on the second
// coordinate plane (p=0) or the first (p=2). The profile rho(u1) is the
// distance to the rotation axis measured along the quadric.
inline Immersion revolution(std::string_view profile = kDefaultProfile, int p = 0) {
  const ExprPtr rho = parse(profile, 1);
  if (p == 0) {
    return Immersion::from_function(SpaceForm(2, 0), torus_domain(), [rho](std::span<const Jet> u) {
      const Jet r = eval_jet(*rho, u.subspan(0, 1));
      return std::vector<Jet>{cos(r) * cos(u[0]), cos(r) * sin(u[0]), sin(r) * cos(u[1]), sin(r) * sin(u[1])};
    }, "revolution");
  }
  if (p == 2) {
    return Immersion::from_function(SpaceForm(2, 2), torus_domain(), [rho](std::span<const Jet> u) {
      const Jet r = eval_jet(*rho, u.subspan(0, 1));
      return std::vector<Jet>{sinh(r) * cos(u[1]), sinh(r) * sin(u[1]), cosh(r) * cos(u[0]), cosh(r) * sin(u[0])};
    }, "revolution");
  }
  throw GeoError(ErrorKind::invalid_argument, "revolution exists for p in {0,2}");
}

// Clifford torus with a radius modulated in both parameters (not Weingarten).
inline Immersion perturbed_torus(double amplitude = 0.1) {
  return Immersion::from_function(SpaceForm(2, 0), torus_domain(), [amplitude](std::span<const Jet> u) {
    const Jet r = std::numbers::pi / 4 + amplitude * (sin(u[0]) * cos(2.0 * u[1]));
    return std::vector<Jet>{cos(r) * cos(u[0]), cos(r) * sin(u[0]), sin(r) * cos(u[1]), sin(r) * sin(u[1])};
  }, "perturbed-torus");
}

// Lorentzian saddle in de Sitter space with complex principal curvatures.
inline Immersion complex_saddle(double lambda = 0.5) {
  if (std::abs(std::abs(lambda) - 1.0) < 1e-3 || lambda == 0.0) {
    throw GeoError(ErrorKind::invalid_argument, "lambda must be nonzero and away from +-1");
  }
  const Domain d{{-0.3, -0.3}, {0.3, 0.3}, {false, false}};
  return Immersion::from_function(SpaceForm(2, 1), d, [lambda](std::span<const Jet> u) {
    const Jet z = lambda * (u[0] * u[1]);
    const Jet norm = sqrt(Jet(1.0) - u[0] * u[0] + u[1] * u[1] + z * z);
    return std::vector<Jet>{u[0] / norm, u[1] / norm, z / norm, 1.0 / norm};
  }, "complex-saddle");
}

// Ruled surface gamma(s) + t B(s) in X^3_{2,1}: gamma is a null curve and B a
// null transversal with <gamma', B> = 1, bent by a(s) = bend sin(s) inside the
// null cone of gamma. Its shape operator is non-diagonalizable.
inline Immersion null_scroll(double bend = 0.3) {
  const Domain d{{0.0, -0.5}, {3.0, 0.5}, {false, false}};
  return Immersion::from_function(SpaceForm(2, 2), d, [bend](std::span<const Jet> u) {
    const double alpha = 1.0;
    const double beta = std::sqrt(1.0 + alpha * alpha);
    const double k = alpha / beta;
    const Jet& s = u[0];
    const Jet t = -u[1];
    const Jet c1 = cos(s), s1 = sin(s), c2 = cos(k * s), s2 = sin(k * s);
    const std::array<Jet, 4> gamma{alpha * c1, alpha * s1, beta * c2, beta * s2};
    const std::array<Jet, 4> t1{-s1, c1, Jet(0.0), Jet(0.0)};
    const std::array<Jet, 4> t2{Jet(0.0), Jet(0.0), -s2, c2};
    const std::array<Jet, 4> w{beta * c1, beta * s1, alpha * c2, alpha * s2};
    const Jet a = bend * sin(s);
    std::vector<Jet> out;
    for (std::size_t i = 0; i < 4; ++i) {
      const Jet B = (t2[i] - t1[i]) / (2.0 * alpha);
      const Jet dgamma = alpha * (t1[i] + t2[i]);
      const Jet Bt = B + a * w[i] + (0.5 * (a * a)) * dgamma;
      out.push_back(gamma[i] + t * Bt);
    }
    // t -> -t and the x4 reflection make the null frame with A = [[H, 1], [0, H]] positively oriented
    out[3] = -out[3];
    return out;
  }, "null-scroll");
}

struct Entry {
  std::string name;
  std::vector<int> signatures;  // admissible p
  std::string parameters;       // human-readable parameter list
};

inline const std::vector<Entry>& entries() {
  static const std::vector<Entry> list{
      {"equator", {0, 1, 2, 3}, ""},
      {"distance-sphere", {0, 1, 3}, "r (default 0.6)"},
      {"clifford-tube", {0, 1, 2, 3}, "r (default pi/4)"},
      {"revolution", {0, 2}, "profile (expression in u1, default 0.7 + 0.25*sin(u1))"},
      {"perturbed-torus", {0}, "amplitude (default 0.1)"},
      {"complex-saddle", {1}, "lambda (default 0.5)"},
      {"null-scroll", {2}, "bend (default 0.3)"},
  };
  return list;
}

inline double number_param(const CatalogParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const ExprPtr e = parse(it->second, 1);
  const double unused = 0.0;
  return eval(*e, std::span<const double>(&unused, 1));
}

}  // namespace catalog

// Look up a catalog surface by name; p < 0 selects the first admissible p.
inline Immersion catalog_surface(const std::string& name, const CatalogParams& params = {}, int p = -1) {
  const auto& list = catalog::entries();
  const auto it = std::ranges::find_if(list, [&](const auto& e) { return e.name == name; });
  if (it == list.end()) throw GeoError(ErrorKind::invalid_argument, "unknown catalog surface '" + name + "'");
  if (p < 0) p = it->signatures.front();
  if (std::ranges::find(it->signatures, p) == it->signatures.end()) {
    throw GeoError(ErrorKind::invalid_argument, name + " is not available for p = " + std::to_string(p));
  }
  using namespace catalog;
  if (name == "equator") return equator(p);
  if (name == "distance-sphere") return distance_sphere(number_param(params, "r", 0.6), p);
  if (name == "clifford-tube") return clifford_tube(number_param(params, "r", std::numbers::pi / 4), p);
  if (name == "revolution") {
    const auto pr = params.find("profile");
    return revolution(pr == params.end() ? kDefaultProfile : std::string_view(pr->second), p);
  }
  if (name == "perturbed-torus") return perturbed_torus(number_param(params, "amplitude", 0.1));
  if (name == "complex-saddle") return complex_saddle(number_param(params, "lambda", 0.5));
  return null_scroll(number_param(params, "bend", 0.3));
}

// Immersion from n+2 component expressions in u1..un.
inline Immersion expression_immersion(int p, const std::vector<std::string>& components, Domain domain,
                                      double quadric_tol = 1e-9) {
  const int n = domain.dim();
  if (static_cast<int>(components.size()) != n + 2) {
    throw GeoError(ErrorKind::invalid_argument, "need n+2 component expressions");
  }
  std::vector<ExprPtr> exprs;
  for (std::size_t k = 0; k < components.size(); ++k) {
    try {
      exprs.push_back(parse(components[k], n));
    } catch (const GeoError& e) {
      std::string msg = e.what();
      const std::string prefix = std::string(to_string(e.kind())) + ": ";
      if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
      throw GeoError(e.kind(), "component " + std::to_string(k + 1) + ", " + msg);
    }
  }
  Immersion imm = Immersion::from_function(SpaceForm(n, p), std::move(domain), [exprs](std::span<const Jet> u) {
    std::vector<Jet> out;
    for (const auto& e : exprs) out.push_back(eval_jet(*e, u));
    return out;
  }, "inline");
  std::vector<int> counts(static_cast<std::size_t>(n), 8);
  const double defect = quadric_defect(imm, grid_points(imm.domain(), counts));
  if (defect > quadric_tol) {
    throw GeoError(ErrorKind::invalid_argument, "components do not lie on the quadric (defect " + std::to_string(defect) + ")");
  }
  return imm;
}

}  // namespace geocon
