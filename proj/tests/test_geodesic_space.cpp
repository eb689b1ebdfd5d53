#include <catch_amalgamated.hpp>

#include <cmath>

#include "geocon/geodesic_space.hpp"
#include "support.hpp"

using namespace geocon;
using Catch::Approx;

namespace {

struct Case {
  int n;
  int p;
  int sign;
};

std::vector<Case> all_cases() {
  std::vector<Case> out;
  for (int p = 0; p <= 3; ++p)
    for (int sign : {1, -1})
      if (geodesic_space_nonempty(2, p, sign)) out.push_back({2, p, sign});
  for (int p = 0; p <= 2; ++p)
    for (int sign : {1, -1})
      if (geodesic_space_nonempty(3, p, sign)) out.push_back({3, p, sign});
  return out;
}

TangentAtGeodesic random_tangent(const GeodesicPointPtr& base, testing::Rng& rng) {
  const auto f = frame_E(base);
  TangentAtGeodesic t = rng.normal() * f.vectors[0];
  for (std::size_t a = 1; a < f.vectors.size(); ++a) t = t + rng.normal() * f.vectors[a];
  return t;
}

Matrix operator_matrix(const TangentFrame& f, const std::function<TangentAtGeodesic(const TangentAtGeodesic&)>& op) {
  const auto m = static_cast<Eigen::Index>(f.vectors.size());
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) out.col(a) = frame_coords(op(f.vectors[static_cast<std::size_t>(a)]));
  return out;
}

// Same geodesic with the complement frame reordered timelike-first.
GeodesicPointPtr timelike_first(const GeodesicPointPtr& b) {
  auto v = b->complement().vectors;
  if (b->complement().signs[0] > 0 && b->complement().signs[1] < 0) {
    std::swap(v[0], v[1]);
    v[1] = -v[1];
  }
  return std::make_shared<const GeodesicPoint>(b->space(), b->x(), b->y(), v);
}

}  // namespace

TEST_CASE("six three-dimensional spaces and three n=3 signatures", "[geodesic_space]") {
  CHECK(all_cases().size() == 6 + 5);
  CHECK_FALSE(geodesic_space_nonempty(3, 0, -1));
  CHECK_THROWS_AS(canonical_geodesic(SpaceForm(3, 0), -1), GeoError);
}

TEST_CASE("metric_G examples", "[geodesic_space]") {
  {
    const auto b = make_geodesic(SignatureSpace(4, 0), Vector::Unit(4, 0), Vector::Unit(4, 1));
    const TangentAtGeodesic t(b, Vector::Unit(4, 2), Vector::Zero(4));
    CHECK(metric_G(t, t) == 1.0);
  }
  {
    const auto b = make_geodesic(SignatureSpace(4, 1), Vector::Unit(4, 1), Vector::Unit(4, 2));
    const TangentAtGeodesic t(b, Vector::Unit(4, 0), Vector::Zero(4));
    CHECK(metric_G(t, t) == -1.0);
  }
  testing::Rng rng(41);
  for (const auto& c : all_cases()) {
    const auto b = random_geodesic(SpaceForm(c.n, c.p), c.sign, rng.engine());
    const auto f = frame_E(b);
    for (int i = 0; i < c.n; ++i) {
      for (int j = 0; j < c.n; ++j) {
        CHECK(std::abs(metric_G(f.vectors[static_cast<std::size_t>(i)], f.vectors[static_cast<std::size_t>(c.n + j)])) < 1e-12);
      }
    }
    for (std::size_t a = 0; a < f.vectors.size(); ++a) {
      CHECK(metric_G(f.vectors[a], f.vectors[a]) == Approx(f.signs[a]).margin(1e-12));
    }
  }
}

TEST_CASE("tangent construction rejects non-orthogonal components", "[geodesic_space]") {
  const auto b = make_geodesic(SignatureSpace(4, 0), Vector::Unit(4, 0), Vector::Unit(4, 1));
  CHECK_THROWS_AS(TangentAtGeodesic(b, Vector::Unit(4, 1), Vector::Zero(4)), GeoError);
  CHECK_THROWS_AS(make_geodesic(SignatureSpace(4, 1), Vector::Unit(4, 1), (Vector(4) << 1, 0, 1, 0).finished()),
                  GeoError);
}

TEST_CASE("J examples and properties", "[geodesic_space][property]") {
  const auto b = make_geodesic(SignatureSpace(4, 0), Vector::Unit(4, 0), Vector::Unit(4, 1));
  const TangentAtGeodesic t(b, Vector::Unit(4, 2), Vector::Zero(4));
  const auto jt = apply_J(t);
  CHECK((jt.bivector().coords() - wedge(Vector::Unit(4, 1), Vector::Unit(4, 2)).coords()).norm() < 1e-15);

  testing::Rng rng(43);
  for (const auto& c : all_cases()) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto base = random_geodesic(SpaceForm(c.n, c.p), c.sign, rng.engine());
      const auto t1 = random_tangent(base, rng), t2 = random_tangent(base, rng);
      const int eps = base->eps();
      // J^2 = -eps Id.
      REQUIRE((frame_coords(apply_J(apply_J(t1))) + eps * frame_coords(t1)).norm() < 1e-10);
      const double scale = std::max(1.0, std::abs(metric_G(t1, t1)) + std::abs(metric_G(t2, t2)));
      REQUIRE(std::abs(metric_G(apply_J(t1), apply_J(t2)) - eps * metric_G(t1, t2)) < 1e-10 * scale);
      // The derivation of the plane rotation acts as J on bivectors.
      const Bivector viaop = derivation(base->plane_J(), t1.bivector());
      REQUIRE((viaop.coords() - apply_J(t1).bivector().coords()).norm() < 1e-10 * scale);
      REQUIRE(std::abs(omega(t1, t1)) < 1e-10 * scale);
      REQUIRE(std::abs(omega(t1, t2) + omega(t2, t1)) < 1e-10 * scale);
      REQUIRE(std::abs(omega(apply_J(t1), apply_J(t2)) - eps * omega(t1, t2)) < 1e-10 * scale);
    }
  }
}

TEST_CASE("omega on the E frame", "[geodesic_space]") {
  testing::Rng rng(47);
  for (const auto& c : all_cases()) {
    const auto base = random_geodesic(SpaceForm(c.n, c.p), c.sign, rng.engine());
    const auto f = frame_E(base);
    for (int i = 0; i < c.n; ++i) {
      const auto& Ei = f.vectors[static_cast<std::size_t>(i)];
      const auto& Eni = f.vectors[static_cast<std::size_t>(c.n + i)];
      CHECK(omega(Ei, Eni) == Approx(base->eps() * f.signs[static_cast<std::size_t>(c.n + i)]).margin(1e-12));
    }
  }
}

TEST_CASE("J' structure, commutation and shared symplectic form", "[geodesic_space][property]") {
  testing::Rng rng(53);
  for (const auto& c : all_cases()) {
    if (c.n != 2) continue;
    for (int trial = 0; trial < 30; ++trial) {
      const auto base = random_geodesic(SpaceForm(2, c.p), c.sign, rng.engine());
      const auto t1 = random_tangent(base, rng), t2 = random_tangent(base, rng);
      const int epsp = base->eps_prime();
      const double scale = 1.0 + frame_coords(t1).squaredNorm() + frame_coords(t2).squaredNorm();
      REQUIRE((frame_coords(apply_Jprime(apply_Jprime(t1))) + epsp * frame_coords(t1)).norm() < 1e-10 * scale);
      REQUIRE((frame_coords(apply_J(apply_Jprime(t1))) - frame_coords(apply_Jprime(apply_J(t1)))).norm() <
              1e-10 * scale);
      REQUIRE(std::abs(metric_Gprime(t1, t2) - metric_Gprime(t2, t1)) < 1e-10 * scale);
      REQUIRE(std::abs(omega_prime(t1, t2) - omega(t1, t2)) < 1e-10 * scale);
      REQUIRE(std::abs(metric_G(apply_Jprime(t1), apply_Jprime(t2)) - epsp * metric_G(t1, t2)) < 1e-10 * scale);
      REQUIRE(std::abs(metric_Gprime(apply_Jprime(t1), apply_Jprime(t2)) - epsp * metric_Gprime(t1, t2)) <
              1e-10 * scale);
    }
  }
  const auto b3 = make_geodesic(SignatureSpace(5, 0), Vector::Unit(5, 0), Vector::Unit(5, 1));
  const TangentAtGeodesic t(b3, Vector::Unit(5, 2), Vector::Zero(5));
  CHECK_THROWS_AS(apply_Jprime(t), GeoError);
  CHECK_THROWS_AS(metric_Gprime(t, t), GeoError);
}

TEST_CASE("E-frame matrices of J, J' and eps J J'", "[geodesic_space]") {
  testing::Rng rng(59);
  for (const auto& c : all_cases()) {
    if (c.n != 2) continue;
    const auto base = timelike_first(random_geodesic(SpaceForm(2, c.p), c.sign, rng.engine()));
    const auto f = frame_E(base);
    const double e = base->eps(), ep = base->eps_prime();
    const double e2 = base->complement().signs[1];
    Matrix J(4, 4), Jp(4, 4), EJJp(4, 4), Gp(4, 4);
    J << 0, 0, -e, 0, 0, 0, 0, -e, 1, 0, 0, 0, 0, 1, 0, 0;
    Jp << 0, -ep, 0, 0, 1, 0, 0, 0, 0, 0, 0, -ep, 0, 0, 1, 0;
    EJJp << 0, 0, 0, ep, 0, 0, -1, 0, 0, -e * ep, 0, 0, e, 0, 0, 0;
    // G' = -eps G(., J J' .) gives the opposite overall sign to the
    // anti-diagonal display with entries (e2, -e2, -e2, e2).
    Gp << 0, 0, 0, -e2, 0, 0, e2, 0, 0, e2, 0, 0, -e2, 0, 0, 0;
    CHECK((operator_matrix(f, apply_J) - J).norm() < 1e-12);
    CHECK((operator_matrix(f, apply_Jprime) - Jp).norm() < 1e-12);
    CHECK((e * operator_matrix(f, apply_Jsecond) - EJJp).norm() < 1e-12);
    Matrix gp(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        gp(a, b) = metric_Gprime(f.vectors[static_cast<std::size_t>(a)], f.vectors[static_cast<std::size_t>(b)]);
    CHECK((gp - Gp).norm() < 1e-12);
    CHECK(std::abs(gp(0, 0)) < 1e-14);
  }
}

TEST_CASE("second fundamental form of the embedding", "[geodesic_space]") {
  testing::Rng rng(61);
  for (const auto& c : all_cases()) {
    const auto base = random_geodesic(SpaceForm(c.n, c.p), c.sign, rng.engine());
    const auto f = frame_E(base);
    const auto& e = base->complement();
    const auto& s = base->space();
    for (int i = 0; i < c.n; ++i) {
      for (int j = 0; j < c.n; ++j) {
        const auto hij = second_fund_iota(f.vectors[static_cast<std::size_t>(i)], f.vectors[static_cast<std::size_t>(j)]);
        const double delta = i == j ? e.signs[static_cast<std::size_t>(i)] : 0.0;
        CHECK((hij.coords() + delta * base->bivector().coords()).norm() < 1e-12);
        const auto hinj =
            second_fund_iota(f.vectors[static_cast<std::size_t>(i)], f.vectors[static_cast<std::size_t>(c.n + j)]);
        CHECK((hinj.coords() - wedge(e.vectors[static_cast<std::size_t>(i)], e.vectors[static_cast<std::size_t>(j)]).coords())
                  .norm() < 1e-12);
      }
    }
    // Normal to every tangent.
    for (int trial = 0; trial < 5; ++trial) {
      const auto h = second_fund_iota(random_tangent(base, rng), random_tangent(base, rng));
      for (const auto& t : f.vectors) CHECK(std::abs(wedge_inner(s, h, t.bivector())) < 1e-10 * (1.0 + h.coords().norm()));
    }
  }
}

TEST_CASE("curvature of G: frame values, symmetries and Einstein constant", "[geodesic_space][property]") {
  testing::Rng rng(67);
  for (const auto& c : all_cases()) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto base = random_geodesic(SpaceForm(c.n, c.p), c.sign, rng.engine());
      const auto f = frame_E(base);
      const auto curv = curvature_G(base);
      const int n = c.n, m = 2 * n, eps = base->eps();
      const auto& sg = base->complement().signs;
      const auto& R = curv.riemann;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i != j) {
            REQUIRE(R(i, j, i, j) == Approx(eps * sg[static_cast<std::size_t>(i)] * sg[static_cast<std::size_t>(j)]).margin(1e-12));
            REQUIRE(curv.weyl(i, j, n + i, n + j) ==
                    Approx(sg[static_cast<std::size_t>(i)] * sg[static_cast<std::size_t>(j)]).margin(1e-12));
          }
          REQUIRE(R(i, n + i, j, n + j) == Approx(sg[static_cast<std::size_t>(i)] * sg[static_cast<std::size_t>(j)]).margin(1e-12));
        }
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int cc = 0; cc < m; ++cc)
            for (int d = 0; d < m; ++d) {
              const double r = R(a, b, cc, d);
              REQUIRE(std::abs(r + R(b, a, cc, d)) < 1e-10);
              REQUIRE(std::abs(r + R(a, b, d, cc)) < 1e-10);
              REQUIRE(std::abs(r - R(cc, d, a, b)) < 1e-10);
              REQUIRE(std::abs(r + R(b, cc, a, d) + R(cc, a, b, d)) < 1e-10);
              const int low = (a < n) + (b < n) + (cc < n) + (d < n);
              if (low == 1 || low == 3) REQUIRE(std::abs(r) < 1e-12);
            }
      const Matrix G = Vector::Map(std::vector<double>(f.signs.begin(), f.signs.end()).data(), m).asDiagonal();
      REQUIRE((curv.ricci - eps * n * G).cwiseAbs().maxCoeff() < 1e-9);
      REQUIRE(std::abs(curv.scalar - 2.0 * eps * n * n) < 1e-9);
      // Pointwise API agrees with the frame tensors.
      const auto t1 = random_tangent(base, rng), t2 = random_tangent(base, rng);
      const auto t3 = random_tangent(base, rng), t4 = random_tangent(base, rng);
      REQUIRE(riemann_G(t1, t2, t3, t4) == Approx(detail::contract4(R, t1, t2, t3, t4)).margin(1e-9));
      REQUIRE(ricci_G(t1, t2) == Approx(eps * n * metric_G(t1, t2)).margin(1e-9));
    }
  }
  CHECK(scalar_G(canonical_geodesic(SpaceForm(2, 0), 1)) == Approx(8.0));
  CHECK(scalar_G(canonical_geodesic(SpaceForm(3, 1), -1)) == Approx(-18.0));
}

TEST_CASE("curvature of G': scalar flat, conformally flat, same Ricci", "[geodesic_space][property]") {
  testing::Rng rng(71);
  for (const auto& c : all_cases()) {
    if (c.n != 2) continue;
    for (int trial = 0; trial < 10; ++trial) {
      const auto base = random_geodesic(SpaceForm(2, c.p), c.sign, rng.engine());
      const auto cp = curvature_Gprime(base);
      const auto cg = curvature_G(base);
      REQUIRE(std::abs(cp.scalar) < 1e-9);
      REQUIRE(cp.weyl.max_abs() < 1e-9);
      REQUIRE((cp.ricci - cg.ricci).cwiseAbs().maxCoeff() < 1e-9);
      REQUIRE((cp.ricci - 2.0 * base->eps() * cg.metric).cwiseAbs().maxCoeff() < 1e-9);
      const auto f = frame_E(base);
      REQUIRE(std::abs(weyl_Gprime(f.vectors[0], f.vectors[1], f.vectors[1], f.vectors[3])) < 1e-12);
    }
    CHECK(std::abs(scalar_Gprime(canonical_geodesic(SpaceForm(2, c.p), c.sign))) < 1e-12);
  }
}

TEST_CASE("structure table rows", "[geodesic_space]") {
  const auto row = [](int p, int sign) { return structure_table(SpaceForm(2, p), sign); };
  const auto dS = row(1, 1);
  CHECK(dS.eps == 1);
  CHECK(dS.eps_prime == -1);
  CHECK(dS.signature == std::array<int, 4>{1, -1, 1, -1});
  CHECK(dS.J == StructureType::complex);
  CHECK(dS.Jprime == StructureType::para);
  CHECK(dS.Jsecond == StructureType::complex);
  CHECK(row(0, 1) == kReferenceStructureTable[0].expected);
  const auto ads = row(2, -1);
  CHECK(ads == kReferenceStructureTable[4].expected);
  CHECK(ads.J == StructureType::para);
  // Structure types follow from the signs: J^2 = -eps, J'^2 = -eps', J''^2 = eps eps'.
  for (const auto& r : kReferenceStructureTable) {
    const auto d = row(r.p, r.sign);
    CHECK((d.J == StructureType::complex) == (d.eps == 1));
    CHECK((d.Jprime == StructureType::complex) == (d.eps_prime == 1));
    CHECK((d.Jsecond == StructureType::complex) == (d.eps * d.eps_prime == -1));
  }
}

TEST_CASE("matrix exponential over doubles and jets", "[geodesic_space]") {
  SmallMatrix<double> a(2, 2);
  a(0, 1) = 1.3;
  a(1, 0) = -1.3;
  const auto e = matrix_exp(a);
  CHECK(e(0, 0) == Approx(std::cos(1.3)).margin(1e-14));
  CHECK(e(0, 1) == Approx(std::sin(1.3)).margin(1e-14));
  const std::array<double, 1> at{0.7};
  const auto u = seed_variables(at, 2);
  SmallMatrix<Jet> b(2, 2);
  b(0, 1) = u[0];
  b(1, 0) = u[0];
  const auto eb = matrix_exp(b);
  CHECK(eb(0, 0).value() == Approx(std::cosh(0.7)).margin(1e-14));
  CHECK(eb(0, 1).d(0) == Approx(std::cosh(0.7)).margin(1e-13));
  CHECK(eb(0, 1).partial({2}) == Approx(std::sinh(0.7)).margin(1e-12));
}

TEST_CASE("closedness residual", "[geodesic_space]") {
  testing::Rng rng(73);
  for (const auto& c : all_cases()) {
    const auto base = random_geodesic(SpaceForm(c.n, c.p), c.sign, rng.engine());
    const auto chart = exponential_chart(base);
    std::vector<double> s(static_cast<std::size_t>(2 * c.n));
    for (auto& v : s) v = rng.uniform(-0.3, 0.3);
    const double r = closedness_residual(base->space(), chart, s, 1e-3);
    CHECK(r < 1e-5);
    if (c.n == 2) {
      const double rp = closedness_residual(base->space(), chart, s, 1e-3, SymplecticSource::from_Gprime);
      CHECK(rp == Approx(r).margin(1e-9));
    }
    // The chart is a local diffeomorphism: the pulled-back omega is nondegenerate.
    const Matrix w = pulled_back_omega(base->space(), chart, s, SymplecticSource::from_G);
    CHECK(std::abs(w.determinant()) > 1e-6);
  }
  const Matrix frozen = (Matrix(4, 4) << 0, 1, 2, 3, -1, 0, 4, 5, -2, -4, 0, 6, -3, -5, -6, 0).finished();
  const std::array<double, 4> at{0.1, 0.2, 0.3, 0.4};
  CHECK(closedness_residual([&](std::span<const double>) { return frozen; }, at, 1e-3) == 0.0);
}
