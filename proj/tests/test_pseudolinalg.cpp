#include <catch_amalgamated.hpp>

#include <cmath>

#include "geocon/pseudolinalg.hpp"
#include "support.hpp"

using namespace geocon;
using Catch::Approx;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// A random metric of the requested index and a random g-symmetric operator.
std::pair<Matrix, Matrix> random_pair(testing::Rng& rng, int minus) {
  Matrix P = rng.matrix(2, 2);
  while (std::abs(P.determinant()) < 0.2) P = rng.matrix(2, 2);
  Matrix D = Matrix::Identity(2, 2);
  for (int k = 0; k < minus; ++k) D(k, k) = -1.0;
  const Matrix g = P.transpose() * D * P;
  Matrix h = rng.matrix(2, 2);
  h = (0.5 * (h + h.transpose())).eval();
  return {g, g.inverse() * h};
}

}  // namespace

TEST_CASE("inner product follows the leading-minus convention", "[pseudolinalg]") {
  CHECK(inner(SignatureSpace(4, 0), Vector::Unit(4, 0), Vector::Unit(4, 0)) == 1.0);
  CHECK(inner(SignatureSpace(4, 1), Vector::Unit(4, 0), Vector::Unit(4, 0)) == -1.0);
  CHECK(inner(SignatureSpace(4, 2), vec({1, 1, 1, 1}), vec({1, -1, 2, 0})) == 2.0);
  CHECK_THROWS_AS(inner(SignatureSpace(4, 0), Vector::Zero(3), Vector::Zero(4)), GeoError);
}

TEST_CASE("wedge uses the lexicographic pair basis", "[pseudolinalg]") {
  const Bivector b = wedge(vec({1, 0, 1, 0}), vec({0, 1, 0, 1}));
  const Vector expected = vec({1, 0, 1, -1, 0, 1});
  CHECK((b.coords() - expected).norm() == 0.0);
  CHECK(wedge(Vector::Unit(4, 0), Vector::Unit(4, 1)).coords() == Vector::Unit(6, 0));
  const Vector x = vec({0.3, -1.2, 2.0, 0.5});
  CHECK(wedge(x, x).coords().norm() == 0.0);
  CHECK(Bivector::from_matrix(b.to_matrix()).coords() == b.coords());
}

TEST_CASE("bivector inner product examples", "[pseudolinalg]") {
  const Bivector e12 = wedge(Vector::Unit(4, 0), Vector::Unit(4, 1));
  const Bivector e13 = wedge(Vector::Unit(4, 0), Vector::Unit(4, 2));
  CHECK(wedge_inner(SignatureSpace(4, 0), e12, e12) == 1.0);
  CHECK(wedge_inner(SignatureSpace(4, 1), e12, e12) == -1.0);
  CHECK(wedge_inner(SignatureSpace(4, 1), e12, e13) == 0.0);
}

TEST_CASE("decomposable bivector inner product is the Gram determinant", "[pseudolinalg][property]") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = rng.integer(3, 6);
    const SignatureSpace s(dim, rng.integer(0, dim));
    const Vector x = rng.vector(dim), y = rng.vector(dim);
    const double lhs = wedge_inner(s, wedge(x, y), wedge(x, y));
    const double rhs = inner(s, x, x) * inner(s, y, y) - std::pow(inner(s, x, y), 2);
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("bivector operator matches its defining formula", "[pseudolinalg]") {
  testing::Rng rng(3);
  const SignatureSpace s(4, 1);
  const Vector x = rng.vector(4), y = rng.vector(4), v = rng.vector(4);
  const Vector direct = inner(s, x, v) * y - inner(s, y, v) * x;
  CHECK((bivector_operator(s, wedge(x, y)) * v - direct).norm() < 1e-13);
}

TEST_CASE("orthonormal complement examples", "[pseudolinalg]") {
  {
    const Frame f = orthonormal_complement(SignatureSpace(4, 0), Vector::Unit(4, 0), Vector::Unit(4, 1));
    CHECK(f.signs == std::vector<int>{1, 1});
    CHECK(std::abs(f.vectors[0].dot(Vector::Unit(4, 2))) == Approx(1.0));
    CHECK(std::abs(f.vectors[1].dot(Vector::Unit(4, 3))) == Approx(1.0));
  }
  {
    const Frame f = orthonormal_complement(SignatureSpace(4, 1), Vector::Unit(4, 1), Vector::Unit(4, 2));
    CHECK(f.signs[0] == -1);
    CHECK(std::abs(f.vectors[0][0]) == Approx(1.0));
  }
  {
    // Unit spacelike x in the (e1,e2) Lorentz plane.
    const double sh = std::sinh(0.7), ch = std::cosh(0.7);
    const Frame f = orthonormal_complement(SignatureSpace(4, 1), vec({sh, ch, 0, 0}), Vector::Unit(4, 2));
    CHECK(f.signs == std::vector<int>{-1, 1});
  }
  CHECK_THROWS_AS(orthonormal_complement(SignatureSpace(4, 1), vec({1, 1, 0, 0}), vec({0, 0, 0, 0})), GeoError);
}

TEST_CASE("orthonormal complement is orthonormal and oriented", "[pseudolinalg][property]") {
  testing::Rng rng(5);
  int checked = 0;
  while (checked < 500) {
    const int dim = rng.integer(3, 6);
    const SignatureSpace s(dim, rng.integer(0, dim));
    const Vector x = rng.vector(dim), y = rng.vector(dim);
    const double gram = inner(s, x, x) * inner(s, y, y) - std::pow(inner(s, x, y), 2);
    if (std::abs(gram) < 1e-2) continue;
    const Frame f = orthonormal_complement(s, x, y);
    for (std::size_t i = 0; i < f.vectors.size(); ++i) {
      REQUIRE(std::abs(inner(s, f.vectors[i], x)) < 1e-10 * x.norm());
      REQUIRE(std::abs(inner(s, f.vectors[i], y)) < 1e-10 * y.norm());
      for (std::size_t j = 0; j < f.vectors.size(); ++j) {
        const double want = i == j ? f.signs[i] : 0.0;
        REQUIRE(std::abs(inner(s, f.vectors[i], f.vectors[j]) - want) < 1e-10);
      }
    }
    std::vector<Vector> cols{x, y};
    cols.insert(cols.end(), f.vectors.begin(), f.vectors.end());
    REQUIRE(det_columns(cols) > 0.0);
    ++checked;
  }
}

TEST_CASE("classify_shape examples", "[pseudolinalg]") {
  {
    const auto c = classify_shape(Matrix::Identity(2, 2), Vector(vec({2, 3})).asDiagonal(), 1e-10);
    const auto& r = std::get<RealDiagonal>(c);
    CHECK(r.kappas == std::vector<double>{2.0, 3.0});
    CHECK(r.signs == std::vector<int>{1, 1});
  }
  {
    Matrix g(2, 2), A(2, 2);
    g << -1, 0, 0, 1;
    A << 1, 2, -2, 1;
    const auto& z = std::get<ComplexDiagonal>(classify_shape(g, A, 1e-10));
    CHECK(z.H == Approx(1.0));
    CHECK(z.lambda == Approx(2.0));
  }
  {
    Matrix g(2, 2), A(2, 2);
    g << 0, 1, 1, 0;
    A << 0.5, 1, 0, 0.5;
    const auto& n = std::get<NonDiagonal>(classify_shape(g, A, 1e-10));
    CHECK(n.H == Approx(0.5));
    CHECK(n.sign == 1);
  }
  {
    Matrix g(2, 2);
    g << -1, 0, 0, 1;
    const auto c = classify_shape(g, 0.7 * Matrix::Identity(2, 2), 1e-10);
    CHECK(std::get<RealDiagonal>(c).umbilic);
  }
  Matrix bad(2, 2);
  bad << 1, 2, 0, 1;
  CHECK_THROWS_AS(classify_shape(Matrix::Identity(2, 2), bad, 1e-10), GeoError);
  CHECK_THROWS_AS(classify_shape(Matrix::Zero(2, 2), Matrix::Identity(2, 2), 1e-10), GeoError);
}

TEST_CASE("classify_shape round-trips random operators", "[pseudolinalg][property]") {
  testing::Rng rng(17);
  int counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix g, A;
    const int kind = trial % 4;
    if (kind < 3) {
      std::tie(g, A) = random_pair(rng, kind);
    } else {
      // Non-diagonalizable: canonical null form in a random frame.
      Matrix F = rng.matrix(2, 2);
      while (std::abs(F.determinant()) < 0.2) F = rng.matrix(2, 2);
      Matrix gc(2, 2), ac(2, 2);
      gc << 0, 1, 1, 0;
      ac << rng.normal(), (trial % 8 == 3 ? 1.0 : -1.0), 0, 0;
      ac(1, 1) = ac(0, 0);
      const Matrix Fi = F.inverse();
      g = Fi.transpose() * gc * Fi;
      A = F * ac * Fi;
    }
    INFO("trial " << trial << " g=" << g << " A=" << A);
    const auto c = classify_shape(g, A, 1e-9);
    ++counts[std::min<std::size_t>(c.index(), 2)];
    if (kind == 3) REQUIRE(std::holds_alternative<NonDiagonal>(c));
    const auto [g2, A2] = canonical_forms(c);
    REQUIRE((A2 - A).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, A.norm()));
    REQUIRE((g2 - g).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, g.norm()));
  }
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
}

TEST_CASE("higher-dimensional operators classify only when real", "[pseudolinalg]") {
  const Matrix g = Vector(vec({1, 1, 1})).asDiagonal();
  const auto c = classify_operator(g, Vector(vec({1, -2, 0.5})).asDiagonal(), 1e-10);
  CHECK(std::get<RealDiagonal>(c).kappas == std::vector<double>{-2.0, 0.5, 1.0});
  Matrix gi = Matrix::Identity(3, 3);
  gi(0, 0) = -1;
  Matrix A = Matrix::Zero(3, 3);
  A << 1, 2, 0, -2, 1, 0, 0, 0, 3;
  CHECK(std::holds_alternative<Unclassified>(classify_operator(gi, A, 1e-10)));
}

TEST_CASE("generic small-matrix inverse and determinant over jets", "[pseudolinalg]") {
  const std::array<double, 1> at{0.4};
  const auto u = seed_variables(at, 3);
  SmallMatrix<Jet> m(2, 2);
  m(0, 0) = cos(u[0]);
  m(0, 1) = sin(u[0]);
  m(1, 0) = -2.0 * sin(u[0]);
  m(1, 1) = 2.0 * cos(u[0]);
  const Jet det = determinant(m);
  CHECK(det.value() == Approx(2.0));
  CHECK(std::abs(det.d(0)) < 1e-14);
  const auto prod = m * inverse(m);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(prod(i, j).value() == Approx(i == j ? 1.0 : 0.0).margin(1e-14));
      CHECK(std::abs(prod(i, j).partial({2})) < 1e-13);
    }
}

TEST_CASE("jet determinant keeps derivatives of zero-valued entries", "[pseudolinalg]") {
  const std::vector<double> at{0.0, 0.0};
  const auto u = seed_variables(at, 2);
  // [[u1, 1, 0], [0, u2, 1], [1, 0, 1]] has det u1*u2 + 1
  SmallMatrix<Jet> m(3, 3);
  m(0, 0) = u[0]; m(0, 1) = Jet(1.0); m(0, 2) = Jet(0.0);
  m(1, 0) = Jet(0.0); m(1, 1) = u[1]; m(1, 2) = Jet(1.0);
  m(2, 0) = Jet(1.0); m(2, 1) = Jet(0.0); m(2, 2) = Jet(1.0);
  const Jet det = determinant(m);
  CHECK(det.value() == Catch::Approx(1.0));
  CHECK(det.d(0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(det.partial({1, 1}) == Catch::Approx(1.0));
  // 2x2 with zero value everywhere: det(u1 I) = u1^2
  SmallMatrix<Jet> z(2, 2);
  z(0, 0) = u[0]; z(1, 1) = u[0]; z(0, 1) = Jet(0.0); z(1, 0) = Jet(0.0);
  CHECK(determinant(z).partial({2, 0}) == Catch::Approx(2.0));
}
