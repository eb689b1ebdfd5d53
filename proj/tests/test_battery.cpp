#include <catch_amalgamated.hpp>

#include "geocon/battery.hpp"

using namespace geocon;

namespace {

const BatteryCheck& named(const BatteryResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("battery on S3 passes every check", "[battery]") {
  const auto r = structure_battery(2, 0, 1, {.points = 10, .charts = 3});
  CHECK(r.eps == 1);
  CHECK(r.scalar_expected == 8.0);
  CHECK(r.checks.size() == 10);
  CHECK(r.pass());
  CHECK(named(r, "weyl-nonzero").value > 0.5);
}

TEST_CASE("battery in dimension three skips the G' checks", "[battery]") {
  const auto r = structure_battery(3, 1, -1, {.points = 5, .charts = 2});
  CHECK(r.scalar_expected == -18.0);
  CHECK(named(r, "einstein").pass);
  CHECK(named(r, "closed").pass);
  for (const auto& c : r.checks) CHECK(c.name != "weyl-prime");
}

TEST_CASE("closedness residual decays quadratically on warped charts", "[battery]") {
  for (int p : {0, 2}) {
    const auto r = structure_battery(2, p, p == 0 ? 1 : -1, {.points = 1, .charts = 5});
    CHECK(named(r, "closed-decay-min").value > 80.0);
    CHECK(named(r, "closed-decay-max").value < 120.0);
  }
}

TEST_CASE("battery is deterministic for a fixed seed", "[battery]") {
  const auto a = structure_battery(2, 1, 1, {.points = 4, .charts = 2, .seed = 7});
  const auto b = structure_battery(2, 1, 1, {.points = 4, .charts = 2, .seed = 7});
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t k = 0; k < a.checks.size(); ++k) CHECK(a.checks[k].value == b.checks[k].value);
}

TEST_CASE("battery rejects empty spaces and other dimensions", "[battery]") {
  CHECK_THROWS_MATCHES(structure_battery(2, 0, -1), GeoError,
                       Catch::Matchers::Predicate<GeoError>([](const GeoError& e) { return e.kind() == ErrorKind::empty_space; }));
  CHECK_THROWS_MATCHES(structure_battery(4, 0, 1), GeoError,
                       Catch::Matchers::Predicate<GeoError>([](const GeoError& e) { return e.kind() == ErrorKind::unsupported_dimension; }));
}
