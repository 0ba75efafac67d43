#include "doctest.h"

#include <cmath>
#include <cstring>

#include "reflectolab/errors.hpp"
#include "reflectolab/esp.hpp"
#include "reflectolab/path.hpp"
#include "reflectolab/serialize.hpp"

using namespace reflectolab;

TEST_SUITE("path") {
  TEST_CASE("construction validates grid and values") {
    CHECK_NOTHROW(Path::scalar({0.0}, {1.0}));
    CHECK_THROWS_AS(Path::scalar({}, {}), DomainError);
    CHECK_THROWS_AS(Path::scalar({0.0, 0.0}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(Path::scalar({0.0, 1.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(Path::scalar({0.0, 1.0}, {1.0, NAN}), DomainError);
    CHECK_THROWS_AS(Path::scalar({0.0, 1.0}, {1.0, INFINITY}), DomainError);
    CHECK_THROWS_AS(Path({0.0, 1.0}, {1.0, 2.0, 3.0}, 2), DomainError);
  }

  TEST_CASE("uniform grid ends exactly at the horizon") {
    const auto g = uniform_grid(3.0, 7);
    REQUIRE(g.size() == 8);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 3.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  }

  TEST_CASE("component, slice and subsample") {
    const Path p({0.0, 1.0, 2.0}, {1, 2, 3, 4, 5, 6}, 2);
    CHECK(p.component(1).values() == std::vector<double>{2, 4, 6});
    const auto s = p.slice(1, 2);
    CHECK(s.times() == std::vector<double>{1.0, 2.0});
    CHECK(s(0, 0) == 3.0);
    CHECK(p.subsample(2).values() == std::vector<double>{1, 2, 5, 6});
    CHECK_THROWS_AS(p.slice(2, 3), DomainError);
  }

  TEST_CASE("difference and sup distance require a shared grid") {
    const auto a = Path::scalar({0.0, 1.0}, {0.0, 1.0});
    const auto b = Path::scalar({0.0, 1.0}, {0.5, -1.0});
    CHECK(sup_distance(a, b) == doctest::Approx(2.0));
    CHECK(difference(a, b).values() == std::vector<double>{-0.5, 2.0});
    CHECK_THROWS_AS(sup_distance(a, Path::scalar({0.0, 2.0}, {0.0, 0.0})), DomainError);
  }
}

TEST_SUITE("esp") {
  TEST_CASE("GPS weights invariants") {
    CHECK_NOTHROW(GpsWeights({0.3, 0.7}));
    CHECK_THROWS_AS(GpsWeights({1.0}), DomainError);
    CHECK_THROWS_AS(GpsWeights({0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(GpsWeights({1.2, -0.2}), DomainError);
    CHECK_THROWS_AS(GpsWeights({0.0, 1.0}), DomainError);
    const auto u = GpsWeights::uniform(4);
    CHECK(u.dim() == 4);
    CHECK(u[2] == 0.25);
  }

  TEST_CASE("valley domain boundaries") {
    CHECK_THROWS_AS(ValleyDomain(0.0, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(ValleyDomain(1.0, 1.0, -1.0, 1.0), DomainError);
    const ValleyDomain d(2.0, 1.0, 0.5, 3.0);
    CHECK(d.left(2.0) == doctest::Approx(-2.0));
    CHECK(d.right(2.0) == doctest::Approx(6.0));
    for (double y : {0.01, 0.5, 3.0}) CHECK(d.left(y) < d.right(y));
  }

  TEST_CASE("domain membership and level values") {
    const EspSpec half = HalfLine{};
    const EspSpec gps = GpsWeights::uniform(3);
    const EspSpec valley = ValleyDomain(1.0, 1.0, 1.0, 1.0);
    const std::vector<double> z1{-1e-10}, z1bad{-1e-6};
    CHECK(in_domain(half, z1));
    CHECK_FALSE(in_domain(half, z1bad));
    const std::vector<double> z3{0.1, 0.2, 0.0};
    CHECK(in_domain(gps, z3));
    CHECK(level_value(gps, z3) == doctest::Approx(0.3));
    const std::vector<double> zin{0.5, 1.0}, zout{1.5, 1.0}, zneg{0.0, -0.1};
    CHECK(in_domain(valley, zin));
    CHECK_FALSE(in_domain(valley, zout));
    CHECK_FALSE(in_domain(valley, zneg));
    CHECK(level_value(valley, zin) == 1.0);
    CHECK(boundary_distance(valley, zin) == doctest::Approx(0.5));
    const std::vector<double> zmid{0.25, 1.0};
    CHECK(boundary_distance(valley, zmid) == doctest::Approx(0.75));
    CHECK(boundary_distance(gps, z3) == 0.0);
    CHECK(esp_dim(half) == 1);
    CHECK(esp_dim(valley) == 2);
  }
}

TEST_SUITE("serialize") {
  TEST_CASE("doubles round-trip through 17 significant digits") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0}) {
      const double y = parse_double(format_double(x));
      CHECK(std::memcmp(&x, &y, sizeof x) == 0);
    }
    CHECK_THROWS(parse_double("abc"));
    CHECK_THROWS(parse_double("1.0x"));
  }

  TEST_CASE("path CSV and JSON round-trip bit-exactly") {
    const Path p({0.0, 0.1, 0.30000000000000004}, {1.0 / 3.0, -2.0, 1e-17, 5.0, 7.25, -0.0}, 2);
    const auto csv = path_to_csv(p);
    CHECK(csv.rfind("t,x_1,x_2\n", 0) == 0);
    CHECK(path_from_csv(csv) == p);
    CHECK(path_from_json(path_to_json(p, {{"k", 1}})) == p);
    CHECK(path_to_csv(path_from_csv(csv)) == csv);
  }
}
