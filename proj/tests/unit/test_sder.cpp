#include "doctest.h"

#include <cmath>
#include <numeric>

#include "reflectolab/errors.hpp"
#include "reflectolab/sder.hpp"
#include "reflectolab/serialize.hpp"
#include "reflectolab/skorokhod.hpp"

using namespace reflectolab;

namespace {

SderSpec gps_spec(std::vector<double> start) {
  const std::size_t J = start.size();
  return SderSpec{GpsWeights::uniform(J), Coefficients::driftless_identity(J), std::move(start)};
}

std::vector<double> level_series(const Path& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto r = p.row(i);
    out[i] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  return out;
}

}  // namespace

TEST_SUITE("sder") {
  TEST_CASE("brownian path basics") {
    const auto single = brownian_path(9, 3, {0.0});
    CHECK(single.size() == 1);
    CHECK(single.values() == std::vector<double>{0.0, 0.0, 0.0});
    const auto g = uniform_grid(1.0, 64);
    CHECK(brownian_path(11, 2, g) == brownian_path(11, 2, g));
    CHECK_FALSE(brownian_path(11, 2, g) == brownian_path(12, 2, g));
  }

  TEST_CASE("brownian terminal values obey the law of large numbers") {
    const std::size_t n = 100000;
    const auto g = uniform_grid(1.0, 8);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = brownian_path(derive_seed(2024, i), 1, g).values().back();
      s += x;
      s2 += x * x;
    }
    const double m = s / static_cast<double>(n);
    const double var = (s2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    CHECK(std::abs(m) <= 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) <= 0.05);
  }

  TEST_CASE("spec and config validation") {
    CHECK_THROWS_AS(gps_spec({-0.1, 0.0}).validate(), DomainError);
    SderSpec wrong{GpsWeights::uniform(2), Coefficients::driftless_identity(3), {0.0, 0.0}};
    CHECK_THROWS_AS(wrong.validate(), DomainError);
    CHECK_THROWS_AS((EulerConfig{1.0, 1000, 0}.validate()), DomainError);
    CHECK_THROWS_AS((EulerConfig{1.0, 1, 0}.validate()), DomainError);
    CHECK_THROWS_AS((EulerConfig{0.0, 8, 0}.validate()), DomainError);
    CHECK_NOTHROW((EulerConfig{1.0, 8, 0}.validate()));
  }

  TEST_CASE("zero coefficients keep an interior start fixed") {
    const SderSpec spec{GpsWeights::uniform(3), Coefficients::zero(3), {0.2, 0.3, 0.5}};
    const auto b = euler_sder(spec, {1.0, 64, 5});
    for (std::size_t i = 0; i < b.Z.size(); ++i) {
      CHECK(b.Z(i, 0) == 0.2);
      CHECK(b.Z(i, 2) == 0.5);
      CHECK(b.Y(i, 1) == 0.0);
    }
  }

  TEST_CASE("half-line Euler equals the one-dimensional map exactly") {
    const SderSpec spec{HalfLine{}, Coefficients::driftless_identity(1), {0.0}};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto b = euler_sder(spec, {1.0, 4096, seed});
      CHECK(b.X == b.B);
      const auto ref = sm_one_dim(b.X);
      CHECK(b.Z == ref.constrained);
    }
  }

  TEST_CASE("bundle algebra and the level identity for GPS") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto spec = gps_spec({0.0, 0.0});
      const auto b = euler_sder(spec, {1.0, 4096, seed});
      for (std::size_t i = 0; i < b.Z.size(); ++i)
        for (std::size_t k = 0; k < 2; ++k) CHECK(b.Z(i, k) == b.X(i, k) + b.Y(i, k));
      CHECK(b.Y(0, 0) == 0.0);
      CHECK(b.X.row(0)[1] == 0.0);
      const auto lv = level_series(b.Z);
      const auto expect = sm_one_dim(Path::scalar(b.X.times(), level_series(b.X))).constrained.values();
      double worst = 0.0;
      for (std::size_t i = 0; i < lv.size(); ++i) worst = std::max(worst, std::abs(lv[i] - expect[i]));
      CHECK(worst <= 1e-12);
    }
  }

  TEST_CASE("valley Euler stays inside the cusp") {
    const ValleyDomain d(2.0, 2.0, 1.0, 1.0);
    const SderSpec spec{d, Coefficients::driftless_identity(2), {0.0, 0.0}};
    const auto b = euler_sder(spec, {1.0, 4096, 8});
    for (std::size_t i = 0; i < b.Z.size(); ++i) {
      CHECK(in_domain(spec.esp, b.Z.row(i)));
      if (i > 0) CHECK(b.Y(i, 1) >= b.Y(i - 1, 1));
    }
  }

  TEST_CASE("identical spec and config give identical serialized bundles") {
    const auto spec = gps_spec({0.1, 0.0});
    const auto a = euler_sder(spec, {1.0, 1024, 77});
    const auto b = euler_sder(spec, {1.0, 1024, 77});
    CHECK(path_to_csv(a.Z) == path_to_csv(b.Z));
    CHECK(path_to_csv(a.Y) == path_to_csv(b.Y));
  }

  TEST_CASE("Brownian scaling relation") {
    const double eps = 0.3;
    const std::vector<double> x{0.05, 0.1};
    const auto small = euler_sder(gps_spec(x), {eps * eps, 2048, 31});
    const auto unit = euler_sder(gps_spec({x[0] / eps, x[1] / eps}), {1.0, 2048, 31});
    double worst = 0.0;
    for (std::size_t i = 0; i < unit.Z.size(); ++i) {
      CHECK(small.Z.time(i) == doctest::Approx(eps * eps * unit.Z.time(i)));
      for (std::size_t k = 0; k < 2; ++k)
        worst = std::max(worst, std::abs(small.Z(i, k) / eps - unit.Z(i, k)));
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("localization truncations are consistent prefixes") {
    const auto b = euler_sder(gps_spec({0.0, 0.0}), {4.0, 8192, 3});
    const auto first = exit_index(b.Z, 0.5);
    const auto later = exit_index(b.Z, 1.0);
    REQUIRE(first);
    REQUIRE(later);
    CHECK(*first <= *later);
    const auto a = truncate_at_exit(b.Y, b.Z, 0.5);
    const auto c = truncate_at_exit(b.Y, b.Z, 1.0);
    CHECK(a == c.slice(0, a.size() - 1));
    CHECK(truncate_at_exit(b.Y, b.Z, 1e6) == b.Y);
  }

  TEST_CASE("coefficient bound check") {
    SderSpec spec{HalfLine{}, Coefficients::constant_drift({1e9}), {0.0}};
    CHECK_THROWS_AS(euler_sder(spec, {1.0, 8, 0}), BoundViolation);
    spec.coeffs = Coefficients::constant_drift({2.0});
    const auto b = euler_sder(spec, {1.0, 8, 0});
    CHECK(b.Z.values().back() > 0.0);
  }

  TEST_CASE("occupation fraction examples") {
    const auto g = uniform_grid(1.0, 8);
    const Path interior(g, std::vector<double>(18, 0.5), 2);
    CHECK(occupation_fraction(interior, EspSpec{GpsWeights::uniform(2)}, 1e-3) == 0.0);
    const auto pinned = Path::scalar(g, std::vector<double>(9, 0.0));
    CHECK(occupation_fraction(pinned, EspSpec{HalfLine{}}, 1e-3) == 1.0);
    std::vector<double> half(9, 1.0);
    for (int i = 0; i < 4; ++i) half[static_cast<std::size_t>(i)] = 0.0;
    CHECK(occupation_fraction(Path::scalar(g, half), EspSpec{HalfLine{}}, 1e-3) == doctest::Approx(0.5));
  }

  TEST_CASE("hitting time examples") {
    const auto g = uniform_grid(1.0, 10);
    const EspSpec half = HalfLine{};
    CHECK(hitting_time(Path::scalar(g, std::vector<double>(11, 0.5)), half, 0.5) == 0.0);
    CHECK_FALSE(hitting_time(Path::scalar(g, std::vector<double>(11, 0.1)), half, 0.5));
    const auto ramp = Path::scalar(g, g);
    CHECK(*hitting_time(ramp, half, 0.5) == doctest::Approx(0.5));
    const auto t = hitting_time(ramp, half, 0.43);
    REQUIRE(t);
    CHECK(*t == doctest::Approx(0.4));
    const auto gps = Path(g, [&] {
      std::vector<double> v;
      for (double s : g) v.insert(v.end(), {s / 2, s / 2});
      return v;
    }(), 2);
    CHECK(*hitting_time(gps, EspSpec{GpsWeights::uniform(2)}, 0.57) == doctest::Approx(0.6));
  }
}
