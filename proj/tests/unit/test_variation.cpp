#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "reflectolab/errors.hpp"
#include "reflectolab/sder.hpp"
#include "reflectolab/stats.hpp"
#include "reflectolab/variation.hpp"

using namespace reflectolab;

namespace {

Path from_function(std::size_t steps, double (*f)(double)) {
  const auto g = uniform_grid(1.0, steps);
  std::vector<double> v;
  for (double t : g) v.push_back(f(t));
  return Path::scalar(g, v);
}

}  // namespace

TEST_SUITE("variation") {
  TEST_CASE("ladder nesting and meshes") {
    const PartitionLadder ladder(2.0, 3, 6);
    CHECK(ladder.levels() == std::vector<int>{3, 4, 5, 6});
    for (int n = 3; n < 6; ++n) {
      CHECK(ladder.mesh(n + 1) == ladder.mesh(n) / 2);
      const auto coarse = ladder.points(n);
      const auto fine = ladder.points(n + 1);
      CHECK(std::includes(fine.begin(), fine.end(), coarse.begin(), coarse.end()));
    }
    CHECK(ladder.points(3).back() == 2.0);
    CHECK_THROWS_AS(PartitionLadder(1.0, 5, 4), DomainError);
  }

  TEST_CASE("p-variation of simple paths") {
    const PartitionLadder ladder(1.0, 0, 8);
    const auto flat = from_function(256, [](double) { return 3.0; });
    const auto line = from_function(256, [](double t) { return t; });
    for (int n = 0; n <= 8; ++n) {
      const auto pts = ladder.points(n);
      for (double p : {0.5, 1.0, 2.0, 3.0}) CHECK(p_variation_sum(flat, pts, p) == 0.0);
      CHECK(p_variation_sum(line, pts, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p_variation_sum(line, pts, 2.0) == doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(p_variation_sum(line, std::vector<double>{0.0, 0.3333}, 1.0), DomainError);
    CHECK_THROWS_AS(p_variation_sum(line, ladder.points(2), 0.0), DomainError);
  }

  TEST_CASE("monotone path and sawtooth total variation") {
    const PartitionLadder ladder(1.0, 0, 10);
    const auto mono = from_function(1024, [](double t) { return t * t * t - 2.0; });
    for (double s : total_variation_ladder(mono, ladder).sums()) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

    const int k = 3;
    const double h = 0.7;
    const auto g = uniform_grid(1.0, 1024);
    std::vector<double> v;
    for (double t : g) {
      const double phase = std::fmod(t * std::ldexp(1.0, k), 1.0);
      v.push_back(h * (1.0 - std::abs(2.0 * phase - 1.0)));
    }
    const auto saw = Path::scalar(g, v);
    const auto report = total_variation_ladder(saw, ladder);
    for (const auto& lv : report.levels)
      if (lv.level >= k + 1) CHECK(lv.sum == doctest::Approx(std::ldexp(1.0, k) * 2.0 * h).epsilon(1e-12));
  }

  TEST_CASE("S_1 monotone in level and the S_p bound, on random vector paths") {
    const PartitionLadder ladder(1.0, 2, 10);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto path = testing::random_walk(seed, 1024, {0.0, 1.0, -1.0});
      const auto s1 = total_variation_ladder(path, ladder).sums();
      for (std::size_t i = 1; i < s1.size(); ++i) CHECK(s1[i] >= s1[i - 1]);
      for (double p : {1.5, 2.0, 4.0}) {
        const auto sp = variation_ladder(path, ladder, p).sums();
        for (int n : ladder.levels()) {
          const auto pts = ladder.points(n);
          double max_inc = 0.0;
          for (std::size_t j = 1; j < pts.size(); ++j) {
            const auto a = static_cast<std::size_t>(std::lround(pts[j - 1] * 1024));
            const auto b = static_cast<std::size_t>(std::lround(pts[j] * 1024));
            double sq = 0.0;
            for (std::size_t c = 0; c < 3; ++c) sq += (path(b, c) - path(a, c)) * (path(b, c) - path(a, c));
            max_inc = std::max(max_inc, std::sqrt(sq));
          }
          const auto idx = static_cast<std::size_t>(n - ladder.min_level());
          CHECK(sp[idx] <= std::pow(max_inc, p - 1.0) * s1[idx] * (1 + 1e-12));
        }
      }
    }
  }

  TEST_CASE("finite-variation paths have vanishing quadratic sums") {
    const PartitionLadder ladder(1.0, 2, 12);
    const auto smooth = from_function(4096, [](double t) { return std::sin(6.0 * t) + t; });
    const auto s2 = variation_ladder(smooth, ladder, 2.0).sums();
    for (std::size_t i = 1; i < s2.size(); ++i) CHECK(s2[i] < s2[i - 1]);
    CHECK(s2.back() < 1e-2 * s2.front());
  }

  TEST_CASE("streaming accumulator equals the batch ladder") {
    const int exponent = 12;
    const auto path = testing::random_walk(5, std::size_t{1} << exponent, {0.0, 0.0});
    DyadicAccumulator acc(exponent, 3, 12, 2, {1.0, 2.0});
    for (std::size_t i = 0; i < path.size(); ++i) acc.push(path.row(i));
    CHECK(acc.complete());
    const PartitionLadder ladder(1.0, 3, 12);
    const auto tv = total_variation_ladder(path, ladder).sums();
    const auto qv = variation_ladder(path, ladder, 2.0).sums();
    for (std::size_t i = 0; i < tv.size(); ++i) {
      CHECK(acc.sums(0)[i] == doctest::Approx(tv[i]).epsilon(1e-12));
      CHECK(acc.sums(1)[i] == doctest::Approx(qv[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(acc.push(path.row(0)), DomainError);
  }

  TEST_CASE("oscillation") {
    const auto line = from_function(100, [](double t) { return t; });
    CHECK(oscillation(line, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(oscillation(from_function(10, [](double) { return 2.0; }), 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(oscillation(line, 0.6, 0.5), DomainError);
    const auto walk = testing::random_walk(9, 1000, {0.0});
    for (auto [s, t] : {std::pair{0.0, 1.0}, std::pair{0.25, 0.5}, std::pair{0.7, 0.7001}}) {
      double best = 0.0;
      for (std::size_t i = 0; i < walk.size(); ++i)
        for (std::size_t j = i; j < walk.size(); ++j)
          if (walk.time(i) >= s && walk.time(j) <= t) best = std::max(best, std::abs(walk(j, 0) - walk(i, 0)));
      CHECK(oscillation(walk, s, t) == doctest::Approx(best).epsilon(1e-15));
    }
  }

  TEST_CASE("localization: truncated and stopped paths have equal sums") {
    const SderSpec spec{GpsWeights::uniform(2), Coefficients::driftless_identity(2), {0.0, 0.0}};
    const auto b = euler_sder(spec, {1.0, 4096, 12});
    const auto idx = exit_index(b.Z, 0.4);
    REQUIRE(idx);
    const double zeta = b.Z.time(*idx);
    const auto truncated = truncate_at_exit(b.Y, b.Z, 0.4);
    std::vector<double> frozen(b.Y.values());
    for (std::size_t i = *idx + 1; i < b.Y.size(); ++i)
      for (std::size_t k = 0; k < 2; ++k) frozen[i * 2 + k] = b.Y(*idx, k);
    const Path stopped(b.Y.times(), frozen, 2);
    const PartitionLadder ladder(1.0, 4, 12);
    for (int n : ladder.levels()) {
      std::vector<double> full = ladder.points(n);
      full.push_back(zeta);
      std::sort(full.begin(), full.end());
      full.erase(std::unique(full.begin(), full.end()), full.end());
      std::vector<double> head;
      for (double t : full)
        if (t <= zeta) head.push_back(t);
      for (double p : {1.0, 2.0})
        CHECK(p_variation_sum(truncated, head, p) == p_variation_sum(stopped, full, p));
    }
  }
}

TEST_SUITE("dirichlet") {
  TEST_CASE("zero coefficients give zero parts") {
    const SderSpec spec{GpsWeights::uniform(2), Coefficients::zero(2), {0.3, 0.7}};
    const auto b = euler_sder(spec, {1.0, 256, 1});
    const auto r = dirichlet_decompose(b, spec, PartitionLadder(1.0, 2, 8));
    for (double x : r.martingale_qv) CHECK(x == 0.0);
    for (double x : r.drift_qv) CHECK(x == 0.0);
    CHECK(r.predicted_qv == 0.0);
  }

  TEST_CASE("interior one-dimensional segment: M carries the quadratic variation") {
    const SderSpec spec{HalfLine{}, Coefficients::driftless_identity(1), {10.0}};
    const auto b = euler_sder(spec, {1.0, 1 << 14, 4});
    const auto r = dirichlet_decompose(b, spec, PartitionLadder(1.0, 8, 14));
    CHECK(r.predicted_qv == doctest::Approx(1.0));
    CHECK(r.martingale_qv.back() == doctest::Approx(1.0).epsilon(0.05));
    for (double x : r.drift_qv) CHECK(x == 0.0);
  }

  TEST_CASE("drift enters the finite-energy part by trapezoid") {
    const SderSpec spec{HalfLine{}, Coefficients::constant(std::vector<double>{1.5}, {0.0}, 1), {1.0}};
    const auto b = euler_sder(spec, {1.0, 64, 1});
    const auto parts = dirichlet_parts(b, spec);
    CHECK(parts.finite_energy.values().back() == doctest::Approx(1.5));
    CHECK(std::abs(parts.martingale.values().back()) <= 1e-12);
  }

  TEST_CASE("bundle and spec must match") {
    const SderSpec spec{GpsWeights::uniform(2), Coefficients::driftless_identity(2), {0.0, 0.0}};
    const SderSpec other{GpsWeights::uniform(2), Coefficients::driftless_identity(2), {0.5, 0.0}};
    const auto b = euler_sder(spec, {1.0, 64, 1});
    CHECK_THROWS_AS(dirichlet_decompose(b, other, PartitionLadder(1.0, 2, 6)), DomainError);
    const SderSpec three{GpsWeights::uniform(3), Coefficients::driftless_identity(3), {0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(dirichlet_decompose(b, three, PartitionLadder(1.0, 2, 6)), DomainError);
  }

  TEST_CASE("GPS from the origin: finite-energy quadratic sums decrease") {
    const SderSpec spec{GpsWeights::uniform(2), Coefficients::driftless_identity(2), {0.0, 0.0}};
    const PartitionLadder ladder(1.0, 4, 12);
    std::vector<double> coarse, fine;
    for (std::uint64_t i = 0; i < 30; ++i) {
      const auto b = euler_sder(spec, {1.0, 1 << 12, derive_seed(77, i)});
      const auto r = dirichlet_decompose(b, spec, ladder);
      coarse.push_back(r.drift_qv.front());
      fine.push_back(r.drift_qv.back());
    }
    CHECK(median(fine) < median(coarse));
  }

  TEST_CASE("reflected Brownian motion: quadratic sums of Z settle near the horizon") {
    const SderSpec spec{HalfLine{}, Coefficients::driftless_identity(1), {0.0}};
    const PartitionLadder ladder(1.0, 12, 14);
    std::vector<std::vector<double>> per_level(3);
    for (std::uint64_t i = 0; i < 60; ++i) {
      const auto b = euler_sder(spec, {1.0, 1 << 14, derive_seed(5, i)});
      const auto s = variation_ladder(b.Z, ladder, 2.0).sums();
      for (std::size_t j = 0; j < 3; ++j) per_level[j].push_back(s[j]);
    }
    const double m12 = median(per_level[0]);
    const double m14 = median(per_level[2]);
    CHECK(std::abs(m14 - m12) / m12 <= 0.15);
    CHECK(m14 == doctest::Approx(1.0).epsilon(0.15));
  }
}
