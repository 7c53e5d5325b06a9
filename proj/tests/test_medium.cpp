#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "wavefocus/medium.hpp"
#include "wavefocus/medium_json.hpp"

using namespace wavefocus;

TEST_CASE("unit speed travel times are lengths") {
  MediumProfile p = unit_profile(2.0, 4096);
  CHECK(p.travel_time(0.0, 0.7) == Catch::Approx(0.7).margin(1e-12));
  CHECK(p.travel_time(0.3, 0.3) == 0.0);
  CHECK(p.point_at_travel_time(0.3) == Catch::Approx(0.3).margin(1e-12));
  CHECK(p.point_at_travel_time(0.0) == 0.0);
  CHECK_THROWS_AS(p.travel_time(-0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(p.travel_time(0.5, 0.2), std::domain_error);
  CHECK_THROWS_AS(p.point_at_travel_time(p.boundary_travel_time() + 1.0),
                  std::out_of_range);
}

TEST_CASE("reference profile hits the published focusing points") {
  MediumProfile p = reference_profile();
  CHECK(p.point_at_travel_time(0.5) == Catch::Approx(0.5).margin(2e-3));
  // x(5/8) lands at 0.625; the caption value 0.62 has one readable digit
  const double x2 = p.point_at_travel_time(0.625);
  CHECK(x2 > 0.60);
  CHECK(x2 < 0.64);
  // speed bounds are attained but never violated
  double cmin = 10.0, cmax = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double c = p.speed(i * p.x_max() / 4000.0);
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmin >= 0.8 - 1e-9);
  CHECK(cmax <= 1.4 + 1e-9);
  CHECK(cmin == Catch::Approx(0.8).margin(1e-4));
  CHECK(cmax == Catch::Approx(1.4).margin(1e-4));
}

TEST_CASE("profile construction validates its invariants") {
  // speed exceeding c1
  CHECK_THROWS_AS(MediumProfile(1.0, 256, {SpeedBump{0.3, 0.1, 0.7}}),
                  std::invalid_argument);
  // inhomogeneity sticking outside (l0, l1)
  CHECK_THROWS_AS(MediumProfile(1.0, 256, {SpeedBump{0.04, 0.02, 0.2}}),
                  std::invalid_argument);
  // malformed support bounds
  CHECK_THROWS_AS(MediumProfile(0.5, 256, std::vector<SpeedBump>{},
                                SpeedBounds{0.8, 1.4, 0.6, 0.7}),
                  std::invalid_argument);
}

TEST_CASE("travel time is additive over concatenated intervals") {
  MediumProfile p = reference_profile();
  const double a = 0.11, b = 0.47, c = 1.93;
  CHECK(p.travel_time(a, b) + p.travel_time(b, c) ==
        Catch::Approx(p.travel_time(a, c)).margin(1e-14));
}

TEST_CASE("point_at_travel_time inverts travel_time and is monotone") {
  MediumProfile p = reference_profile();
  double prev = -1.0;
  for (double r = 0.0; r <= 2.0; r += 0.0831) {
    const double x = p.point_at_travel_time(r);
    CHECK(x >= prev);
    prev = x;
    CHECK(p.travel_time(0.0, x) == Catch::Approx(r).margin(1e-10));
    // speed bounds propagate to the inverse
    CHECK(x >= r * 0.8 - 1e-9);
    CHECK(x <= r * 1.4 + 1e-9);
  }
}

TEST_CASE("domains of influence are nested intervals") {
  MediumProfile p = reference_profile();
  auto [lo1, hi1] = p.domain_of_influence(0.3);
  auto [lo2, hi2] = p.domain_of_influence(0.9);
  CHECK(lo1 == 0.0);
  CHECK(lo2 == 0.0);
  CHECK(hi1 <= hi2);
  auto [lo0, hi0] = p.domain_of_influence(0.0);
  CHECK(hi0 == 0.0);
  CHECK(lo0 == 0.0);
}

TEST_CASE("slab indicator marks (x(r1), x(r2)] and rejects empty slabs") {
  MediumProfile p = unit_profile(2.0, 2048);
  const auto ind = p.slab_indicator(0.5, 0.625, 2001);
  const double dx = 2.0 / 2000;
  for (int i = 0; i < 2001; ++i) {
    const double x = i * dx;
    const bool in = x > 0.5 && x <= 0.625;
    CHECK(ind[static_cast<std::size_t>(i)] == (in ? 1.0 : 0.0));
  }
  CHECK_THROWS_AS(p.slab_indicator(0.5, 0.5, 100), std::invalid_argument);
  // shrinking slab support width goes to zero
  double width = 0.0;
  for (double v : p.slab_indicator(0.5, 0.5001, 20001)) width += v * (2.0 / 20000);
  CHECK(width < 2e-3);
}

TEST_CASE("trapezoid travel time error drops like h^2 under refinement") {
  // compare a coarse-table profile against a 4x finer one
  MediumProfile coarse = reference_profile(3.08, 1 << 9);
  MediumProfile mid = reference_profile(3.08, 1 << 10);
  MediumProfile fine = reference_profile(3.08, 1 << 12);
  const double ref = fine.travel_time(0.0, 0.61);
  const double e_coarse = std::abs(coarse.travel_time(0.0, 0.61) - ref);
  const double e_mid = std::abs(mid.travel_time(0.0, 0.61) - ref);
  CHECK(e_coarse / e_mid > 3.0);
  CHECK(e_coarse / e_mid < 5.5);
}

TEST_CASE("profile JSON round trip (bumps and samples)") {
  MediumProfile p = reference_profile(3.08, 512);
  const auto j = profile_to_json(p);
  CHECK(j["kind"] == "bumps");
  MediumProfile q = profile_from_json(j);
  for (double x : {0.1, 0.2, 0.38, 0.52, 1.7})
    CHECK(q.speed(x) == Catch::Approx(p.speed(x)).margin(1e-15));

  std::vector<double> cells(64, 1.0);
  for (int i = 20; i < 40; ++i) cells[static_cast<std::size_t>(i)] = 1.2;
  MediumProfile s(2.0, cells, SpeedBounds{0.8, 1.4, 0.3, 1.6});
  const auto js = profile_to_json(s);
  CHECK(js["kind"] == "samples");
  MediumProfile s2 = profile_from_json(js);
  CHECK(s2.speed(1.0) == Catch::Approx(s.speed(1.0)).margin(1e-15));
  CHECK_THROWS_AS(profile_from_json(nlohmann::json{{"x_max", 1.0}, {"kind", "nope"}}),
                  std::invalid_argument);
}
