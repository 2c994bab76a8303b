#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lakevort/error.hpp"
#include "lakevort/expression.hpp"
#include "lakevort/lake.hpp"

using namespace lakevort;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Experiment;
}

double max_depth(const Lake& lake) {
  double m = 0.0;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) m = std::max(m, lake.depth(idx));
  }
  return m;
}

}  // namespace

TEST_CASE("grid layout pads one cell around the unit square") {
  const Lake lake = build_disk_lake(64, constant_profile());
  const GridSpec& g = lake.grid();
  CHECK(g.nx == 66);
  CHECK(g.h == doctest::Approx(2.0 / 64));
  CHECK(g.x0 == doctest::Approx(-1.0 - g.h));
  const auto c = g.locate({0.01, -0.01});
  REQUIRE(c);
  CHECK(g.center(*c).x == doctest::Approx(0.5 * g.h));
  CHECK(g.center(*c).y == doctest::Approx(-0.5 * g.h));
  CHECK_FALSE(g.locate({5.0, 0.0}));
}

TEST_CASE("parabolic disk depth") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  const double h = lake.grid().h;
  const auto centre = lake.grid().locate({0.5 * h, 0.5 * h});
  REQUIRE(centre);
  // P(t) = 2 - 4(t - 1/2)^2 at t = h^2 / 2
  CHECK(lake.depth(*centre) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(lake.depth_at({0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(lake.depth_at({std::sqrt(0.5), 0.0}) == doctest::Approx(2.0));
  CHECK(max_depth(lake) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(lake.component_count() == 1);
}

TEST_CASE("constant profile gives unit depth") {
  const Lake lake = build_disk_lake(16, constant_profile());
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) CHECK(lake.depth(idx) == 1.0);
  }
  CHECK(lake.interior_count() > 0);
}

TEST_CASE("linear shore profile vanishes at the boundary") {
  const Lake lake = build_disk_lake(32, linear_shore_profile());
  const double h = lake.grid().h;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (!lake.interior(idx)) continue;
    CHECK(lake.depth(idx) > 0.0);
    const double r = norm(lake.grid().center(idx));
    CHECK(lake.depth(idx) == doctest::Approx(1.0 - r * r));
    if (lake.is_boundary(idx)) CHECK(lake.depth(idx) < 4.0 * h);
  }
  CHECK(lake.depth_at({1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("custom profiles parse and reject negative depth") {
  const DepthProfile p = profile_from_name("custom:2 - 4*(t - 0.5)^2");
  CHECK(p(0.25) == doctest::Approx(parabolic_profile()(0.25)));
  CHECK(Expression::parse("max(1, exp(0))*sqrt(4)")(0.0) == doctest::Approx(2.0));
  CHECK(kind_of([] { build_disk_lake(32, profile_from_name("custom:t - 0.5")); }) == ErrorKind::InvalidDepth);
  CHECK(kind_of([] { profile_from_name("bogus"); }) == ErrorKind::Config);
  CHECK(kind_of([] { Expression::parse("1 +"); }) == ErrorKind::Config);
}

TEST_CASE("annulus lake") {
  const Lake lake = build_annulus_lake(64, 0.4, constant_profile());
  CHECK(lake.component_count() == 2);
  const double area = mu_integral(lake, ScalarField(lake.grid(), 1.0));
  CHECK(area == doctest::Approx(std::numbers::pi * (1.0 - 0.16)).epsilon(0.02));
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) continue;
    const double r = norm(lake.grid().center(idx));
    if (r < 0.3) CHECK(lake.component(idx) == 1);
    if (r > 1.1) CHECK(lake.component(idx) == 0);
  }
  CHECK(kind_of([] { build_annulus_lake(16, 0.9, constant_profile()); }) == ErrorKind::Geometry);
}

TEST_CASE("slit square depth and severed faces") {
  const Lake lake = build_slit_square_lake(64);
  CHECK(lake.depth_at({1.0, -1.0}) == doctest::Approx(1.0));
  CHECK(lake.depth_at({-1.0, -1.0}) == doctest::Approx(1.0));
  CHECK(lake.depth_at({1e-12, 1.0}) == doctest::Approx(1.0));
  CHECK(lake.depth_at({0.5, -0.5}) == doctest::Approx(0.5));
  CHECK(lake.depth_at({1e-6, -0.5}) < 1e-5);

  const Lake small = build_slit_square_lake(32);
  const GridSpec& g = small.grid();
  int severed = 0, open = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!small.interior(idx)) continue;
    const Point c = g.center(idx);
    if (c.x < 0.0 && c.x > -g.h) {
      const long east = small.neighbour(idx, Face::East);
      REQUIRE(east >= 0);
      if (!small.interior(static_cast<std::size_t>(east))) continue;
      if (c.y < 0.0) {
        CHECK_FALSE(small.face_open(idx, Face::East));
        ++severed;
      } else {
        CHECK(small.face_open(idx, Face::East));
        ++open;
      }
    }
  }
  CHECK(severed > 0);
  CHECK(open > 0);
  CHECK(kind_of([] { build_slit_square_lake(33); }) == ErrorKind::Geometry);
}

TEST_CASE("mu integrals") {
  const Lake flat = build_disk_lake(128, constant_profile());
  CHECK(mu_integral(flat, ScalarField(flat.grid(), 1.0)) == doctest::Approx(std::numbers::pi).epsilon(0.01));
  CHECK(mu_integral(flat, ScalarField(flat.grid(), 0.0)) == 0.0);
  const Lake bowl = build_disk_lake(128, parabolic_profile());
  CHECK(mu_integral(bowl, ScalarField(bowl.grid(), 1.0)) == doctest::Approx(5.0 * std::numbers::pi / 3.0).epsilon(0.01));
}

TEST_CASE("empty and invalid lakes") {
  GridSpec g{6, 6, -1.5, -1.5, 0.5};
  CHECK(kind_of([&] { Lake(g, Shape{}, [](Point) { return 0.0; }, "dry", std::nullopt); }) == ErrorKind::EmptyDomain);
  CHECK(kind_of([&] { Lake(g, Shape{}, [](Point) { return -1.0; }, "bad", std::nullopt); }) ==
        ErrorKind::InvalidDepth);
  CHECK(kind_of([] { build_disk_lake(8, constant_profile()); }) == ErrorKind::Geometry);
}

TEST_CASE("continuity check") {
  std::vector<Point> probes;
  for (int k = 0; k <= 9; ++k) probes.push_back({0.1 * k, 0.0});

  const Lake flat = build_disk_lake(32, constant_profile());
  const ContinuityReport zero = continuity_check(flat, 3.0, probes);
  REQUIRE(zero.probes.size() == probes.size());
  for (const auto& p : zero.probes) CHECK(p.value == doctest::Approx(0.0));

  const Lake bowl = build_disk_lake(64, parabolic_profile());
  const ContinuityReport r = continuity_check(bowl, 3.0, probes);
  CHECK(std::isfinite(r.max_value));
  CHECK(r.max_value > 0.0);

  const Lake shore = build_disk_lake(64, linear_shore_profile());
  const ContinuityReport s = continuity_check(shore, 3.0, probes);
  CHECK(std::isfinite(s.max_value));

  CHECK(kind_of([&] { continuity_check(bowl, 2.0, probes); }) == ErrorKind::Parameter);
  const std::vector<Point> outside{{2.0, 0.0}};
  CHECK(kind_of([&] { continuity_check(bowl, 3.0, outside); }) == ErrorKind::Domain);
  const Lake slit = build_slit_square_lake(32);
  CHECK(kind_of([&] { continuity_check(slit, 3.0, probes); }) == ErrorKind::Geometry);
}
