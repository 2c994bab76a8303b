#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lakevort/error.hpp"
#include "lakevort/experiments.hpp"
#include "lakevort/green.hpp"

using namespace lakevort;

namespace {

Point random_point(std::mt19937_64& rng, double r_min, double r_max) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = r_min + (r_max - r_min) * u(rng);
  const double a = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST_CASE("disk Green's function values") {
  CHECK(disk_green({0.5, 0.0}, {0.0, 0.0}) == doctest::Approx(std::log(2.0) / (2.0 * std::numbers::pi)));
  CHECK(disk_green({0.0, 0.5}, {0.0, 0.0}) == doctest::Approx(0.1103).epsilon(1e-3));
  CHECK(std::fabs(disk_green({1.0 - 1e-3, 0.0}, {0.0, 0.0})) <= 1e-3);
  CHECK(std::fabs(disk_green({0.0, 1.0}, {0.3, -0.2})) <= 1e-14);
  try {
    disk_green({0.1, 0.1}, {0.1, 0.1});
    FAIL("expected a singularity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singularity);
  }
}

TEST_CASE("Green's functions are symmetric") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const Point x = random_point(rng, 0.0, 0.99);
    const Point y = random_point(rng, 0.0, 0.99);
    CHECK(std::fabs(disk_green(x, y) - disk_green(y, x)) <= 1e-12);
    const Point xa = random_point(rng, 0.45, 0.98);
    const Point ya = random_point(rng, 0.45, 0.98);
    CHECK(std::fabs(annulus_green(xa, ya, 0.4) - annulus_green(ya, xa, 0.4)) <= 1e-12);
  }
}

TEST_CASE("annulus Green's function vanishes on both circles and stays positive inside") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const Point y = random_point(rng, 0.5, 0.9);
    const double a = 2.0 * std::numbers::pi * k / 50.0;
    CHECK(std::fabs(annulus_green({std::cos(a), std::sin(a)}, y, 0.4)) <= 1e-10);
    CHECK(std::fabs(annulus_green({0.4 * std::cos(a), 0.4 * std::sin(a)}, y, 0.4)) <= 1e-10);
    CHECK(annulus_green(random_point(rng, 0.42, 0.98), y, 0.4) > 0.0);
  }
}

TEST_CASE("annulus Green's function solves the Laplace equation away from the pole") {
  const Point y{0.6, 0.1};
  const Point x{-0.3, 0.55};
  const double h = 1e-3;
  const double lap = (annulus_green({x.x + h, x.y}, y, 0.4) + annulus_green({x.x - h, x.y}, y, 0.4) +
                      annulus_green({x.x, x.y + h}, y, 0.4) + annulus_green({x.x, x.y - h}, y, 0.4) -
                      4.0 * annulus_green(x, y, 0.4)) /
                     (h * h);
  CHECK(std::fabs(lap) <= 1e-4);
}

TEST_CASE("self distance matches the cell average of the log kernel") {
  const int n = 2000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = -0.5 + (i + 0.5) / n;
      const double y = -0.5 + (j + 0.5) / n;
      s += 0.5 * std::log(x * x + y * y);
    }
  }
  CHECK(s / (static_cast<double>(n) * n) == doctest::Approx(std::log(kSelfDistance)).epsilon(1e-4));
}

TEST_CASE("remainder vanishes for constant depth") {
  const Lake lake = build_disk_lake(64, constant_profile());
  const WeightedOperator op = assemble(lake);
  CHECK(sup_abs(remainder_solve(op, {0.2, -0.3})) <= 1e-14);
}

TEST_CASE("remainder at the centre is radial and stable under refinement") {
  std::vector<double> sups;
  for (int n : {128, 256}) {
    const Lake lake = build_disk_lake(n, parabolic_profile());
    const WeightedOperator op = assemble(lake);
    const ScalarField r = remainder_solve(op, {1e-9, 1e-9});
    sups.push_back(sup_abs(r));
    if (n != 128) continue;
    // Angular spread on circles, bilinear interpolation between cell centres.
    const GridSpec& g = lake.grid();
    auto sample = [&](Point p) {
      const double fx = (p.x - g.x0) / g.h - 0.5, fy = (p.y - g.y0) / g.h - 0.5;
      const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
      const double tx = fx - i, ty = fy - j;
      return (1 - tx) * (1 - ty) * r[g.index(i, j)] + tx * (1 - ty) * r[g.index(i + 1, j)] +
             (1 - tx) * ty * r[g.index(i, j + 1)] + tx * ty * r[g.index(i + 1, j + 1)];
    };
    double spread = 0.0;
    for (double rho = 0.1; rho < 0.85; rho += 0.1) {
      double lo = 1e300, hi = -1e300;
      for (int k = 0; k < 64; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 64.0;
        const double v = sample({rho * std::cos(a), rho * std::sin(a)});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      spread = std::max(spread, hi - lo);
    }
    CHECK(spread <= 0.02 * sups.back());
  }
  CHECK(std::isfinite(sups[0]));
  CHECK(sups[0] > 0.0);
  CHECK(sups[1] == doctest::Approx(sups[0]).epsilon(0.05));
}

TEST_CASE("remainder pole must be inside") {
  const Lake lake = build_disk_lake(32, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const Lake dry = build_disk_lake(32, linear_shore_profile());
  const WeightedOperator dop = assemble(dry);
  for (auto [o, y] : {std::pair{&op, Point{1.2, 0.0}}, std::pair{&dop, Point{0.0, -(1.0 - 1e-14)}}}) {
    try {
      remainder_solve(*o, y);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }
  const Lake slit = build_slit_square_lake(32);
  const WeightedOperator sop = assemble(slit);
  try {
    remainder_solve(sop, {0.5, 0.5});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("expansion with constant depth reduces to the Poisson-Green integral") {
  const Lake lake = build_disk_lake(128, constant_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  const ScalarField zeta = bump_field(lake, {0.0, 0.0}, 0.3);
  GreenDecomposition parts;
  const ExpansionReport rep = verify_expansion(op, basis, zeta, CirculationSpec{{mu_integral(lake, zeta)}}, {}, &parts);
  CHECK(rep.max_rel_error <= 0.02);
  for (double s : parts.sup_remainder) CHECK(s <= 1e-14);
  CHECK(rep.support_cells > 0);
}

TEST_CASE("expansion of zero vorticity") {
  const Lake lake = build_disk_lake(32, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  const ExpansionReport rep = verify_expansion(op, basis, ScalarField(lake.grid()), CirculationSpec{{0.0}});
  CHECK(rep.max_rel_error == 0.0);
  CHECK(rep.probes.empty());
}

TEST_CASE("expansion with parabolic depth improves under refinement") {
  std::vector<double> errs;
  for (int n : {64, 128}) {
    const Lake lake = build_disk_lake(n, parabolic_profile());
    const WeightedOperator op = assemble(lake);
    const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
    const ScalarField zeta = bump_field(lake, {0.5, 0.0}, 0.2);
    ExpansionOptions opts;
    opts.probe_res = 16;
    errs.push_back(verify_expansion(op, basis, zeta, CirculationSpec{{mu_integral(lake, zeta)}}, opts).max_rel_error);
  }
  CHECK(errs[1] <= 0.05);
  CHECK(errs[1] < errs[0]);
}

TEST_CASE("remainder is continuous in the pole") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const double h = lake.grid().h;
  const Point y{0.3 + 0.5 * h, 0.1 + 0.5 * h};
  const ScalarField r0 = remainder_solve(op, y);
  std::vector<double> gaps;
  for (double d : {4.0 * h, 2.0 * h, h}) {
    const ScalarField r1 = remainder_solve(op, {y.x + d, y.y});
    double m = 0.0;
    for (std::size_t idx = 0; idx < r0.size(); ++idx) m = std::max(m, std::fabs(r1[idx] - r0[idx]));
    gaps.push_back(m);
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
}

TEST_CASE("expansion on the annulus with vanishing harmonic part") {
  const Lake lake = build_annulus_lake(64, 0.4, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  const ScalarField zeta = bump_field(lake, {0.7, 0.0}, 0.15);
  const double mass = mu_integral(lake, zeta);
  ScalarField w(lake.grid());
  for (std::size_t idx = 0; idx < w.size(); ++idx) w[idx] = basis.psi[1][idx] * zeta[idx];
  const double inner = mu_integral(lake, w);
  const CirculationSpec circ{{mass - inner, inner}};
  CHECK(std::fabs(harmonic_coefficients(op, basis, zeta, circ)[1]) <= 1e-10);
  ExpansionOptions opts;
  opts.probe_res = 16;
  const ExpansionReport rep = verify_expansion(op, basis, zeta, circ, opts);
  CHECK(rep.max_rel_error <= 0.05);
}
