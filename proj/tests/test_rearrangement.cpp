#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lakevort/asymptotics.hpp"
#include "lakevort/error.hpp"
#include "lakevort/rearrangement.hpp"

using namespace lakevort;

namespace {

double integral_of_product(const Lake& lake, const ScalarField& a, const ScalarField& b) {
  ScalarField p(lake.grid());
  for (std::size_t idx = 0; idx < p.size(); ++idx) p[idx] = a[idx] * b[idx];
  return mu_integral(lake, p);
}

double lq_norm(const Lake& lake, const ScalarField& f, double q) {
  ScalarField p(lake.grid());
  for (std::size_t idx = 0; idx < p.size(); ++idx) p[idx] = std::pow(std::fabs(f[idx]), q);
  return std::pow(mu_integral(lake, p), 1.0 / q);
}

double max_cell(const Lake& lake) {
  double m = 0.0;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) m = std::max(m, lake.cell_measure(idx));
  return m;
}

ScalarField radial_field(const Lake& lake, Point c, double (*f)(double)) {
  ScalarField out(lake.grid());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    if (lake.interior(idx)) out[idx] = f(distance(lake.grid().center(idx), c));
  }
  return out;
}

Lake three_by_three() {
  const double h = 2.0 / 3.0;
  return Lake(GridSpec{5, 5, -1.0 - h, -1.0 - h, h}, Shape{}, [](Point) { return 1.0; }, "3x3", std::nullopt);
}

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

}  // namespace

TEST_CASE("distribution functions") {
  for (const char* name : {"uniform", "exponential", "linear", "step:0.25,1.25;2,0.5"}) {
    const auto d = DistributionFunction::from_name(name);
    CHECK(d.integral() == doctest::Approx(1.0));
    // int_0^delta D^{-1} = int_0^inf D
    CHECK(d.inverse_integral(0.0, d.sup()) == doctest::Approx(1.0));
    CHECK(d(0.0) == doctest::Approx(d.sup()));
    CHECK(d(1e6) == doctest::Approx(0.0));
  }
  const auto lin = DistributionFunction::linear(2.0);
  CHECK(lin(0.5) == doctest::Approx(1.0));
  CHECK(lin.moment(1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(DistributionFunction::exponential(1.0).moment(2.0) == doctest::Approx(2.0));
  CHECK(DistributionFunction::uniform(2.0).moment(1.0) == doctest::Approx(0.25));
  CHECK(kind_of([] { DistributionFunction::from_name("step:0.5;1"); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { DistributionFunction::from_name("step:0.5,1;1,2"); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { DistributionFunction::from_name("cauchy"); }) == ErrorKind::Config);
}

TEST_CASE("uniform single level quota") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  VortexProfile p;
  p.tau = 0.7;
  p.eps = 0.1;
  const LevelQuota q = build_quotas(p, lake);
  REQUIRE(q.positive.size() == 1);
  REQUIRE(q.negative.size() == 1);
  const double li = std::log(10.0);
  CHECK(q.positive[0].quota == doctest::Approx(0.01));
  CHECK(q.positive[0].value == doctest::Approx(0.7 / (0.01 * li)));
  CHECK(q.negative[0].value == doctest::Approx(0.3 / (0.01 * li)));
  CHECK(std::fabs(LevelQuota::strength(q.positive) - 0.7 / li) <= 1e-9 * 0.7 / li);
}

TEST_CASE("quota strengths for every family and level count") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  for (const char* name : {"uniform", "exponential", "linear", "step:0.25,1.25;2,0.5"}) {
    for (int levels : {1, 3, 8}) {
      VortexProfile p;
      p.distribution = DistributionFunction::from_name(name);
      p.levels = levels;
      p.tau = 0.3;
      p.eps = 0.05;
      const LevelQuota q = build_quotas(p, lake);
      CHECK(std::fabs(LevelQuota::strength(q.positive) - p.positive_strength()) <= 1e-9 * p.positive_strength());
      CHECK(std::fabs(LevelQuota::strength(q.negative) - p.negative_strength()) <= 1e-9 * p.negative_strength());
      CHECK(LevelQuota::measure(q.positive) == doctest::Approx(0.0025));
      for (std::size_t k = 1; k < q.positive.size(); ++k) {
        CHECK(q.positive[k].value <= q.positive[k - 1].value * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("quota guards") {
  const Lake lake = build_disk_lake(16, constant_profile());
  VortexProfile p;
  p.tau = 1.0;
  p.eps = 0.2;
  CHECK(build_quotas(p, lake).negative.empty());
  p.eps = std::sqrt(lake.total_measure() / 4.0) + 1e-6;
  REQUIRE(p.eps < 1.0);
  CHECK(kind_of([&] { build_quotas(p, lake); }) == ErrorKind::Parameter);
  double min_cell = 1e300;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) min_cell = std::min(min_cell, lake.cell_measure(idx));
  }
  p.eps = 0.5 * std::sqrt(min_cell);
  CHECK(kind_of([&] { build_quotas(p, lake); }) == ErrorKind::Resolution);
  p.eps = 0.2;
  p.levels = 0;
  CHECK(kind_of([&] { build_quotas(p, lake); }) == ErrorKind::Parameter);
}

TEST_CASE("fill levels mixes at most one cell per level boundary") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  VortexProfile p;
  p.distribution = DistributionFunction::exponential();
  p.levels = 4;
  p.tau = 1.0;
  p.eps = 0.1;
  const LevelQuota q = build_quotas(p, lake);
  std::vector<std::size_t> order;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (lake.interior(idx)) order.push_back(idx);
  }
  std::mt19937_64 rng(2);
  std::shuffle(order.begin(), order.end(), rng);
  ScalarField out(lake.grid());
  std::vector<std::uint8_t> used(lake.grid().size(), 0);
  fill_levels(lake, order, q.positive, 1.0, out, used);
  int mixed = 0;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    if (out[idx] == 0.0) continue;
    bool pure = false;
    for (const auto& l : q.positive) pure = pure || std::fabs(out[idx] - l.value) <= 1e-12 * l.value;
    if (!pure) ++mixed;
  }
  CHECK(mixed <= static_cast<int>(q.positive.size()));
  CHECK(mu_integral(lake, out) == doctest::Approx(LevelQuota::strength(q.positive)).epsilon(1e-12));
}

TEST_CASE("symmetrization") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  const double cell = max_cell(lake);

  SUBCASE("a single-level ball is a fixed point") {
    ScalarField ball = radial_field(lake, {0.0, 0.0}, [](double r) { return r < 0.2 ? 3.0 : 0.0; });
    const ScalarField again = symmetrize_at(lake, ball, {0.0, 0.0});
    CHECK(superlevel_measure(lake, again, 3.0) == doctest::Approx(superlevel_measure(lake, ball, 3.0)));
    CHECK(mu_integral(lake, again) == doctest::Approx(mu_integral(lake, ball)));
    for (std::size_t idx = 0; idx < ball.size(); ++idx) CHECK(std::fabs(again[idx] - ball[idx]) <= 1e-12);
  }

  SUBCASE("two-valued field rearranged at the centre") {
    ScalarField f(lake.grid());
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      if (!lake.interior(idx)) continue;
      const double x = u(rng);
      f[idx] = x < 0.02 ? 2.0 : (x < 0.06 ? 1.0 : 0.0);
    }
    const ScalarField s = symmetrize_at(lake, f, {0.0, 0.0});
    for (double lambda : {2.0, 1.0}) {
      CHECK(std::fabs(superlevel_measure(lake, s, lambda) - superlevel_measure(lake, f, lambda)) <= cell);
    }
    double inner = 0.0, outer = 0.0;
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      const double r = norm(lake.grid().center(idx));
      if (s[idx] >= 2.0) inner = std::max(inner, r);
      if (s[idx] > 0.0 && s[idx] < 2.0) outer = std::max(outer, r);
    }
    CHECK(inner < outer);
    // mixed cells on the rim shift the higher norms slightly
    CHECK(lq_norm(lake, s, 1.0) == doctest::Approx(lq_norm(lake, f, 1.0)).epsilon(1e-12));
    for (double q : {2.0, 3.0}) CHECK(lq_norm(lake, s, q) == doctest::Approx(lq_norm(lake, f, q)).epsilon(2e-3));
  }

  SUBCASE("clipped near the shore") {
    ScalarField f = radial_field(lake, {0.0, 0.0}, [](double r) { return r < 0.3 ? 1.0 + r : 0.0; });
    const ScalarField s = symmetrize_at(lake, f, {0.0, -0.95});
    for (double lambda : {1.25, 1.1, 1.0}) {
      CHECK(std::fabs(superlevel_measure(lake, s, lambda) - superlevel_measure(lake, f, lambda)) <= cell);
    }
    CHECK(mu_integral(lake, s) == doctest::Approx(mu_integral(lake, f)));
  }
}

TEST_CASE("energy values") {
  const Lake lake = build_disk_lake(128, constant_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  const ScalarField zero(lake.grid());
  CHECK(energy(op, basis, zero, zero, 1.0, CirculationSpec{{0.0}}).value == 0.0);

  // Indicator of the disk of radius a over its area: E = (1/pi)(1/16 + log(1/a)/4).
  const double a = 0.3;
  ScalarField zeta = radial_field(lake, {0.0, 0.0}, [](double r) { return r < 0.3 ? 1.0 : 0.0; });
  const double area = mu_integral(lake, zeta);
  for (double& v : zeta.values) v /= area;
  const double e = energy(op, basis, zeta, zero, 1.0, CirculationSpec{{1.0}}).value;
  CHECK(e == doctest::Approx((1.0 / 16.0 + std::log(1.0 / a) / 4.0) / std::numbers::pi).epsilon(0.03));
}

TEST_CASE("harmonic energy is non-negative when only the outer circulation is set") {
  const Lake lake = build_annulus_lake(64, 0.4, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    ScalarField zeta(lake.grid());
    for (std::size_t idx = 0; idx < zeta.size(); ++idx) {
      if (lake.interior(idx)) zeta[idx] = u(rng);
    }
    const CirculationSpec circ{{mu_integral(lake, zeta), 0.0}};
    const EnergyEvaluation ev = energy(op, basis, zeta, ScalarField(lake.grid()), 1.0, circ);
    CHECK(ev.value >= 0.5 * integral_of_product(lake, zeta, ev.psi_k) - 1e-12);
  }
}

TEST_CASE("bathtub step") {
  SUBCASE("radial stream function gives a centred ball stack") {
    const Lake lake = build_disk_lake(64, parabolic_profile());
    VortexProfile p;
    p.distribution = DistributionFunction::linear();
    p.levels = 4;
    p.tau = 1.0;
    p.eps = 0.1;
    const LevelQuota q = build_quotas(p, lake);
    const ScalarField psi = radial_field(lake, {0.0, 0.0}, [](double r) { return 1.0 - r * r; });
    const ScalarField z = bathtub_step(lake, q, psi);
    const ScalarField s = symmetrize_at(lake, z, {0.0, 0.0});
    for (std::size_t idx = 0; idx < z.size(); ++idx) CHECK(z[idx] == doctest::Approx(s[idx]));
  }

  SUBCASE("constant stream function takes the lowest-index cells") {
    const Lake lake = build_disk_lake(16, constant_profile());
    VortexProfile p;
    p.tau = 1.0;
    p.eps = std::sqrt(3.0) * lake.grid().h;
    const LevelQuota q = build_quotas(p, lake);
    const ScalarField z = bathtub_step(lake, q, ScalarField(lake.grid(), 2.0));
    std::vector<std::size_t> first;
    for (std::size_t idx = 0; idx < z.size() && first.size() < 3; ++idx) {
      if (lake.interior(idx)) first.push_back(idx);
    }
    for (std::size_t idx : first) CHECK(z[idx] > 0.0);
    CHECK(mu_integral(lake, z) == doctest::Approx(p.positive_strength()));
    CHECK(integral_of_product(lake, z, ScalarField(lake.grid(), 2.0)) ==
          doctest::Approx(2.0 * p.positive_strength()));
  }

  SUBCASE("greedy placement matches enumeration on a 3x3 grid") {
    const Lake lake = three_by_three();
    REQUIRE(lake.interior_count() == 9);
    VortexProfile p;
    p.tau = 1.0;
    p.eps = std::sqrt(2.0) * lake.grid().h;
    const LevelQuota q = build_quotas(p, lake);
    std::vector<std::size_t> cells;
    for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
      if (lake.interior(idx)) cells.push_back(idx);
    }
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
      ScalarField psi(lake.grid());
      for (std::size_t idx : cells) psi[idx] = n01(rng);
      const ScalarField z = bathtub_step(lake, q, psi);
      double best = -1e300;
      for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t b = a + 1; b < cells.size(); ++b) {
          best = std::max(best, q.positive[0].value * lake.cell_measure(cells[a]) * (psi[cells[a]] + psi[cells[b]]));
        }
      }
      CHECK(integral_of_product(lake, z, psi) == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("ascent on the parabolic disk") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  VortexProfile p;
  p.tau = 1.0;
  p.eps = 0.1;
  const LevelQuota q = build_quotas(p, lake);
  const CirculationSpec circ = scaled_circulations({1.0}, p);
  const ScalarField zero(lake.grid());
  const AscentState st = maximize(op, basis, q, zero, 1.0, circ);
  CHECK(st.converged);
  for (std::size_t k = 1; k < st.trace.size(); ++k) CHECK(st.trace[k] - st.trace[k - 1] >= -1e-12);
  const ConcentrationReport rep = concentration_diagnostics(lake, st.zeta, p.eps);
  REQUIRE(rep.positive.present);
  CHECK_FALSE(rep.negative.present);
  const double r_star = radial_argmax(parabolic_profile(), 1.0, 0.0);
  CHECK(std::fabs(norm(rep.positive.centroid) - r_star) <= 2.0 * lake.grid().h);
}

TEST_CASE("ascent with a rotating stream separates the parts") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  VortexProfile p;
  p.tau = 0.5;
  p.eps = 0.1;
  const LevelQuota q = build_quotas(p, lake);
  const ScalarField big_psi = rotating_stream(lake, parabolic_profile(), 0.03);
  const AscentState st = maximize(op, basis, q, big_psi, 1.0, scaled_circulations({1.0}, p));
  CHECK(st.converged);
  const ConcentrationReport rep = concentration_diagnostics(lake, st.zeta, p.eps);
  REQUIRE(rep.positive.present);
  REQUIRE(rep.negative.present);
  CHECK(norm(rep.positive.centroid) > norm(rep.negative.centroid));
  for (std::size_t idx = 0; idx < st.zeta.size(); ++idx) {
    if (st.zeta[idx] > 0.0) CHECK(big_psi[idx] >= 0.0);
  }
}

TEST_CASE("subgradient inequality and monotone coupling") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  VortexProfile p;
  p.distribution = DistributionFunction::exponential();
  p.levels = 4;
  p.tau = 0.7;
  p.eps = 0.15;
  const LevelQuota q = build_quotas(p, lake);
  const CirculationSpec circ = scaled_circulations({1.0}, p);
  const ScalarField zero(lake.grid());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MaximizeOptions a, b;
    a.init = b.init = InitKind::Random;
    a.seed = seed;
    b.seed = seed + 100;
    const ScalarField z = initial_state(lake, q, zero, 1.0, a);
    const ScalarField zt = initial_state(lake, q, zero, 1.0, b);
    const EnergyEvaluation ez = energy(op, basis, z, zero, 1.0, circ);
    const EnergyEvaluation ezt = energy(op, basis, zt, zero, 1.0, circ);
    ScalarField psi(lake.grid()), diff(lake.grid());
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
      psi[idx] = ez.psi_k[idx] + ez.psi_h[idx];
      diff[idx] = zt[idx] - z[idx];
    }
    CHECK(ezt.value - ez.value - integral_of_product(lake, diff, psi) >= -1e-9);
  }

  const AscentState st = maximize(op, basis, q, zero, 1.0, circ);
  REQUIRE(st.converged);
  for (std::size_t a = 0; a < st.zeta.size(); ++a) {
    if (!(st.zeta[a] > 0.0)) continue;
    for (std::size_t b = 0; b < st.zeta.size(); ++b) {
      if (st.zeta[b] > 0.0 && st.zeta[a] > st.zeta[b]) CHECK(st.psi_total[a] >= st.psi_total[b]);
    }
  }
}

TEST_CASE("steadiness residual") {
  const Lake lake = build_disk_lake(64, parabolic_profile());
  CHECK(steadiness_residual(lake, ScalarField(lake.grid()), ScalarField(lake.grid(), 1.0), 10) == 0.0);

  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, {SolverMethod::Direct});
  VortexProfile p;
  p.distribution = DistributionFunction::linear();
  p.levels = 8;
  p.tau = 0.7;
  p.eps = 0.2;
  const LevelQuota q = build_quotas(p, lake);
  const CirculationSpec circ = scaled_circulations({1.0}, p);
  const ScalarField zero(lake.grid());
  MaximizeOptions opts;
  opts.max_iter = 2000;
  const AscentState st = maximize(op, basis, q, zero, 1.0, circ, opts);
  REQUIRE(st.converged);
  const double steady = steadiness_residual(lake, st.zeta, st.psi_total, 20);

  MaximizeOptions rnd;
  rnd.init = InitKind::Random;
  const ScalarField z = initial_state(lake, q, zero, 1.0, rnd);
  const EnergyEvaluation ev = energy(op, basis, z, zero, 1.0, circ);
  ScalarField psi(lake.grid());
  for (std::size_t idx = 0; idx < psi.size(); ++idx) psi[idx] = ev.psi_k[idx] + ev.psi_h[idx];
  const double rough = steadiness_residual(lake, z, psi, 20);
  CHECK(rough > 0.1);
  CHECK(steady < rough);
}

TEST_CASE("maximize option guards") {
  const Lake lake = build_disk_lake(16, constant_profile());
  VortexProfile p;
  p.eps = 0.3;
  const LevelQuota q = build_quotas(p, lake);
  MaximizeOptions opts;
  opts.init = InitKind::Given;
  CHECK(kind_of([&] { initial_state(lake, q, ScalarField(lake.grid()), 1.0, opts); }) == ErrorKind::Parameter);
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op);
  MaximizeOptions bad;
  bad.restarts = -1;
  CHECK(kind_of([&] { maximize(op, basis, q, ScalarField(lake.grid()), 1.0, scaled_circulations({1.0}, p), bad); }) ==
        ErrorKind::Parameter);
}
