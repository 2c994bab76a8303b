#include "lakevort/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "lakevort/error.hpp"
#include "lakevort/parallel.hpp"
#include "lakevort/table_io.hpp"

namespace lakevort {

namespace {

CheckResult at_most(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured <= bound};
}

CheckResult at_least(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured >= bound};
}

ScalarField random_field(const Lake& lake, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(lake.grid());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (lake.interior(idx)) f[idx] = u(rng);
  }
  return f;
}

double weighted_dot(const Lake& lake, const ScalarField& a, const ScalarField& b) {
  ScalarField p(lake.grid());
  for (std::size_t idx = 0; idx < p.size(); ++idx) p[idx] = a[idx] * b[idx];
  return mu_integral(lake, p);
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void prepare(const RunContext& ctx) { std::filesystem::create_directories(ctx.out_dir); }

void say(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

bool non_decreasing(const std::vector<double>& v, double tol = 0.0) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[k - 1] - tol) return false;
  }
  return true;
}

}  // namespace

std::vector<CheckResult> operator_checks(const WeightedOperator& op, const HarmonicBasis& basis, int random_fields,
                                         std::uint64_t seed, const SolveOptions& opts) {
  const Lake& lake = op.lake();
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  const ScalarField z1 = random_field(lake, rng, -1.0, 1.0);
  const ScalarField z2 = random_field(lake, rng, -1.0, 1.0);
  const ScalarField k1 = solve_k(op, z1, opts);
  const ScalarField k2 = solve_k(op, z2, opts);
  const double s12 = weighted_dot(lake, z1, k2);
  const double s21 = weighted_dot(lake, z2, k1);
  out.push_back(at_most("K_symmetry_defect", std::fabs(s12 - s21) / std::max({std::fabs(s12), std::fabs(s21), 1e-300}),
                        1e-8));

  const double alpha = 0.37;
  ScalarField combo(lake.grid());
  for (std::size_t idx = 0; idx < combo.size(); ++idx) combo[idx] = z1[idx] + alpha * z2[idx];
  const ScalarField kc = solve_k(op, combo, opts);
  double lin = 0.0, scale = 0.0;
  for (std::size_t idx = 0; idx < kc.size(); ++idx) {
    lin = std::max(lin, std::fabs(kc[idx] - k1[idx] - alpha * k2[idx]));
    scale = std::max(scale, std::fabs(kc[idx]));
  }
  out.push_back(at_most("K_linearity_defect", lin / std::max(scale, 1e-300), 1e-8));

  double min_k = std::numeric_limits<double>::infinity();
  for (int t = 0; t < random_fields; ++t) {
    const ScalarField z = random_field(lake, rng, 0.0, 1.0);
    const ScalarField k = solve_k(op, z, opts);
    for (std::size_t idx = 0; idx < k.size(); ++idx) {
      if (lake.interior(idx)) min_k = std::min(min_k, k[idx]);
    }
  }
  if (random_fields > 0) out.push_back(at_least("K_positivity_min", min_k, -1e-8));

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, pu = 0.0;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (!lake.interior(idx)) continue;
    double s = 0.0;
    for (const auto& p : basis.psi) {
      lo = std::min(lo, p[idx]);
      hi = std::max(hi, p[idx]);
      s += p[idx];
    }
    pu = std::max(pu, std::fabs(s - 1.0));
  }
  out.push_back(at_least("basis_min", lo, -1e-8));
  out.push_back(at_most("basis_max", hi, 1.0 + 1e-8));
  out.push_back(at_most("partition_of_unity", pu, 1e-6));

  const Eigen::MatrixXd& a = basis.circulation;
  out.push_back(at_most("A_asymmetry", (a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  out.push_back(at_least("A_min_eigenvalue", eig.eigenvalues().minCoeff(), -1e-8));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(a.rows());
  out.push_back(at_most("A_kernel_residual", (a * ones).cwiseAbs().maxCoeff(), 1e-8));
  return out;
}

std::vector<CheckResult> class_checks(const Lake& lake, const VortexProfile& profile, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const LevelQuota q = build_quotas(profile, lake);
  std::mt19937_64 rng(seed);
  const ScalarField psi = random_field(lake, rng, -1.0, 1.0);
  const ScalarField zeta = bathtub_step(lake, q, psi);
  double max_cell = 0.0;
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) max_cell = std::max(max_cell, lake.cell_measure(idx));

  ScalarField plus(lake.grid()), minus(lake.grid());
  for (std::size_t idx = 0; idx < zeta.size(); ++idx) {
    plus[idx] = std::max(zeta[idx], 0.0);
    minus[idx] = std::max(-zeta[idx], 0.0);
  }
  auto sides = {std::make_tuple("positive", &q.positive, &plus, profile.positive_strength()),
                std::make_tuple("negative", &q.negative, &minus, profile.negative_strength())};
  for (const auto& [name, levels, part, target] : sides) {
    if (levels->empty()) continue;
    const double strength = mu_integral(lake, *part);
    out.push_back(at_most(std::string(name) + "_strength_rel_error", std::fabs(strength - target) / target, 1e-9));
    double worst = 0.0;
    for (const Level& l : *levels) {
      // Levels sharing a value land in the same superlevel set.
      const double cut = l.value * (1.0 - 1e-12);
      double cum = 0.0;
      for (const Level& m : *levels) {
        if (m.value >= cut) cum += m.quota;
      }
      const double measured = superlevel_measure(lake, *part, cut);
      worst = std::max(worst, std::fabs(measured - cum) / max_cell);
    }
    out.push_back(at_most(std::string(name) + "_layer_cake_cells", worst, 1.0));
    // The partially filled last cell may push the support past eps^2 by less than a cell.
    const double excess = superlevel_measure(lake, *part, 1e-300) - profile.eps * profile.eps;
    out.push_back(at_most(std::string(name) + "_support_excess_cells", std::max(excess, 0.0) / max_cell, 1.0));
  }
  return out;
}

Problem make_problem(const ExperimentConfig& cfg) {
  const double nu = cfg.physics.nu;
  const bool rotating = cfg.physics.psi == "rotating";
  if (!rotating && cfg.physics.psi != "zero") throw Error(ErrorKind::Config, "psi must be rotating or zero");
  if (rotating && nu != 0.0) {
    const double bound = nu_bound(cfg.profile.tau);
    if (!(std::fabs(nu) < bound)) {
      throw Error(ErrorKind::Admissibility, "|nu| = " + format_number(std::fabs(nu)) + " must be below " +
                                                format_number(bound));
    }
  }
  Lake lake = make_lake(cfg);
  ScalarField big_psi(lake.grid());
  if (rotating && nu != 0.0) {
    if (!lake.radial_profile()) throw Error(ErrorKind::Experiment, "rotating forcing needs a radial depth profile");
    big_psi = rotating_stream(lake, *lake.radial_profile(), nu, make_convention(cfg));
  }
  WeightedOperator op = assemble(lake);
  SolveOptions direct{SolverMethod::Direct};
  HarmonicBasis basis = harmonic_basis(op, direct);
  std::vector<double> cbar = cfg.physics.circulations;
  if (cbar.empty()) {
    cbar.assign(static_cast<std::size_t>(basis.components()), 0.0);
    cbar[0] = 1.0;
  }
  if (static_cast<int>(cbar.size()) != basis.components()) {
    throw Error(ErrorKind::Config, "expected " + std::to_string(basis.components()) + " circulations, got " +
                                       std::to_string(cbar.size()));
  }
  return Problem{std::move(lake), std::move(op), std::move(basis), std::move(big_psi), cfg.physics.lambda,
                 std::move(cbar)};
}

MaximizeRun run_maximizer(const Problem& problem, const VortexProfile& profile, const MaximizeOptions& opts) {
  MaximizeRun run;
  run.quotas = build_quotas(profile, problem.lake);
  const CirculationSpec circ = scaled_circulations(problem.cbar, profile);
  run.state = maximize(problem.op, problem.basis, run.quotas, problem.big_psi, problem.lambda, circ, opts);
  run.concentration = concentration_diagnostics(problem.lake, run.state.zeta, profile.eps);
  return run;
}

namespace {

MaximizeOptions maximize_options(const ExperimentConfig& cfg) {
  MaximizeOptions opts;
  opts.max_iter = cfg.solver.max_iter;
  opts.init = make_init(cfg);
  opts.seed = cfg.experiment.seed;
  opts.restarts = cfg.experiment.restarts;
  opts.solve.method = make_method(cfg);
  opts.solve.tol = cfg.solver.tol;
  return opts;
}

// Distance from a centroid to the predicted concentration set.
double centroid_error(const ExperimentConfig& cfg, const Problem& problem, Point centroid, Part part) {
  const Lake& lake = problem.lake;
  const double tau = cfg.profile.tau;
  if (lake.radial_profile() && lake.kind() != GeometryKind::SlitSquare) {
    const double s = make_convention(cfg) == SignConvention::Plus ? 1.0 : -1.0;
    const double nu = cfg.physics.psi == "rotating" ? cfg.physics.nu : 0.0;
    const double drift = problem.lambda * s * 0.5 * nu * (part == Part::Positive ? 1.0 : -1.0);
    const double w = part == Part::Positive ? tau : 1.0 - tau;
    const double r = radial_argmax(*lake.radial_profile(), w, drift, cfg.experiment.grid_m);
    return std::fabs(norm(centroid) - r);
  }
  ScalarField scaled = problem.big_psi;
  for (double& v : scaled.values) v *= problem.lambda;
  return distance(centroid, concentration_point(lake, tau, scaled, part));
}

}  // namespace

int cmd_maximize(const ExperimentConfig& cfg, const RunContext& ctx) {
  prepare(ctx);
  const Problem problem = make_problem(cfg);
  const VortexProfile profile = make_profile(cfg, cfg.profile.eps);
  const MaximizeRun run = run_maximizer(problem, profile, maximize_options(cfg));
  const Lake& lake = problem.lake;
  const GridSpec& g = lake.grid();

  Table rows;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const Point c = g.center(idx);
    rows.push_back({c.x, c.y, run.state.zeta[idx], run.state.psi_total[idx]});
  }
  write_table(join(ctx.out_dir, "state.txt"), rows,
              {"tau=" + format_number(profile.tau) + " eps=" + format_number(profile.eps) +
               " energy=" + format_number(run.state.energy()) + " iters=" + std::to_string(run.state.iterations)});

  Table trace;
  for (std::size_t k = 0; k < run.state.trace.size(); ++k) trace.push_back({static_cast<double>(k), run.state.trace[k]});
  write_table(join(ctx.out_dir, "energy.txt"), trace);

  const int tests = cfg.experiment.steadiness_tests;
  const double residual = steadiness_residual(lake, run.state.zeta, run.state.psi_total, tests, cfg.experiment.seed);
  write_table(join(ctx.out_dir, "steadiness.txt"), {{residual, static_cast<double>(tests)}}, {"residual tests"});

  Table conc;
  for (const auto& [sign, part, rep] : {std::make_tuple(1.0, Part::Positive, run.concentration.positive),
                                        std::make_tuple(-1.0, Part::Negative, run.concentration.negative)}) {
    if (!rep.present) continue;
    conc.push_back({sign, rep.centroid.x, rep.centroid.y, norm(rep.centroid), rep.diameter, rep.mass, rep.fraction_2eps,
                    rep.fraction_4eps, centroid_error(cfg, problem, rep.centroid, part)});
  }
  write_table(join(ctx.out_dir, "concentration.txt"), conc,
              {"part centroid_x centroid_y centroid_r diameter mass frac_2eps frac_4eps centroid_err"});

  say(ctx, "lake " + lake.name() + " n=" + std::to_string(cfg.lake.n) + " interior cells " +
               std::to_string(lake.interior_count()));
  say(ctx, "energy " + format_number(run.state.energy()) + " after " + std::to_string(run.state.iterations) +
               " iterations (" + run.state.stop_reason + ")");
  for (const auto& row : conc) {
    say(ctx, std::string(row[0] > 0 ? "positive" : "negative") + " centroid radius " + format_number(row[3]) +
                 " diameter " + format_number(row[4]) + " centroid error " + format_number(row[8]));
  }
  say(ctx, "steadiness residual " + format_number(residual));
  return run.state.converged ? 0 : 1;
}

int cmd_figure1(const ExperimentConfig& cfg, const RunContext& ctx) {
  if (cfg.lake.geometry != "disk") throw Error(ErrorKind::Experiment, "figure1 needs a disk lake with a radial profile");
  prepare(ctx);
  const DepthProfile profile = profile_from_name(cfg.lake.profile);
  const double tau = cfg.profile.tau;
  const double nu0 = nu_bound(tau);
  if (!(nu0 > 0.0)) throw Error(ErrorKind::Experiment, "tau leaves no admissible rotation");
  const int points = cfg.experiment.nu_points;
  if (points < 2) throw Error(ErrorKind::Parameter, "nu sweep needs at least 2 points");
  const SignConvention conv = make_convention(cfg);

  std::vector<PairPrediction> preds(static_cast<std::size_t>(points));
  std::vector<double> nus(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) nus[static_cast<std::size_t>(k)] = k * nu0 / points;
  parallel_for(nus.size(), ctx.threads, [&](std::size_t k) {
    preds[k] = rotating_radii(profile, tau, nus[k], conv, cfg.experiment.grid_m);
  });

  Table depth, mtp, mtn, dp, dn, table;
  const int samples = std::max(cfg.experiment.radial_samples, 2);
  for (int i = 0; i < samples; ++i) {
    const double r = static_cast<double>(i) / (samples - 1);
    depth.push_back({r, profile(r * r)});
  }
  std::vector<double> rp, rm, bp;
  for (std::size_t k = 0; k < nus.size(); ++k) {
    const auto& p = preds[k];
    const double b_plus = profile(p.r_plus * p.r_plus);
    const double b_minus = profile(p.r_minus * p.r_minus);
    mtp.push_back({nus[k], p.r_plus});
    mtn.push_back({nus[k], p.r_minus});
    dp.push_back({nus[k], b_plus});
    dn.push_back({nus[k], b_minus});
    table.push_back({nus[k], p.r_plus, p.r_minus, b_plus, b_minus});
    rp.push_back(p.r_plus);
    rm.push_back(-p.r_minus);
    bp.push_back(-b_plus);
  }
  write_table(join(ctx.out_dir, "depth.txt"), depth);
  write_table(join(ctx.out_dir, "mtP.txt"), mtp);
  write_table(join(ctx.out_dir, "mtN.txt"), mtn);
  write_table(join(ctx.out_dir, "depth_mtP.txt"), dp);
  write_table(join(ctx.out_dir, "depth_mtN.txt"), dn);
  write_table(join(ctx.out_dir, "predictions.txt"), table, {"nu r_plus r_minus b(r_plus) b(r_minus)"});

  const bool ok_p = non_decreasing(rp);
  const bool ok_m = non_decreasing(rm);
  const bool ok_b = non_decreasing(bp);
  say(ctx, "nu0 " + format_number(nu0) + " r_plus(0) " + format_number(preds[0].r_plus) + " r_minus(0) " +
               format_number(preds[0].r_minus));
  say(ctx, std::string("r_plus non-decreasing ") + (ok_p ? "PASS" : "FAIL"));
  say(ctx, std::string("r_minus non-increasing ") + (ok_m ? "PASS" : "FAIL"));
  say(ctx, std::string("b(r_plus) non-increasing ") + (ok_b ? "PASS" : "FAIL"));
  return ok_p && ok_m && ok_b ? 0 : 1;
}

int cmd_epsilon_sweep(const ExperimentConfig& cfg, const RunContext& ctx) {
  const auto& eps = cfg.profile.eps_list;
  if (eps.size() < 3) throw Error(ErrorKind::Parameter, "eps sweep needs at least 3 values");
  for (std::size_t k = 1; k < eps.size(); ++k) {
    if (!(eps[k] < eps[k - 1])) throw Error(ErrorKind::Parameter, "eps values must decrease");
  }
  prepare(ctx);
  const Problem problem = make_problem(cfg);
  const MaximizeOptions opts = maximize_options(cfg);
  std::vector<MaximizeRun> runs(eps.size());
  parallel_for(eps.size(), ctx.threads, [&](std::size_t k) {
    runs[k] = run_maximizer(problem, make_profile(cfg, eps[k]), opts);
  });

  const bool has_plus = cfg.profile.tau > 0.0;
  const bool has_minus = cfg.profile.tau < 1.0;
  Table rows;
  std::vector<double> dplus, dminus;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const auto& c = runs[k].concentration;
    std::vector<double> row{eps[k]};
    if (has_plus) row.push_back(c.positive.diameter);
    if (has_minus) row.push_back(c.negative.diameter);
    if (has_plus) row.push_back(centroid_error(cfg, problem, c.positive.centroid, Part::Positive));
    if (has_minus) row.push_back(centroid_error(cfg, problem, c.negative.centroid, Part::Negative));
    rows.push_back(row);
    dplus.push_back(-c.positive.diameter);
    dminus.push_back(-c.negative.diameter);
  }
  std::vector<std::string> comments;
  if (has_plus && has_minus) {
    comments.push_back("eps diam_plus diam_minus centroid_err_plus centroid_err_minus");
  } else if (has_plus) {
    comments.push_back("eps diam_plus centroid_err_plus");
    comments.push_back("negative part absent (tau = 1): minus columns omitted");
  } else {
    comments.push_back("eps diam_minus centroid_err_minus");
    comments.push_back("positive part absent (tau = 0): plus columns omitted");
  }
  write_table(join(ctx.out_dir, "eps_sweep.txt"), rows, comments);

  auto strictly = [](const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (!(v[k] > v[k - 1])) return false;
    }
    return true;
  };
  bool ok = true;
  if (has_plus) {
    ok = ok && strictly(dplus);
    say(ctx, std::string("positive diameters strictly decreasing ") + (strictly(dplus) ? "PASS" : "FAIL"));
  }
  if (has_minus) {
    ok = ok && strictly(dminus);
    say(ctx, std::string("negative diameters strictly decreasing ") + (strictly(dminus) ? "PASS" : "FAIL"));
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::ostringstream os;
    for (double v : rows[k]) os << format_number(v) << ' ';
    say(ctx, os.str());
  }
  return ok ? 0 : 1;
}

int cmd_invariants(const ExperimentConfig& cfg, const RunContext& ctx) {
  prepare(ctx);
  ExperimentConfig base = cfg;
  base.physics.circulations.clear();
  const Problem problem = make_problem(base);
  const Lake& lake = problem.lake;
  std::vector<CheckResult> checks =
      operator_checks(problem.op, problem.basis, cfg.experiment.random_fields, cfg.experiment.seed,
                      SolveOptions{SolverMethod::Direct});
  const VortexProfile profile = make_profile(cfg, cfg.profile.eps);
  for (auto& c : class_checks(lake, profile, cfg.experiment.seed)) checks.push_back(c);

  // Circulations c = cbar int zeta dmu must match the vorticity they pair with.
  {
    std::vector<double> cbar = cfg.physics.circulations;
    if (cbar.empty()) cbar = problem.cbar;
    std::mt19937_64 rng(cfg.experiment.seed + 1);
    const ScalarField zeta = random_field(lake, rng, 0.0, 1.0);
    const double mass = mu_integral(lake, zeta);
    CirculationSpec circ;
    for (double c : cbar) circ.c.push_back(c * mass);
    const double defect = std::fabs(circ.total() - mass) / std::fabs(mass);
    bool ok = true;
    try {
      (void)solve_h(problem.op, problem.basis, zeta, circ);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Consistency && e.kind() != ErrorKind::Shape) throw;
      ok = false;
    }
    checks.push_back({"circulation_consistency", defect, 1e-8, ok && defect <= 1e-8});
  }

  {
    MaximizeOptions opts;
    opts.max_iter = cfg.solver.max_iter;
    Problem p = make_problem(base);
    const MaximizeRun run = run_maximizer(p, profile, opts);
    double worst = 0.0;
    for (std::size_t k = 1; k < run.state.trace.size(); ++k) {
      worst = std::max(worst, run.state.trace[k - 1] - run.state.trace[k]);
    }
    checks.push_back(at_most("energy_trace_max_drop", worst, 1e-12));
  }

  std::ostringstream report;
  bool all = true;
  for (const auto& c : checks) {
    report << c.name << ' ' << format_number(c.measured) << ' ' << format_number(c.bound) << ' '
           << (c.pass ? "PASS" : "FAIL") << '\n';
    all = all && c.pass;
  }
  {
    std::ofstream out(join(ctx.out_dir, "invariants.txt"));
    out << report.str();
  }
  if (ctx.log) *ctx.log << report.str();
  return all ? 0 : 1;
}

ScalarField bump_field(const Lake& lake, Point center, double radius) {
  ScalarField f(lake.grid());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const double q = 1.0 - dot(lake.grid().center(idx) - center, lake.grid().center(idx) - center) / (radius * radius);
    if (q > 0.0) f[idx] = q * q;
  }
  return f;
}

int cmd_green_check(const ExperimentConfig& cfg, const RunContext& ctx) {
  if (cfg.lake.geometry != "disk") throw Error(ErrorKind::Experiment, "green-check needs a disk lake");
  if (cfg.experiment.zeta_center.size() != 2) throw Error(ErrorKind::Config, "zeta_center needs two coordinates");
  prepare(ctx);
  const Lake lake = make_lake(cfg);
  const WeightedOperator op = assemble(lake);
  const HarmonicBasis basis = harmonic_basis(op, SolveOptions{SolverMethod::Direct});
  const Point c{cfg.experiment.zeta_center[0], cfg.experiment.zeta_center[1]};
  const ScalarField zeta = bump_field(lake, c, cfg.experiment.zeta_radius);
  CirculationSpec circ{{mu_integral(lake, zeta)}};
  ExpansionOptions opts;
  opts.probe_res = cfg.experiment.probe_res;
  opts.threads = ctx.threads;
  const ExpansionReport rep = verify_expansion(op, basis, zeta, circ, opts);

  Table rows;
  for (const auto& p : rep.probes) rows.push_back({p.y.x, p.y.y, p.sup_r, p.rel_err});
  write_table(join(ctx.out_dir, "green.txt"), rows, {"y_x y_y sup_R rel_err"});
  const bool ok = rep.max_rel_error <= cfg.experiment.green_bound;
  const std::string verdict = "max_rel_error " + format_number(rep.max_rel_error) + " bound " +
                              format_number(cfg.experiment.green_bound) + (ok ? " PASS" : " FAIL");
  write_table(join(ctx.out_dir, "green_summary.txt"), {{rep.max_rel_error, cfg.experiment.green_bound}},
              {"max_rel_error bound"});
  say(ctx, "probes " + std::to_string(rep.probes.size()) + " support cells " + std::to_string(rep.support_cells));
  say(ctx, verdict);
  return ok ? 0 : 1;
}

}  // namespace lakevort
