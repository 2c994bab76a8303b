#include "lakevort/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lakevort/error.hpp"
#include "lakevort/parallel.hpp"

namespace lakevort {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (1/4pi) log(|x|^2 |y|^2 - 2 x.y + 1) = (1/2pi) log| |y| x - y/|y| |, smooth at y = 0.
double disk_image_term(Point x, Point y) {
  const double s = dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0;
  return std::log(s) / (2.0 * kTwoPi);
}

// Annulus Green's function minus the free-space kernel.
double annulus_correction(Point x, Point y, double a) {
  const double rx = norm(x);
  const double ry = norm(y);
  const double rl = std::min(rx, ry);
  const double rg = std::max(rx, ry);
  const double dtheta = std::atan2(x.y, x.x) - std::atan2(y.y, y.x);
  const double la = std::log(1.0 / a);
  double s = (std::log(rl / a) * std::log(1.0 / rg) / la - std::log(1.0 / rg)) / kTwoPi;
  const double a2 = a * a;
  const double q1 = rl * rg;
  const double q2 = a2 / (rl * rg);
  const double q3 = a2 * rg / rl;
  const double q4 = a2 * rl / rg;
  double p1 = 1.0, p2 = 1.0, p3 = 1.0, p4 = 1.0, pa = 1.0;
  for (int n = 1; n <= 20000; ++n) {
    p1 *= q1;
    p2 *= q2;
    p3 *= q3;
    p4 *= q4;
    pa *= a2;
    const double term = (-p1 - p2 + p3 + p4) / (kTwoPi * n * (1.0 - pa));
    s += term * std::cos(n * dtheta);
    if (std::max({p1, p2, p3, p4}) < 1e-17) break;
  }
  return s;
}

double shore_distance(const Lake& lake, Point x) {
  const double r = norm(x);
  switch (lake.kind()) {
    case GeometryKind::Disk: return 1.0 - r;
    case GeometryKind::Annulus: return std::min(1.0 - r, r - lake.shape().r_inner);
    case GeometryKind::SlitSquare: return std::min(1.0 - std::fabs(x.x), 1.0 - std::fabs(x.y));
  }
  return 0.0;
}

void require_green_lake(const Lake& lake) {
  if (lake.kind() == GeometryKind::SlitSquare) {
    throw Error(ErrorKind::Domain, "no closed-form Green's function on the slit square");
  }
}

}  // namespace

double disk_green(Point x, Point y) {
  if (x == y) throw Error(ErrorKind::Singularity, "Green's function evaluated on the diagonal");
  return std::log(1.0 / distance(x, y)) / kTwoPi + disk_image_term(x, y);
}

double annulus_green(Point x, Point y, double r_inner) {
  if (x == y) throw Error(ErrorKind::Singularity, "Green's function evaluated on the diagonal");
  return std::log(1.0 / distance(x, y)) / kTwoPi + annulus_correction(x, y, r_inner);
}

double green_regular_part(const Lake& lake, Point x, Point y) {
  require_green_lake(lake);
  if (lake.kind() == GeometryKind::Annulus) return -annulus_correction(x, y, lake.shape().r_inner);
  return -disk_image_term(x, y);
}

double green_regularized(const Lake& lake, Point x, Point y, double min_distance) {
  const double d = std::max(distance(x, y), min_distance);
  return std::log(1.0 / d) / kTwoPi - green_regular_part(lake, x, y);
}

ScalarField remainder_solve(const WeightedOperator& op, Point y, const SolveOptions& opts) {
  const Lake& lake = op.lake();
  require_green_lake(lake);
  const auto cell = lake.grid().locate(y);
  if (!lake.shape().contains(y) || !cell || !lake.interior(*cell) || lake.depth_at(y) <= kDepthFloor) {
    throw Error(ErrorKind::Domain, "remainder pole must be an interior point with positive depth");
  }
  const GridSpec& g = lake.grid();
  const double dmin = kSelfDistance * g.h;
  const double inv_h2 = 1.0 / (g.h * g.h);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.unknowns()));
  for (const auto& f : op.interior_faces()) {
    const std::size_t p = op.cell_of(f.k1);
    const std::size_t q = op.cell_of(f.k2);
    const double db = lake.depth(q) - lake.depth(p);
    if (db == 0.0) continue;
    const Point mid = 0.5 * (g.center(p) + g.center(q));
    const double flux = f.w * green_regularized(lake, mid, y, dmin) * db * inv_h2;
    rhs[static_cast<Eigen::Index>(f.k1)] += flux;
    rhs[static_cast<Eigen::Index>(f.k2)] -= flux;
  }
  // Shore faces: b at the crossing point, g at the midpoint toward it.
  for (std::size_t k = 0; k < op.unknowns(); ++k) {
    const std::size_t p = op.cell_of(k);
    const Point pc = g.center(p);
    for (Face face : {Face::East, Face::North, Face::West, Face::South}) {
      const long nb = lake.neighbour(p, face);
      if (nb < 0 || lake.interior(static_cast<std::size_t>(nb)) || !lake.face_open(p, face)) continue;
      const Point qc = g.center(static_cast<std::size_t>(nb));
      double theta = 1.0;
      if (!lake.shape().contains(qc)) theta = std::max(lake.shape().crossing(pc, qc), 1e-3);
      const Point shore = pc + theta * (qc - pc);
      const double bp = lake.depth(p);
      const double bs = lake.depth_at(shore);
      const double w = 2.0 / (theta * std::max(bp + bs, kDepthFloor));
      const Point mid = 0.5 * (pc + shore);
      rhs[static_cast<Eigen::Index>(k)] += w * green_regularized(lake, mid, y, dmin) * (bs - bp) * inv_h2;
    }
  }
  return op.extend(op.solve(rhs, opts));
}

ExpansionReport verify_expansion(const WeightedOperator& op, const HarmonicBasis& basis, const ScalarField& zeta,
                                 const CirculationSpec& circ, const ExpansionOptions& opts,
                                 GreenDecomposition* decomposition) {
  const Lake& lake = op.lake();
  require_green_lake(lake);
  require_aligned(lake.grid(), zeta, "vorticity");
  if (opts.probe_res < 1) throw Error(ErrorKind::Parameter, "probe resolution must be positive");
  const GridSpec& g = lake.grid();
  const double dmin = kSelfDistance * g.h;
  const SolveOptions direct{SolverMethod::Direct};

  std::vector<std::size_t> support;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (lake.interior(idx) && zeta[idx] != 0.0) support.push_back(idx);
  }
  std::vector<std::size_t> targets;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (lake.interior(idx) && shore_distance(lake, g.center(idx)) > opts.interior_margin) targets.push_back(idx);
  }

  ExpansionReport report;
  report.support_cells = support.size();
  if (support.empty()) return report;

  // Probe boxes tile the bounding box of the support.
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (std::size_t idx : support) {
    const Point c = g.center(idx);
    xmin = std::min(xmin, c.x - 0.5 * g.h);
    xmax = std::max(xmax, c.x + 0.5 * g.h);
    ymin = std::min(ymin, c.y - 0.5 * g.h);
    ymax = std::max(ymax, c.y + 0.5 * g.h);
  }
  const int res = opts.probe_res;
  const double bw = (xmax - xmin) / res;
  const double bh = (ymax - ymin) / res;
  std::vector<std::vector<std::size_t>> boxes(static_cast<std::size_t>(res * res));
  for (std::size_t idx : support) {
    const Point c = g.center(idx);
    const int bi = std::clamp(static_cast<int>((c.x - xmin) / bw), 0, res - 1);
    const int bj = std::clamp(static_cast<int>((c.y - ymin) / bh), 0, res - 1);
    boxes[static_cast<std::size_t>(bj * res + bi)].push_back(idx);
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Point> probes;
  std::vector<double> masses;
  for (auto& box : boxes) {
    if (box.empty()) continue;
    double wsum = 0.0, mass = 0.0;
    Point centroid{0.0, 0.0};
    for (std::size_t idx : box) {
      const double m = zeta[idx] * lake.cell_measure(idx);
      mass += m;
      wsum += std::fabs(m);
      centroid = centroid + std::fabs(m) * g.center(idx);
    }
    Point y = wsum > 0.0 ? (1.0 / wsum) * centroid : g.center(box.front());
    // Keep the pole inside a wet cell of the box.
    const auto cell = g.locate(y);
    if (!cell || !lake.interior(*cell)) y = g.center(box.front());
    probes.push_back(y);
    masses.push_back(mass);
    groups.push_back(box);
  }

  const std::size_t np = probes.size();
  std::vector<double> rel_err(np, 0.0);
  std::vector<double> sup(np, 0.0);
  ScalarField remainder_sum(g);
  const double total_mass = mu_integral(lake, zeta);

  auto green_term = [&](std::size_t x_idx, const std::vector<std::size_t>& cells) {
    const Point x = g.center(x_idx);
    double s = 0.0;
    for (std::size_t y_idx : cells) {
      s += green_regularized(lake, x, g.center(y_idx), dmin) * zeta[y_idx] * lake.cell_measure(y_idx);
    }
    return lake.depth(x_idx) * s;
  };

  // Remainder fields are produced in batches and folded in probe order, so
  // memory stays bounded and the sum does not depend on the thread count.
  const std::size_t batch = static_cast<std::size_t>(std::max(opts.threads, 1)) * 4;
  std::vector<ScalarField> kept;
  for (std::size_t start = 0; start < np; start += batch) {
    const std::size_t count = std::min(batch, np - start);
    std::vector<ScalarField> remainder(count);
    parallel_for(count, opts.threads, [&](std::size_t t) {
      const std::size_t j = start + t;
      remainder[t] = remainder_solve(op, probes[j], direct);
      // Same comparison restricted to this probe's box.
      ScalarField part(g);
      for (std::size_t idx : groups[j]) part[idx] = zeta[idx];
      CirculationSpec c_part = circ;
      const double share = total_mass != 0.0 ? masses[j] / total_mass : 0.0;
      for (double& c : c_part.c) c *= share;
      if (total_mass == 0.0 && !c_part.c.empty()) {
        std::fill(c_part.c.begin(), c_part.c.end(), 0.0);
        c_part.c[0] = masses[j];
      }
      const ScalarField lhs = solve_k(op, part, direct);
      const ScalarField hz = solve_h(op, basis, part, c_part);
      double num = 0.0, den = 0.0;
      for (std::size_t x_idx : targets) {
        const double l = lhs[x_idx] + hz[x_idx];
        const double r = green_term(x_idx, groups[j]) + remainder[t][x_idx] * masses[j];
        num = std::max(num, std::fabs(l - r));
        den = std::max(den, std::fabs(l));
      }
      rel_err[j] = den > 0.0 ? num / den : num;
      for (double v : remainder[t].values) sup[j] = std::max(sup[j], std::fabs(v));
    });
    for (std::size_t t = 0; t < count; ++t) {
      const double m = masses[start + t];
      for (std::size_t idx = 0; idx < g.size(); ++idx) remainder_sum[idx] += remainder[t][idx] * m;
      if (decomposition) kept.push_back(std::move(remainder[t]));
    }
  }

  const ScalarField k = solve_k(op, zeta, direct);
  const ScalarField hz = solve_h(op, basis, zeta, circ);
  std::vector<double> diff(targets.size(), 0.0);
  std::vector<double> lhs_abs(targets.size(), 0.0);
  parallel_for(targets.size(), opts.threads, [&](std::size_t t) {
    const std::size_t x_idx = targets[t];
    const double l = k[x_idx] + hz[x_idx];
    const double r = green_term(x_idx, support) + remainder_sum[x_idx];
    diff[t] = std::fabs(l - r);
    lhs_abs[t] = std::fabs(l);
  });
  const double num = diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  const double den = lhs_abs.empty() ? 0.0 : *std::max_element(lhs_abs.begin(), lhs_abs.end());
  report.max_rel_error = den > 0.0 ? num / den : num;

  for (std::size_t j = 0; j < np; ++j) report.probes.push_back({probes[j], sup[j], rel_err[j], masses[j]});
  if (decomposition) {
    decomposition->probes = probes;
    decomposition->masses = masses;
    decomposition->remainder = std::move(kept);
    decomposition->sup_remainder = sup;
  }
  return report;
}

}  // namespace lakevort
