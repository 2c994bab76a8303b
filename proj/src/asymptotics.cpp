#include "lakevort/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lakevort/error.hpp"
#include "lakevort/green.hpp"

namespace lakevort {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double scan_max(const std::function<double(double)>& f, int m) {
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= m; ++i) {
    const double v = f(static_cast<double>(i) / m);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double lo = std::max(0, best - 1) / static_cast<double>(m);
  const double hi = std::min(m, best + 1) / static_cast<double>(m);
  const double r = golden_max(f, lo, hi);
  // Keep the scan winner if refinement does not improve on it.
  return f(r) >= best_v ? r : static_cast<double>(best) / m;
}

}  // namespace

Point concentration_point(const Lake& lake, double tau, const ScalarField& big_psi, Part part) {
  require_aligned(lake.grid(), big_psi, "external stream function");
  if (part == Part::Positive && !(tau > 0.0)) throw Error(ErrorKind::UndefinedPart, "no positive part when tau = 0");
  if (part == Part::Negative && !(tau < 1.0)) throw Error(ErrorKind::UndefinedPart, "no negative part when tau = 1");
  const double w = part == Part::Positive ? tau : 1.0 - tau;
  const double s = part == Part::Positive ? 1.0 : -1.0;
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < lake.grid().size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const double v = w * lake.depth(idx) / kFourPi + s * big_psi[idx];
    if (v > best_v) {
      best_v = v;
      best = idx;
    }
  }
  return lake.grid().center(best);
}

double nu_bound(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorKind::Parameter, "tau must lie in [0, 1]");
  return std::min(tau, 1.0 - tau) / kFourPi;
}

ProfileIntegral::ProfileIntegral(const DepthProfile& profile, int panels)
    : profile_(profile), panels_(panels), cumulative_(static_cast<std::size_t>(panels) + 1, 0.0) {
  const double dt = 1.0 / panels_;
  for (int k = 0; k < panels_; ++k) {
    cumulative_[static_cast<std::size_t>(k) + 1] = cumulative_[static_cast<std::size_t>(k)] + dt * profile_((k + 0.5) * dt);
  }
}

double ProfileIntegral::operator()(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  const double dt = 1.0 / panels_;
  const int k = std::min(static_cast<int>(t / dt), panels_);
  const double rest = t - k * dt;
  double v = cumulative_[static_cast<std::size_t>(k)];
  if (rest > 0.0) v += rest * profile_(k * dt + 0.5 * rest);
  return v;
}

double radial_argmax(const DepthProfile& profile, double weight, double drift, int grid_m) {
  if (grid_m < 1000) throw Error(ErrorKind::Parameter, "radial scan needs at least 1000 samples");
  const ProfileIntegral integral(profile);
  return scan_max([&](double r) { return weight * profile(r * r) / kFourPi + drift * integral(r * r); }, grid_m);
}

PairPrediction rotating_radii(const DepthProfile& profile, double tau, double nu, SignConvention convention,
                              int grid_m) {
  const double bound = nu_bound(tau);
  if (!(std::fabs(nu) < bound)) {
    throw Error(ErrorKind::Admissibility, "|nu| = " + std::to_string(std::fabs(nu)) + " is not below the bound " +
                                              std::to_string(bound));
  }
  if (grid_m < 1000) throw Error(ErrorKind::Parameter, "radial scan needs at least 1000 samples");
  const ProfileIntegral integral(profile);
  const double s = convention == SignConvention::Plus ? 1.0 : -1.0;
  auto fplus = [&](double r) { return tau * profile(r * r) / kFourPi + s * 0.5 * nu * integral(r * r); };
  auto fminus = [&](double r) { return (1.0 - tau) * profile(r * r) / kFourPi - s * 0.5 * nu * integral(r * r); };
  PairPrediction out;
  out.convention = convention;
  out.r_plus = scan_max(fplus, grid_m);
  out.r_minus = scan_max(fminus, grid_m);
  out.f_plus = fplus(out.r_plus);
  out.f_minus = fminus(out.r_minus);
  return out;
}

ScalarField rotating_stream(const Lake& lake, const DepthProfile& profile, double nu, SignConvention convention) {
  const ProfileIntegral integral(profile);
  const double s = convention == SignConvention::Plus ? 1.0 : -1.0;
  ScalarField psi(lake.grid());
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const Point c = lake.grid().center(idx);
    psi[idx] = s * 0.5 * nu * integral(dot(c, c));
  }
  return psi;
}

std::array<double, 2> richardson_drift(const Lake& lake, Point z, double eps, double strength) {
  const double h = lake.grid().h;
  for (int k = 0; k < 16; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 16.0;
    for (double r : {0.0, h, 2.0 * h}) {
      const Point p{z.x + r * std::cos(a), z.y + r * std::sin(a)};
      if (!lake.shape().contains(p) || lake.depth_at(p) <= kDepthFloor) {
        throw Error(ErrorKind::Stencil, "drift point lies within 2h of the shore");
      }
    }
  }
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::Parameter, "eps must lie in (0, 1)");
  const double bx = (lake.depth_at({z.x + h, z.y}) - lake.depth_at({z.x - h, z.y})) / (2.0 * h);
  const double by = (lake.depth_at({z.x, z.y + h}) - lake.depth_at({z.x, z.y - h})) / (2.0 * h);
  const double scale = std::log(1.0 / eps) * strength / (2.0 * std::numbers::pi);
  return {-by * scale, bx * scale};
}

ScalarField leading_partial_flow(const Lake& lake, const ScalarField& zeta, const ScalarField& big_psi, double lambda,
                                 Part part) {
  require_aligned(lake.grid(), zeta, "vorticity");
  require_aligned(lake.grid(), big_psi, "external stream function");
  const GridSpec& g = lake.grid();
  const double sign = part == Part::Positive ? 1.0 : -1.0;
  const double diam = lake.diameter();
  const double dmin = kSelfDistance * g.h;
  std::vector<std::size_t> support;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (lake.interior(idx) && sign * zeta[idx] > 0.0) support.push_back(idx);
  }
  ScalarField out(g);
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (!lake.interior(x)) continue;
    double s = 0.0;
    for (std::size_t y : support) {
      const double d = std::max(distance(g.center(x), g.center(y)), dmin);
      s += std::log(diam / d) * sign * zeta[y] * lake.cell_measure(y);
    }
    out[x] = lake.depth(x) / kFourPi * s + sign * lambda * big_psi[x];
  }
  return out;
}

ConcentrationReport concentration_diagnostics(const Lake& lake, const ScalarField& zeta, double eps) {
  require_aligned(lake.grid(), zeta, "vorticity");
  const GridSpec& g = lake.grid();
  ConcentrationReport report;
  report.eps = eps;
  auto measure = [&](double sign) {
    PartReport r;
    std::vector<std::size_t> cells;
    Point weighted{0.0, 0.0};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (!lake.interior(idx) || sign * zeta[idx] <= 1e-14) continue;
      const double m = sign * zeta[idx] * lake.cell_measure(idx);
      cells.push_back(idx);
      r.mass += m;
      weighted = weighted + m * g.center(idx);
    }
    if (cells.empty() || r.mass <= 0.0) return r;
    r.present = true;
    r.cells = cells.size();
    r.centroid = (1.0 / r.mass) * weighted;
    for (std::size_t a = 0; a < cells.size(); ++a) {
      for (std::size_t b = a + 1; b < cells.size(); ++b) {
        r.diameter = std::max(r.diameter, distance(g.center(cells[a]), g.center(cells[b])));
      }
    }
    double in2 = 0.0, in4 = 0.0;
    for (std::size_t idx : cells) {
      const double m = sign * zeta[idx] * lake.cell_measure(idx);
      const double d = distance(g.center(idx), r.centroid);
      if (d <= 2.0 * eps) in2 += m;
      if (d <= 4.0 * eps) in4 += m;
    }
    r.fraction_2eps = std::min(in2 / r.mass, 1.0);
    r.fraction_4eps = std::min(in4 / r.mass, 1.0);
    return r;
  };
  report.positive = measure(1.0);
  report.negative = measure(-1.0);
  return report;
}

}  // namespace lakevort
