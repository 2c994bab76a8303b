#include "lakevort/lake.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "lakevort/error.hpp"
#include "lakevort/expression.hpp"
#include "lakevort/green.hpp"

namespace lakevort {

DepthProfile constant_profile(double value) {
  return {"const", [value](double) { return value; }};
}

DepthProfile parabolic_profile() {
  return {"parabolic", [](double t) { return 2.0 - 4.0 * (t - 0.5) * (t - 0.5); }};
}

DepthProfile linear_shore_profile() {
  return {"linear_shore", [](double t) { return 1.0 - t; }};
}

DepthProfile custom_profile(const std::string& expression) {
  Expression e = Expression::parse(expression);
  return {"custom:" + expression, [e](double t) { return e(t); }};
}

DepthProfile profile_from_name(const std::string& spec) {
  if (spec == "const" || spec == "constant") return constant_profile();
  if (spec == "parabolic") return parabolic_profile();
  if (spec == "linear_shore") return linear_shore_profile();
  if (spec.rfind("custom:", 0) == 0) return custom_profile(spec.substr(7));
  throw Error(ErrorKind::Config, "unknown depth profile '" + spec + "'");
}

bool Shape::contains(Point p) const {
  switch (kind) {
    case GeometryKind::Disk: return norm(p) < 1.0;
    case GeometryKind::Annulus: {
      const double r = norm(p);
      return r < 1.0 && r > r_inner;
    }
    case GeometryKind::SlitSquare:
      return std::fabs(p.x) < 1.0 && std::fabs(p.y) < 1.0 && !(p.x == 0.0 && p.y <= 0.0);
  }
  return false;
}

namespace {

// Positive root of |p + t d| = radius; `from_inside` picks the exit root.
double circle_crossing(Point p, Point d, double radius, bool from_inside) {
  const double a = dot(d, d);
  const double b = dot(p, d);
  const double c = dot(p, p) - radius * radius;
  const double disc = std::max(b * b - a * c, 0.0);
  const double s = std::sqrt(disc);
  return from_inside ? (-b + s) / a : (-b - s) / a;
}

}  // namespace

double Shape::crossing(Point inside, Point outside) const {
  const Point d = outside - inside;
  double t = 1.0;
  switch (kind) {
    case GeometryKind::Disk:
      t = circle_crossing(inside, d, 1.0, true);
      break;
    case GeometryKind::Annulus:
      t = norm(outside) >= 1.0 ? circle_crossing(inside, d, 1.0, true)
                               : circle_crossing(inside, d, r_inner, false);
      break;
    case GeometryKind::SlitSquare: {
      auto axis = [&](double from, double delta) {
        if (from + delta > 1.0) t = std::min(t, (1.0 - from) / delta);
        if (from + delta < -1.0) t = std::min(t, (-1.0 - from) / delta);
      };
      axis(inside.x, d.x);
      axis(inside.y, d.y);
      break;
    }
  }
  if (!std::isfinite(t)) return 1.0;
  return std::clamp(t, 0.0, 1.0);
}

bool Shape::severed(Point a, Point b) const {
  if (kind != GeometryKind::SlitSquare) return false;
  return ((a.x < 0.0) != (b.x < 0.0)) && a.y < 0.0 && b.y < 0.0;
}

double Shape::diameter() const {
  return kind == GeometryKind::SlitSquare ? 2.0 * std::numbers::sqrt2 : 2.0;
}

Lake::Lake(GridSpec grid, Shape shape, std::function<double(Point)> depth_fn, std::string name,
           std::optional<DepthProfile> radial)
    : grid_(grid),
      shape_(shape),
      depth_fn_(std::move(depth_fn)),
      name_(std::move(name)),
      radial_(std::move(radial)) {
  grid_.validate();
  const std::size_t n = grid_.size();
  interior_.assign(n, 0);
  depth_.assign(n, 0.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Point c = grid_.center(idx);
    if (!shape_.contains(c)) continue;
    const double b = depth_fn_(c);
    if (!std::isfinite(b) || b < 0.0) {
      throw Error(ErrorKind::InvalidDepth, "depth must be finite and non-negative, got " +
                                               std::to_string(b));
    }
    if (b > kDepthFloor) {
      interior_[idx] = 1;
      depth_[idx] = b;
      ++interior_count_;
    }
  }
  if (interior_count_ == 0) {
    throw Error(ErrorKind::EmptyDomain, "lake '" + name_ + "' has no interior cells");
  }
  label_components();
}

double Lake::depth_at(Point p) const { return std::max(depth_fn_(p), 0.0); }

long Lake::neighbour(std::size_t idx, Face f) const {
  int i = grid_.col(idx);
  int j = grid_.row(idx);
  switch (f) {
    case Face::East: ++i; break;
    case Face::West: --i; break;
    case Face::North: ++j; break;
    case Face::South: --j; break;
  }
  if (!grid_.in_range(i, j)) return -1;
  return static_cast<long>(grid_.index(i, j));
}

bool Lake::face_open(std::size_t idx, Face f) const {
  const long nb = neighbour(idx, f);
  if (nb < 0) return false;
  return !shape_.severed(grid_.center(idx), grid_.center(static_cast<std::size_t>(nb)));
}

double Lake::total_measure() const {
  double s = 0.0;
  for (std::size_t idx = 0; idx < grid_.size(); ++idx) s += cell_measure(idx);
  return s;
}

void Lake::label_components() {
  const std::size_t n = grid_.size();
  component_.assign(n, -1);
  boundary_.assign(n, 0);

  // Exterior regions are 8-connected; the one touching the grid frame is 0.
  auto flood = [&](std::size_t seed, int label) {
    std::deque<std::size_t> queue{seed};
    component_[seed] = label;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const int ci = grid_.col(cur);
      const int cj = grid_.row(cur);
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (!grid_.in_range(ci + di, cj + dj)) continue;
          const std::size_t nb = grid_.index(ci + di, cj + dj);
          if (interior_[nb] || component_[nb] >= 0) continue;
          component_[nb] = label;
          queue.push_back(nb);
        }
      }
    }
  };

  int next = 0;
  for (int i = 0; i < grid_.nx; ++i) {
    for (int j : {0, grid_.ny - 1}) {
      const std::size_t idx = grid_.index(i, j);
      if (!interior_[idx] && component_[idx] < 0) flood(idx, 0);
    }
  }
  for (int j = 0; j < grid_.ny; ++j) {
    for (int i : {0, grid_.nx - 1}) {
      const std::size_t idx = grid_.index(i, j);
      if (!interior_[idx] && component_[idx] < 0) flood(idx, 0);
    }
  }
  next = 1;
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (!interior_[idx] && component_[idx] < 0) flood(idx, next++);
  }
  components_ = next;

  for (std::size_t idx = 0; idx < n; ++idx) {
    if (interior_[idx]) continue;
    for (Face f : {Face::East, Face::North, Face::West, Face::South}) {
      const long nb = neighbour(idx, f);
      if (nb >= 0 && interior_[static_cast<std::size_t>(nb)]) {
        boundary_[idx] = 1;
        break;
      }
    }
  }
}

namespace {

GridSpec padded_square_grid(int n) {
  const double h = 2.0 / n;
  return GridSpec{n + 2, n + 2, -1.0 - h, -1.0 - h, h};
}

void validate_profile(const DepthProfile& profile) {
  for (int k = 0; k <= 2000; ++k) {
    const double t = k / 2000.0;
    const double v = profile(t);
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidDepth, "depth profile '" + profile.name + "' is " +
                                               std::to_string(v) + " at t=" + std::to_string(t));
    }
  }
}

std::function<double(Point)> radial_depth(const DepthProfile& profile) {
  return [profile](Point p) { return std::max(profile(dot(p, p)), 0.0); };
}

}  // namespace

Lake build_disk_lake(int n, const DepthProfile& profile) {
  if (n < 16) throw Error(ErrorKind::Geometry, "disk lake needs n >= 16");
  validate_profile(profile);
  return Lake(padded_square_grid(n), Shape{GeometryKind::Disk, 0.0}, radial_depth(profile),
              "disk/" + profile.name, profile);
}

Lake build_annulus_lake(int n, double r_inner, const DepthProfile& profile) {
  if (n < 16) throw Error(ErrorKind::Geometry, "annulus lake needs n >= 16");
  const double h = 2.0 / n;
  if (!(r_inner > 2.0 * h) || !(r_inner < 1.0 - 4.0 * h)) {
    throw Error(ErrorKind::Geometry, "inner radius " + std::to_string(r_inner) +
                                         " cannot be resolved with n=" + std::to_string(n));
  }
  validate_profile(profile);
  return Lake(padded_square_grid(n), Shape{GeometryKind::Annulus, r_inner}, radial_depth(profile),
              "annulus/" + profile.name, profile);
}

Lake build_slit_square_lake(int n) {
  if (n < 32 || n % 2 != 0) throw Error(ErrorKind::Geometry, "slit square needs even n >= 32");
  auto depth = [](Point p) { return std::fabs(p.x) + (p.y > 0.0 ? p.y : 0.0); };
  return Lake(padded_square_grid(n), Shape{GeometryKind::SlitSquare, 0.0}, depth, "slit_square",
              std::nullopt);
}

double mu_integral(const Lake& lake, const ScalarField& f) {
  require_aligned(lake.grid(), f, "integrand");
  double s = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (lake.interior(idx)) s += f[idx] * lake.cell_measure(idx);
  }
  return s;
}

ContinuityReport continuity_check(const Lake& lake, double ell, std::span<const Point> probes,
                                  double b_floor) {
  if (!(ell > 2.0)) throw Error(ErrorKind::Parameter, "continuity exponent must exceed 2");
  if (lake.kind() == GeometryKind::SlitSquare) {
    throw Error(ErrorKind::Geometry, "continuity check needs a disk or annulus lake");
  }
  const GridSpec& g = lake.grid();
  const double h = g.h;
  ContinuityReport report;
  report.ell = ell;

  // Weight (|grad b|^2 / b)^{ell/2} per cell, computed once.
  std::vector<double> weight(g.size(), 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const double b = lake.depth(idx);
    if (b < b_floor) {
      ++report.excluded_cells;
      continue;
    }
    const Point c = g.center(idx);
    const double bx = (lake.depth_at({c.x + h, c.y}) - lake.depth_at({c.x - h, c.y})) / (2 * h);
    const double by = (lake.depth_at({c.x, c.y + h}) - lake.depth_at({c.x, c.y - h})) / (2 * h);
    weight[idx] = std::pow((bx * bx + by * by) / b, 0.5 * ell);
  }

  for (const Point& y : probes) {
    if (!lake.shape().contains(y)) throw Error(ErrorKind::Domain, "continuity probe outside the lake");
    double sum = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (weight[idx] == 0.0) continue;
      const double gv = std::max(green_regularized(lake, g.center(idx), y, kSelfDistance * h), 0.0);
      sum += std::pow(gv, ell) * weight[idx] * g.cell_area();
    }
    report.probes.push_back({y, sum});
    report.max_value = std::max(report.max_value, sum);
  }

  // Order probes by distance to the shore and look for a blow-up at the end.
  if (report.probes.size() >= 3) {
    std::vector<ContinuityProbe> sorted = report.probes;
    auto shore_distance = [&](Point p) {
      const double r = norm(p);
      return lake.kind() == GeometryKind::Annulus ? std::min(1.0 - r, r - lake.shape().r_inner) : 1.0 - r;
    };
    std::sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
      return shore_distance(a.y) > shore_distance(b.y);
    });
    const std::size_t k = sorted.size();
    const bool rising = sorted[k - 1].value > sorted[k - 2].value && sorted[k - 2].value > sorted[k - 3].value;
    const double base = std::max(sorted.front().value, 1e-300);
    report.growth_flag = rising && sorted.back().value > 10.0 * base;
  }
  return report;
}

void write_field_table(const Lake& lake, const ScalarField& f, const std::string& path) {
  require_aligned(lake.grid(), f, "field");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Experiment, "cannot write " + path);
  out << std::setprecision(12);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    if (!lake.interior(idx)) continue;
    const Point c = lake.grid().center(idx);
    out << c.x << ' ' << c.y << ' ' << f[idx] << '\n';
  }
}

}  // namespace lakevort
