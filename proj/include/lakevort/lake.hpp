#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lakevort/grid.hpp"

namespace lakevort {

// Depth below which a cell is treated as dry (exterior) and which floors the
// face coefficients b^{-1}.
inline constexpr double kDepthFloor = 1e-12;

// Radial depth law b(x) = profile(|x|^2), t in [0, 1].
struct DepthProfile {
  std::string name;
  std::function<double(double)> eval;

  double operator()(double t) const { return eval(t); }
};

DepthProfile constant_profile(double value = 1.0);
// P(t) = 2 - 4 (t - 1/2)^2: maximal depth 2 on the circle |x|^2 = 1/2.
DepthProfile parabolic_profile();
// 1 - t: depth vanishes linearly at the shore.
DepthProfile linear_shore_profile();
DepthProfile custom_profile(const std::string& expression);
// Accepts `const`, `parabolic`, `linear_shore` or `custom:<expr>`.
DepthProfile profile_from_name(const std::string& spec);

enum class GeometryKind { Disk, Annulus, SlitSquare };

// Analytic description of the open set: membership, where a grid segment
// leaves it, and which faces the slit severs.
struct Shape {
  GeometryKind kind = GeometryKind::Disk;
  double r_inner = 0.0;

  bool contains(Point p) const;
  // Fraction t in (0, 1] along inside -> outside where the boundary is crossed.
  double crossing(Point inside, Point outside) const;
  bool severed(Point a, Point b) const;
  double diameter() const;
};

enum class Face : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

class Lake {
 public:
  Lake(GridSpec grid, Shape shape, std::function<double(Point)> depth_fn, std::string name,
       std::optional<DepthProfile> radial);

  const GridSpec& grid() const { return grid_; }
  const Shape& shape() const { return shape_; }
  GeometryKind kind() const { return shape_.kind; }
  const std::string& name() const { return name_; }
  const std::optional<DepthProfile>& radial_profile() const { return radial_; }

  bool interior(std::size_t idx) const { return interior_[idx] != 0; }
  double depth(std::size_t idx) const { return depth_[idx]; }
  std::span<const double> depths() const { return depth_; }
  // Analytic depth anywhere on the plane (clamped at 0).
  double depth_at(Point p) const;

  // Label of the exterior component a cell belongs to (-1 on interior cells).
  int component(std::size_t idx) const { return component_[idx]; }
  bool is_boundary(std::size_t idx) const { return boundary_[idx] != 0; }
  int component_count() const { return components_; }

  // Neighbour across a face, or -1 off-grid.
  long neighbour(std::size_t idx, Face f) const;
  // Whether the face between two grid cells carries flux (false across the slit).
  bool face_open(std::size_t idx, Face f) const;

  std::size_t interior_count() const { return interior_count_; }
  double cell_measure(std::size_t idx) const { return interior(idx) ? depth_[idx] * grid_.cell_area() : 0.0; }
  double total_measure() const;
  double diameter() const { return shape_.diameter(); }

 private:
  void label_components();

  GridSpec grid_;
  Shape shape_;
  std::function<double(Point)> depth_fn_;
  std::string name_;
  std::optional<DepthProfile> radial_;
  std::vector<std::uint8_t> interior_;
  std::vector<double> depth_;
  std::vector<int> component_;
  std::vector<std::uint8_t> boundary_;
  int components_ = 0;
  std::size_t interior_count_ = 0;
};

Lake build_disk_lake(int n, const DepthProfile& profile);
Lake build_annulus_lake(int n, double r_inner, const DepthProfile& profile);
Lake build_slit_square_lake(int n);

// Sum of f b h^2 over interior cells.
double mu_integral(const Lake& lake, const ScalarField& f);

struct ContinuityProbe {
  Point y;
  double value = 0.0;
};

struct ContinuityReport {
  double ell = 0.0;
  std::vector<ContinuityProbe> probes;
  std::size_t excluded_cells = 0;  // interior cells with b below the floor
  bool growth_flag = false;         // values blow up as probes approach the shore
  double max_value = 0.0;
};

// Grid proxy for y -> int g(.,y)^ell (|grad b|^2 / b)^{ell/2} dm over probes.
ContinuityReport continuity_check(const Lake& lake, double ell, std::span<const Point> probes,
                                  double b_floor = 1e-8);

// `x y value` rows for interior cells.
void write_field_table(const Lake& lake, const ScalarField& f, const std::string& path);

}  // namespace lakevort
