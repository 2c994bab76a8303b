#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace lakevort {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
// (v1, v2)^perp = (-v2, v1)
inline Point perp(Point a) { return {-a.y, a.x}; }

// Uniform cell-centered grid. Cell (i, j) covers
// [x0 + i h, x0 + (i+1) h] x [y0 + j h, y0 + (j+1) h].
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 0.0;

  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  int col(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(nx)); }
  int row(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(nx)); }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }

  Point center(int i, int j) const { return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h}; }
  Point center(std::size_t idx) const { return center(col(idx), row(idx)); }
  double cell_area() const { return h * h; }

  // Cell containing p, if p lies on the grid.
  std::optional<std::size_t> locate(Point p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Per-cell real values aligned to a grid. Exterior cells carry 0 by convention.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

struct VectorField {
  GridSpec grid;
  std::vector<std::array<double, 2>> values;

  VectorField() = default;
  explicit VectorField(const GridSpec& g) : grid(g), values(g.size(), {0.0, 0.0}) {}
};

// Throws a shape error when the field does not live on `grid`.
void require_aligned(const GridSpec& grid, const ScalarField& f, const char* what);

}  // namespace lakevort
