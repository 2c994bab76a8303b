#include "lakevort/grid.hpp"

#include <string>

#include "lakevort/error.hpp"

namespace lakevort {

void GridSpec::validate() const {
  if (nx < 4 || ny < 4) {
    throw Error(ErrorKind::Geometry, "grid needs at least 4x4 cells, got " + std::to_string(nx) +
                                         "x" + std::to_string(ny));
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::Geometry, "grid spacing must be positive");
  }
}

std::optional<std::size_t> GridSpec::locate(Point p) const {
  const double fi = std::floor((p.x - x0) / h);
  const double fj = std::floor((p.y - y0) / h);
  if (!std::isfinite(fi) || !std::isfinite(fj)) return std::nullopt;
  const int i = static_cast<int>(fi);
  const int j = static_cast<int>(fj);
  if (!in_range(i, j)) return std::nullopt;
  return index(i, j);
}

void require_aligned(const GridSpec& grid, const ScalarField& f, const char* what) {
  if (!(f.grid == grid) || f.values.size() != grid.size()) {
    throw Error(ErrorKind::Shape, std::string(what) + " is not aligned to the lake grid");
  }
}

}  // namespace lakevort
