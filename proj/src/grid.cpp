#include "ifrk/grid.hpp"

#include <cmath>
#include <string>

#include "ifrk/errors.hpp"

namespace ifrk {

GridSpec::GridSpec(int dim_, std::size_t points_, double h_)
    : dim(dim_), points(points_), h(h_) {
  if (dim < 1 || dim > 3)
    throw ConfigError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (points == 0) throw ConfigError("grid must have at least one point per axis");
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("mesh size must be positive");
}

GridSpec GridSpec::unit(int dim, std::size_t points) {
  if (points == 0) throw ConfigError("grid must have at least one point per axis");
  return GridSpec(dim, points, 1.0 / static_cast<double>(points));
}

std::size_t GridSpec::size() const {
  std::size_t m = 1;
  for (int a = 0; a < dim; ++a) m *= points;
  return m;
}

double GridSpec::cell_volume() const { return std::pow(h, dim); }

Field::Field(const GridSpec& g, double fill) : grid(g), values(g.size(), fill) {}

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw GridMismatch("field has " + std::to_string(values.size()) + " entries, grid has " +
                       std::to_string(grid.size()));
}

void require_same_grid(const GridSpec& grid, const Field& u) {
  if (!(u.grid == grid) || u.values.size() != grid.size())
    throw GridMismatch("field is not bound to the operator grid");
}

}  // namespace ifrk
