#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ifrk {

/// Uniform periodic grid with the same number of nodes on every axis.
/// Nodes sit at x = i*h, i = 0..points-1; storage is row-major with the
/// last axis fastest.
struct GridSpec {
  int dim = 1;
  std::size_t points = 1;
  double h = 1.0;

  GridSpec() = default;
  GridSpec(int dim, std::size_t points, double h);

  /// Grid on the unit cube, h = 1/points.
  static GridSpec unit(int dim, std::size_t points);

  std::size_t size() const;
  double axis_length() const { return h * static_cast<double>(points); }
  double cell_volume() const;

  bool operator==(const GridSpec&) const = default;
};

/// Discrete solution vector bound to a grid.
struct Field {
  GridSpec grid;
  std::vector<double> values;
  bool blown_up = false;

  Field() = default;
  explicit Field(const GridSpec& g, double fill = 0.0);
  Field(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }
};

/// Throws GridMismatch unless `u` lives on `grid`.
void require_same_grid(const GridSpec& grid, const Field& u);

}  // namespace ifrk
