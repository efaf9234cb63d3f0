#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothfix/complex.hpp"

namespace smoothfix {

// Uniform grid of `cells` cell centres on [lo, hi].
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t cells = 256;

  double step() const noexcept { return (hi - lo) / static_cast<double>(cells); }
  double centre(std::size_t i) const noexcept { return lo + (static_cast<double>(i) + 0.5) * step(); }
};

struct GridSpec {
  Axis x;
  Axis y;
};

struct Bandwidth {
  double hx = 0.0;
  double hy = 0.0;
};

struct Density1D {
  Axis axis;
  std::vector<double> values;
  double bandwidth = 0.0;
  std::size_t n_samples = 0;

  double integral() const;
};

// Gaussian product-kernel estimate. `values` is x-major: values[i * ny + j]
// is the density at (x centre i, y centre j). When one axis has zero
// variance the estimate falls back to kde1d on the other axis; `fallback`
// names the degenerate axis and the grid has one cell on it.
struct DensityGrid {
  GridSpec grid;
  std::vector<double> values;
  Bandwidth bandwidth;
  std::size_t n_samples = 0;
  std::optional<std::string> fallback;

  double value(std::size_t i, std::size_t j) const { return values[i * grid.y.cells + j]; }
  // Riemann sum of values times cell area (cell length in 1D fallback).
  double integral() const;
};

// mean +- 4 stddev per axis.
GridSpec default_grid(std::span<const Complex> samples, std::size_t cells = 256);
Axis default_axis(std::span<const double> samples, std::size_t cells = 256);

// Per-axis 1.06 * stddev * n^{-1/6}.
Bandwidth default_bandwidth(std::span<const Complex> samples);
// 1.06 * stddev * n^{-1/5}.
double default_bandwidth_1d(std::span<const double> samples);

DensityGrid kde2d(std::span<const Complex> samples, std::optional<GridSpec> grid = std::nullopt,
                  std::optional<Bandwidth> bandwidth = std::nullopt);

Density1D kde1d(std::span<const double> samples, std::optional<Axis> axis = std::nullopt,
                std::optional<double> bandwidth = std::nullopt);

}  // namespace smoothfix
