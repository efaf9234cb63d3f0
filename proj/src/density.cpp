#include "smoothfix/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothfix/error.hpp"

namespace smoothfix {
namespace {

// Kernel support used by the grid accumulation; exp(-32) ~ 1.3e-14.
constexpr double kCutoff = 8.0;
constexpr std::size_t kMaxBlocks = 64;
constexpr std::size_t kMinBlockSize = 1024;

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

template <class F>
Moments moments(std::size_t n, F get) {
  Moments m;
  if (n == 0) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += get(i);
  m.mean = s / static_cast<double>(n);
  if (n < 2) return m;
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) v += (get(i) - m.mean) * (get(i) - m.mean);
  m.stddev = std::sqrt(v / static_cast<double>(n - 1));
  return m;
}

Axis centred_axis(double mean, double half_width, std::size_t cells) {
  return Axis{mean - half_width, mean + half_width, cells};
}

// Index range of cells whose centres lie within `reach` of `c`.
std::pair<std::size_t, std::size_t> window(const Axis& a, double c, double reach) {
  const double step = a.step();
  const double first = std::ceil((c - reach - a.lo) / step - 0.5);
  const double last = std::floor((c + reach - a.lo) / step - 0.5);
  const double hi = static_cast<double>(a.cells) - 1.0;
  const double f = std::clamp(first, 0.0, hi + 1.0);
  const double l = std::clamp(last, -1.0, hi);
  if (l < f) return {1, 0};
  return {static_cast<std::size_t>(f), static_cast<std::size_t>(l)};
}

void validate_axis(const Axis& a) {
  if (a.cells < 1 || !(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
    throw ValidationError("density grid axis needs hi > lo and at least one cell");
  }
}

}  // namespace

double Density1D::integral() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * axis.step();
}

double DensityGrid::integral() const {
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  if (fallback == std::string("y")) return sum * grid.x.step();
  if (fallback == std::string("x")) return sum * grid.y.step();
  return sum * grid.x.step() * grid.y.step();
}

GridSpec default_grid(std::span<const Complex> samples, std::size_t cells) {
  const auto mx = moments(samples.size(), [&](std::size_t i) { return samples[i].real(); });
  const auto my = moments(samples.size(), [&](std::size_t i) { return samples[i].imag(); });
  return {centred_axis(mx.mean, 4.0 * mx.stddev, cells), centred_axis(my.mean, 4.0 * my.stddev, cells)};
}

Axis default_axis(std::span<const double> samples, std::size_t cells) {
  const auto m = moments(samples.size(), [&](std::size_t i) { return samples[i]; });
  return centred_axis(m.mean, 4.0 * m.stddev, cells);
}

Bandwidth default_bandwidth(std::span<const Complex> samples) {
  const auto mx = moments(samples.size(), [&](std::size_t i) { return samples[i].real(); });
  const auto my = moments(samples.size(), [&](std::size_t i) { return samples[i].imag(); });
  const double f = 1.06 * std::pow(static_cast<double>(samples.size()), -1.0 / 6.0);
  return {f * mx.stddev, f * my.stddev};
}

double default_bandwidth_1d(std::span<const double> samples) {
  const auto m = moments(samples.size(), [&](std::size_t i) { return samples[i]; });
  return 1.06 * m.stddev * std::pow(static_cast<double>(samples.size()), -0.2);
}

Density1D kde1d(std::span<const double> samples, std::optional<Axis> axis, std::optional<double> bandwidth) {
  if (samples.empty()) throw ValidationError("kde1d: no samples");
  if (!bandwidth && samples.size() < 100) {
    throw ValidationError("kde1d: default bandwidth needs at least 100 samples");
  }
  Density1D out;
  out.n_samples = samples.size();
  out.bandwidth = bandwidth ? *bandwidth : default_bandwidth_1d(samples);
  if (!(out.bandwidth > 0.0)) throw ValidationError("kde1d: bandwidth must be positive (degenerate sample?)");
  if (axis) {
    out.axis = *axis;
  } else {
    const auto m = moments(samples.size(), [&](std::size_t i) { return samples[i]; });
    out.axis = centred_axis(m.mean, 4.0 * std::max(m.stddev, out.bandwidth), 256);
  }
  validate_axis(out.axis);

  const double h = out.bandwidth;
  out.values.assign(out.axis.cells, 0.0);
  for (double x : samples) {
    const auto [a, b] = window(out.axis, x, kCutoff * h);
    for (std::size_t i = a; i <= b && a <= b; ++i) {
      const double d = (out.axis.centre(i) - x) / h;
      out.values[i] += std::exp(-0.5 * d * d);
    }
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (double& v : out.values) v *= norm;
  return out;
}

DensityGrid kde2d(std::span<const Complex> samples, std::optional<GridSpec> grid,
                  std::optional<Bandwidth> bandwidth) {
  const std::size_t n = samples.size();
  if (n == 0) throw ValidationError("kde2d: no samples");
  if (!bandwidth && n < 100) throw ValidationError("kde2d: default bandwidth needs at least 100 samples");

  DensityGrid out;
  out.n_samples = n;
  out.bandwidth = bandwidth ? *bandwidth : default_bandwidth(samples);
  const auto mx = moments(n, [&](std::size_t i) { return samples[i].real(); });
  const auto my = moments(n, [&](std::size_t i) { return samples[i].imag(); });

  // Degenerate axis: reduce to a one-dimensional estimate.
  const bool flat_y = !(out.bandwidth.hy > 0.0);
  const bool flat_x = !(out.bandwidth.hx > 0.0);
  if (flat_x && flat_y) throw ValidationError("kde2d: both axes degenerate");
  if (flat_x || flat_y) {
    std::vector<double> coord(n);
    for (std::size_t i = 0; i < n; ++i) coord[i] = flat_y ? samples[i].real() : samples[i].imag();
    std::optional<Axis> axis;
    if (grid) axis = flat_y ? grid->x : grid->y;
    const double h = flat_y ? out.bandwidth.hx : out.bandwidth.hy;
    const Density1D d = kde1d(coord, axis, h);
    const double fixed = flat_y ? my.mean : mx.mean;
    const Axis point{fixed - 0.5, fixed + 0.5, 1};
    out.grid = flat_y ? GridSpec{d.axis, point} : GridSpec{point, d.axis};
    out.values = d.values;
    out.fallback = flat_y ? "y" : "x";
    return out;
  }

  const double hx = out.bandwidth.hx, hy = out.bandwidth.hy;
  if (grid) {
    out.grid = *grid;
  } else {
    out.grid = {centred_axis(mx.mean, 4.0 * std::max(mx.stddev, hx), 256),
                centred_axis(my.mean, 4.0 * std::max(my.stddev, hy), 256)};
  }
  validate_axis(out.grid.x);
  validate_axis(out.grid.y);
  const std::size_t nx = out.grid.x.cells, ny = out.grid.y.cells;

  // Fixed sample blocks, each with its own grid, reduced in block order so
  // the result does not depend on the thread count.
  const std::size_t blocks = std::clamp<std::size_t>(n / kMinBlockSize, 1, kMaxBlocks);
  std::vector<std::vector<double>> partial(blocks);
  const auto nblocks = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    auto& acc = partial[b];
    acc.assign(nx * ny, 0.0);
    std::vector<double> kx, ky;
    const std::size_t begin = n * static_cast<std::size_t>(b) / blocks;
    const std::size_t end = n * static_cast<std::size_t>(b + 1) / blocks;
    for (std::size_t k = begin; k < end; ++k) {
      const Complex z = samples[k];
      const auto [xa, xb] = window(out.grid.x, z.real(), kCutoff * hx);
      const auto [ya, yb] = window(out.grid.y, z.imag(), kCutoff * hy);
      if (xa > xb || ya > yb) continue;
      kx.resize(xb - xa + 1);
      ky.resize(yb - ya + 1);
      for (std::size_t i = xa; i <= xb; ++i) {
        const double d = (out.grid.x.centre(i) - z.real()) / hx;
        kx[i - xa] = std::exp(-0.5 * d * d);
      }
      for (std::size_t j = ya; j <= yb; ++j) {
        const double d = (out.grid.y.centre(j) - z.imag()) / hy;
        ky[j - ya] = std::exp(-0.5 * d * d);
      }
      for (std::size_t i = xa; i <= xb; ++i) {
        double* row = &acc[i * ny + ya];
        const double a = kx[i - xa];
        for (std::size_t j = 0; j < ky.size(); ++j) row[j] += a * ky[j];
      }
    }
  }
  out.values.assign(nx * ny, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t c = 0; c < acc.size(); ++c) out.values[c] += acc[c];
  }
  const double norm = 1.0 / (static_cast<double>(n) * hx * hy * 2.0 * std::numbers::pi);
  for (double& v : out.values) v *= norm;
  return out;
}

}  // namespace smoothfix
