#include "smoothfix/reference.hpp"

#include <cmath>

#include "smoothfix/error.hpp"

namespace smoothfix::reference {

SamplePool iterate(const SamplePool& pool, const WeightModel& model, std::uint64_t seed) {
  SamplePool out;
  out.generation = pool.generation + 1;
  out.seed = seed;
  out.model_fingerprint = pool.model_fingerprint;
  out.samples.resize(pool.size());
  std::vector<Complex> w;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    RandomStream rng(seed, StreamId::make(StreamDomain::popdyn, static_cast<std::uint32_t>(i),
                                          static_cast<std::uint32_t>(out.generation)));
    model.draw_into(rng, w);
    Complex acc{};
    for (Complex t : w) acc += t * pool.samples[rng.uniform_index(pool.size())];
    if (!is_finite(acc)) throw ComputeError("non-finite sample at index " + std::to_string(i));
    out.samples[i] = acc;
  }
  return out;
}

EcfValue ecf(std::span<const Complex> samples, Complex xi) {
  const auto n = static_cast<double>(samples.size());
  Complex mean{};
  for (Complex z : samples) mean += std::exp(Complex{0.0, -inner(xi, z)});
  mean /= n;
  double var = 0.0;
  for (Complex z : samples) var += std::norm(std::exp(Complex{0.0, -inner(xi, z)}) - mean);
  EcfValue out{xi, mean, 0.0};
  if (samples.size() > 1) out.stderr = std::sqrt(var / (n - 1.0) / n);
  return out;
}

std::vector<EcfValue> ecf_grid(std::span<const Complex> samples, std::span<const Complex> xis) {
  std::vector<EcfValue> out;
  out.reserve(xis.size());
  for (Complex xi : xis) out.push_back(ecf(samples, xi));
  return out;
}

DensityGrid kde2d(std::span<const Complex> samples, const GridSpec& grid, const Bandwidth& bw) {
  DensityGrid out;
  out.grid = grid;
  out.bandwidth = bw;
  out.n_samples = samples.size();
  out.values.assign(grid.x.cells * grid.y.cells, 0.0);
  const double norm =
      1.0 / (static_cast<double>(samples.size()) * bw.hx * bw.hy * 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < grid.x.cells; ++i) {
    for (std::size_t j = 0; j < grid.y.cells; ++j) {
      double acc = 0.0;
      for (Complex z : samples) {
        const double dx = (grid.x.centre(i) - z.real()) / bw.hx;
        const double dy = (grid.y.centre(j) - z.imag()) / bw.hy;
        acc += std::exp(-0.5 * (dx * dx + dy * dy));
      }
      out.values[i * grid.y.cells + j] = acc * norm;
    }
  }
  return out;
}

}  // namespace smoothfix::reference
