#pragma once

// Plain serial implementations of the parallel kernels. They favour
// directness over speed and are used by the tests and the benchmark as the
// baseline the OpenMP kernels must reproduce.

#include <cstdint>
#include <span>
#include <vector>

#include "smoothfix/density.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/popdyn.hpp"

namespace smoothfix::reference {

// Same substream layout as smoothfix::iterate, single loop, no OpenMP.
SamplePool iterate(const SamplePool& pool, const WeightModel& model, std::uint64_t seed);

// Two-pass sample mean of exp(-i <xi, z>) via std::exp of a complex argument.
EcfValue ecf(std::span<const Complex> samples, Complex xi);

std::vector<EcfValue> ecf_grid(std::span<const Complex> samples, std::span<const Complex> xis);

// Untruncated double sum over every (cell, sample) pair.
DensityGrid kde2d(std::span<const Complex> samples, const GridSpec& grid, const Bandwidth& bandwidth);

}  // namespace smoothfix::reference
