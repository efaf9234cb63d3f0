#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothfix/complex.hpp"
#include "smoothfix/model.hpp"

namespace smoothfix {

// Empirical approximation of the law of Z after `generation` applications of
// the smoothing map.
struct SamplePool {
  int generation = 0;
  std::vector<Complex> samples;
  std::uint64_t seed = 0;
  std::string model_fingerprint;

  std::size_t size() const noexcept { return samples.size(); }
};

SamplePool init_pool(std::size_t n, Complex value = 1.0);

// One application of the smoothing map: X'_i = sum_j T_j X_{I_j} with fresh
// weights and N parent indices drawn uniformly with replacement. Output i uses
// substream (seed, generation + 1, i), so the result does not depend on the
// thread count. Throws ComputeError naming the index on non-finite output.
SamplePool iterate(const SamplePool& pool, const WeightModel& model, std::uint64_t seed);

// Deterministic core of one output sample, exposed for testing.
Complex smoothing_sample(std::span<const Complex> weights, std::span<const std::size_t> parents,
                         std::span<const Complex> pool);

struct GenerationSummary {
  int generation = 0;
  Complex mean;
  // stddev / sqrt(n) of the current pool.
  double mean_stderr = 0.0;
  // sqrt(sum over generations g <= k of var_g / n): the pool mean is a
  // martingale in k whose increments have conditional variance var_g / n.
  double mean_stderr_accumulated = 0.0;
  double stddev = 0.0;
  double abs_moment_p = 0.0;
  double abs_moment = 0.0;  // mean |X|^p
  double imag_stddev = 0.0;
};

GenerationSummary summarize(const SamplePool& pool, double moment_p,
                            double previous_accumulated_variance = 0.0);

struct PopdynOptions {
  Complex init_value = 1.0;
  double moment_p = 1.0;
  // Called after every generation (including generation 0).
  std::function<void(const SamplePool&)> observer;
};

struct PopdynRun {
  SamplePool pool;
  std::vector<GenerationSummary> summaries;  // generations 0..K
};

PopdynRun run(const WeightModel& model, std::size_t n, int iterations, std::uint64_t seed,
              const PopdynOptions& options = {});

}  // namespace smoothfix
