#include "smoothfix/popdyn.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "smoothfix/error.hpp"
#include "smoothfix/model_config.hpp"

namespace smoothfix {

SamplePool init_pool(std::size_t n, Complex value) {
  if (n < 2) throw ValidationError("pool size must be >= 2");
  if (!is_finite(value)) throw ValidationError("pool init value must be finite");
  SamplePool pool;
  pool.samples.assign(n, value);
  return pool;
}

Complex smoothing_sample(std::span<const Complex> weights, std::span<const std::size_t> parents,
                         std::span<const Complex> pool) {
  Complex acc{};
  for (std::size_t j = 0; j < weights.size(); ++j) acc += weights[j] * pool[parents[j]];
  return acc;
}

SamplePool iterate(const SamplePool& pool, const WeightModel& model, std::uint64_t seed) {
  const std::size_t n = pool.size();
  if (n < 2) throw ValidationError("pool size must be >= 2");
  SamplePool out;
  out.generation = pool.generation + 1;
  out.seed = seed;
  out.model_fingerprint = pool.model_fingerprint;
  out.samples.resize(n);

  const auto generation = static_cast<std::uint32_t>(out.generation);
  const Complex* in = pool.samples.data();
  Complex* dst = out.samples.data();
  const auto count = static_cast<std::int64_t>(n);
  std::int64_t first_bad = std::numeric_limits<std::int64_t>::max();

#pragma omp parallel reduction(min : first_bad)
  {
    std::vector<Complex> w;
    w.reserve(model.max_children());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      RandomStream rng(seed, StreamId::make(StreamDomain::popdyn, static_cast<std::uint32_t>(i),
                                            generation));
      model.draw_into(rng, w);
      Complex acc{};
      for (Complex t : w) acc += t * in[rng.uniform_index(n)];
      dst[i] = acc;
      if (!is_finite(acc) && i < first_bad) first_bad = i;
    }
  }
  if (first_bad != std::numeric_limits<std::int64_t>::max()) {
    throw ComputeError("non-finite sample at generation " + std::to_string(out.generation) +
                       ", index " + std::to_string(first_bad) + " (draw stream " +
                       std::to_string(first_bad) + "/" + std::to_string(out.generation) + ")");
  }
  return out;
}

GenerationSummary summarize(const SamplePool& pool, double moment_p,
                            double previous_accumulated_variance) {
  const auto n = static_cast<double>(pool.size());
  GenerationSummary s;
  s.generation = pool.generation;
  s.abs_moment_p = moment_p;
  Complex sum{};
  double abs_p = 0.0;
  for (Complex z : pool.samples) {
    sum += z;
    abs_p += std::pow(std::abs(z), moment_p);
  }
  s.mean = sum / n;
  s.abs_moment = abs_p / n;
  double var_re = 0.0, var_im = 0.0;
  for (Complex z : pool.samples) {
    const Complex d = z - s.mean;
    var_re += d.real() * d.real();
    var_im += d.imag() * d.imag();
  }
  var_re /= (n - 1.0);
  var_im /= (n - 1.0);
  s.stddev = std::sqrt(var_re + var_im);
  s.imag_stddev = std::sqrt(var_im);
  s.mean_stderr = s.stddev / std::sqrt(n);
  const double step = pool.generation > 0 ? (var_re + var_im) / n : 0.0;
  s.mean_stderr_accumulated = std::sqrt(previous_accumulated_variance + step);
  return s;
}

PopdynRun run(const WeightModel& model, std::size_t n, int iterations, std::uint64_t seed,
              const PopdynOptions& options) {
  if (iterations < 1) throw ValidationError("K >= 1 required (iterations)");
  PopdynRun result;
  result.pool = init_pool(n, options.init_value);
  result.pool.seed = seed;
  result.pool.model_fingerprint = model_fingerprint(model);
  auto record = [&](const SamplePool& p) {
    const double prev = result.summaries.empty()
                            ? 0.0
                            : std::pow(result.summaries.back().mean_stderr_accumulated, 2);
    result.summaries.push_back(summarize(p, options.moment_p, prev));
    if (options.observer) options.observer(p);
  };
  record(result.pool);
  for (int k = 0; k < iterations; ++k) {
    result.pool = iterate(result.pool, model, seed);
    record(result.pool);
  }
  return result;
}

}  // namespace smoothfix
