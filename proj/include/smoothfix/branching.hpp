#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "smoothfix/complex.hpp"
#include "smoothfix/model.hpp"

namespace smoothfix {

inline constexpr std::size_t kDefaultNodeCap = 10'000'000;

// (W_n, Z_n) = (sum_{|v|=n} |L(v)|^alpha, sum_{|v|=n} L(v)).
struct GenerationRecord {
  int n = 0;
  double w = 0.0;
  Complex z;
  std::size_t node_count = 0;
};

struct MartingaleTrajectory {
  std::vector<GenerationRecord> generations;
  // Generation whose expansion would have exceeded the node cap.
  std::optional<int> truncated_at;
};

// Grows the weighted branching process one generation at a time, keeping
// only the current generation's weights L(v). Node v in generation n draws
// its children's weights from substream (seed, rep, n, index of v).
MartingaleTrajectory simulate_generations(const WeightModel& model, double alpha, int depth,
                                          std::size_t node_cap, std::uint64_t seed,
                                          std::uint32_t rep = 0);

struct MartingaleMean {
  int n = 0;
  double mean_w = 0.0;
  double se_w = 0.0;
  Complex mean_z;
  double se_z = 0.0;  // sqrt(se_re^2 + se_im^2)
  double node_count_mean = 0.0;
};

struct MartingaleSummary {
  std::vector<MartingaleMean> generations;
  std::size_t reps = 0;
  std::optional<int> truncated_at;
};

// Means over `reps` independent trajectories; trajectories run in parallel
// and are reduced in rep order.
MartingaleSummary estimate_martingale_mean(const WeightModel& model, double alpha, int depth,
                                           std::size_t reps, std::uint64_t seed,
                                           std::size_t node_cap = kDefaultNodeCap);

}  // namespace smoothfix
