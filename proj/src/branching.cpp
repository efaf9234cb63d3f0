#include "smoothfix/branching.hpp"

#include <algorithm>
#include <cmath>

#include "smoothfix/error.hpp"

namespace smoothfix {

MartingaleTrajectory simulate_generations(const WeightModel& model, double alpha, int depth,
                                          std::size_t node_cap, std::uint64_t seed,
                                          std::uint32_t rep) {
  if (depth < 0) throw ValidationError("depth must be >= 0");
  if (node_cap < 1) throw ValidationError("node_cap must be >= 1");

  MartingaleTrajectory traj;
  std::vector<Complex> current{Complex{1.0, 0.0}};
  std::vector<Complex> next;
  std::vector<Complex> w;
  traj.generations.push_back({0, 1.0, Complex{1.0, 0.0}, 1});

  for (int n = 1; n <= depth; ++n) {
    next.clear();
    for (std::size_t v = 0; v < current.size(); ++v) {
      RandomStream rng(seed, StreamId::make(StreamDomain::branching, static_cast<std::uint32_t>(v),
                                            rep, static_cast<std::uint32_t>(n)));
      model.draw_into(rng, w);
      if (next.size() + w.size() > node_cap) {
        traj.truncated_at = n;
        return traj;
      }
      for (Complex t : w) next.push_back(t * current[v]);
    }
    current.swap(next);

    GenerationRecord rec;
    rec.n = n;
    rec.node_count = current.size();
    for (Complex l : current) {
      rec.w += std::pow(std::abs(l), alpha);
      rec.z += l;
    }
    traj.generations.push_back(rec);
  }
  return traj;
}

MartingaleSummary estimate_martingale_mean(const WeightModel& model, double alpha, int depth,
                                           std::size_t reps, std::uint64_t seed,
                                           std::size_t node_cap) {
  if (reps < 30) throw ValidationError("reps must be >= 30");
  std::vector<MartingaleTrajectory> trajs(reps);
  const auto count = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t r = 0; r < count; ++r) {
    trajs[r] = simulate_generations(model, alpha, depth, node_cap, seed, static_cast<std::uint32_t>(r));
  }

  MartingaleSummary out;
  out.reps = reps;
  int complete = depth;
  for (const auto& t : trajs) {
    if (t.truncated_at) {
      complete = std::min(complete, *t.truncated_at - 1);
      out.truncated_at = out.truncated_at ? std::min(*out.truncated_at, *t.truncated_at) : *t.truncated_at;
    }
  }

  const auto nr = static_cast<double>(reps);
  for (int n = 0; n <= complete; ++n) {
    MartingaleMean m;
    m.n = n;
    double sw = 0, sre = 0, sim = 0, sc = 0;
    for (const auto& t : trajs) {
      const auto& g = t.generations[n];
      sw += g.w;
      sre += g.z.real();
      sim += g.z.imag();
      sc += static_cast<double>(g.node_count);
    }
    m.mean_w = sw / nr;
    m.mean_z = {sre / nr, sim / nr};
    m.node_count_mean = sc / nr;
    double vw = 0, vre = 0, vim = 0;
    for (const auto& t : trajs) {
      const auto& g = t.generations[n];
      vw += (g.w - m.mean_w) * (g.w - m.mean_w);
      vre += (g.z.real() - m.mean_z.real()) * (g.z.real() - m.mean_z.real());
      vim += (g.z.imag() - m.mean_z.imag()) * (g.z.imag() - m.mean_z.imag());
    }
    m.se_w = std::sqrt(vw / (nr - 1.0) / nr);
    m.se_z = std::sqrt((vre + vim) / (nr - 1.0) / nr);
    out.generations.push_back(m);
  }
  return out;
}

}  // namespace smoothfix
