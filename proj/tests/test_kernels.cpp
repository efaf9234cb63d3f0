// Parallel kernels against the serial reference, and thread-count
// independence of every parallel path.
#include <omp.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "smoothfix/analysis.hpp"
#include "smoothfix/branching.hpp"
#include "smoothfix/density.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/popdyn.hpp"
#include "smoothfix/reference.hpp"

using namespace smoothfix;

namespace {

struct ThreadGuard {
  int saved = omp_get_max_threads();
  ~ThreadGuard() { omp_set_num_threads(saved); }
};

template <class F>
auto with_threads(int t, F f) {
  omp_set_num_threads(t);
  return f();
}

const WeightModel& biggins() {
  static const auto m = WeightModel::biggins(std::polar(1.0, std::numbers::pi / 4));
  return m;
}

}  // namespace

TEST_CASE("iterate matches the serial reference bit for bit") {
  ThreadGuard guard;
  omp_set_num_threads(4);
  const auto polya = WeightModel::polya(8);
  for (const auto* model : {&biggins(), &polya}) {
    auto a = init_pool(5000);
    auto b = a;
    for (int k = 0; k < 5; ++k) {
      a = iterate(a, *model, 42);
      b = reference::iterate(b, *model, 42);
      REQUIRE(a.samples == b.samples);
      CHECK(a.generation == b.generation);
    }
  }
}

TEST_CASE("ecf grid matches the two-pass reference") {
  const auto pool = run(biggins(), 4000, 10, 3).pool.samples;
  const std::vector<double> radii{0.5, 2.0, 8.0, 30.0};
  const auto xis = polar_grid(radii, 16);
  const auto fast = ecf_grid(pool, xis);
  const auto slow = reference::ecf_grid(pool, xis);
  for (std::size_t k = 0; k < xis.size(); ++k) {
    CHECK(std::abs(fast[k].value - slow[k].value) < 1e-13);
    CHECK(fast[k].stderr == doctest::Approx(slow[k].stderr).epsilon(1e-9));
  }
  CHECK(std::abs(reference::ecf(pool, xis[3]).value - ecf(pool, xis[3]).value) < 1e-13);
}

TEST_CASE("kde2d matches the untruncated reference") {
  const auto pool = run(WeightModel::polya(8), 3000, 10, 5).pool.samples;
  const auto grid = default_grid(pool, 48);
  const auto bw = default_bandwidth(pool);
  const auto fast = kde2d(pool, grid, bw);
  const auto slow = reference::kde2d(pool, grid, bw);
  double peak = 0.0;
  for (double v : slow.values) peak = std::max(peak, v);
  for (std::size_t k = 0; k < fast.values.size(); ++k) CHECK(std::abs(fast.values[k] - slow.values[k]) < 1e-12 * peak);
}

TEST_CASE("results do not depend on the thread count") {
  ThreadGuard guard;
  const auto model = WeightModel::polya(8);

  auto pool_of = [&] { return run(model, 3000, 8, 11).pool.samples; };
  const auto p1 = with_threads(1, pool_of);
  CHECK(p1 == with_threads(3, pool_of));

  const std::vector<double> radii{1.0, 5.0};
  const auto xis = polar_grid(radii, 8);
  auto ecf_of = [&] {
    std::vector<Complex> v;
    for (const auto& e : ecf_grid(p1, xis)) v.push_back(e.value);
    return v;
  };
  CHECK(with_threads(1, ecf_of) == with_threads(3, ecf_of));

  auto kde_of = [&] { return kde2d(p1).values; };
  CHECK(with_threads(1, kde_of) == with_threads(3, kde_of));

  auto mart_of = [&] {
    std::vector<double> v;
    for (const auto& g : estimate_martingale_mean(model, std::sqrt(2.0), 5, 64, 3).generations) {
      v.push_back(g.mean_w);
      v.push_back(g.mean_z.real());
      v.push_back(g.se_z);
    }
    return v;
  };
  CHECK(with_threads(1, mart_of) == with_threads(3, mart_of));

  auto resid_of = [&] {
    ResidualOptions opt;
    opt.M = 200;
    opt.seed = 2;
    return fixed_point_residual_grid(p1, model, xis, opt).residual;
  };
  CHECK(with_threads(1, resid_of) == with_threads(3, resid_of));

  auto mc_of = [&] {
    const auto e = estimate_m_monte_carlo(biggins(), 1.3, 20000, 5);
    return std::pair{e.value, e.stderr};
  };
  CHECK(with_threads(1, mc_of) == with_threads(3, mc_of));

  auto report_of = [&] {
    AssumptionOptions opt;
    opt.samples = 4000;
    opt.seed = 6;
    return to_json(check_assumptions(biggins(), opt)).dump();
  };
  CHECK(with_threads(1, report_of) == with_threads(3, report_of));
}
