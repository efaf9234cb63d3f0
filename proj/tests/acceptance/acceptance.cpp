// Acceptance suite: one PASS/FAIL line per criterion, fixed seed 7.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "smoothfix/analysis.hpp"
#include "smoothfix/branching.hpp"
#include "smoothfix/cli.hpp"
#include "smoothfix/density.hpp"
#include "smoothfix/error.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/popdyn.hpp"
#include "smoothfix/rng.hpp"

using namespace smoothfix;

namespace {

constexpr std::uint64_t kSeed = 7;
int failures = 0;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s  %d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Complex kLambdaFig2 = std::polar(1.0, std::numbers::pi / 4.0);

// Criterion 3-5 and 9 share one desk-scale pool; generation 5 is kept for 4.
struct DeskPool {
  PopdynRun run;
  std::vector<Complex> generation5;
};

DeskPool desk_pool() {
  DeskPool d;
  PopdynOptions opt;
  opt.observer = [&](const SamplePool& p) {
    if (p.generation == 5) d.generation5 = p.samples;
  };
  d.run = run(WeightModel::polya(8), 10000, 50, kSeed, opt);
  return d;
}

void criterion1() {
  Timer t;
  bool ok = true;
  double worst_cf = 0.0, worst_mc = 0.0;
  for (int b : {7, 8, 9}) {
    const double exact = 1.0 / std::cos(2.0 * std::numbers::pi / b);
    const auto cf = find_alpha(WeightModel::polya(b));
    AlphaOptions mc_opt;
    mc_opt.force_monte_carlo = true;
    mc_opt.mc_samples = 100000;
    mc_opt.seed = kSeed;
    const auto mc = find_alpha(WeightModel::polya(b), mc_opt);
    if (!cf.alpha || !mc.alpha) {
      ok = false;
      continue;
    }
    worst_cf = std::max(worst_cf, std::abs(*cf.alpha - exact));
    worst_mc = std::max(worst_mc, std::abs(*mc.alpha - exact));
  }
  const auto six = find_alpha(WeightModel::polya(6));
  const double err6 = six.alpha ? std::abs(*six.alpha - 2.0) : INFINITY;
  const double secs = t.seconds();
  ok = ok && worst_cf <= 1e-9 && worst_mc <= 1e-2 && err6 <= 1e-9 && secs < 5.0;
  report(1, "alpha root finding", ok,
         fmt("closed-form err %.2e (<= 1e-9), Monte Carlo err %.2e (<= 1e-2), b=6 err %.2e, %.2f s (< 5 s)",
             worst_cf, worst_mc, err6, secs));
}

void criterion2() {
  Timer t;
  bool ok = true;
  double worst = 0.0;
  const std::vector<std::pair<const char*, WeightModel>> models = {{"biggins", WeightModel::biggins(kLambdaFig2)},
                                                                   {"polya8", WeightModel::polya(8)}};
  for (const auto& [name, model] : models) {
    const auto alpha = find_alpha(model).alpha;
    if (!alpha) {
      ok = false;
      continue;
    }
    const auto s = estimate_martingale_mean(model, *alpha, 8, 10000, kSeed);
    if (s.generations.size() != 9) ok = false;
    for (const auto& g : s.generations) {
      const double rw = g.se_w > 0 ? std::abs(g.mean_w - 1.0) / g.se_w : (g.mean_w == 1.0 ? 0.0 : INFINITY);
      const double rz = g.se_z > 0 ? std::abs(g.mean_z - 1.0) / g.se_z : (g.mean_z == 1.0 ? 0.0 : INFINITY);
      worst = std::max({worst, rw, rz});
    }
  }
  const double secs = t.seconds();
  ok = ok && worst < 4.0 && secs < 60.0;
  report(2, "martingale means", ok,
         fmt("worst |mean - 1| / se over W_n, Z_n, n <= 8 = %.2f (< 4), %.1f s (< 60 s)", worst, secs));
}

void criterion3(const DeskPool& d) {
  double worst = 0.0, worst_acc = 0.0;
  for (const auto& s : d.run.summaries) {
    if (s.generation == 0) continue;
    worst = std::max(worst, std::abs(s.mean - 1.0) / s.mean_stderr);
    worst_acc = std::max(worst_acc, std::abs(s.mean - 1.0) / s.mean_stderr_accumulated);
  }
  PopdynOptions two;
  two.init_value = 2.0;
  const auto scaled = run(WeightModel::polya(8), 10000, 50, kSeed, two).pool.samples;
  double scale_err = 0.0;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scale_err = std::max(scale_err, std::abs(scaled[i] - 2.0 * d.run.pool.samples[i]));
  }
  const bool ok = worst < 4.0 && scale_err <= 1e-12;
  report(3, "population-dynamics mean preservation", ok,
         fmt("worst |mean - 1| / (sd/sqrt n) = %.2f (< 4) [vs accumulated stderr: %.2f], scale error %.1e "
             "(<= 1e-12)",
             worst, worst_acc, scale_err));
}

void criterion4(const DeskPool& d) {
  Timer t;
  const std::vector<double> radii{0.5, 1.0, 2.0, 5.0};
  const auto xis = polar_grid(radii, 16);
  ResidualOptions opt;
  opt.M = 10000;
  opt.seed = kSeed;
  const auto model = WeightModel::polya(8);
  const auto r50 = fixed_point_residual_grid(d.run.pool.samples, model, xis, opt);
  const auto r5 = fixed_point_residual_grid(d.generation5, model, xis, opt);
  double worst = 0.0;
  std::size_t improved = 0;
  for (std::size_t k = 0; k < xis.size(); ++k) {
    worst = std::max(worst, r50.residual[k]);
    improved += r50.residual[k] <= r5.residual[k];
  }
  const double frac = static_cast<double>(improved) / static_cast<double>(xis.size());
  const bool ok = worst < 0.05 && frac >= 0.75;
  report(4, "characteristic-equation residual", ok,
         fmt("max residual %.4f (< 0.05), gen 50 <= gen 5 on %zu/%zu points = %.0f%% (>= 75%%), "
             "interpolation bound %.1e, %.1f s",
             worst, improved, xis.size(), 100.0 * frac, r50.interpolation_error_bound, t.seconds()));
}

void criterion5(const DeskPool& d) {
  const std::vector<double> radii{1.0, 5.0, 10.0, 50.0};
  const auto scan = radial_scan(d.run.pool.samples, radii, 64);
  bool decreasing = true;
  for (std::size_t i = 1; i < scan.max_abs.size(); ++i) decreasing = decreasing && scan.max_abs[i] < scan.max_abs[i - 1];
  const auto control = radial_scan(init_pool(10000).samples, radii, 64);
  bool control_ok = true;
  for (double m : control.max_abs) control_ok = control_ok && std::abs(m - 1.0) < 1e-12;
  const bool ok = decreasing && scan.max_abs.back() < 0.1 && control_ok;
  report(5, "ECF radial decay", ok,
         fmt("max|phi| at R = 1, 5, 10, 50: %.4f %.4f %.4f %.4f (strictly decreasing: %s, final < 0.1); "
             "all-ones control == 1: %s",
             scan.max_abs[0], scan.max_abs[1], scan.max_abs[2], scan.max_abs[3], decreasing ? "yes" : "no",
             control_ok ? "yes" : "no"));
}

void criterion6() {
  Timer t;
  const auto pool = run(WeightModel::polya(8), 100000, 50, kSeed).pool.samples;
  std::vector<double> radii;
  for (int k = 0; k <= 10; ++k) radii.push_back(5.0 * std::pow(10.0, k / 10.0));
  std::string detail;
  bool ok = true;
  for (int order : {1, 2}) {
    const double lo = order == 1 ? -1.5 : -2.6, hi = order == 1 ? -0.5 : -1.4;
    try {
      const auto fit = derivative_decay_scan(pool, radii, 64, order);
      const bool in = fit.slope >= lo && fit.slope <= hi;
      ok = ok && in;
      detail += fmt("order %d slope %.2f in [%.1f, %.1f]: %s (%zu radii above floor %.4f, R %.1f..%.1f); ", order,
                    fit.slope, lo, hi, in ? "yes" : "no", fit.fitted_radii.size(), fit.noise_floor,
                    fit.fitted_radii.front(), fit.fitted_radii.back());
    } catch (const ComputeError& e) {
      ok = false;
      detail += fmt("order %d: %s; ", order, e.what());
    }
  }
  detail += fmt("%.1f s", t.seconds());
  report(6, "derivative decay exponents", ok, detail);
}

void criterion7(const DeskPool& d) {
  const auto biggins = run(WeightModel::biggins(kLambdaFig2), 10000, 50, kSeed).pool.samples;
  const double ip = kde2d(d.run.pool.samples).integral();
  const double ib = kde2d(biggins).integral();
  const bool ok = ip >= 0.97 && ip <= 1.01 && ib >= 0.97 && ib <= 1.01;
  report(7, "KDE normalization", ok, fmt("integral polya b=8 %.4f, biggins exp(i pi/4) %.4f (in [0.97, 1.01])", ip, ib));
}

void criterion8() {
  Timer t;
  const auto dir = std::filesystem::current_path() / "acceptance_figures";
  std::filesystem::remove_all(dir);
  const std::string dir_s = dir.string();
  const char* argv[] = {"smoothfix", "figures", "--desk", "--seed", "7", "--out-dir", dir_s.c_str()};
  std::ostringstream out, err;
  const int code = parse_and_dispatch(7, argv, out, err);
  std::size_t grids = 0;
  for (const char* name : {"fig1_biggins_2.15exp(2pii_23)", "fig2_biggins_exp(pii_4)", "fig3_polya_b7",
                           "fig3_polya_b8", "fig3_polya_b9", "fig3_polya_b12"}) {
    grids += std::filesystem::exists(dir / (std::string(name) + "_density.csv"));
  }
  const double secs = t.seconds();
  const bool ok = code == 0 && grids == 6 && secs < 600.0;
  report(8, "figure reproduction (desk scale)", ok,
         fmt("exit %d, %zu/6 density grids, %.1f s (< 600 s)%s", code, grids, secs,
             err.str().empty() ? "" : (" stderr: " + err.str()).c_str()));
}

void criterion9(const DeskPool& d) {
  const auto& pool = d.run.pool.samples;
  const double h = 1e-4;
  double worst = 0.0;
  for (std::uint32_t k = 0; k < 20; ++k) {
    RandomStream rng(kSeed, StreamId::make(StreamDomain::generic, k, 9));
    const Complex xi = std::polar(3.0 * std::sqrt(rng.uniform_open()), 2.0 * std::numbers::pi * rng.uniform_open());
    const Complex d1 = (ecf(pool, xi + h).value - ecf(pool, xi - h).value) / (2.0 * h);
    const Complex d2 = (ecf(pool, xi + Complex{0.0, h}).value - ecf(pool, xi - Complex{0.0, h}).value) / (2.0 * h);
    const Complex dxi = wirtinger_derivative(pool, xi, Wirtinger::d_xi).value;
    const Complex dxibar = wirtinger_derivative(pool, xi, Wirtinger::d_xibar).value;
    worst = std::max(worst, std::abs(d1 - (dxi + dxibar)) / std::abs(dxi + dxibar));
    worst = std::max(worst, std::abs(d2 - Complex{0.0, 1.0} * (dxi - dxibar)) / std::abs(dxi - dxibar));
  }
  report(9, "Wirtinger consistency", worst <= 1e-6, fmt("worst relative error %.2e (<= 1e-6) at 20 xi", worst));
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    const auto desk = desk_pool();
    criterion3(desk);
    criterion4(desk);
    criterion5(desk);
    criterion6();
    criterion7(desk);
    criterion8();
    criterion9(desk);
  } catch (const std::exception& e) {
    std::printf("FAIL  aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
