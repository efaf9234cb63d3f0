#include "smoothfix/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "smoothfix/analysis.hpp"
#include "smoothfix/branching.hpp"
#include "smoothfix/density.hpp"
#include "smoothfix/error.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/io.hpp"
#include "smoothfix/model_config.hpp"
#include "smoothfix/popdyn.hpp"

namespace smoothfix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::vector<std::string> argv;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

std::uint64_t require_seed(const Common& c) {
  if (!c.seed) throw ValidationError("seed required (--seed)");
  return *c.seed;
}

fs::path manifest_path(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

void write_manifest(const fs::path& out, const std::string& command, const Common& c,
                    const std::optional<std::string>& fingerprint, json outputs, json extra = json::object()) {
  json m{{"command", command},
         {"argv", c.argv},
         {"seed", c.seed ? json(*c.seed) : json(nullptr)},
         {"model_fingerprint", fingerprint ? json(*fingerprint) : json(nullptr)},
         {"version", kVersion},
         {"outputs", std::move(outputs)}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_json(manifest_path(out), m);
}

double default_moment_p(const WeightModel& model, std::uint64_t seed) {
  try {
    AlphaOptions ao;
    ao.seed = seed;
    const auto a = find_alpha(model, ao);
    if (a.alpha && *a.alpha > 0.2) return *a.alpha - 0.1;
  } catch (const ValidationError&) {
  }
  return 1.0;
}

struct FigureCase {
  std::string name;
  WeightModel model;
  std::size_t full_n;
};

std::vector<FigureCase> figure_cases(const std::string& which) {
  std::vector<FigureCase> cases;
  const bool all = which == "all";
  if (all || which == "1") {
    cases.push_back({"fig1_biggins_2.15exp(2pii_23)",
                     WeightModel::biggins(std::polar(2.15, 2.0 * std::numbers::pi / 23.0)), 1'000'000});
  }
  if (all || which == "2") {
    cases.push_back({"fig2_biggins_exp(pii_4)", WeightModel::biggins(std::polar(1.0, std::numbers::pi / 4.0)),
                     1'000'000});
  }
  if (all || which == "3") {
    for (int b : {7, 8, 9, 12}) {
      cases.push_back({"fig3_polya_b" + std::to_string(b), WeightModel::polya(b), 100'000});
    }
  }
  if (cases.empty()) throw ValidationError("--figure must be all, 1, 2, or 3");
  return cases;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Common common;
  for (int i = 0; i < argc; ++i) common.argv.emplace_back(argv[i]);

  CLI::App app{"smoothfix: complex smoothing transforms, branching martingales and their fixed points"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool stochastic) {
    if (stochastic) sub->add_option("--seed", common.seed, "Random seed (required)");
    sub->add_option("--threads", common.threads, "Upper bound on OpenMP threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
  };

  // analyze
  std::string model_path;
  std::string out_path;
  std::size_t samples = 100000;
  double epsilon = 0.1, stabilization = 0.05, s_max = 10.0, tol = 1e-9;
  auto* analyze = app.add_subcommand("analyze", "Check assumptions and find the characteristic exponent");
  analyze->add_option("--model", model_path, "Model config JSON")->required();
  analyze->add_option("--samples", samples, "Monte Carlo sample count")->check(CLI::Range(2ul, 1ul << 40));
  analyze->add_option("--out", out_path, "Report JSON")->default_val("report.json");
  analyze->add_option("--epsilon", epsilon, "Exponent excess in the log moment condition")->default_val(0.1);
  analyze->add_option("--stabilization", stabilization, "Relative-change threshold for finiteness checks");
  analyze->add_option("--s-max", s_max, "Upper end of the root search");
  analyze->add_option("--tol", tol, "Root tolerance on |m(alpha) - 1|");
  add_common(analyze, true);

  // sample
  std::size_t pool_size = 100000;
  int iterations = 100;
  std::optional<double> moment_p;
  double init_value = 1.0;
  auto* sample = app.add_subcommand("sample", "Population-dynamics sampling of the fixed point Z");
  sample->add_option("--model", model_path, "Model config JSON")->required();
  sample->add_option("--pool-size", pool_size, "Pool size n")->check(CLI::Range(2ul, 1ul << 32));
  sample->add_option("--iterations", iterations, "Number of iterations K");
  sample->add_option("--out", out_path, "Pool CSV")->default_val("pool.csv");
  sample->add_option("--moment-p", moment_p, "Exponent p of the tracked |X|^p moment (default alpha - 0.1)");
  sample->add_option("--init", init_value, "Initial value of every sample");
  add_common(sample, true);

  // martingale
  int depth = 8;
  std::size_t reps = 10000;
  std::optional<double> alpha_opt;
  std::size_t node_cap = kDefaultNodeCap;
  auto* mart = app.add_subcommand("martingale", "Simulate W_n and Z_n of the weighted branching process");
  mart->add_option("--model", model_path, "Model config JSON")->required();
  mart->add_option("--depth", depth, "Number of generations")->check(CLI::NonNegativeNumber);
  mart->add_option("--reps", reps, "Independent trajectories")->check(CLI::Range(30ul, 1ul << 32));
  mart->add_option("--alpha", alpha_opt, "Exponent for W_n (default: root of m(s) = 1)");
  mart->add_option("--node-cap", node_cap, "Maximum nodes per generation");
  mart->add_option("--out", out_path, "Trajectory CSV")->default_val("traj.csv");
  add_common(mart, true);

  // ecf
  std::string pool_path;
  std::vector<double> radii{1, 5, 10, 50};
  int angles = 64;
  int order = 0;
  auto* ecf_cmd = app.add_subcommand("ecf", "Empirical characteristic function scan of a pool");
  ecf_cmd->add_option("--pool", pool_path, "Pool CSV (re,im)")->required();
  ecf_cmd->add_option("--radii", radii, "Comma-separated radii")->delimiter(',');
  ecf_cmd->add_option("--angles", angles, "Directions per radius")->check(CLI::Range(8, 1 << 20));
  ecf_cmd->add_option("--order", order, "0: phi, 1: d_xibar phi, 2: d_xibar^2 phi")->check(CLI::Range(0, 2));
  ecf_cmd->add_option("--out", out_path, "Scan CSV")->default_val("scan.csv");
  add_common(ecf_cmd, false);

  // density
  std::size_t grid_cells = 256;
  std::vector<double> bandwidth;
  auto* dens = app.add_subcommand("density", "Gaussian kernel density estimate of a pool");
  dens->add_option("--pool", pool_path, "Pool CSV (re,im)")->required();
  dens->add_option("--grid", grid_cells, "Cells per axis")->check(CLI::Range(1ul, 1ul << 14));
  dens->add_option("--bandwidth", bandwidth, "hx,hy")->delimiter(',')->expected(2);
  dens->add_option("--out", out_path, "Density CSV")->default_val("density.csv");
  add_common(dens, false);

  // figures
  bool desk = false;
  std::string out_dir = "figures";
  std::string which = "all";
  auto* figs = app.add_subcommand("figures", "Sample and estimate densities for the reference examples");
  figs->add_flag("--desk", desk, "Desk scale (n = 10^4, K = 50) instead of full scale");
  figs->add_option("--out-dir", out_dir, "Output directory");
  figs->add_option("--figure", which, "all, 1, 2 or 3");
  figs->add_option("--grid", grid_cells, "Cells per axis")->check(CLI::Range(1ul, 1ul << 14));
  add_common(figs, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (common.threads > 0) omp_set_num_threads(common.threads);

    if (analyze->parsed()) {
      const std::uint64_t seed = require_seed(common);
      const auto model = load_model(model_path);
      AssumptionOptions opts;
      opts.samples = samples;
      opts.seed = seed;
      opts.epsilon = epsilon;
      opts.stabilization_threshold = stabilization;
      opts.s_max = s_max;
      opts.tol = tol;
      const auto report = check_assumptions(model, opts);
      json doc = to_json(report);
      doc["model"] = model_to_json(model)["model"];
      write_json(out_path, doc);
      write_manifest(out_path, "analyze", common, model_fingerprint(model), {out_path});
      out << "alpha = " << (report.alpha ? std::to_string(*report.alpha) : "none") << "\n";
      return 0;
    }

    if (sample->parsed()) {
      const std::uint64_t seed = require_seed(common);
      const auto model = load_model(model_path);
      PopdynOptions po;
      po.init_value = init_value;
      po.moment_p = moment_p ? *moment_p : default_moment_p(model, seed);
      const auto result = run(model, pool_size, iterations, seed, po);
      write_pool_csv(out_path, result.pool);
      json summaries = json::array();
      for (const auto& s : result.summaries) summaries.push_back(to_json(s));
      fs::path sidecar = out_path;
      sidecar += ".summary.json";
      write_json(sidecar, json{{"generations", summaries}});
      write_manifest(out_path, "sample", common, model_fingerprint(model), {out_path, sidecar.string()},
                     {{"pool_size", pool_size}, {"iterations", iterations}, {"moment_p", po.moment_p}});
      const auto& last = result.summaries.back();
      out << "generation " << last.generation << ": mean = " << last.mean.real() << " + "
          << last.mean.imag() << "i\n";
      return 0;
    }

    if (mart->parsed()) {
      const std::uint64_t seed = require_seed(common);
      const auto model = load_model(model_path);
      double alpha;
      if (alpha_opt) {
        alpha = *alpha_opt;
      } else {
        AlphaOptions ao;
        ao.seed = seed;
        const auto a = find_alpha(model, ao);
        if (!a.alpha) throw ValidationError("no root of m(s) = 1; pass --alpha");
        alpha = *a.alpha;
      }
      const auto summary = estimate_martingale_mean(model, alpha, depth, reps, seed, node_cap);
      write_martingale_csv(out_path, summary);
      json extra{{"alpha", alpha}, {"depth", depth}, {"reps", reps}};
      if (summary.truncated_at) extra["truncated_at"] = *summary.truncated_at;
      write_manifest(out_path, "martingale", common, model_fingerprint(model), {out_path}, extra);
      if (summary.truncated_at) err << "warning: truncated at generation " << *summary.truncated_at << "\n";
      return 0;
    }

    if (ecf_cmd->parsed()) {
      const auto pool = read_pool_csv(pool_path);
      const EcfStatistic stat = order == 0   ? EcfStatistic::value
                                : order == 1 ? EcfStatistic::d_xibar
                                             : EcfStatistic::d2_xibar;
      const auto scan = radial_scan(pool.samples, radii, angles, stat);
      write_scan_csv(out_path, scan);
      json extra{{"order", order}, {"radial_max", scan.max_abs}, {"n_samples", pool.size()}};
      if (order > 0 && radii.back() >= 10.0 * radii.front()) {
        try {
          const auto fit = derivative_decay_scan(pool.samples, radii, angles, order);
          extra["decay_slope"] = fit.slope;
          extra["noise_floor"] = fit.noise_floor;
          extra["fitted_radii"] = fit.fitted_radii;
        } catch (const ComputeError& e) {
          extra["decay_slope"] = nullptr;
          extra["decay_note"] = e.what();
        }
      }
      write_manifest(out_path, "ecf", common, std::nullopt, {out_path}, extra);
      return 0;
    }

    if (dens->parsed()) {
      const auto pool = read_pool_csv(pool_path);
      std::optional<Bandwidth> bw;
      if (!bandwidth.empty()) bw = Bandwidth{bandwidth[0], bandwidth[1]};
      std::optional<GridSpec> grid;
      if (grid_cells != 256 || bw) {
        GridSpec g = default_grid(pool.samples, grid_cells);
        if (g.x.hi > g.x.lo && g.y.hi > g.y.lo) grid = g;
      }
      const auto d = kde2d(pool.samples, grid, bw);
      write_density_csv(out_path, d);
      json extra{{"bandwidth", {d.bandwidth.hx, d.bandwidth.hy}}, {"integral", d.integral()},
                 {"n_samples", d.n_samples}};
      if (d.fallback) extra["fallback_degenerate_axis"] = *d.fallback;
      write_manifest(out_path, "density", common, std::nullopt, {out_path}, extra);
      return 0;
    }

    if (figs->parsed()) {
      const std::uint64_t seed = require_seed(common);
      const fs::path dir = out_dir;
      json index = json::array();
      for (const auto& fc : figure_cases(which)) {
        const std::size_t n = desk ? 10'000 : fc.full_n;
        const int k = desk ? 50 : 100;
        PopdynOptions po;
        po.moment_p = default_moment_p(fc.model, seed);
        const auto result = run(fc.model, n, k, seed, po);
        const fs::path pool_file = dir / (fc.name + "_pool.csv");
        const fs::path dens_file = dir / (fc.name + "_density.csv");
        const fs::path model_file = dir / (fc.name + "_model.json");
        write_json(model_file, model_to_json(fc.model));
        write_pool_csv(pool_file, result.pool);
        std::optional<GridSpec> grid;
        if (grid_cells != 256) grid = default_grid(result.pool.samples, grid_cells);
        const auto d = kde2d(result.pool.samples, grid);
        write_density_csv(dens_file, d);
        json extra{{"pool_size", n}, {"iterations", k}, {"integral", d.integral()},
                   {"final_mean", complex_to_json(result.summaries.back().mean)}};
        write_manifest(dens_file, "figures", common, model_fingerprint(fc.model),
                       {model_file.string(), pool_file.string(), dens_file.string()}, extra);
        index.push_back({{"name", fc.name}, {"density", dens_file.string()}, {"pool", pool_file.string()}});
        out << fc.name << ": n = " << n << ", K = " << k << ", density integral = " << d.integral() << "\n";
      }
      write_json(dir / "figures.json", json{{"figures", index}, {"desk", desk}, {"seed", seed}});
      return 0;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace smoothfix
