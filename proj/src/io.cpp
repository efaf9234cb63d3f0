#include "smoothfix/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "smoothfix/error.hpp"
#include "smoothfix/model_config.hpp"

namespace smoothfix {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  File f(std::fopen(path.c_str(), "w"));
  if (!f) throw ValidationError("cannot write '" + path.string() + "'");
  return f;
}

}  // namespace

void write_pool_csv(const std::filesystem::path& path, const SamplePool& pool) {
  auto f = open_for_write(path);
  std::fputs("re,im\n", f.get());
  for (Complex z : pool.samples) std::fprintf(f.get(), "%.17g,%.17g\n", z.real(), z.imag());
}

SamplePool read_pool_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pool file '" + path.string() + "'");
  SamplePool pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("re", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 're,im'");
    }
    try {
      std::size_t used = 0;
      const double re = std::stod(line.substr(0, comma), &used);
      const double im = std::stod(line.substr(comma + 1));
      pool.samples.emplace_back(re, im);
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (!is_finite(pool.samples.back())) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": non-finite sample");
    }
  }
  if (pool.samples.empty()) throw ValidationError("pool file '" + path.string() + "' has no samples");
  return pool;
}

void write_martingale_csv(const std::filesystem::path& path, const MartingaleSummary& summary) {
  auto f = open_for_write(path);
  std::fputs("n,mean_W,se_W,mean_Z_re,mean_Z_im,se_Z,node_count_mean\n", f.get());
  for (const auto& g : summary.generations) {
    std::fprintf(f.get(), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.n, g.mean_w, g.se_w,
                 g.mean_z.real(), g.mean_z.imag(), g.se_z, g.node_count_mean);
  }
}

void write_scan_csv(const std::filesystem::path& path, const RadialScan& scan) {
  auto f = open_for_write(path);
  std::fputs("R,theta,re,im,abs,stderr\n", f.get());
  for (std::size_t r = 0; r < scan.radii.size(); ++r) {
    for (int k = 0; k < scan.n_angles; ++k) {
      const auto& v = scan.values[r * static_cast<std::size_t>(scan.n_angles) + k];
      const double theta = 2.0 * std::numbers::pi * k / scan.n_angles;
      std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", scan.radii[r], theta,
                   v.value.real(), v.value.imag(), std::abs(v.value), v.stderr);
    }
  }
}

void write_density_csv(const std::filesystem::path& path, const DensityGrid& grid) {
  auto f = open_for_write(path);
  std::fputs("x,y,value\n", f.get());
  for (std::size_t i = 0; i < grid.grid.x.cells; ++i) {
    for (std::size_t j = 0; j < grid.grid.y.cells; ++j) {
      std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", grid.grid.x.centre(i), grid.grid.y.centre(j),
                   grid.value(i, j));
    }
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto f = open_for_write(path);
  const std::string text = doc.dump(2) + "\n";
  std::fputs(text.c_str(), f.get());
}

nlohmann::json to_json(const GenerationSummary& s) {
  return {{"generation", s.generation},
          {"mean", complex_to_json(s.mean)},
          {"mean_stderr", s.mean_stderr},
          {"mean_stderr_accumulated", s.mean_stderr_accumulated},
          {"stddev", s.stddev},
          {"abs_moment_p", s.abs_moment_p},
          {"abs_moment", s.abs_moment},
          {"imag_stddev", s.imag_stddev}};
}

}  // namespace smoothfix
