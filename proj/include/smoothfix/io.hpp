#pragma once

#include <filesystem>
#include <vector>

#include "smoothfix/branching.hpp"
#include "smoothfix/density.hpp"
#include "smoothfix/fourier.hpp"
#include "smoothfix/popdyn.hpp"
#include "json.hpp"

namespace smoothfix {

// CSV writers print doubles with 17 significant digits so files round-trip
// and identical runs produce identical bytes.

// Columns: re, im.
void write_pool_csv(const std::filesystem::path& path, const SamplePool& pool);
SamplePool read_pool_csv(const std::filesystem::path& path);

// Columns: n, mean_W, se_W, mean_Z_re, mean_Z_im, se_Z, node_count_mean.
void write_martingale_csv(const std::filesystem::path& path, const MartingaleSummary& summary);

// Columns: R, theta, re, im, abs, stderr.
void write_scan_csv(const std::filesystem::path& path, const RadialScan& scan);

// Columns: x, y, value.
void write_density_csv(const std::filesystem::path& path, const DensityGrid& grid);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json to_json(const GenerationSummary& s);

}  // namespace smoothfix
