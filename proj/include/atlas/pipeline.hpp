#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "atlas/artifact.hpp"
#include "atlas/contour.hpp"

namespace atlas {

struct BuildOptions {
  double pad_fraction = kDefaultPadFraction;

  std::vector<int> levels;  // explicit depths; empty means choose_levels
  std::uint64_t target_per_tile = kDefaultTargetPerTile;
  int level_count = kDefaultLevelCount;

  std::optional<SummaryMode> mode;  // default: text when any point has text
  int ngram_max = kDefaultNgramMax;
  std::size_t top_k = kDefaultTopK;
  std::optional<StopwordSet> stopwords;
  std::uint32_t min_df = 1;

  std::size_t grid_size = kDefaultGridSize;
  std::optional<Bandwidth> bandwidth;
  std::vector<double> threshold_quantiles{std::begin(kDefaultQuantiles), std::end(kDefaultQuantiles)};
  std::size_t max_labels = kDefaultMaxLabels;
  bool slice_by_time = true;
  bool slice_by_group = true;
};

struct BuildResult {
  Artifact artifact;
  std::vector<ContourPolygon> contours;  // of the overall grid
  std::vector<std::string> diagnostics;
};

/// Runs the full summarization. Points are clamped into the inferred root
/// square first; the artifact carries the clamped coordinates.
BuildResult build(std::vector<PointRecord> points, const BuildOptions& options = {});

/// Reads an ND-JSON input, builds, and writes the three artifact files.
BuildResult build_from_file(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                            const BuildOptions& options = {}, const ParseOptions& parse = {});

}  // namespace atlas
