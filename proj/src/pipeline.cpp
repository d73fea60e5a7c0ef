#include "atlas/pipeline.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace atlas {

BuildResult build(std::vector<PointRecord> points, const BuildOptions& options) {
  BuildResult result;
  auto& artifact = result.artifact;

  const RootBounds bounds = infer_bounds(points, options.pad_fraction);
  clamp_into(points, bounds);

  std::vector<int> levels = options.levels.empty()
                                ? choose_levels(points.size(), options.target_per_tile, options.level_count)
                                : options.levels;
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const bool any_text = std::any_of(points.begin(), points.end(),
                                    [](const PointRecord& p) { return p.text && !p.text->empty(); });
  const SummaryMode mode = options.mode.value_or(any_text ? SummaryMode::text : SummaryMode::exemplar);

  SummaryOptions summary_options;
  summary_options.mode = mode;
  summary_options.top_k = options.top_k;
  summary_options.counts.ngram_max = options.ngram_max;
  summary_options.counts.min_df = options.min_df;
  summary_options.counts.stopwords = options.stopwords ? &*options.stopwords : nullptr;
  MultiLevelSummary summary = summarize(points, bounds, levels, summary_options);

  SliceOptions slice_options;
  slice_options.nx = slice_options.ny = options.grid_size;
  slice_options.extent = GridExtent::from_bounds(bounds);
  slice_options.bandwidth = options.bandwidth;
  slice_options.by_time = options.slice_by_time;
  slice_options.by_group = options.slice_by_group;
  DensitySet density = kde_slices(points, slice_options, &result.diagnostics);

  std::vector<double> thresholds = default_thresholds(density.overall.grid, options.threshold_quantiles);
  result.contours = extract_contours(density.overall.grid, thresholds);

  std::vector<AutoLabel> labels;
  if (!thresholds.empty() && !result.contours.empty() && result.contours.back().threshold == thresholds.back()) {
    labels = auto_labels(result.contours.back(), summary.levels.back(), bounds, options.max_labels,
                         &result.diagnostics);
  }

  Manifest& meta = artifact.grid.meta;
  meta.mode = mode;
  meta.point_count = points.size();
  meta.levels = levels;
  for (const auto& level : summary.levels) meta.tiles_per_level.push_back(level.tiles.size());
  for (const auto& [name, g] : density.groups) meta.groups.push_back(name);
  std::set<std::string> times;
  for (const auto& [group, per_time] : density.slices) {
    for (const auto& [time, s] : per_time) times.insert(time);
  }
  meta.times.assign(times.begin(), times.end());
  meta.grid_count = density.grid_count();
  meta.label_count = labels.size();
  meta.vocabulary_size = summary.vocabulary_size;

  artifact.grid.bounds = bounds;
  artifact.grid.thresholds = std::move(thresholds);
  artifact.grid.density = std::move(density);

  artifact.summary.mode = mode;
  artifact.summary.bounds = bounds;
  artifact.summary.levels = std::move(summary.levels);
  artifact.summary.labels = std::move(labels);

  artifact.points = std::move(points);
  return result;
}

BuildResult build_from_file(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                            const BuildOptions& options, const ParseOptions& parse) {
  std::vector<Diagnostic> parse_diagnostics;
  std::vector<PointRecord> points;
  try {
    points = load_points(input, parse, &parse_diagnostics);
  } catch (const ParseError& e) {
    throw std::runtime_error(input.string() + ": " + e.what());
  }
  BuildResult result = build(std::move(points), options);
  std::vector<std::string> notes;
  for (const auto& d : parse_diagnostics) {
    notes.push_back(input.string() + ":" + std::to_string(d.line) + " (byte " + std::to_string(d.byte_offset) +
                    "): " + d.message);
  }
  result.diagnostics.insert(result.diagnostics.begin(), notes.begin(), notes.end());
  write_artifact(out_dir, result.artifact);
  return result;
}

}  // namespace atlas
