#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/density.hpp"
#include "atlas/ingest.hpp"
#include "atlas/labels.hpp"
#include "atlas/summarizer.hpp"

namespace atlas {

inline constexpr std::string_view kArtifactVersion = "1.0.0";
inline constexpr std::string_view kDataFile = "data.ndjson";
inline constexpr std::string_view kGridFile = "grid.json";
inline constexpr std::string_view kSummaryFile = "summary.json";

/// Stored under "meta" in grid.json.
struct Manifest {
  std::string version{kArtifactVersion};
  SummaryMode mode = SummaryMode::text;
  std::uint64_t point_count = 0;
  std::vector<int> levels;                    // descending depth
  std::vector<std::uint64_t> tiles_per_level;  // parallel to levels
  std::vector<std::string> groups;
  std::vector<std::string> times;  // sorted
  std::uint64_t grid_count = 0;
  std::uint64_t label_count = 0;
  std::uint64_t vocabulary_size = 0;

  bool operator==(const Manifest&) const = default;
};

struct GridDocument {
  Manifest meta;
  RootBounds bounds;
  std::vector<double> thresholds;
  DensitySet density;

  bool operator==(const GridDocument&) const = default;
};

struct SummaryDocument {
  std::string version{kArtifactVersion};
  SummaryMode mode = SummaryMode::text;
  RootBounds bounds;
  std::vector<SummaryLevel> levels;  // descending depth
  std::vector<AutoLabel> labels;

  bool operator==(const SummaryDocument&) const = default;
};

class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_data(std::ostream& out, std::span<const PointRecord> points);

std::string write_grid(const GridDocument& doc);
GridDocument parse_grid(std::string_view json_text);

std::string write_summaries(const SummaryDocument& doc);
SummaryDocument parse_summaries(std::string_view json_text);

std::string manifest_json(const Manifest& manifest);

/// Throws ArtifactError unless `version` has the supported major number.
void check_version(std::string_view version);

struct Artifact {
  std::vector<PointRecord> points;
  GridDocument grid;
  SummaryDocument summary;
};

void write_artifact(const std::filesystem::path& dir, const Artifact& artifact);

/// Reads the three files and checks the manifest against their contents.
Artifact read_artifact(const std::filesystem::path& dir);

/// Throws ArtifactError naming the first inconsistency.
void validate_artifact(const Artifact& artifact);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace atlas
