#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "atlas/sparse.hpp"
#include "atlas/tiling.hpp"
#include "atlas/tokenizer.hpp"

namespace atlas {

inline constexpr int kDefaultNgramMax = 2;
inline constexpr std::size_t kDefaultTopK = 5;

enum class SummaryMode { text, exemplar };

std::string_view to_string(SummaryMode mode);
SummaryMode parse_summary_mode(std::string_view name);

/// Terms of the finest meta-documents, sorted bytewise. Because the order is
/// lexicographic, comparing term indices compares the terms themselves.
struct Vocabulary {
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::uint32_t> term_to_index;

  std::size_t size() const { return terms.size(); }
  std::optional<std::uint32_t> find(const std::string& term) const;
};

/// Tiles x terms counts. Row r belongs to tile r of the TileLevel it was
/// built from (Morton order).
struct CountMatrix {
  int level = 0;
  CsrMatrix<std::uint32_t> values;
};

struct Keyword {
  std::string term;
  double score = 0.0;

  bool operator==(const Keyword&) const = default;
};

struct TileSummary {
  TileKey key;
  std::vector<Keyword> keywords;         // text mode
  std::vector<std::uint32_t> exemplars;  // exemplar mode

  bool operator==(const TileSummary&) const = default;
};

struct SummaryLevel {
  int level = 0;
  std::vector<TileSummary> tiles;  // Morton order

  const TileSummary* find(std::uint32_t ix, std::uint32_t iy) const;
  bool operator==(const SummaryLevel&) const = default;
};

struct CountOptions {
  int ngram_max = kDefaultNgramMax;
  const StopwordSet* stopwords = nullptr;
  // Terms with fewer total occurrences than this are left out of the vocabulary.
  std::uint32_t min_df = 1;
};

/// One meta-document per leaf tile: the concatenated texts of its points.
/// Throws when no point carries non-empty text.
std::pair<Vocabulary, CountMatrix> build_count_matrix(const TileLevel& leaf,
                                                      std::span<const PointRecord> points,
                                                      const CountOptions& options = {});

CountMatrix aggregate_count_matrix(const CountMatrix& counts, const AggregationMatrix& matrix);

/// tf * log(1 + N / df) over the rows of one level.
CsrMatrix<double> ttfidf_scores(const CountMatrix& counts);

std::vector<Keyword> top_keywords(std::span<const std::uint32_t> term_indices,
                                  std::span<const double> scores, const Vocabulary& vocabulary,
                                  std::size_t k);

/// Indices of the k points nearest the tile's mean position; ties go to the
/// lower index.
std::vector<std::uint32_t> centroid_exemplars(const TilePayload& tile,
                                              std::span<const PointRecord> points, std::size_t k);

struct SummaryOptions {
  SummaryMode mode = SummaryMode::text;
  CountOptions counts;
  std::size_t top_k = kDefaultTopK;
};

struct MultiLevelSummary {
  SummaryMode mode = SummaryMode::text;
  std::vector<SummaryLevel> levels;  // descending depth
  std::size_t vocabulary_size = 0;
};

/// Summaries at each requested depth. The count matrix is built once at the
/// finest depth and carried upward one aggregation multiply per level.
MultiLevelSummary summarize(std::span<const PointRecord> points, const RootBounds& bounds,
                            std::span<const int> levels, const SummaryOptions& options = {});

}  // namespace atlas
