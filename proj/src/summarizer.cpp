#include "atlas/summarizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace atlas {

std::string_view to_string(SummaryMode mode) {
  return mode == SummaryMode::text ? "text" : "exemplar";
}

SummaryMode parse_summary_mode(std::string_view name) {
  if (name == "text") return SummaryMode::text;
  if (name == "exemplar") return SummaryMode::exemplar;
  throw std::invalid_argument("unknown summary mode '" + std::string(name) + "'");
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& term) const {
  auto it = term_to_index.find(term);
  if (it == term_to_index.end()) return std::nullopt;
  return it->second;
}

const TileSummary* SummaryLevel::find(std::uint32_t ix, std::uint32_t iy) const {
  const TileKey probe{level, ix, iy};
  const auto code = probe.morton();
  auto it = std::lower_bound(tiles.begin(), tiles.end(), code, [](const TileSummary& t, std::uint64_t c) {
    return t.key.morton() < c;
  });
  if (it == tiles.end() || !(it->key == probe)) return nullptr;
  return &*it;
}

std::pair<Vocabulary, CountMatrix> build_count_matrix(const TileLevel& leaf,
                                                      std::span<const PointRecord> points,
                                                      const CountOptions& options) {
  // Pass 1: intern every n-gram under a provisional id, recording each
  // tile's id stream.
  std::unordered_map<std::string, std::uint32_t> provisional;
  std::vector<std::string> provisional_terms;
  std::vector<std::uint64_t> occurrences;
  std::vector<std::uint32_t> stream;
  std::vector<std::size_t> tile_offsets{0};
  bool any_text = false;

  for (const auto& tile : leaf.tiles) {
    for (auto index : tile.points) {
      if (index >= points.size()) throw std::out_of_range("tile references a missing point");
      const auto& text = points[index].text;
      if (!text || text->empty()) continue;
      any_text = true;
      for (auto& term : tokenize(*text, options.ngram_max, options.stopwords)) {
        auto [it, inserted] = provisional.try_emplace(std::move(term), provisional_terms.size());
        if (inserted) {
          provisional_terms.push_back(it->first);
          occurrences.push_back(0);
        }
        ++occurrences[it->second];
        stream.push_back(it->second);
      }
    }
    tile_offsets.push_back(stream.size());
  }
  if (!any_text) throw std::invalid_argument("text mode requires at least one non-empty document");

  // Pass 2: sort the kept terms and renumber.
  std::vector<std::uint32_t> kept;
  for (std::uint32_t id = 0; id < provisional_terms.size(); ++id) {
    if (occurrences[id] >= options.min_df) kept.push_back(id);
  }
  std::sort(kept.begin(), kept.end(), [&](std::uint32_t a, std::uint32_t b) {
    return provisional_terms[a] < provisional_terms[b];
  });
  constexpr auto dropped = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> remap(provisional_terms.size(), dropped);

  Vocabulary vocab;
  vocab.terms.reserve(kept.size());
  for (std::uint32_t final_id = 0; final_id < kept.size(); ++final_id) {
    remap[kept[final_id]] = final_id;
    vocab.terms.push_back(provisional_terms[kept[final_id]]);
    vocab.term_to_index.emplace(vocab.terms.back(), final_id);
  }

  CountMatrix counts;
  counts.level = leaf.level;
  counts.values = CsrMatrix<std::uint32_t>::empty_rows(vocab.size());
  std::vector<std::uint32_t> ids, cols, vals;
  for (std::size_t t = 0; t < leaf.tiles.size(); ++t) {
    ids.clear();
    for (std::size_t i = tile_offsets[t]; i < tile_offsets[t + 1]; ++i) {
      if (remap[stream[i]] != dropped) ids.push_back(remap[stream[i]]);
    }
    std::sort(ids.begin(), ids.end());
    cols.clear();
    vals.clear();
    for (std::size_t i = 0; i < ids.size();) {
      std::size_t j = i;
      while (j < ids.size() && ids[j] == ids[i]) ++j;
      cols.push_back(ids[i]);
      vals.push_back(static_cast<std::uint32_t>(j - i));
      i = j;
    }
    counts.values.push_row(cols, vals);
  }
  return {std::move(vocab), std::move(counts)};
}

CountMatrix aggregate_count_matrix(const CountMatrix& counts, const AggregationMatrix& matrix) {
  if (counts.level != matrix.level) {
    throw std::invalid_argument("count matrix level " + std::to_string(counts.level) +
                                " does not match aggregation level " + std::to_string(matrix.level));
  }
  CountMatrix out;
  out.level = counts.level - 1;
  out.values = multiply(matrix.entries, counts.values);
  return out;
}

CsrMatrix<double> ttfidf_scores(const CountMatrix& counts) {
  const auto& m = counts.values;
  const auto df = m.column_nnz();
  const double n_rows = static_cast<double>(m.rows());
  std::vector<double> idf(m.cols(), 0.0);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (df[c] > 0) idf[c] = std::log(1.0 + n_rows / static_cast<double>(df[c]));
  }

  auto scores = CsrMatrix<double>::empty_rows(m.cols());
  std::vector<double> row;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    row.resize(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) row[i] = static_cast<double>(vals[i]) * idf[cols[i]];
    scores.push_row(cols, row);
  }
  return scores;
}

std::vector<Keyword> top_keywords(std::span<const std::uint32_t> term_indices,
                                  std::span<const double> scores, const Vocabulary& vocabulary,
                                  std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (term_indices.size() != scores.size()) throw std::invalid_argument("score row size mismatch");
  std::vector<std::size_t> order;
  order.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > 0.0) order.push_back(i);
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return term_indices[a] < term_indices[b];
  };
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);

  std::vector<Keyword> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({vocabulary.terms.at(term_indices[order[i]]), scores[order[i]]});
  }
  return out;
}

std::vector<std::uint32_t> centroid_exemplars(const TilePayload& tile,
                                              std::span<const PointRecord> points, std::size_t k) {
  if (tile.points.empty()) throw std::invalid_argument("tile has no points");
  const double cx = tile.centroid_x();
  const double cy = tile.centroid_y();
  std::vector<std::pair<double, std::uint32_t>> ranked;
  ranked.reserve(tile.points.size());
  for (auto index : tile.points) {
    const double dx = points[index].x - cx;
    const double dy = points[index].y - cy;
    ranked.emplace_back(dx * dx + dy * dy, index);
  }
  const std::size_t take = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
  std::vector<std::uint32_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].second);
  return out;
}

namespace {

SummaryLevel summarize_text_level(const TileLevel& tiles, const CountMatrix& counts,
                                  const Vocabulary& vocab, std::size_t k) {
  const auto scores = ttfidf_scores(counts);
  SummaryLevel level;
  level.level = tiles.level;
  level.tiles.reserve(tiles.tiles.size());
  for (std::size_t r = 0; r < tiles.tiles.size(); ++r) {
    TileSummary s;
    s.key = tiles.tiles[r].key;
    s.keywords = top_keywords(scores.row_cols(r), scores.row_values(r), vocab, k);
    level.tiles.push_back(std::move(s));
  }
  return level;
}

SummaryLevel summarize_exemplar_level(const TileLevel& tiles, std::span<const PointRecord> points,
                                      std::size_t k) {
  SummaryLevel level;
  level.level = tiles.level;
  level.tiles.reserve(tiles.tiles.size());
  for (const auto& tile : tiles.tiles) {
    level.tiles.push_back({tile.key, {}, centroid_exemplars(tile, points, k)});
  }
  return level;
}

}  // namespace

MultiLevelSummary summarize(std::span<const PointRecord> points, const RootBounds& bounds,
                            std::span<const int> levels, const SummaryOptions& options) {
  if (levels.empty()) throw std::invalid_argument("at least one summary level is required");
  if (points.empty()) throw std::invalid_argument("no points");
  std::vector<int> depths(levels.begin(), levels.end());
  std::sort(depths.begin(), depths.end(), std::greater<>());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());

  MultiLevelSummary out;
  out.mode = options.mode;
  TileLevel current = build_leaf_level(points, bounds, depths.front());

  Vocabulary vocab;
  CountMatrix counts;
  if (options.mode == SummaryMode::text) {
    std::tie(vocab, counts) = build_count_matrix(current, points, options.counts);
    out.vocabulary_size = vocab.size();
  }

  std::size_t next = 0;
  for (int depth = depths.front(); next < depths.size(); --depth) {
    if (depth == depths[next]) {
      out.levels.push_back(options.mode == SummaryMode::text
                               ? summarize_text_level(current, counts, vocab, options.top_k)
                               : summarize_exemplar_level(current, points, options.top_k));
      ++next;
    }
    if (next == depths.size()) break;
    const auto matrix = aggregation_matrix(current);
    if (options.mode == SummaryMode::text) counts = aggregate_count_matrix(counts, matrix);
    current = aggregate_level(current, matrix);
  }
  return out;
}

}  // namespace atlas
