#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/ingest.hpp"

namespace atlas {

inline constexpr std::size_t kSnippetTokens = 8;

struct Posting {
  std::uint32_t doc = 0;
  std::vector<std::uint32_t> positions;  // token positions, ascending

  bool operator==(const Posting&) const = default;
};

struct SearchResult {
  std::uint32_t point_index = 0;
  double score = 0.0;
  std::string snippet;

  bool operator==(const SearchResult&) const = default;
};

/// Unigram positional index over point texts. Immutable after build;
/// concurrent queries are safe.
class SearchIndex {
 public:
  static SearchIndex build(std::span<const PointRecord> points);

  /// Conjunctive query; the final token also matches as a prefix. Results
  /// are ranked by descending score, ties by ascending point index.
  std::vector<SearchResult> query(std::string_view q, std::size_t limit) const;

  /// Ranked matches before the limit is applied.
  std::vector<SearchResult> query_all(std::string_view q) const;

  const std::vector<Posting>* postings(const std::string& term) const;
  std::size_t document_count() const { return doc_lengths_.size(); }
  std::uint32_t doc_length(std::uint32_t doc) const { return doc_lengths_.at(doc); }
  std::size_t term_count() const { return postings_.size(); }

 private:
  struct Slot {
    // Postings of every term the slot matches (one for exact tokens, all
    // prefix expansions for the last token).
    std::vector<const std::vector<Posting>*> lists;
  };

  std::vector<SearchResult> rank(std::string_view q, std::size_t limit) const;
  std::string snippet(std::uint32_t doc, std::uint32_t first_position) const;

  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  std::vector<std::string> texts_;
};

}  // namespace atlas
