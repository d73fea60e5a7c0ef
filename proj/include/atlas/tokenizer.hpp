#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace atlas {

/// A lowercased word and its byte span in the source text.
struct WordToken {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Split into maximal runs of Unicode letters/digits, lowercased. Bytes that
/// are not valid UTF-8 act as separators.
std::vector<WordToken> word_tokens(std::string_view text);

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  static StopwordSet builtin_english();
  /// One word per line; blank lines and lines starting with '#' are skipped.
  static StopwordSet from_file(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  bool empty() const { return words_.empty(); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Contiguous 1..ngram_max word n-grams joined by single spaces, ordered by
/// start word then length. With stopwords, n-grams made only of stopwords
/// are dropped.
std::vector<std::string> tokenize(std::string_view text, int ngram_max,
                                  const StopwordSet* stopwords = nullptr);

}  // namespace atlas
