#include "atlas/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "atlas/tokenizer.hpp"

namespace atlas {

SearchIndex SearchIndex::build(std::span<const PointRecord> points) {
  SearchIndex index;
  index.doc_lengths_.resize(points.size(), 0);
  index.texts_.resize(points.size());
  bool any_text = false;
  for (std::uint32_t doc = 0; doc < points.size(); ++doc) {
    const auto& text = points[doc].text;
    if (!text) continue;
    any_text = true;
    index.texts_[doc] = *text;
    const auto tokens = word_tokens(*text);
    index.doc_lengths_[doc] = static_cast<std::uint32_t>(tokens.size());
    for (std::uint32_t pos = 0; pos < tokens.size(); ++pos) {
      auto& list = index.postings_[tokens[pos].text];
      if (list.empty() || list.back().doc != doc) list.push_back({doc, {}});
      list.back().positions.push_back(pos);
    }
  }
  if (!any_text) throw std::invalid_argument("search requires text");
  return index;
}

const std::vector<Posting>* SearchIndex::postings(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::vector<SearchResult> SearchIndex::query(std::string_view q, std::size_t limit) const {
  if (limit == 0) throw std::invalid_argument("limit must be >= 1");
  return rank(q, limit);
}

std::vector<SearchResult> SearchIndex::query_all(std::string_view q) const {
  return rank(q, std::numeric_limits<std::size_t>::max());
}

namespace {

const Posting* find_posting(const std::vector<Posting>& list, std::uint32_t doc) {
  auto it = std::lower_bound(list.begin(), list.end(), doc,
                             [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  return (it != list.end() && it->doc == doc) ? &*it : nullptr;
}

// Smallest |p - q| over p in a, q in b with p != q; 0 when no such pair.
std::uint32_t min_distance(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::uint32_t best = 0;
  const auto consider = [&](std::uint32_t d) {
    if (best == 0 || d < best) best = d;
  };
  for (auto p : a) {
    auto below = std::lower_bound(b.begin(), b.end(), p);
    if (below != b.begin()) consider(p - *std::prev(below));
    auto above = std::upper_bound(below, b.end(), p);
    if (above != b.end()) consider(*above - p);
  }
  return best;
}

}  // namespace

std::vector<SearchResult> SearchIndex::rank(std::string_view q, std::size_t limit) const {
  const auto tokens = word_tokens(q);
  if (tokens.empty()) return {};

  // Exact slots for all but the last token (deduplicated); the last token
  // is a prefix slot.
  std::vector<Slot> slots;
  std::vector<std::string> exact;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (std::find(exact.begin(), exact.end(), tokens[i].text) != exact.end()) continue;
    exact.push_back(tokens[i].text);
    const auto* list = postings(tokens[i].text);
    if (!list) return {};
    slots.push_back({{list}});
  }
  {
    const std::string& prefix = tokens.back().text;
    Slot slot;
    for (auto it = postings_.lower_bound(prefix); it != postings_.end() && it->first.starts_with(prefix); ++it) {
      slot.lists.push_back(&it->second);
    }
    if (slot.lists.empty()) return {};
    slots.push_back(std::move(slot));
  }

  // Sorted document set per slot.
  std::vector<std::vector<std::uint32_t>> slot_docs(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    auto& docs = slot_docs[s];
    for (const auto* list : slots[s].lists) {
      for (const auto& p : *list) docs.push_back(p.doc);
    }
    std::sort(docs.begin(), docs.end());
    docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  }

  std::vector<std::size_t> order(slots.size());
  for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return slot_docs[a].size() < slot_docs[b].size(); });
  std::vector<std::uint32_t> matches = slot_docs[order.front()];
  for (std::size_t k = 1; k < order.size() && !matches.empty(); ++k) {
    std::vector<std::uint32_t> kept;
    const auto& other = slot_docs[order[k]];
    std::set_intersection(matches.begin(), matches.end(), other.begin(), other.end(), std::back_inserter(kept));
    matches = std::move(kept);
  }

  std::size_t indexed = 0;
  for (auto len : doc_lengths_) indexed += len > 0;
  const double n_docs = static_cast<double>(indexed);

  std::vector<SearchResult> results;
  std::vector<std::uint32_t> first_match;
  results.reserve(matches.size());
  first_match.reserve(matches.size());
  std::vector<std::vector<std::uint32_t>> positions(slots.size());
  for (auto doc : matches) {
    double score = 0.0;
    const double len = static_cast<double>(doc_lengths_[doc]);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto& pos = positions[s];
      pos.clear();
      for (const auto* list : slots[s].lists) {
        if (const auto* p = find_posting(*list, doc)) pos.insert(pos.end(), p->positions.begin(), p->positions.end());
      }
      std::sort(pos.begin(), pos.end());
      const double tf = static_cast<double>(pos.size());
      const double df = static_cast<double>(slot_docs[s].size());
      score += (tf / len) * std::log(1.0 + n_docs / df);
    }
    if (slots.size() >= 2) {
      std::uint32_t best = 0;
      for (std::size_t a = 0; a < slots.size(); ++a) {
        for (std::size_t b = a + 1; b < slots.size(); ++b) {
          const auto d = min_distance(positions[a], positions[b]);
          if (d > 0 && (best == 0 || d < best)) best = d;
        }
      }
      // Gap counts the tokens strictly between the two matches.
      if (best > 0) score += 1.0 / (1.0 + static_cast<double>(best - 1));
    }
    std::uint32_t first = std::numeric_limits<std::uint32_t>::max();
    for (const auto& pos : positions) {
      if (!pos.empty()) first = std::min(first, pos.front());
    }
    results.push_back({doc, score, {}});
    first_match.push_back(first);
  }

  std::vector<std::size_t> ranked(results.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
  const std::size_t keep = std::min(limit, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (results[a].score != results[b].score) return results[a].score > results[b].score;
                      return results[a].point_index < results[b].point_index;
                    });
  std::vector<SearchResult> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    auto& r = results[ranked[i]];
    r.snippet = snippet(r.point_index, first_match[ranked[i]]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string SearchIndex::snippet(std::uint32_t doc, std::uint32_t first_position) const {
  const auto& text = texts_[doc];
  const auto tokens = word_tokens(text);
  if (tokens.empty()) return {};
  const std::size_t n = tokens.size();
  const std::size_t first = std::min<std::size_t>(first_position, n - 1);
  std::size_t start = first >= 3 ? first - 3 : 0;
  const std::size_t end = std::min(start + kSnippetTokens, n);
  start = end >= kSnippetTokens ? std::min(start, end - kSnippetTokens) : 0;
  return text.substr(tokens[start].begin, tokens[end - 1].end - tokens[start].begin);
}

}  // namespace atlas
