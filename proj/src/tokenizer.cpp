#include "atlas/tokenizer.hpp"

#include <clocale>
#include <cwctype>
#include <fstream>
#include <locale.h>
#include <stdexcept>
#include <wctype.h>

namespace atlas {

namespace {

// Character classification comes from the C library's UTF-8 tables; an
// ASCII-only fallback applies when no UTF-8 locale is installed.
class UnicodeClassifier {
 public:
  UnicodeClassifier() {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      locale_ = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(0));
      if (locale_) break;
    }
  }
  ~UnicodeClassifier() {
    if (locale_) freelocale(locale_);
  }
  UnicodeClassifier(const UnicodeClassifier&) = delete;
  UnicodeClassifier& operator=(const UnicodeClassifier&) = delete;

  bool is_word(char32_t c) const {
    if (c < 0x80) return ascii_word(c);
    return locale_ && iswalnum_l(static_cast<wint_t>(c), locale_);
  }

  char32_t lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    return locale_ ? static_cast<char32_t>(towlower_l(static_cast<wint_t>(c), locale_)) : c;
  }

 private:
  static bool ascii_word(char32_t c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  }

  locale_t locale_ = static_cast<locale_t>(0);
};

const UnicodeClassifier& classifier() {
  static const UnicodeClassifier instance;
  return instance;
}

// Decodes one code point at text[i]; returns its byte length, 0 when invalid.
std::size_t decode_utf8(std::string_view text, std::size_t i, char32_t& out) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    out = b0;
    return 1;
  }
  std::size_t len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  out = cp;
  return len;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::vector<WordToken> word_tokens(std::string_view text) {
  const auto& cls = classifier();
  std::vector<WordToken> tokens;
  WordToken current;
  bool in_word = false;

  for (std::size_t i = 0; i < text.size();) {
    char32_t cp = 0;
    std::size_t len = decode_utf8(text, i, cp);
    const bool word = len > 0 && cls.is_word(cp);
    if (len == 0) len = 1;
    if (word) {
      if (!in_word) {
        current = WordToken{{}, i, i};
        in_word = true;
      }
      append_utf8(current.text, cls.lower(cp));
      current.end = i + len;
    } else if (in_word) {
      tokens.push_back(std::move(current));
      in_word = false;
    }
    i += len;
  }
  if (in_word) tokens.push_back(std::move(current));
  return tokens;
}

StopwordSet StopwordSet::builtin_english() {
  static const char* const kWords[] = {
      "a",       "about",  "above",   "after",   "again",  "against", "all",     "am",
      "an",      "and",    "any",     "are",     "as",     "at",      "be",      "because",
      "been",    "before", "being",   "below",   "between", "both",   "but",     "by",
      "can",     "could",  "did",     "do",      "does",   "doing",   "down",    "during",
      "each",    "few",    "for",     "from",    "further", "had",    "has",     "have",
      "having",  "he",     "her",     "here",    "hers",   "herself", "him",     "himself",
      "his",     "how",    "i",       "if",      "in",     "into",    "is",      "it",
      "its",     "itself", "just",    "me",      "more",   "most",    "my",      "myself",
      "no",      "nor",    "not",     "now",     "of",     "off",     "on",      "once",
      "only",    "or",     "other",   "our",     "ours",   "ourselves", "out",   "over",
      "own",     "same",   "she",     "should",  "so",     "some",    "such",    "than",
      "that",    "the",    "their",   "theirs",  "them",   "themselves", "then", "there",
      "these",   "they",   "this",    "those",   "through", "to",     "too",     "under",
      "until",   "up",     "very",    "was",     "we",     "were",    "what",    "when",
      "where",   "which",  "while",   "who",     "whom",   "why",     "will",    "with",
      "would",   "you",    "your",    "yours",   "yourself", "yourselves",
  };
  std::unordered_set<std::string> words;
  for (const char* w : kWords) words.emplace(w);
  return StopwordSet(std::move(words));
}

StopwordSet StopwordSet::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword list " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) == 0) continue;
    for (auto& tok : word_tokens(line)) words.insert(std::move(tok.text));
  }
  return StopwordSet(std::move(words));
}

std::vector<std::string> tokenize(std::string_view text, int ngram_max, const StopwordSet* stopwords) {
  if (ngram_max < 1) throw std::invalid_argument("ngram_max must be >= 1");
  const auto words = word_tokens(text);
  std::vector<char> is_stop(words.size(), 0);
  if (stopwords && !stopwords->empty()) {
    for (std::size_t i = 0; i < words.size(); ++i) is_stop[i] = stopwords->contains(words[i].text);
  }

  std::vector<std::string> terms;
  terms.reserve(words.size() * static_cast<std::size_t>(ngram_max));
  for (std::size_t start = 0; start < words.size(); ++start) {
    std::string gram;
    bool all_stop = true;
    for (int n = 0; n < ngram_max && start + n < words.size(); ++n) {
      const std::size_t w = start + static_cast<std::size_t>(n);
      if (n > 0) gram += ' ';
      gram += words[w].text;
      all_stop = all_stop && is_stop[w];
      if (!all_stop) terms.push_back(gram);
    }
  }
  return terms;
}

}  // namespace atlas
