#pragma once

// Lexical diversity: token-type ratio and lexical density, macro-averaged
// over the sentences of a corpus.

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "transart/corpus.hpp"
#include "transart/error.hpp"
#include "transart/metrics/stoplist_en.hpp"
#include "transart/unicode.hpp"

namespace transart::metrics {

using TokenList = std::vector<std::string>;

/// NFC + lowercase, whitespace split, with leading and trailing punctuation
/// peeled off into one token per character. No script-specific segmentation.
inline TokenList tokenize(std::string_view text) {
  const std::u32string chars = unicode::to_u32(unicode::nfc_lower(text));
  TokenList tokens;

  auto emit_word = [&](std::size_t begin, std::size_t end) {
    std::size_t lo = begin;
    std::size_t hi = end;
    while (lo < hi && unicode::is_punct(chars[lo])) ++lo;
    while (hi > lo && unicode::is_punct(chars[hi - 1])) --hi;
    for (std::size_t i = begin; i < lo; ++i) tokens.push_back(unicode::to_utf8(chars[i]));
    if (lo < hi) tokens.push_back(unicode::to_utf8(std::u32string_view(chars).substr(lo, hi - lo)));
    for (std::size_t i = hi; i < end; ++i) tokens.push_back(unicode::to_utf8(chars[i]));
  };

  std::size_t i = 0;
  while (i < chars.size()) {
    while (i < chars.size() && unicode::is_space(chars[i])) ++i;
    const std::size_t start = i;
    while (i < chars.size() && !unicode::is_space(chars[i])) ++i;
    if (i > start) emit_word(start, i);
  }
  return tokens;
}

/// Unique tokens over all tokens.
inline double ttr(const TokenList& tokens) {
  if (tokens.empty()) fail("EmptyInput", "ttr of an empty token list");
  const std::unordered_set<std::string> types(tokens.begin(), tokens.end());
  return static_cast<double>(types.size()) / static_cast<double>(tokens.size());
}

/// Share of tokens that are neither function words nor pure punctuation.
template <typename WordSet = std::unordered_set<std::string>>
double lexical_density(const TokenList& tokens, const WordSet& function_words) {
  if (tokens.empty()) fail("EmptyInput", "lexical density of an empty token list");
  std::size_t content = 0;
  for (const auto& tok : tokens) {
    if (function_words.count(tok) == 0 && !unicode::is_pure_punct(tok)) ++content;
  }
  return static_cast<double>(content) / static_cast<double>(tokens.size());
}

struct DiversityReport {
  double ttr = 0.0;
  double ld = 0.0;
  std::size_t n_sentences = 0;
  std::size_t skipped_empty = 0;
  std::string aggregation = "macro";
};

inline DiversityReport corpus_diversity(const Corpus& corpus,
                                        const std::unordered_set<std::string>& function_words = default_stoplist()) {
  if (corpus.empty()) fail("EmptyCorpus", "diversity of an empty corpus");
  DiversityReport report;
  double ttr_sum = 0.0;
  double ld_sum = 0.0;
  for (const Sample& s : corpus.samples) {
    const TokenList tokens = tokenize(s.text);
    if (tokens.empty()) {
      ++report.skipped_empty;
      continue;
    }
    ttr_sum += ttr(tokens);
    ld_sum += lexical_density(tokens, function_words);
    ++report.n_sentences;
  }
  if (report.n_sentences == 0) fail("EmptyCorpus", "no sentence produced any token");
  report.ttr = ttr_sum / static_cast<double>(report.n_sentences);
  report.ld = ld_sum / static_cast<double>(report.n_sentences);
  return report;
}

}  // namespace transart::metrics
