#pragma once

// Corpus-level BLEU and chrF, single reference, scored the same way as
// sacreBLEU 2.x with its default settings:
//   BLEU  nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp|version:2.0.0
//   chrF  character 6-grams, beta = 2, no word n-grams, whitespace removed

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transart/error.hpp"
#include "transart/unicode.hpp"

namespace transart::metrics {

enum class MtMetric { Bleu, ChrF };

struct MtScore {
  MtMetric metric = MtMetric::Bleu;
  double value = 0.0;  // [0, 100]
  std::string signature;
};

inline constexpr std::string_view kBleuSignature = "nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp|version:2.0.0";
inline constexpr std::string_view kChrfSignature = "nrefs:1|case:mixed|eff:yes|nc:6|nw:0|space:no|version:2.0.0";

namespace detail {

// Python's str.split() whitespace set.
inline bool py_space(char32_t c) {
  return unicode::is_space(c) || (c >= 0x1C && c <= 0x1F);
}

inline std::vector<std::u32string> split_ws(std::u32string_view s) {
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && py_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !py_space(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

inline bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_13a_symbol(char32_t c) {
  return (c >= U'{' && c <= U'~') || (c >= U'[' && c <= U'`') || (c >= U' ' && c <= U'&') ||
         (c >= U'(' && c <= U'+') || (c >= U':' && c <= U'@') || c == U'/';
}

}  // namespace detail

/// mteval-v13a tokenization; returns space-joined tokens.
inline std::string tokenize_13a(std::string_view line_in) {
  std::string line(line_in);
  detail::replace_all(line, "<skipped>", "");
  detail::replace_all(line, "-\n", "");
  detail::replace_all(line, "\n", " ");
  if (line.find('&') != std::string::npos) {
    detail::replace_all(line, "&quot;", "\"");
    detail::replace_all(line, "&amp;", "&");
    detail::replace_all(line, "&lt;", "<");
    detail::replace_all(line, "&gt;", ">");
  }

  std::u32string s = U" " + unicode::to_u32(line) + U" ";
  std::u32string t;

  for (char32_t c : s) {
    if (detail::is_13a_symbol(c)) {
      t += U' ';
      t += c;
      t += U' ';
    } else {
      t += c;
    }
  }

  // Each remaining rule matches exactly two characters, left to right, without
  // overlap, which is what a regex substitution does.
  auto pass = [](const std::u32string& in, auto&& matches, auto&& rewrite) {
    std::u32string out;
    std::size_t i = 0;
    while (i < in.size()) {
      if (i + 1 < in.size() && matches(in[i], in[i + 1])) {
        rewrite(out, in[i], in[i + 1]);
        i += 2;
      } else {
        out += in[i++];
      }
    }
    return out;
  };
  auto is_dot_comma = [](char32_t c) { return c == U'.' || c == U','; };

  t = pass(t, [&](char32_t a, char32_t b) { return !detail::is_digit(a) && is_dot_comma(b); },
           [](std::u32string& o, char32_t a, char32_t b) { o += a; o += U' '; o += b; o += U' '; });
  t = pass(t, [&](char32_t a, char32_t b) { return is_dot_comma(a) && !detail::is_digit(b); },
           [](std::u32string& o, char32_t a, char32_t b) { o += U' '; o += a; o += U' '; o += b; });
  t = pass(t, [](char32_t a, char32_t b) { return detail::is_digit(a) && b == U'-'; },
           [](std::u32string& o, char32_t a, char32_t b) { o += a; o += U' '; o += b; o += U' '; });

  std::string out;
  for (const auto& tok : detail::split_ws(t)) {
    if (!out.empty()) out += ' ';
    out += unicode::to_utf8(tok);
  }
  return out;
}

namespace detail {

inline void check_inputs(std::span<const std::string> hyps, std::span<const std::string> refs) {
  if (hyps.size() != refs.size()) {
    fail("LengthMismatch", std::to_string(hyps.size()) + " hypotheses vs " + std::to_string(refs.size()) +
                               " references");
  }
  if (hyps.empty()) fail("EmptyInput", "no segments to score");
}

inline std::u32string rstrip(std::u32string s) {
  while (!s.empty() && py_space(s.back())) s.pop_back();
  return s;
}

using NgramCounts = std::map<std::vector<std::u32string>, long>;

inline NgramCounts word_ngrams(const std::vector<std::u32string>& tokens, int max_order) {
  NgramCounts counts;
  for (int n = 1; n <= max_order; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
      ++counts[std::vector<std::u32string>(tokens.begin() + static_cast<long>(i),
                                           tokens.begin() + static_cast<long>(i) + n)];
    }
  }
  return counts;
}

}  // namespace detail

struct BleuStats {
  static constexpr int kOrder = 4;
  long sys_len = 0;
  long ref_len = 0;
  long correct[kOrder] = {};
  long total[kOrder] = {};
};

inline BleuStats bleu_segment_stats(std::string_view hyp, std::string_view ref) {
  auto prep = [](std::string_view s) {
    const std::u32string stripped = detail::rstrip(unicode::to_u32(s));
    return detail::split_ws(unicode::to_u32(tokenize_13a(unicode::to_utf8(stripped))));
  };
  const auto hyp_tokens = prep(hyp);
  const auto ref_tokens = prep(ref);
  const auto hyp_ngrams = detail::word_ngrams(hyp_tokens, BleuStats::kOrder);
  const auto ref_ngrams = detail::word_ngrams(ref_tokens, BleuStats::kOrder);

  BleuStats st;
  st.sys_len = static_cast<long>(hyp_tokens.size());
  st.ref_len = static_cast<long>(ref_tokens.size());
  for (const auto& [gram, count] : hyp_ngrams) {
    const std::size_t n = gram.size() - 1;
    st.total[n] += count;
    if (auto it = ref_ngrams.find(gram); it != ref_ngrams.end()) st.correct[n] += std::min(count, it->second);
  }
  return st;
}

/// BLEU from summed sufficient statistics with exponential (mteval) smoothing.
/// Precisions are kept as fractions so a perfect match yields exactly 100.
inline double bleu_from_stats(const BleuStats& st) {
  double bp = 1.0;
  if (st.sys_len < st.ref_len) {
    bp = st.sys_len > 0 ? std::exp(1.0 - static_cast<double>(st.ref_len) / static_cast<double>(st.sys_len)) : 0.0;
  }
  if (std::all_of(std::begin(st.correct), std::end(st.correct), [](long c) { return c == 0; })) return 0.0;
  // Perfect match at every order that has n-grams. The reference scorer
  // returns 0 here when the corpus is too short to contain a 4-gram.
  const bool perfect = st.sys_len == st.ref_len &&
                       std::equal(std::begin(st.correct), std::end(st.correct), std::begin(st.total));
  if (perfect) return 100.0;

  double precisions[BleuStats::kOrder] = {};
  double smooth = 1.0;
  for (int n = 0; n < BleuStats::kOrder; ++n) {
    if (st.total[n] == 0) break;
    if (st.correct[n] == 0) {
      smooth *= 2.0;
      precisions[n] = 1.0 / (smooth * static_cast<double>(st.total[n]));
    } else {
      precisions[n] = static_cast<double>(st.correct[n]) / static_cast<double>(st.total[n]);
    }
  }
  double log_sum = 0.0;
  for (double p : precisions) log_sum += p == 0.0 ? -9999999999.0 : std::log(p);
  return 100.0 * bp * std::exp(log_sum / BleuStats::kOrder);
}

inline MtScore bleu(std::span<const std::string> hypotheses, std::span<const std::string> references) {
  detail::check_inputs(hypotheses, references);
  BleuStats sum;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const BleuStats st = bleu_segment_stats(hypotheses[i], references[i]);
    sum.sys_len += st.sys_len;
    sum.ref_len += st.ref_len;
    for (int n = 0; n < BleuStats::kOrder; ++n) {
      sum.correct[n] += st.correct[n];
      sum.total[n] += st.total[n];
    }
  }
  return {MtMetric::Bleu, bleu_from_stats(sum), std::string(kBleuSignature)};
}

// ---------------------------------------------------------------------------
// chrF

struct ChrfOptions {
  int char_order = 6;
  double beta = 2.0;
  /// chrF++.py-style eps smoothing instead of effective-order averaging.
  bool eps_smoothing = false;
};

namespace detail {

inline std::vector<std::map<std::u32string, long>> char_ngrams(std::string_view text, int max_order) {
  std::u32string joined;
  for (const auto& w : split_ws(unicode::to_u32(text))) joined += w;
  std::vector<std::map<std::u32string, long>> counts(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= joined.size(); ++i) {
      ++counts[static_cast<std::size_t>(n - 1)][joined.substr(i, static_cast<std::size_t>(n))];
    }
  }
  return counts;
}

}  // namespace detail

/// Per-order [hyp count, ref count, matches], flattened.
inline std::vector<long> chrf_segment_stats(std::string_view hyp, std::string_view ref,
                                            const ChrfOptions& opts = {}) {
  const auto h = detail::char_ngrams(hyp, opts.char_order);
  const auto r = detail::char_ngrams(ref, opts.char_order);
  std::vector<long> stats;
  for (std::size_t n = 0; n < h.size(); ++n) {
    long hyp_count = 0;
    long matches = 0;
    long ref_count = 0;
    for (const auto& [gram, count] : h[n]) {
      hyp_count += count;
      if (auto it = r[n].find(gram); it != r[n].end()) matches += std::min(count, it->second);
    }
    for (const auto& [gram, count] : r[n]) ref_count += count;
    stats.push_back(r[n].empty() ? 0 : hyp_count);
    stats.push_back(ref_count);
    stats.push_back(matches);
  }
  return stats;
}

inline double chrf_from_stats(const std::vector<long>& stats, const ChrfOptions& opts = {}) {
  constexpr double eps = 1e-16;
  const double factor = opts.beta * opts.beta;
  double score = 0.0;
  double avg_prec = 0.0;
  double avg_rec = 0.0;
  int effective_order = 0;
  for (int i = 0; i < opts.char_order; ++i) {
    const auto n_hyp = static_cast<double>(stats[3 * i]);
    const auto n_ref = static_cast<double>(stats[3 * i + 1]);
    const auto n_match = static_cast<double>(stats[3 * i + 2]);
    const double prec = n_hyp > 0 ? n_match / n_hyp : eps;
    const double rec = n_ref > 0 ? n_match / n_ref : eps;
    const double denom = factor * prec + rec;
    score += denom > 0 ? (1 + factor) * prec * rec / denom : eps;
    if (n_hyp > 0 && n_ref > 0) {
      avg_prec += prec;
      avg_rec += rec;
      ++effective_order;
    }
  }
  if (opts.eps_smoothing) return 100.0 * score / opts.char_order;
  if (effective_order == 0) return 0.0;
  avg_prec /= effective_order;
  avg_rec /= effective_order;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
}

inline MtScore chrf(std::span<const std::string> hypotheses, std::span<const std::string> references,
                    const ChrfOptions& opts = {}) {
  detail::check_inputs(hypotheses, references);
  std::vector<long> sum(static_cast<std::size_t>(3 * opts.char_order), 0);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto st = chrf_segment_stats(hypotheses[i], references[i], opts);
    for (std::size_t k = 0; k < st.size(); ++k) sum[k] += st[k];
  }
  std::string signature = opts.eps_smoothing ? "nrefs:1|case:mixed|eff:no|nc:" : "nrefs:1|case:mixed|eff:yes|nc:";
  signature += std::to_string(opts.char_order) + "|nw:0|space:no|version:2.0.0";
  return {MtMetric::ChrF, chrf_from_stats(sum, opts), std::move(signature)};
}

}  // namespace transart::metrics
