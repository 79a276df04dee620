#pragma once

// Backend-agnostic translation orchestration: decoding settings, the wire
// messages shared by every backend, round-trip and translate-test pipelines.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "transart/corpus.hpp"
#include "transart/error.hpp"

namespace transart {

struct BeamSearch {
  int size = 5;
  friend bool operator==(const BeamSearch&, const BeamSearch&) = default;
};

struct NucleusSampling {
  double p = 0.9;
  friend bool operator==(const NucleusSampling&, const NucleusSampling&) = default;
};

struct DecodingSpec {
  std::variant<BeamSearch, NucleusSampling> strategy = BeamSearch{};
  int no_repeat_ngram = 0;  // 0 disables the constraint
  int max_tokens = 128;
  std::optional<std::uint64_t> seed;

  bool is_beam() const { return std::holds_alternative<BeamSearch>(strategy); }
  bool is_nucleus() const { return std::holds_alternative<NucleusSampling>(strategy); }

  friend bool operator==(const DecodingSpec&, const DecodingSpec&) = default;
};

inline void validate(const DecodingSpec& spec) {
  if (const auto* beam = std::get_if<BeamSearch>(&spec.strategy); beam && beam->size < 1) {
    fail("InvalidDecoding", "beam size must be >= 1");
  }
  if (const auto* nuc = std::get_if<NucleusSampling>(&spec.strategy);
      nuc && !(nuc->p > 0.0 && nuc->p <= 1.0)) {
    fail("InvalidDecoding", "nucleus p must be in (0, 1]");
  }
  if (spec.no_repeat_ngram < 0) fail("InvalidDecoding", "no_repeat_ngram must be >= 0");
  if (spec.max_tokens < 1) fail("InvalidDecoding", "max_tokens must be >= 1");
}

/// Round-trip forward leg (source -> pivot): nucleus sampling, p = 0.9.
inline DecodingSpec default_forward_decoding() {
  return DecodingSpec{NucleusSampling{0.9}, 5, 128, std::nullopt};
}

/// Round-trip backward leg (pivot -> source): beam search, 5 beams.
inline DecodingSpec default_backward_decoding() {
  return DecodingSpec{BeamSearch{5}, 5, 128, std::nullopt};
}

/// Translate-test evaluation sets: beam search, 4 beams.
inline DecodingSpec default_translate_test_decoding() {
  return DecodingSpec{BeamSearch{4}, 0, 128, std::nullopt};
}

/// Parses "beam:5" or "nucleus:0.9".
inline DecodingSpec parse_strategy(std::string_view text, DecodingSpec base) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string value = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
  try {
    if (name == "beam") {
      base.strategy = BeamSearch{value.empty() ? 5 : std::stoi(value)};
    } else if (name == "nucleus") {
      base.strategy = NucleusSampling{value.empty() ? 0.9 : std::stod(value)};
    } else {
      fail("InvalidDecoding", "unknown decoding strategy '" + std::string(name) + "'");
    }
  } catch (const std::logic_error&) {
    fail("InvalidDecoding", "bad decoding value in '" + std::string(text) + "'");
  }
  validate(base);
  return base;
}

// ---------------------------------------------------------------------------
// Wire messages

inline nlohmann::ordered_json to_json(const DecodingSpec& spec) {
  nlohmann::ordered_json j;
  if (const auto* beam = std::get_if<BeamSearch>(&spec.strategy)) {
    j["strategy"] = "beam";
    j["beam_size"] = beam->size;
  } else {
    j["strategy"] = "nucleus";
    j["top_p"] = std::get<NucleusSampling>(spec.strategy).p;
  }
  j["no_repeat_ngram"] = spec.no_repeat_ngram;
  j["max_tokens"] = spec.max_tokens;
  j["seed"] = spec.seed ? nlohmann::ordered_json(*spec.seed) : nlohmann::ordered_json(nullptr);
  return j;
}

inline DecodingSpec decoding_from_json(const nlohmann::json& j) {
  DecodingSpec spec;
  const std::string strategy = j.at("strategy").get<std::string>();
  if (strategy == "beam") {
    spec.strategy = BeamSearch{j.at("beam_size").get<int>()};
  } else if (strategy == "nucleus") {
    spec.strategy = NucleusSampling{j.at("top_p").get<double>()};
  } else {
    fail("InvalidDecoding", "unknown strategy '" + strategy + "'");
  }
  spec.no_repeat_ngram = j.value("no_repeat_ngram", 0);
  spec.max_tokens = j.value("max_tokens", 128);
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) spec.seed = it->get<std::uint64_t>();
  validate(spec);
  return spec;
}

struct TranslationRequest {
  std::vector<std::string> texts;
  std::string source;
  std::string target;
  DecodingSpec decoding;
};

struct TranslationResponse {
  std::vector<std::string> translations;
};

inline nlohmann::ordered_json to_json(const TranslationRequest& req) {
  nlohmann::ordered_json j;
  j["texts"] = req.texts;
  j["source"] = req.source;
  j["target"] = req.target;
  j["decoding"] = to_json(req.decoding);
  return j;
}

inline TranslationRequest request_from_json(const nlohmann::json& j) {
  TranslationRequest req;
  req.texts = j.at("texts").get<std::vector<std::string>>();
  req.source = j.at("source").get<std::string>();
  req.target = j.at("target").get<std::string>();
  req.decoding = decoding_from_json(j.at("decoding"));
  return req;
}

inline nlohmann::ordered_json to_json(const TranslationResponse& resp) {
  nlohmann::ordered_json j;
  j["translations"] = resp.translations;
  return j;
}

inline TranslationResponse response_from_json(const nlohmann::json& j) {
  return TranslationResponse{j.at("translations").get<std::vector<std::string>>()};
}

// ---------------------------------------------------------------------------
// Backends

/// Any MT system. Implementations must return exactly one translation per
/// input, in input order, and be safe to call from several threads.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;

  /// Identifier recorded as Origin::system on translated samples.
  virtual std::string id() const = 0;

  virtual std::vector<std::string> translate_batch(std::span<const std::string> texts,
                                                   const std::string& source,
                                                   const std::string& target,
                                                   const DecodingSpec& spec) = 0;
};

/// Checked entry point for every backend call. Empty strings are not sent to
/// the backend; they come back as empty strings in place.
inline std::vector<std::string> translate(TranslationBackend& backend,
                                          std::span<const std::string> texts,
                                          const std::string& source, const std::string& target,
                                          const DecodingSpec& spec) {
  if (texts.empty()) fail("EmptyBatch", "translate called with no texts");
  if (source == target) fail("SameLanguage", "source and target are both '" + source + "'");
  validate(spec);

  std::vector<std::string> payload;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!texts[i].empty()) {
      payload.push_back(texts[i]);
      positions.push_back(i);
    }
  }

  std::vector<std::string> out(texts.size());
  if (payload.empty()) return out;

  std::vector<std::string> translated = backend.translate_batch(payload, source, target, spec);
  if (translated.size() != payload.size()) {
    fail("BackendProtocolError", "backend returned " + std::to_string(translated.size()) +
                                     " translations for " + std::to_string(payload.size()) + " texts");
  }
  for (std::size_t k = 0; k < positions.size(); ++k) out[positions[k]] = std::move(translated[k]);
  return out;
}

inline std::vector<std::string> texts_of(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const Sample& s : corpus.samples) texts.push_back(s.text);
  return texts;
}

/// Round-trip translation L -> pivot -> L. Only text and origin change.
inline Corpus roundtrip(const Corpus& corpus, const std::string& pivot, TranslationBackend& backend,
                        const DecodingSpec& forward = default_forward_decoding(),
                        const DecodingSpec& backward = default_backward_decoding()) {
  const auto lang = corpus_language(corpus);
  if (!lang) return corpus;
  if (*lang == pivot) fail("SameLanguage", "pivot equals corpus language '" + pivot + "'");

  const std::vector<std::string> source = texts_of(corpus);
  const std::vector<std::string> pivoted = translate(backend, source, *lang, pivot, forward);
  std::vector<std::string> restored = translate(backend, pivoted, pivot, *lang, backward);

  Corpus out = corpus;
  const std::string direction = *lang + "-" + pivot + "-" + *lang;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i].text = std::move(restored[i]);
    out.samples[i].origin = Origin::machine(backend.id(), pivot, direction);
  }
  return out;
}

/// Translates an evaluation corpus written in `corpus_lang` into English.
inline Corpus translate_test(const Corpus& corpus, const std::string& corpus_lang,
                             TranslationBackend& backend,
                             const DecodingSpec& spec = default_translate_test_decoding()) {
  if (corpus_lang == "en") fail("SameLanguage", "translate-test source is already 'en'");
  const auto lang = corpus_language(corpus);
  if (!lang) return corpus;
  if (*lang != corpus_lang) {
    fail("LanguageMismatch", "corpus language '" + *lang + "' differs from declared '" + corpus_lang + "'");
  }

  std::vector<std::string> translated = translate(backend, texts_of(corpus), corpus_lang, "en", spec);
  Corpus out = corpus;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    Sample& s = out.samples[i];
    s.text = std::move(translated[i]);
    s.language = "en";
    s.origin = Origin::machine(backend.id(), std::nullopt, corpus_lang + "-en");
  }
  return out;
}

}  // namespace transart
