#pragma once

// Deterministic stand-in for an MT system. It reproduces two well-documented
// translation artifacts, case flattening and lexical simplification, so the
// detector and diversity metrics can be exercised without a neural model.
//
//   forward (L -> pivot):  lowercase, reverse token order, prefix each token with "º"
//   backward (pivot -> L): strip "º", restore order, apply the simplification
//                          dictionary, collapse whitespace
//
// A text is treated as pivot-side when every token carries the "º" marker.
// Under beam decoding every dictionary hit is substituted; under nucleus
// decoding a seeded hash keeps each substitution with probability p.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "transart/error.hpp"
#include "transart/hashing.hpp"
#include "transart/translation.hpp"
#include "transart/unicode.hpp"

namespace transart {

using Dictionary = std::map<std::string, std::string>;

inline Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("DictionaryMissing", "cannot open dictionary " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail("InvalidDictionary", path.string() + ": " + e.what());
  }
  if (!j.is_object()) fail("InvalidDictionary", path.string() + ": expected a JSON object");
  Dictionary dict;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) fail("InvalidDictionary", "value for '" + it.key() + "' is not a string");
    dict.emplace(it.key(), it.value().get<std::string>());
  }
  return dict;
}

class MockBackend final : public TranslationBackend {
 public:
  static constexpr std::string_view kPivotMark = "\xC2\xBA";  // U+00BA

  explicit MockBackend(Dictionary dictionary, std::uint64_t seed = 0)
      : dictionary_(std::move(dictionary)), seed_(seed) {}

  static MockBackend from_file(const std::filesystem::path& path, std::uint64_t seed = 0) {
    return MockBackend(load_dictionary(path), seed);
  }

  std::string id() const override { return "mock"; }

  std::vector<std::string> translate_batch(std::span<const std::string> texts, const std::string&,
                                           const std::string&, const DecodingSpec& spec) override {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) {
      out.push_back(is_pivot_form(t) ? backward(t, spec) : forward(t));
    }
    return out;
  }

  static std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
  }

  static bool is_pivot_form(std::string_view text) {
    const auto tokens = split_ws(text);
    if (tokens.empty()) return false;
    for (const auto& t : tokens) {
      if (!t.starts_with(kPivotMark)) return false;
    }
    return true;
  }

  static std::string forward(std::string_view text) {
    auto tokens = split_ws(unicode::lower(text));
    std::string out;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
      if (!out.empty()) out += ' ';
      out += kPivotMark;
      out += *it;
    }
    return out;
  }

  std::string backward(std::string_view text, const DecodingSpec& spec) const {
    auto tokens = split_ws(text);
    std::vector<std::string> restored;
    restored.reserve(tokens.size());
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
      std::string tok = *it;
      if (tok.starts_with(kPivotMark)) tok.erase(0, kPivotMark.size());
      if (!tok.empty()) restored.push_back(std::move(tok));
    }

    const std::uint64_t seed = spec.seed.value_or(seed_);
    std::string out;
    for (std::size_t i = 0; i < restored.size(); ++i) {
      std::string tok = simplify(restored[i], i, spec, seed);
      if (!out.empty()) out += ' ';
      out += tok;
    }
    return out;
  }

  const Dictionary& dictionary() const { return dictionary_; }

 private:
  // Substitutes the word core, keeping leading and trailing ASCII punctuation.
  std::string simplify(const std::string& token, std::size_t index, const DecodingSpec& spec,
                       std::uint64_t seed) const {
    std::size_t begin = 0;
    std::size_t end = token.size();
    while (begin < end && std::ispunct(static_cast<unsigned char>(token[begin]))) ++begin;
    while (end > begin && std::ispunct(static_cast<unsigned char>(token[end - 1]))) --end;
    const std::string core = token.substr(begin, end - begin);
    auto hit = dictionary_.find(core);
    if (hit == dictionary_.end()) return token;

    if (const auto* nucleus = std::get_if<NucleusSampling>(&spec.strategy)) {
      const std::string key = std::to_string(index) + '\x1f' + core;
      if (unit_interval(hash64(key, seed)) >= nucleus->p) return token;
    }
    return token.substr(0, begin) + hit->second + token.substr(end);
  }

  Dictionary dictionary_;
  std::uint64_t seed_;
};

}  // namespace transart
