#pragma once

// Question corpora: the record type that flows through every pipeline stage,
// its canonical JSON-lines serialization, and id alignment of two corpora.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "transart/error.hpp"

namespace transart {

enum class OriginKind { Human, Machine };

/// Who wrote a text. Machine origins always name the producing system.
struct Origin {
  OriginKind kind = OriginKind::Human;
  std::optional<std::string> system;
  std::optional<std::string> pivot;
  std::optional<std::string> direction;

  static Origin human() { return {}; }

  static Origin machine(std::string system, std::optional<std::string> pivot,
                        std::optional<std::string> direction) {
    return {OriginKind::Machine, std::move(system), std::move(pivot), std::move(direction)};
  }

  bool is_machine() const { return kind == OriginKind::Machine; }

  friend bool operator==(const Origin&, const Origin&) = default;
};

struct Sample {
  std::string id;
  std::optional<std::string> image_id;
  std::string text;
  std::optional<std::string> answer;
  std::string language;
  Origin origin;
  std::vector<std::string> tags;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Corpus {
  std::vector<Sample> samples;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct ParallelCorpus {
  std::vector<std::pair<Sample, Sample>> pairs;
};

struct AlignResult {
  ParallelCorpus parallel;
  std::vector<std::string> left_only;
  std::vector<std::string> right_only;
};

namespace detail {

inline bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

inline bool valid_language(const std::string& lang) {
  if (lang.size() < 2 || lang.size() > 3) return false;
  return std::all_of(lang.begin(), lang.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace detail

/// Checks the Origin and Sample invariants; throws InvalidField on violation.
inline void validate(const Sample& s) {
  if (s.id.empty()) fail("InvalidField", "sample id must be non-empty");
  if (detail::is_blank(s.text)) fail("InvalidField", "sample " + s.id + ": text is empty");
  if (!detail::valid_language(s.language)) {
    fail("InvalidField", "sample " + s.id + ": language '" + s.language + "' is not [a-z]{2,3}");
  }
  const Origin& o = s.origin;
  if (o.kind == OriginKind::Human && (o.system || o.pivot || o.direction)) {
    fail("InvalidField", "sample " + s.id + ": human origin carries machine metadata");
  }
  if (o.kind == OriginKind::Machine && !o.system) {
    fail("InvalidField", "sample " + s.id + ": machine origin without system");
  }
}

/// Checks every sample plus id uniqueness; throws DuplicateId.
inline void validate(const Corpus& corpus) {
  std::unordered_set<std::string> seen;
  for (const Sample& s : corpus.samples) {
    validate(s);
    if (!seen.insert(s.id).second) fail("DuplicateId", s.id);
  }
}

/// Single language shared by all samples, nullopt for an empty corpus.
/// Throws MixedLanguageCorpus when languages differ.
inline std::optional<std::string> corpus_language(const Corpus& corpus) {
  if (corpus.empty()) return std::nullopt;
  const std::string& lang = corpus.samples.front().language;
  for (const Sample& s : corpus.samples) {
    if (s.language != lang) {
      fail("MixedLanguageCorpus", "corpus mixes '" + lang + "' and '" + s.language + "'");
    }
  }
  return lang;
}

// ---------------------------------------------------------------------------
// JSON mapping

inline nlohmann::ordered_json to_json(const Origin& o) {
  nlohmann::ordered_json j;
  j["kind"] = o.kind == OriginKind::Human ? "human" : "machine";
  if (o.system) j["system"] = *o.system;
  if (o.pivot) j["pivot"] = *o.pivot;
  if (o.direction) j["direction"] = *o.direction;
  return j;
}

inline nlohmann::ordered_json to_json(const Sample& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  if (s.image_id) j["image_id"] = *s.image_id;
  j["text"] = s.text;
  if (s.answer) j["answer"] = *s.answer;
  j["language"] = s.language;
  j["origin"] = to_json(s.origin);
  j["tags"] = s.tags;
  return j;
}

/// One canonical line (no trailing newline).
inline std::string to_jsonl_line(const Sample& s) { return to_json(s).dump(); }

struct LoadOptions {
  /// Accept unknown keys and default a missing origin (human) and tags (empty).
  bool lenient = false;
};

namespace detail {

inline std::string require_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) fail("MissingField", key);
  if (!it->is_string()) fail("InvalidField", std::string(key) + " must be a string");
  return it->get<std::string>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail("InvalidField", std::string(key) + " must be a string");
  return it->get<std::string>();
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      fail("UnknownField", it.key());
    }
  }
}

}  // namespace detail

inline Origin origin_from_json(const nlohmann::json& j, const LoadOptions& opts = {}) {
  if (!j.is_object()) fail("InvalidField", "origin must be an object");
  if (!opts.lenient) detail::reject_unknown(j, {"kind", "system", "pivot", "direction"});
  const std::string kind = detail::require_string(j, "kind");
  Origin o;
  if (kind == "human") {
    o.kind = OriginKind::Human;
  } else if (kind == "machine") {
    o.kind = OriginKind::Machine;
  } else {
    fail("InvalidField", "origin.kind must be 'human' or 'machine', got '" + kind + "'");
  }
  o.system = detail::optional_string(j, "system");
  o.pivot = detail::optional_string(j, "pivot");
  o.direction = detail::optional_string(j, "direction");
  return o;
}

inline Sample sample_from_json(const nlohmann::json& j, const LoadOptions& opts = {}) {
  if (!j.is_object()) fail("InvalidField", "record must be a JSON object");
  if (!opts.lenient) {
    detail::reject_unknown(j, {"id", "image_id", "text", "answer", "language", "origin", "tags"});
  }
  Sample s;
  s.id = detail::require_string(j, "id");
  s.image_id = detail::optional_string(j, "image_id");
  s.text = detail::require_string(j, "text");
  s.answer = detail::optional_string(j, "answer");
  s.language = detail::require_string(j, "language");

  auto origin = j.find("origin");
  if (origin == j.end() || origin->is_null()) {
    if (!opts.lenient) fail("MissingField", "origin");
    s.origin = Origin::human();
  } else {
    s.origin = origin_from_json(*origin, opts);
  }

  auto tags = j.find("tags");
  if (tags == j.end() || tags->is_null()) {
    if (!opts.lenient) fail("MissingField", "tags");
  } else {
    if (!tags->is_array()) fail("InvalidField", "tags must be an array");
    for (const auto& t : *tags) {
      if (!t.is_string()) fail("InvalidField", "tags must contain strings");
      s.tags.push_back(t.get<std::string>());
    }
  }
  validate(s);
  return s;
}

/// Parses JSON-lines text. Errors carry the 1-based line number in the message.
/// Blank lines are skipped.
inline Corpus parse_corpus(std::istream& in, const LoadOptions& opts = {}) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("ParseError", "line " + std::to_string(line_no) + ": " + e.what());
    }
    Sample s;
    try {
      s = sample_from_json(j, opts);
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(s.id).second) fail("DuplicateId", s.id);
    corpus.samples.push_back(std::move(s));
  }
  return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open " + path.string());
  return parse_corpus(in, opts);
}

inline void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Sample& s : corpus.samples) out << to_jsonl_line(s) << '\n';
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  validate(corpus);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("IoError", "cannot write " + path.string());
  write_corpus(corpus, out);
  out.flush();
  if (!out) fail("IoError", "write failed for " + path.string());
}

/// Pairs samples sharing an id, in `left` order. Ids found on one side only are
/// reported, never treated as errors.
inline AlignResult align(const Corpus& left, const Corpus& right) {
  std::unordered_map<std::string, const Sample*> by_id;
  for (const Sample& s : right.samples) by_id.emplace(s.id, &s);

  AlignResult result;
  std::unordered_set<std::string> matched;
  for (const Sample& s : left.samples) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      result.left_only.push_back(s.id);
    } else {
      result.parallel.pairs.emplace_back(s, *it->second);
      matched.insert(s.id);
    }
  }
  for (const Sample& s : right.samples) {
    if (!matched.count(s.id)) result.right_only.push_back(s.id);
  }
  return result;
}

}  // namespace transart
