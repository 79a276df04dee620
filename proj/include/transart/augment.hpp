#pragma once

// MERGE and TAG training-set augmentation.
//
// MERGE concatenates human samples with machine (round-trip) samples, whose
// ids get a "#mt" suffix. TAG additionally prefixes every machine-origin text
// with a tag token. Both double the data, so their manifests carry
// steps_scale = 0.5: the consumer should halve the training steps.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "transart/corpus.hpp"
#include "transart/error.hpp"

namespace transart::augment {

enum class Method { Merge, Tag };

inline constexpr std::string_view kMachineIdSuffix = "#mt";

struct TagPolicy {
  std::string token = "[MT]";
};

inline void validate(const TagPolicy& policy) {
  if (policy.token.empty()) fail("InvalidTagToken", "tag token is empty");
  if (std::any_of(policy.token.begin(), policy.token.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
    fail("InvalidTagToken", "tag token '" + policy.token + "' contains whitespace");
  }
}

struct ManifestInput {
  std::string path;
  std::size_t count = 0;
  std::map<std::string, std::size_t> origins;  // "human"/"machine" -> count
};

struct AugmentManifest {
  Method method = Method::Merge;
  std::vector<ManifestInput> inputs;
  std::size_t output_count = 0;
  double steps_scale = 1.0;
  std::optional<std::string> tag_token;
  std::string created_at;
};

/// Current UTC time as ISO-8601 with a trailing "Z".
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline ManifestInput describe_input(const Corpus& corpus) {
  ManifestInput in;
  if (auto it = corpus.meta.find("source"); it != corpus.meta.end()) in.path = it->second;
  in.count = corpus.size();
  for (const Sample& s : corpus.samples) ++in.origins[s.origin.is_machine() ? "machine" : "human"];
  return in;
}

inline nlohmann::ordered_json to_json(const AugmentManifest& m) {
  nlohmann::ordered_json j;
  j["method"] = m.method == Method::Merge ? "merge" : "tag";
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : m.inputs) {
    nlohmann::ordered_json e;
    e["path"] = in.path;
    e["count"] = in.count;
    e["origins"] = in.origins;
    j["inputs"].push_back(std::move(e));
  }
  j["output_count"] = m.output_count;
  j["steps_scale"] = m.steps_scale;
  j["tag_token"] = m.tag_token ? nlohmann::ordered_json(*m.tag_token) : nlohmann::ordered_json(nullptr);
  j["created_at"] = m.created_at;
  return j;
}

/// Sum of input counts equals the output count.
inline bool reconciles(const AugmentManifest& m) {
  std::size_t total = 0;
  for (const auto& in : m.inputs) total += in.count;
  return total == m.output_count;
}

struct Augmented {
  Corpus corpus;
  AugmentManifest manifest;
};

namespace detail {

inline void check_same_language(const Corpus& human, const Corpus& machine) {
  std::optional<std::string> lang_h;
  std::optional<std::string> lang_m;
  try {
    lang_h = corpus_language(human);
    lang_m = corpus_language(machine);
  } catch (const Error& e) {
    fail("MixedLanguage", e.what());
  }
  if (lang_h && lang_m && *lang_h != *lang_m) {
    fail("MixedLanguage", "human corpus is '" + *lang_h + "', machine corpus is '" + *lang_m + "'");
  }
}

inline Augmented concat(const Corpus& human, const Corpus& machine, const Corpus& machine_out, Method method,
                        std::optional<std::string> tag_token, std::string created_at) {
  check_same_language(human, machine);
  Augmented out;
  std::unordered_set<std::string> ids;
  out.corpus.samples.reserve(human.size() + machine_out.size());
  for (const Sample& s : human.samples) {
    if (!ids.insert(s.id).second) fail("DuplicateId", s.id);
    out.corpus.samples.push_back(s);
  }
  for (const Sample& s : machine_out.samples) {
    Sample copy = s;
    copy.id += kMachineIdSuffix;
    if (!ids.insert(copy.id).second) fail("IdCollisionAfterSuffix", copy.id);
    out.corpus.samples.push_back(std::move(copy));
  }

  AugmentManifest& m = out.manifest;
  m.method = method;
  m.inputs = {describe_input(human), describe_input(machine)};
  m.output_count = out.corpus.size();
  m.steps_scale = (!human.empty() && !machine.empty()) ? 0.5 : 1.0;
  m.tag_token = std::move(tag_token);
  m.created_at = created_at.empty() ? utc_timestamp() : std::move(created_at);
  return out;
}

}  // namespace detail

/// Human block followed by the machine block with "#mt"-suffixed ids.
inline Augmented merge(const Corpus& human, const Corpus& machine, std::string created_at = {}) {
  return detail::concat(human, machine, machine, Method::Merge, std::nullopt, std::move(created_at));
}

/// Prefixes machine-origin texts with "<token> " and records the token in tags.
/// Human-origin samples are untouched.
inline Corpus tag(const Corpus& corpus, const TagPolicy& policy = {}) {
  validate(policy);
  Corpus out = corpus;
  for (Sample& s : out.samples) {
    if (!s.origin.is_machine()) continue;
    if (s.text.starts_with(policy.token)) fail("AlreadyTagged", s.id);
    s.text = policy.token + " " + s.text;
    s.tags.push_back(policy.token);
  }
  return out;
}

/// Exact inverse of tag().
inline Corpus untag(const Corpus& corpus, const TagPolicy& policy = {}) {
  validate(policy);
  const std::string prefix = policy.token + " ";
  Corpus out = corpus;
  for (Sample& s : out.samples) {
    auto it = std::find(s.tags.rbegin(), s.tags.rend(), policy.token);
    if (it == s.tags.rend()) continue;
    if (!s.text.starts_with(prefix)) fail("MalformedTag", s.id);
    s.text.erase(0, prefix.size());
    s.tags.erase(std::next(it).base());
  }
  return out;
}

/// TAG as trained: human samples, then tagged machine samples.
inline Augmented merge_tag(const Corpus& human, const Corpus& machine, const TagPolicy& policy = {},
                           std::string created_at = {}) {
  const Corpus tagged = tag(machine, policy);
  return detail::concat(human, machine, tagged, Method::Tag, policy.token, std::move(created_at));
}

}  // namespace transart::augment
