#pragma once

// Human-vs-machine origin classifier. Texts are mapped to L2-normalized hashed
// character and word n-gram counts; a logistic regression over those features
// gives the human-likeness score p_h(x) = sigmoid(w . phi(x) + b).

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "transart/corpus.hpp"
#include "transart/error.hpp"
#include "transart/hashing.hpp"
#include "transart/metrics/diversity.hpp"
#include "transart/unicode.hpp"

namespace transart::detector {

struct NgramRange {
  int min = 1;
  int max = 1;
  friend bool operator==(const NgramRange&, const NgramRange&) = default;
};

struct FeatureConfig {
  NgramRange char_ngrams{3, 5};
  NgramRange word_ngrams{1, 2};
  std::uint32_t hash_dim = 1u << 18;
  std::uint64_t hash_seed = 0;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

inline void validate(const FeatureConfig& cfg) {
  auto check_range = [](const NgramRange& r, const char* what) {
    if (r.min < 1 || r.max < r.min) fail("InvalidConfig", std::string(what) + " n-gram range is empty");
  };
  check_range(cfg.char_ngrams, "char");
  check_range(cfg.word_ngrams, "word");
  if (!std::has_single_bit(cfg.hash_dim) || cfg.hash_dim < (1u << 10)) {
    fail("InvalidConfig", "hash_dim must be a power of two >= 1024");
  }
}

/// Sorted (index, value) pairs with unique indices.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

inline SparseVector featurize(std::string_view text, const FeatureConfig& cfg) {
  validate(cfg);
  const std::uint32_t mask = cfg.hash_dim - 1;
  std::map<std::uint32_t, double> counts;

  const std::u32string chars = unicode::to_u32(unicode::nfc_lower(text));
  for (int n = cfg.char_ngrams.min; n <= cfg.char_ngrams.max; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= chars.size(); ++i) {
      const std::string key = "c" + unicode::to_utf8(std::u32string_view(chars).substr(i, width));
      counts[static_cast<std::uint32_t>(hash64(key, cfg.hash_seed)) & mask] += 1.0;
    }
  }

  const metrics::TokenList tokens = metrics::tokenize(text);
  for (int n = cfg.word_ngrams.min; n <= cfg.word_ngrams.max; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      std::string key = "w";
      for (std::size_t k = 0; k < width; ++k) {
        if (k) key += '\x1f';
        key += tokens[i + k];
      }
      counts[static_cast<std::uint32_t>(hash64(key, cfg.hash_seed)) & mask] += 1.0;
    }
  }

  double norm = 0.0;
  for (const auto& [idx, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  SparseVector v;
  v.reserve(counts.size());
  for (const auto& [idx, c] : counts) v.emplace_back(idx, c / norm);
  return v;
}

struct DetectorModel {
  std::vector<float> weights;
  float bias = 0.0f;
  FeatureConfig features;
  std::uint64_t train_seed = 0;
  double validation_accuracy = 0.0;

  /// All-zero weights of the configured dimension.
  static DetectorModel zero(const FeatureConfig& cfg, float bias = 0.0f) {
    DetectorModel m;
    m.features = cfg;
    m.weights.assign(cfg.hash_dim, 0.0f);
    m.bias = bias;
    return m;
  }

  friend bool operator==(const DetectorModel&, const DetectorModel&) = default;
};

inline double linear_score(const DetectorModel& model, const SparseVector& x) {
  double z = model.bias;
  for (const auto& [idx, v] : x) z += static_cast<double>(model.weights[idx]) * v;
  return z;
}

/// Logistic function kept strictly inside (0, 1).
inline double sigmoid(double z) {
  const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(p, DBL_MIN, std::nextafter(1.0, 0.0));
}

/// Human-likeness p_h(x).
inline double score(const DetectorModel& model, std::string_view text) {
  if (model.weights.size() != model.features.hash_dim) {
    fail("InvalidModel", "weight vector length does not match hash_dim");
  }
  return sigmoid(linear_score(model, featurize(text, model.features)));
}

inline std::vector<double> score_all(const DetectorModel& model, const Corpus& corpus) {
  std::vector<double> scores;
  scores.reserve(corpus.size());
  for (const Sample& s : corpus.samples) scores.push_back(score(model, s.text));
  return scores;
}

/// Scores exactly 0.5 count as machine.
inline bool predicts_human(double p) { return p > 0.5; }

struct TrainOptions {
  int epochs = 5;
  double learning_rate = 0.1;
  double l2 = 1e-6;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.1;
};

namespace detail {

// Fisher-Yates over a 64-bit Mersenne Twister; std::shuffle is not portable
// across standard libraries.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

struct Example {
  SparseVector x;
  double label;
};

}  // namespace detail

/// Logistic regression by seeded shuffled SGD on a class-balanced sample.
/// The larger class is downsampled; a class-balanced holdout, paired by id
/// where ids match, measures validation_accuracy. Identical (data, cfg, options) give identical models.
inline DetectorModel train(const Corpus& human, const Corpus& machine, const FeatureConfig& cfg,
                           const TrainOptions& opts = {}) {
  validate(cfg);
  if (human.empty() || machine.empty()) fail("EmptyCorpus", "training needs both human and machine samples");
  if (opts.epochs < 1 || !(opts.learning_rate > 0.0) || opts.l2 < 0.0) {
    fail("InvalidConfig", "epochs >= 1, learning_rate > 0 and l2 >= 0 required");
  }

  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> h_idx(human.size());
  std::vector<std::size_t> m_idx(machine.size());
  std::iota(h_idx.begin(), h_idx.end(), 0);
  std::iota(m_idx.begin(), m_idx.end(), 0);
  detail::shuffle(h_idx, rng);
  detail::shuffle(m_idx, rng);

  const std::size_t per_class = std::min(h_idx.size(), m_idx.size());
  if (per_class < 2) fail("DegenerateSingleClass", "each class needs at least two samples after balancing");
  const auto holdout = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(opts.holdout_fraction * static_cast<double>(per_class))), 1,
      per_class - 1);

  // Machine samples sharing an id with a held-out human sample are held out
  // too, so a text and its translation never straddle the split.
  {
    std::unordered_map<std::string, std::size_t> machine_by_id;
    for (std::size_t i : m_idx) machine_by_id.emplace(machine.samples[i].id, i);
    std::vector<std::size_t> reordered;
    std::vector<bool> taken(machine.size(), false);
    for (std::size_t k = 0; k < holdout; ++k) {
      auto it = machine_by_id.find(human.samples[h_idx[k]].id);
      if (it != machine_by_id.end() && !taken[it->second]) {
        taken[it->second] = true;
        reordered.push_back(it->second);
      }
    }
    for (std::size_t i : m_idx) {
      if (!taken[i]) reordered.push_back(i);
    }
    m_idx = std::move(reordered);
  }

  std::vector<detail::Example> train_set;
  std::vector<detail::Example> val_set;
  for (std::size_t k = 0; k < per_class; ++k) {
    auto& dest = k < holdout ? val_set : train_set;
    dest.push_back({featurize(human.samples[h_idx[k]].text, cfg), 1.0});
    dest.push_back({featurize(machine.samples[m_idx[k]].text, cfg), 0.0});
  }

  std::vector<double> w(cfg.hash_dim, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    detail::shuffle(order, rng);
    for (std::size_t i : order) {
      const auto& ex = train_set[i];
      double z = b;
      for (const auto& [idx, v] : ex.x) z += w[idx] * v;
      const double g = sigmoid(z) - ex.label;
      for (const auto& [idx, v] : ex.x) w[idx] -= opts.learning_rate * (g * v + opts.l2 * w[idx]);
      b -= opts.learning_rate * g;
    }
  }

  DetectorModel model;
  model.features = cfg;
  model.weights.assign(w.begin(), w.end());
  model.bias = static_cast<float>(b);
  model.train_seed = opts.seed;

  std::size_t correct = 0;
  for (const auto& ex : val_set) {
    const bool human_pred = predicts_human(sigmoid(linear_score(model, ex.x)));
    if (human_pred == (ex.label == 1.0)) ++correct;
  }
  model.validation_accuracy = static_cast<double>(correct) / static_cast<double>(val_set.size());
  return model;
}

/// Accuracy of round(p_h) against origin labels on a class-balanced set made
/// of the first min(|human|, |machine|) samples of each corpus.
inline double evaluate(const DetectorModel& model, const Corpus& human, const Corpus& machine) {
  if (human.empty() || machine.empty()) fail("EmptyCorpus", "evaluation needs both classes");
  const std::size_t k = std::min(human.size(), machine.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (predicts_human(score(model, human.samples[i].text))) ++correct;
    if (!predicts_human(score(model, machine.samples[i].text))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(2 * k);
}

struct SplitResult {
  Corpus human_like;
  Corpus nmt_like;
  double threshold_score = 0.0;
};

/// Equal-size split by human-likeness. Ranking is (p_h descending, id
/// ascending); the top ceil(n/2) samples are human-like. Each half keeps the
/// input order.
inline SplitResult split(const DetectorModel& model, const Corpus& corpus) {
  if (corpus.empty()) fail("EmptyCorpus", "nothing to split");
  const std::vector<double> scores = score_all(model, corpus);
  std::vector<std::size_t> rank(corpus.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return corpus.samples[a].id < corpus.samples[b].id;
  });

  const std::size_t n_human = (corpus.size() + 1) / 2;
  std::vector<bool> is_human(corpus.size(), false);
  for (std::size_t k = 0; k < n_human; ++k) is_human[rank[k]] = true;

  SplitResult result;
  result.threshold_score = scores[rank[n_human - 1]];
  result.human_like.meta = corpus.meta;
  result.nmt_like.meta = corpus.meta;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (is_human[i] ? result.human_like : result.nmt_like).samples.push_back(corpus.samples[i]);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Model file: "TLDM1", feature config, bias, weights (little-endian f32),
// then a trailer with the training seed and validation accuracy.

inline constexpr std::string_view kModelMagic = "TLDM1";

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(buf), std::end(buf));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) fail("TruncatedFile", "model file ends early");
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(buf), std::end(buf));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_model(const DetectorModel& model, std::ostream& out) {
  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  const FeatureConfig& cfg = model.features;
  for (int v : {cfg.char_ngrams.min, cfg.char_ngrams.max, cfg.word_ngrams.min, cfg.word_ngrams.max}) {
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v));
  }
  detail::put_le<std::uint32_t>(out, cfg.hash_dim);
  detail::put_le<std::uint64_t>(out, cfg.hash_seed);
  detail::put_le<float>(out, model.bias);
  for (float w : model.weights) detail::put_le<float>(out, w);
  detail::put_le<std::uint64_t>(out, model.train_seed);
  detail::put_le<double>(out, model.validation_accuracy);
}

inline DetectorModel read_model(std::istream& in) {
  char magic[5];
  if (!in.read(magic, 5) || std::string_view(magic, 5) != kModelMagic) fail("BadMagic", "not a TLDM1 model file");
  DetectorModel model;
  FeatureConfig& cfg = model.features;
  cfg.char_ngrams.min = static_cast<int>(detail::get_le<std::uint32_t>(in));
  cfg.char_ngrams.max = static_cast<int>(detail::get_le<std::uint32_t>(in));
  cfg.word_ngrams.min = static_cast<int>(detail::get_le<std::uint32_t>(in));
  cfg.word_ngrams.max = static_cast<int>(detail::get_le<std::uint32_t>(in));
  cfg.hash_dim = detail::get_le<std::uint32_t>(in);
  cfg.hash_seed = detail::get_le<std::uint64_t>(in);
  validate(cfg);
  model.bias = detail::get_le<float>(in);
  model.weights.resize(cfg.hash_dim);
  for (float& w : model.weights) w = detail::get_le<float>(in);
  model.train_seed = detail::get_le<std::uint64_t>(in);
  model.validation_accuracy = detail::get_le<double>(in);
  return model;
}

inline void save_model(const DetectorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("IoError", "cannot write " + path.string());
  write_model(model, out);
  if (!out) fail("IoError", "write failed for " + path.string());
}

inline DetectorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open " + path.string());
  return read_model(in);
}

}  // namespace transart::detector
