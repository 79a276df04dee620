#pragma once

// `transart` command-line front end. Every subcommand loads its inputs,
// calls exactly one library operation and prints the result as JSON.
//
// Exit codes: 0 success, 1 domain error (JSON {"error": kind, "message": ...}
// on stderr), 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "transart/augment.hpp"
#include "transart/backend_config.hpp"
#include "transart/corpus.hpp"
#include "transart/detector.hpp"
#include "transart/metrics.hpp"
#include "transart/reprdist.hpp"
#include "transart/translation.hpp"

namespace transart::cli {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline void emit(const ordered_json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) fail("IoError", "cannot write " + out_path);
  f << j.dump(2) << '\n';
}

inline void emit_text(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) fail("IoError", "cannot write " + out_path);
  f << text;
}

inline Corpus load(const std::string& path, bool lenient) {
  Corpus c = load_corpus(path, LoadOptions{lenient});
  c.meta["source"] = path;
  return c;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open " + path);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      fail("ParseError", path + ": '" + tok + "' is not a number");
    }
  }
  return values;
}

inline std::map<std::string, std::string> read_string_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail("ParseError", path + ": " + e.what());
  }
  if (!j.is_object()) fail("ParseError", path + ": expected a JSON object of strings");
  std::map<std::string, std::string> m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) fail("ParseError", path + ": value for '" + it.key() + "' is not a string");
    m.emplace(it.key(), it.value().get<std::string>());
  }
  return m;
}

inline std::unordered_set<std::string> read_stoplist(const std::string& path) {
  std::unordered_set<std::string> words;
  for (auto& line : read_lines(path)) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t");
    words.insert(unicode::lower(line.substr(b, e - b + 1)));
  }
  return words;
}

inline std::pair<std::string, std::string> split_named(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw CLI::ValidationError("expected name=path, got '" + spec + "'");
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON views of library results. Shared with tests so the CLI and library
// routes can be compared directly.

inline ordered_json diversity_json(const metrics::DiversityReport& r) {
  ordered_json j;
  j["ttr"] = r.ttr;
  j["ld"] = r.ld;
  j["n_sentences"] = r.n_sentences;
  j["skipped_empty"] = r.skipped_empty;
  j["aggregation"] = r.aggregation;
  return j;
}

inline ordered_json mt_score_json(const metrics::MtScore& s) {
  ordered_json j;
  j["metric"] = s.metric == metrics::MtMetric::Bleu ? "bleu" : "chrf";
  j["value"] = s.value;
  j["signature"] = s.signature;
  return j;
}

inline ordered_json ttest_json(const metrics::TTestResult& r) {
  ordered_json j;
  j["t"] = r.t;
  j["df"] = r.df;
  j["p_two_sided"] = r.p_two_sided;
  j["direction"] = r.direction;
  j["significant"] = r.significant;
  j["alpha"] = 0.05;
  return j;
}

inline ordered_json group_accuracy_json(const metrics::GroupAccuracy& g) {
  ordered_json j;
  j["groups"] = ordered_json::object();
  for (const auto& [label, stat] : g.groups) {
    j["groups"][label] = {{"accuracy", stat.accuracy()}, {"correct", stat.correct}, {"n", stat.n}};
  }
  j["overall"] = {{"accuracy", g.overall.accuracy()}, {"correct", g.overall.correct}, {"n", g.overall.n}};
  return j;
}

inline ordered_json fid_json(const reprdist::FidResult& r) {
  ordered_json j;
  j["fid"] = r.value;
  j["stabilized"] = r.stabilized;
  return j;
}

inline ordered_json fid_report_json(const std::vector<reprdist::FidRow>& rows) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"eval", r.eval_name}, {"fid_vs_human", r.fid_vs_human}, {"fid_vs_mt", r.fid_vs_mt},
                         {"delta", r.delta}});
  }
  return j;
}

/// Long-format CSV: group,metric,value,n
inline std::string csv_rows(const std::vector<std::tuple<std::string, std::string, double, std::size_t>>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "group,metric,value,n\n";
  for (const auto& [group, metric, value, n] : rows) os << group << ',' << metric << ',' << value << ',' << n << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

struct BackendFlags {
  std::string kind = "mock";
  std::string dictionary;
  std::string endpoint;
  double timeout = 60.0;
  std::size_t max_batch = 32;
  std::size_t max_in_flight = 4;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "Translation backend")->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--dict", dictionary, "Mock simplification dictionary (JSON object)");
    cmd->add_option("--endpoint", endpoint, "HTTP backend base URL");
    cmd->add_option("--timeout", timeout, "HTTP timeout in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--max-batch", max_batch, "Texts per HTTP request")->check(CLI::PositiveNumber);
    cmd->add_option("--max-in-flight", max_in_flight, "Concurrent HTTP requests")->check(CLI::PositiveNumber);
  }

  BackendConfig config() const {
    if (kind == "mock") {
      if (dictionary.empty()) throw CLI::RequiredError("--dict");
      return MockBackendConfig{dictionary, seed};
    }
    if (endpoint.empty()) throw CLI::RequiredError("--endpoint");
    return HttpBackendConfig{endpoint, timeout, max_batch, max_in_flight, "http:" + endpoint};
  }
};

struct FeatureFlags {
  detector::FeatureConfig cfg;
  void attach(CLI::App* cmd) {
    cmd->add_option("--char-min", cfg.char_ngrams.min)->check(CLI::PositiveNumber);
    cmd->add_option("--char-max", cfg.char_ngrams.max)->check(CLI::PositiveNumber);
    cmd->add_option("--word-min", cfg.word_ngrams.min)->check(CLI::PositiveNumber);
    cmd->add_option("--word-max", cfg.word_ngrams.max)->check(CLI::PositiveNumber);
    cmd->add_option("--hash-dim", cfg.hash_dim, "Power of two >= 1024");
    cmd->add_option("--hash-seed", cfg.hash_seed);
  }
};

/// Runs the CLI on `args` (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Translation-artifact corpus toolkit", "transart"};
  app.set_config("--config", "", "Config file (INI/TOML sections per subcommand); flags override it");
  app.require_subcommand(1);

  bool lenient = false;
  app.add_flag("--lenient", lenient, "Accept unknown corpus keys and missing origin/tags");

  std::function<void()> action;
  auto on = [&action](CLI::App* cmd, std::function<void()> fn) { cmd->callback([&action, fn] { action = fn; }); };

  // roundtrip ---------------------------------------------------------------
  struct {
    std::string in, out, pivot = "de", fwd = "nucleus:0.9", bwd = "beam:5";
    int no_repeat = 5, max_tokens = 128;
    std::optional<std::uint64_t> seed;
    BackendFlags backend;
  } rt;
  auto* rt_cmd = app.add_subcommand("roundtrip", "Round-trip translate a corpus through a pivot language");
  rt_cmd->add_option("--in", rt.in, "Input corpus (JSONL)")->required()->check(CLI::ExistingFile);
  rt_cmd->add_option("--out", rt.out, "Output corpus (JSONL)")->required();
  rt_cmd->add_option("--pivot", rt.pivot, "Pivot language code");
  rt_cmd->add_option("--fwd", rt.fwd, "Forward decoding, beam:K or nucleus:P");
  rt_cmd->add_option("--bwd", rt.bwd, "Backward decoding, beam:K or nucleus:P");
  rt_cmd->add_option("--no-repeat-ngram", rt.no_repeat)->check(CLI::NonNegativeNumber);
  rt_cmd->add_option("--max-tokens", rt.max_tokens)->check(CLI::PositiveNumber);
  rt_cmd->add_option("--seed", rt.seed, "Seed for stochastic decoding");
  rt.backend.attach(rt_cmd);
  on(rt_cmd, [&] {
    if (rt.seed) rt.backend.seed = *rt.seed;
    DecodingSpec base{BeamSearch{5}, rt.no_repeat, rt.max_tokens, rt.seed};
    const DecodingSpec fwd = parse_strategy(rt.fwd, base);
    const DecodingSpec bwd = parse_strategy(rt.bwd, base);
    auto backend = make_backend(rt.backend.config());
    const Corpus in = detail::load(rt.in, lenient);
    const Corpus result = roundtrip(in, rt.pivot, *backend, fwd, bwd);
    save_corpus(result, rt.out);
    ordered_json j;
    j["out"] = rt.out;
    j["count"] = result.size();
    j["system"] = backend->id();
    j["pivot"] = rt.pivot;
    j["forward"] = to_json(fwd);
    j["backward"] = to_json(bwd);
    detail::emit(j, "", out);
  });

  // translate-test ----------------------------------------------------------
  struct {
    std::string in, out, lang;
    int beam = 4, max_tokens = 128;
    BackendFlags backend;
  } tt;
  auto* tt_cmd = app.add_subcommand("translate-test", "Translate an evaluation corpus into English");
  tt_cmd->add_option("--in", tt.in)->required()->check(CLI::ExistingFile);
  tt_cmd->add_option("--out", tt.out)->required();
  tt_cmd->add_option("--lang", tt.lang, "Corpus language (default: taken from the corpus)");
  tt_cmd->add_option("--beam", tt.beam)->check(CLI::PositiveNumber);
  tt_cmd->add_option("--max-tokens", tt.max_tokens)->check(CLI::PositiveNumber);
  tt.backend.attach(tt_cmd);
  on(tt_cmd, [&] {
    auto backend = make_backend(tt.backend.config());
    const Corpus in = detail::load(tt.in, lenient);
    std::string lang = tt.lang;
    if (lang.empty()) lang = corpus_language(in).value_or("");
    DecodingSpec spec = default_translate_test_decoding();
    spec.strategy = BeamSearch{tt.beam};
    spec.max_tokens = tt.max_tokens;
    const Corpus result = translate_test(in, lang, *backend, spec);
    save_corpus(result, tt.out);
    ordered_json j;
    j["out"] = tt.out;
    j["count"] = result.size();
    j["system"] = backend->id();
    j["direction"] = lang + "-en";
    j["decoding"] = to_json(spec);
    detail::emit(j, "", out);
  });

  // diversity ---------------------------------------------------------------
  struct {
    std::string in, stoplist, out, format = "json";
  } dv;
  auto* dv_cmd = app.add_subcommand("diversity", "Token-type ratio and lexical density of a corpus");
  dv_cmd->add_option("--in", dv.in)->required()->check(CLI::ExistingFile);
  dv_cmd->add_option("--stoplist", dv.stoplist, "Function-word list, one per line")->check(CLI::ExistingFile);
  dv_cmd->add_option("--out", dv.out);
  dv_cmd->add_option("--format", dv.format)->check(CLI::IsMember({"json", "csv"}));
  on(dv_cmd, [&] {
    const Corpus in = detail::load(dv.in, lenient);
    const auto report = dv.stoplist.empty() ? metrics::corpus_diversity(in)
                                            : metrics::corpus_diversity(in, detail::read_stoplist(dv.stoplist));
    if (dv.format == "csv") {
      detail::emit_text(csv_rows({{"all", "ttr", report.ttr, report.n_sentences},
                                  {"all", "ld", report.ld, report.n_sentences}}),
                        dv.out, out);
    } else {
      detail::emit(diversity_json(report), dv.out, out);
    }
  });

  // mt-score ----------------------------------------------------------------
  struct {
    std::string hyp, ref, metric = "bleu", out;
  } mt;
  auto* mt_cmd = app.add_subcommand("mt-score", "Corpus BLEU or chrF against one reference");
  mt_cmd->add_option("--hyp", mt.hyp, "Hypotheses, one per line")->required()->check(CLI::ExistingFile);
  mt_cmd->add_option("--ref", mt.ref, "References, one per line")->required()->check(CLI::ExistingFile);
  mt_cmd->add_option("--metric", mt.metric)->check(CLI::IsMember({"bleu", "chrf"}));
  mt_cmd->add_option("--out", mt.out);
  on(mt_cmd, [&] {
    const auto hyps = detail::read_lines(mt.hyp);
    const auto refs = detail::read_lines(mt.ref);
    const auto score = mt.metric == "bleu" ? metrics::bleu(hyps, refs) : metrics::chrf(hyps, refs);
    detail::emit(mt_score_json(score), mt.out, out);
  });

  // detector ----------------------------------------------------------------
  auto* det = app.add_subcommand("detector", "Human-likeness classifier");
  det->require_subcommand(1);

  struct {
    std::string human, machine, model, out;
    int epochs = 5;
    double lr = 0.1, l2 = 1e-6;
    std::uint64_t seed = 0;
    FeatureFlags features;
  } dt;
  auto* dt_cmd = det->add_subcommand("train", "Train on human vs machine corpora");
  dt_cmd->add_option("--human", dt.human)->required()->check(CLI::ExistingFile);
  dt_cmd->add_option("--machine", dt.machine)->required()->check(CLI::ExistingFile);
  dt_cmd->add_option("--model", dt.model, "Output model file (TLDM1)")->required();
  dt_cmd->add_option("--epochs", dt.epochs)->check(CLI::PositiveNumber);
  dt_cmd->add_option("--lr", dt.lr)->check(CLI::PositiveNumber);
  dt_cmd->add_option("--l2", dt.l2)->check(CLI::NonNegativeNumber);
  dt_cmd->add_option("--seed", dt.seed);
  dt_cmd->add_option("--out", dt.out);
  dt.features.attach(dt_cmd);
  on(dt_cmd, [&] {
    const Corpus human = detail::load(dt.human, lenient);
    const Corpus machine = detail::load(dt.machine, lenient);
    detector::TrainOptions opts{dt.epochs, dt.lr, dt.l2, dt.seed};
    const auto model = detector::train(human, machine, dt.features.cfg, opts);
    detector::save_model(model, dt.model);
    ordered_json j;
    j["model"] = dt.model;
    j["validation_accuracy"] = model.validation_accuracy;
    j["train_seed"] = model.train_seed;
    j["hash_dim"] = model.features.hash_dim;
    detail::emit(j, dt.out, out);
  });

  struct {
    std::string model, in, out;
  } ds;
  auto* ds_cmd = det->add_subcommand("score", "Human-likeness score per sample");
  ds_cmd->add_option("--model", ds.model)->required()->check(CLI::ExistingFile);
  ds_cmd->add_option("--in", ds.in)->required()->check(CLI::ExistingFile);
  ds_cmd->add_option("--out", ds.out);
  on(ds_cmd, [&] {
    const auto model = detector::load_model(ds.model);
    const Corpus in = detail::load(ds.in, lenient);
    const auto scores = detector::score_all(model, in);
    ordered_json j;
    j["scores"] = ordered_json::array();
    for (std::size_t i = 0; i < in.size(); ++i) j["scores"].push_back({{"id", in.samples[i].id}, {"p_h", scores[i]}});
    detail::emit(j, ds.out, out);
  });

  struct {
    std::string model, in, human_out, nmt_out, out;
  } sp;
  auto* sp_cmd = det->add_subcommand("split", "Split a corpus into equal human-like and NMT-like halves");
  sp_cmd->add_option("--model", sp.model)->required()->check(CLI::ExistingFile);
  sp_cmd->add_option("--in", sp.in)->required()->check(CLI::ExistingFile);
  sp_cmd->add_option("--human-out", sp.human_out)->required();
  sp_cmd->add_option("--nmt-out", sp.nmt_out)->required();
  sp_cmd->add_option("--out", sp.out);
  on(sp_cmd, [&] {
    const auto model = detector::load_model(sp.model);
    const Corpus in = detail::load(sp.in, lenient);
    const auto result = detector::split(model, in);
    save_corpus(result.human_like, sp.human_out);
    save_corpus(result.nmt_like, sp.nmt_out);
    ordered_json j;
    j["human_like"] = {{"path", sp.human_out}, {"count", result.human_like.size()}};
    j["nmt_like"] = {{"path", sp.nmt_out}, {"count", result.nmt_like.size()}};
    j["threshold_score"] = result.threshold_score;
    detail::emit(j, sp.out, out);
  });

  struct {
    std::string model, human, machine, out;
  } ev;
  auto* ev_cmd = det->add_subcommand("evaluate", "Accuracy on class-balanced labeled corpora");
  ev_cmd->add_option("--model", ev.model)->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--human", ev.human)->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--machine", ev.machine)->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--out", ev.out);
  on(ev_cmd, [&] {
    const auto model = detector::load_model(ev.model);
    const double acc =
        detector::evaluate(model, detail::load(ev.human, lenient), detail::load(ev.machine, lenient));
    detail::emit(ordered_json{{"accuracy", acc}}, ev.out, out);
  });

  // fid ---------------------------------------------------------------------
  struct {
    std::string a, b, out;
    double eps = 1e-6;
  } fd;
  auto* fd_cmd = app.add_subcommand("fid", "Fréchet distance between two embedding files");
  fd_cmd->add_option("--a", fd.a)->required()->check(CLI::ExistingFile);
  fd_cmd->add_option("--b", fd.b)->required()->check(CLI::ExistingFile);
  fd_cmd->add_option("--eps", fd.eps)->check(CLI::PositiveNumber);
  fd_cmd->add_option("--out", fd.out);
  on(fd_cmd, [&] {
    const auto result = reprdist::fid(reprdist::load_embeddings(fd.a), reprdist::load_embeddings(fd.b), fd.eps);
    detail::emit(fid_json(result), fd.out, out);
  });

  struct {
    std::string train_human, train_mt, out, format = "json";
    std::vector<std::string> evals;
    double eps = 1e-6;
  } fr;
  auto* fr_cmd = app.add_subcommand("fid-report", "FID of evaluation sets against human and MT training sets");
  fr_cmd->add_option("--train-human", fr.train_human)->required()->check(CLI::ExistingFile);
  fr_cmd->add_option("--train-mt", fr.train_mt)->required()->check(CLI::ExistingFile);
  fr_cmd->add_option("--eval", fr.evals, "name=path, repeatable")->required();
  fr_cmd->add_option("--eps", fr.eps)->check(CLI::PositiveNumber);
  fr_cmd->add_option("--out", fr.out);
  fr_cmd->add_option("--format", fr.format)->check(CLI::IsMember({"json", "csv"}));
  on(fr_cmd, [&] {
    std::vector<std::pair<std::string, reprdist::EmbeddingSet>> evals;
    for (const auto& spec : fr.evals) {
      auto [name, path] = detail::split_named(spec);
      evals.emplace_back(name, reprdist::load_embeddings(path));
    }
    const auto rows = reprdist::fid_report(reprdist::load_embeddings(fr.train_human),
                                           reprdist::load_embeddings(fr.train_mt), evals, fr.eps);
    if (fr.format == "csv") {
      std::vector<std::tuple<std::string, std::string, double, std::size_t>> csv;
      for (const auto& r : rows) {
        const auto n = evals[static_cast<std::size_t>(&r - rows.data())].second.n;
        csv.emplace_back(r.eval_name, "fid_vs_human", r.fid_vs_human, n);
        csv.emplace_back(r.eval_name, "fid_vs_mt", r.fid_vs_mt, n);
        csv.emplace_back(r.eval_name, "delta", r.delta, n);
      }
      detail::emit_text(csv_rows(csv), fr.out, out);
    } else {
      detail::emit(fid_report_json(rows), fr.out, out);
    }
  });

  // augment -----------------------------------------------------------------
  auto* aug = app.add_subcommand("augment", "MERGE / TAG training-set augmentation");
  aug->require_subcommand(1);
  struct {
    std::string human, machine, in, out, token = "[MT]", created_at;
  } ag;

  auto write_augmented = [&](const augment::Augmented& result) {
    save_corpus(result.corpus, ag.out);
    const std::string manifest_path = ag.out + ".manifest.json";
    const ordered_json manifest = augment::to_json(result.manifest);
    detail::emit(manifest, manifest_path, out);
    ordered_json j;
    j["out"] = ag.out;
    j["manifest"] = manifest_path;
    j["output_count"] = result.manifest.output_count;
    j["steps_scale"] = result.manifest.steps_scale;
    detail::emit(j, "", out);
  };

  auto* mg_cmd = aug->add_subcommand("merge", "Human samples followed by '#mt'-suffixed machine samples");
  mg_cmd->add_option("--human", ag.human)->required()->check(CLI::ExistingFile);
  mg_cmd->add_option("--machine", ag.machine)->required()->check(CLI::ExistingFile);
  mg_cmd->add_option("--out", ag.out)->required();
  mg_cmd->add_option("--created-at", ag.created_at, "Manifest timestamp (default: now, UTC)");
  on(mg_cmd, [&] {
    write_augmented(augment::merge(detail::load(ag.human, lenient), detail::load(ag.machine, lenient), ag.created_at));
  });

  auto* mt_tag_cmd = aug->add_subcommand("merge-tag", "MERGE with tagged machine samples");
  mt_tag_cmd->add_option("--human", ag.human)->required()->check(CLI::ExistingFile);
  mt_tag_cmd->add_option("--machine", ag.machine)->required()->check(CLI::ExistingFile);
  mt_tag_cmd->add_option("--out", ag.out)->required();
  mt_tag_cmd->add_option("--tag-token", ag.token);
  mt_tag_cmd->add_option("--created-at", ag.created_at, "Manifest timestamp (default: now, UTC)");
  on(mt_tag_cmd, [&] {
    write_augmented(augment::merge_tag(detail::load(ag.human, lenient), detail::load(ag.machine, lenient),
                                       augment::TagPolicy{ag.token}, ag.created_at));
  });

  auto* tag_cmd = aug->add_subcommand("tag", "Prefix machine-origin texts with the tag token");
  tag_cmd->add_option("--in", ag.in)->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--out", ag.out)->required();
  tag_cmd->add_option("--tag-token", ag.token);
  on(tag_cmd, [&] {
    const Corpus result = augment::tag(detail::load(ag.in, lenient), augment::TagPolicy{ag.token});
    save_corpus(result, ag.out);
    detail::emit(ordered_json{{"out", ag.out}, {"count", result.size()}}, "", out);
  });

  auto* untag_cmd = aug->add_subcommand("untag", "Remove tag tokens added by `augment tag`");
  untag_cmd->add_option("--in", ag.in)->required()->check(CLI::ExistingFile);
  untag_cmd->add_option("--out", ag.out)->required();
  untag_cmd->add_option("--tag-token", ag.token);
  on(untag_cmd, [&] {
    const Corpus result = augment::untag(detail::load(ag.in, lenient), augment::TagPolicy{ag.token});
    save_corpus(result, ag.out);
    detail::emit(ordered_json{{"out", ag.out}, {"count", result.size()}}, "", out);
  });

  // group-accuracy ----------------------------------------------------------
  struct {
    std::string pred, gold, groups, out, format = "json";
    bool allow_missing = false;
  } ga;
  auto* ga_cmd = app.add_subcommand("group-accuracy", "Exact-match accuracy per group");
  ga_cmd->add_option("--pred", ga.pred, "JSON object id -> predicted answer")->required()->check(CLI::ExistingFile);
  ga_cmd->add_option("--gold", ga.gold, "Gold corpus (JSONL)")->required()->check(CLI::ExistingFile);
  ga_cmd->add_option("--groups", ga.groups, "JSON object id -> group label")->check(CLI::ExistingFile);
  ga_cmd->add_flag("--allow-missing", ga.allow_missing, "Score missing predictions as wrong");
  ga_cmd->add_option("--out", ga.out);
  ga_cmd->add_option("--format", ga.format)->check(CLI::IsMember({"json", "csv"}));
  on(ga_cmd, [&] {
    const auto groups = ga.groups.empty() ? std::map<std::string, std::string>{} : detail::read_string_map(ga.groups);
    const auto result = metrics::group_accuracy(detail::read_string_map(ga.pred), detail::load(ga.gold, lenient),
                                                groups, ga.allow_missing);
    if (ga.format == "csv") {
      std::vector<std::tuple<std::string, std::string, double, std::size_t>> csv;
      for (const auto& [label, stat] : result.groups) csv.emplace_back(label, "accuracy", stat.accuracy(), stat.n);
      csv.emplace_back("overall", "accuracy", result.overall.accuracy(), result.overall.n);
      detail::emit_text(csv_rows(csv), ga.out, out);
    } else {
      detail::emit(group_accuracy_json(result), ga.out, out);
    }
  });

  // ttest -------------------------------------------------------------------
  struct {
    std::string a, b, out;
  } ts;
  auto* ts_cmd = app.add_subcommand("ttest", "Paired two-sided t-test");
  ts_cmd->add_option("--a", ts.a, "Whitespace-separated numbers")->required()->check(CLI::ExistingFile);
  ts_cmd->add_option("--b", ts.b, "Whitespace-separated numbers")->required()->check(CLI::ExistingFile);
  ts_cmd->add_option("--out", ts.out);
  on(ts_cmd, [&] {
    const auto a = detail::read_numbers(ts.a);
    const auto b = detail::read_numbers(ts.b);
    detail::emit(ttest_json(metrics::paired_t_test(a, b)), ts.out, out);
  });

  // report ------------------------------------------------------------------
  struct {
    std::vector<std::string> sections;
    std::string out;
  } rp;
  auto* rp_cmd = app.add_subcommand("report", "Bundle JSON results into one report");
  rp_cmd->add_option("--section", rp.sections, "name=path of a JSON result, repeatable")->required();
  rp_cmd->add_option("--out", rp.out);
  on(rp_cmd, [&] {
    ordered_json j;
    j["sections"] = ordered_json::object();
    for (const auto& spec : rp.sections) {
      auto [name, path] = detail::split_named(spec);
      std::ifstream in(path, std::ios::binary);
      if (!in) fail("IoError", "cannot open " + path);
      try {
        j["sections"][name] = ordered_json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        fail("ParseError", path + ": " + e.what());
      }
    }
    detail::emit(j, rp.out, out);
  });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (action) action();
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const Error& e) {
    err << ordered_json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << ordered_json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace transart::cli
