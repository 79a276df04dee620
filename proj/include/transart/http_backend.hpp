#pragma once

// Client for an external MT service speaking the /translate JSON protocol.
// Large inputs are cut into batches of at most `max_batch` texts; at most
// `max_in_flight` batches are outstanding at once, and results are
// reassembled in input order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
// <resolv.h>, pulled in by httplib, defines `_res`, which clashes with Eigen internals.
#ifdef _res
#undef _res
#endif
#include <json.hpp>

#include "transart/error.hpp"
#include "transart/translation.hpp"

namespace transart {

struct HttpBackendConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8000" or "http://host/mt"
  double timeout_seconds = 60.0;
  std::size_t max_batch = 32;
  std::size_t max_in_flight = 4;
  std::string system_id = "http";
};

class HttpBackend final : public TranslationBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.max_batch < 1) fail("InvalidConfig", "max_batch must be >= 1");
    if (config_.max_in_flight < 1) fail("InvalidConfig", "max_in_flight must be >= 1");
    if (!(config_.timeout_seconds > 0.0)) fail("InvalidConfig", "timeout must be positive");
    split_endpoint();
  }

  std::string id() const override { return config_.system_id; }

  const HttpBackendConfig& config() const { return config_; }

  std::vector<std::string> translate_batch(std::span<const std::string> texts, const std::string& source,
                                           const std::string& target, const DecodingSpec& spec) override {
    const std::size_t n_batches = (texts.size() + config_.max_batch - 1) / config_.max_batch;
    std::vector<std::vector<std::string>> results(n_batches);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
      httplib::Client client(origin_);
      const auto secs = static_cast<time_t>(config_.timeout_seconds);
      const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
      client.set_connection_timeout(secs, usecs);
      client.set_read_timeout(secs, usecs);
      client.set_write_timeout(secs, usecs);
      for (std::size_t b = next++; b < n_batches; b = next++) {
        {
          std::lock_guard lock(error_mutex);
          if (first_error) return;
        }
        try {
          const std::size_t begin = b * config_.max_batch;
          const std::size_t end = std::min(texts.size(), begin + config_.max_batch);
          TranslationRequest req{{texts.begin() + begin, texts.begin() + end}, source, target, spec};
          results[b] = post(client, req);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };

    const std::size_t n_threads = std::min(config_.max_in_flight, n_batches);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::string> out;
    out.reserve(texts.size());
    for (auto& batch : results) {
      for (auto& s : batch) out.push_back(std::move(s));
    }
    return out;
  }

 private:
  void split_endpoint() {
    const auto scheme = config_.endpoint.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = config_.endpoint.find('/', host_start);
    if (slash == std::string::npos) {
      origin_ = config_.endpoint;
      base_path_.clear();
    } else {
      origin_ = config_.endpoint.substr(0, slash);
      base_path_ = config_.endpoint.substr(slash);
      while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
    }
  }

  std::vector<std::string> post(httplib::Client& client, const TranslationRequest& req) const {
    const std::string body = to_json(req).dump();
    auto res = client.Post(base_path_ + "/translate", body, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        fail("Timeout", "request to " + config_.endpoint + " timed out (" + httplib::to_string(err) + ")");
      }
      fail("BackendUnavailable", config_.endpoint + ": " + httplib::to_string(err));
    }
    if (res->status != 200) {
      fail("BackendProtocolError", "HTTP " + std::to_string(res->status) + " from " + config_.endpoint);
    }
    TranslationResponse resp;
    try {
      resp = response_from_json(nlohmann::json::parse(res->body));
    } catch (const nlohmann::json::exception& e) {
      fail("BackendProtocolError", std::string("malformed response: ") + e.what());
    }
    if (resp.translations.size() != req.texts.size()) {
      fail("BackendProtocolError", "response length " + std::to_string(resp.translations.size()) +
                                       " != request length " + std::to_string(req.texts.size()));
    }
    return std::move(resp.translations);
  }

  HttpBackendConfig config_;
  std::string origin_;
  std::string base_path_;
};

}  // namespace transart
