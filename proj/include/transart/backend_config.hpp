#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <variant>

#include "transart/http_backend.hpp"
#include "transart/mock_backend.hpp"

namespace transart {

struct MockBackendConfig {
  std::filesystem::path dictionary;
  std::uint64_t seed = 0;
};

using BackendConfig = std::variant<HttpBackendConfig, MockBackendConfig>;

inline std::unique_ptr<TranslationBackend> make_backend(const BackendConfig& config) {
  if (const auto* mock = std::get_if<MockBackendConfig>(&config)) {
    return std::make_unique<MockBackend>(MockBackend::from_file(mock->dictionary, mock->seed));
  }
  return std::make_unique<HttpBackend>(std::get<HttpBackendConfig>(config));
}

}  // namespace transart
