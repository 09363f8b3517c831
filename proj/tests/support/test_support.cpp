#include "test_support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace promptfold::testing {

std::string data_path(std::string_view relative) {
  return (std::filesystem::path(PROMPTFOLD_DATA_DIR) / relative).string();
}

std::string test_data_path(std::string_view relative) {
  return (std::filesystem::path(PROMPTFOLD_TEST_DATA_DIR) / relative).string();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

std::shared_ptr<const Tokenizer> cl100k() {
  static auto tok = BpeTokenizer::load(data_path("tokenizers/cl100k_base.tiktoken"));
  return tok;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("promptfold-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

LlmResponse ScriptedBackend::complete(const LlmRequest& request) {
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
  }
  LlmResponse r;
  r.text = handler_(request);
  r.backend_id = id_;
  return r;
}

std::vector<LlmRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedBackend::count_tag(std::string_view prefix) const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& r : requests_) {
    if (r.tag.compare(0, prefix.size(), prefix) == 0) {
      ++n;
    }
  }
  return n;
}

}  // namespace promptfold::testing
