#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptfold/llm.hpp"
#include "promptfold/tokenizer.hpp"

namespace promptfold {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResult {
  /// 0 when no HTTP exchange happened (connection refused, DNS, timeout).
  int status = 0;
  std::string body;
  std::string error;
};

/// Minimal POST-only transport so live backends can be tested without a network.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const std::string& url, const Headers& headers, const std::string& body,
                          std::chrono::milliseconds timeout) = 0;
};

/// Transport over cpp-httplib (http and https).
std::shared_ptr<HttpTransport> make_httplib_transport();

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

std::shared_ptr<Clock> system_clock();

/// At most `requests_per_minute` acquisitions inside any 60 s window.
/// Zero disables limiting.
class RateLimiter {
 public:
  RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock);
  void acquire();

 private:
  int rpm_;
  std::shared_ptr<Clock> clock_;
  std::mutex mu_;
  std::deque<Clock::time_point> issued_;
};

enum class WireDialect { chat_completions, messages };

std::string_view to_string(WireDialect dialect) noexcept;
/// "chat_completions" or "messages"; throws ConfigError otherwise.
WireDialect parse_dialect(std::string_view text);

struct HttpBackendConfig {
  WireDialect dialect = WireDialect::chat_completions;
  /// Scheme, host and optional path prefix, e.g. "https://api.openai.com/v1".
  std::string base_url;
  std::string model;
  std::string api_key;
  /// Input-token limit checked before sending; 0 disables the check.
  std::size_t context_window = 0;
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  std::chrono::milliseconds timeout{60000};
  int requests_per_minute = 0;
};

/// Request body for a dialect, exposed for testing.
std::string build_request_body(const HttpBackendConfig& config, const LlmRequest& request);

/// Extracts (text, input tokens, output tokens) from a response body.
/// Throws BackendUnreachable on malformed bodies.
LlmResponse parse_response_body(WireDialect dialect, std::string_view body);

class HttpBackend final : public LlmBackend {
 public:
  HttpBackend(HttpBackendConfig config, std::shared_ptr<const Tokenizer> tokenizer,
              std::shared_ptr<HttpTransport> transport = make_httplib_transport(),
              std::shared_ptr<Clock> clock = system_clock());

  LlmResponse complete(const LlmRequest& request) override;
  std::string id() const override;

 private:
  HttpBackendConfig config_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<Clock> clock_;
  RateLimiter limiter_;
};

}  // namespace promptfold
