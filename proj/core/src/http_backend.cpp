#include "promptfold/http_backend.hpp"

#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "promptfold/errors.hpp"

namespace promptfold {

using nlohmann::json;

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResult post(const std::string& url, const Headers& headers, const std::string& body,
                  std::chrono::milliseconds timeout) override {
    // Split "scheme://host[:port]/path" into the client origin and the path.
    std::size_t scheme_end = url.find("://");
    std::size_t path_begin = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string origin = url.substr(0, path_begin);
    std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

    HttpResult out;
    try {
      httplib::Client client(origin);
      auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
      client.set_connection_timeout(secs);
      client.set_read_timeout(secs);
      client.set_write_timeout(secs);
      httplib::Headers h;
      for (const auto& [k, v] : headers) {
        h.emplace(k, v);
      }
      auto res = client.Post(path, h, body, "application/json");
      if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
      }
      out.status = res->status;
      out.body = res->body;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  }
};

class SystemClock final : public Clock {
 public:
  time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_for(std::chrono::milliseconds d) override { std::this_thread::sleep_for(d); }
};

bool retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

std::string trim_url(std::string url) {
  while (!url.empty() && url.back() == '/') {
    url.pop_back();
  }
  return url;
}

}  // namespace

std::shared_ptr<HttpTransport> make_httplib_transport() { return std::make_shared<HttplibTransport>(); }

std::shared_ptr<Clock> system_clock() {
  static auto clock = std::make_shared<SystemClock>();
  return clock;
}

RateLimiter::RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock)
    : rpm_(requests_per_minute), clock_(std::move(clock)) {}

void RateLimiter::acquire() {
  if (rpm_ <= 0) {
    return;
  }
  constexpr auto window = std::chrono::seconds(60);
  std::lock_guard lock(mu_);
  for (;;) {
    auto now = clock_->now();
    while (!issued_.empty() && now - issued_.front() >= window) {
      issued_.pop_front();
    }
    if (static_cast<int>(issued_.size()) < rpm_) {
      issued_.push_back(now);
      return;
    }
    auto wait = std::chrono::ceil<std::chrono::milliseconds>(issued_.front() + window - now);
    clock_->sleep_for(std::max(wait, std::chrono::milliseconds(1)));
  }
}

std::string_view to_string(WireDialect dialect) noexcept {
  return dialect == WireDialect::messages ? "messages" : "chat_completions";
}

WireDialect parse_dialect(std::string_view text) {
  if (text == "chat_completions") {
    return WireDialect::chat_completions;
  }
  if (text == "messages") {
    return WireDialect::messages;
  }
  throw ConfigError("unknown wire dialect '" + std::string(text) +
                    "' (expected chat_completions or messages)");
}

std::string build_request_body(const HttpBackendConfig& config, const LlmRequest& request) {
  json body;
  body["model"] = config.model;
  body["max_tokens"] = request.max_output_tokens;
  body["temperature"] = request.temperature;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  if (!request.stop_sequences.empty()) {
    body[config.dialect == WireDialect::messages ? "stop_sequences" : "stop"] = request.stop_sequences;
  }
  return body.dump();
}

LlmResponse parse_response_body(WireDialect dialect, std::string_view body) {
  LlmResponse out;
  try {
    json doc = json::parse(body);
    if (dialect == WireDialect::chat_completions) {
      const auto& content = doc.at("choices").at(0).at("message").at("content");
      out.text = content.is_null() ? std::string{} : content.get<std::string>();
      if (doc.contains("usage")) {
        out.input_tokens = doc["usage"].value("prompt_tokens", std::size_t{0});
        out.output_tokens = doc["usage"].value("completion_tokens", std::size_t{0});
      }
    } else {
      for (const auto& part : doc.at("content")) {
        if (part.value("type", "") == "text") {
          out.text += part.at("text").get<std::string>();
        }
      }
      if (doc.contains("usage")) {
        out.input_tokens = doc["usage"].value("input_tokens", std::size_t{0});
        out.output_tokens = doc["usage"].value("output_tokens", std::size_t{0});
      }
    }
  } catch (const json::exception& e) {
    throw BackendUnreachable(std::string("malformed response body: ") + e.what());
  }
  return out;
}

HttpBackend::HttpBackend(HttpBackendConfig config, std::shared_ptr<const Tokenizer> tokenizer,
                         std::shared_ptr<HttpTransport> transport, std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      tokenizer_(std::move(tokenizer)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_(config_.requests_per_minute, clock_) {
  if (config_.base_url.empty() || config_.model.empty()) {
    throw ConfigError("live backend needs a base url and a model name");
  }
  if (config_.max_attempts < 1) {
    throw ConfigError("max_attempts must be at least 1");
  }
}

std::string HttpBackend::id() const { return std::string(to_string(config_.dialect)) + ":" + config_.model; }

LlmResponse HttpBackend::complete(const LlmRequest& request) {
  validate_request(request);
  std::size_t counted = tokenizer_ ? tokenizer_->count(request.prompt) : 0;
  if (config_.context_window > 0 && counted > config_.context_window) {
    throw ContextOverflow("prompt has " + std::to_string(counted) + " tokens, context window is " +
                          std::to_string(config_.context_window));
  }

  Headers headers{{"content-type", "application/json"}};
  std::string url = trim_url(config_.base_url);
  if (config_.dialect == WireDialect::chat_completions) {
    url += "/chat/completions";
    headers.emplace_back("authorization", "Bearer " + config_.api_key);
  } else {
    url += "/messages";
    headers.emplace_back("x-api-key", config_.api_key);
    headers.emplace_back("anthropic-version", "2023-06-01");
  }
  const std::string body = build_request_body(config_, request);

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    limiter_.acquire();
    HttpResult res = transport_->post(url, headers, body, config_.timeout);
    if (res.status >= 200 && res.status < 300) {
      try {
        LlmResponse out = parse_response_body(config_.dialect, res.body);
        out.backend_id = id();
        if (out.input_tokens == 0) {
          out.input_tokens = counted;
        }
        if (out.output_tokens == 0 && tokenizer_) {
          out.output_tokens = tokenizer_->count(out.text);
        }
        return out;
      } catch (const BackendUnreachable& e) {
        last_error = e.what();
      }
    } else {
      last_error = res.status == 0 ? "transport error: " + res.error
                                   : "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200);
      if (!retryable(res.status)) {
        throw BackendUnreachable(id() + " rejected the request: " + last_error);
      }
    }
    if (attempt < config_.max_attempts) {
      clock_->sleep_for(backoff);
      backoff = std::min(backoff * 2, config_.max_backoff);
    }
  }
  throw BackendUnreachable(id() + " failed after " + std::to_string(config_.max_attempts) +
                           " attempts: " + last_error);
}

}  // namespace promptfold
