#include "promptfold/replay.hpp"

#include <json.hpp>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

using nlohmann::json;

ReplayTranscript ReplayTranscript::parse(std::string_view jsonl) {
  ReplayTranscript t;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(jsonl)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("transcript line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("response") || !doc["response"].is_string()) {
      throw ConfigError("transcript line " + std::to_string(line_no) + ": missing 'response'");
    }
    TranscriptEntry e;
    e.response = doc["response"].get<std::string>();
    if (doc.contains("hash")) {
      if (!doc["hash"].is_string() || doc["hash"].get<std::string>().size() != 64) {
        throw ConfigError("transcript line " + std::to_string(line_no) + ": bad 'hash'");
      }
      e.matcher = TranscriptEntry::Matcher::exact_hash;
      e.hash = doc["hash"].get<std::string>();
      e.prompt_head = doc.value("prompt_head", "");
    } else if (doc.contains("contains") && doc["contains"].is_array() && !doc["contains"].empty()) {
      e.matcher = TranscriptEntry::Matcher::substring;
      for (const auto& pattern : doc["contains"]) {
        if (!pattern.is_string()) {
          throw ConfigError("transcript line " + std::to_string(line_no) + ": bad pattern");
        }
        e.contains.push_back(pattern.get<std::string>());
      }
      e.repeat = doc.value("repeat", false);
    } else {
      throw ConfigError("transcript line " + std::to_string(line_no) +
                        ": needs 'hash' or a non-empty 'contains' list");
    }
    t.add(std::move(e));
  }
  return t;
}

ReplayTranscript ReplayTranscript::load(const std::string& path) {
  return parse(detail::read_file(path));
}

void ReplayTranscript::add(TranscriptEntry entry) {
  if (entry.matcher == TranscriptEntry::Matcher::exact_hash) {
    if (auto it = by_hash_.find(entry.hash); it != by_hash_.end()) {
      if (entries_[it->second].response != entry.response) {
        throw ConfigError("transcript has conflicting responses for prompt hash " + entry.hash);
      }
      return;
    }
    by_hash_.emplace(entry.hash, entries_.size());
  }
  entries_.push_back(std::move(entry));
}

std::string prompt_head(std::string_view prompt) {
  std::size_t i = 0;
  std::size_t points = 0;
  while (i < prompt.size() && points < 120) {
    auto b = static_cast<unsigned char>(prompt[i]);
    std::size_t len = b < 0x80 ? 1 : b >= 0xF0 ? 4 : b >= 0xE0 ? 3 : b >= 0xC0 ? 2 : 1;
    i = std::min(prompt.size(), i + len);
    ++points;
  }
  return std::string(prompt.substr(0, i));
}

std::string transcript_line(std::string_view prompt, std::string_view response) {
  nlohmann::ordered_json line;
  line["hash"] = sha256_hex(prompt);
  line["prompt_head"] = prompt_head(prompt);
  line["response"] = std::string(response);
  return line.dump(-1, ' ', false, json::error_handler_t::replace);
}

ReplayBackend::ReplayBackend(ReplayTranscript transcript, std::shared_ptr<const Tokenizer> tokenizer,
                             std::size_t context_window, std::string id)
    : transcript_(std::move(transcript)),
      tokenizer_(std::move(tokenizer)),
      context_window_(context_window),
      id_(std::move(id)) {
  const auto& entries = transcript_.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].matcher == TranscriptEntry::Matcher::exact_hash) {
      exact_.emplace(entries[i].hash, i);
    } else {
      substring_.push_back(i);
    }
  }
  consumed_.assign(entries.size(), false);
}

LlmResponse ReplayBackend::complete(const LlmRequest& request) {
  validate_request(request);
  LlmResponse response;
  response.backend_id = id_;
  response.input_tokens = tokenizer_ ? tokenizer_->count(request.prompt) : 0;
  if (context_window_ > 0 && response.input_tokens > context_window_) {
    throw ContextOverflow("prompt has " + std::to_string(response.input_tokens) +
                          " tokens, context window is " + std::to_string(context_window_));
  }
  const auto& entries = transcript_.entries();
  const std::string hash = sha256_hex(request.prompt);
  const TranscriptEntry* hit = nullptr;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    if (auto it = exact_.find(hash); it != exact_.end()) {
      hit = &entries[it->second];
    } else {
      for (std::size_t idx : substring_) {
        if (consumed_[idx]) {
          continue;
        }
        const auto& e = entries[idx];
        bool all = true;
        for (const auto& pattern : e.contains) {
          if (request.prompt.find(pattern) == std::string::npos) {
            all = false;
            break;
          }
        }
        if (all) {
          consumed_[idx] = !e.repeat;
          hit = &e;
          break;
        }
      }
    }
  }
  if (hit == nullptr) {
    throw NoTranscriptMatch("no transcript entry for prompt " + hash + " [" + request.tag +
                            "] starting: " + prompt_head(request.prompt));
  }
  response.text = hit->response;
  response.output_tokens = tokenizer_ ? tokenizer_->count(response.text) : 0;
  return response;
}

std::size_t ReplayBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

RecordingBackend::RecordingBackend(std::shared_ptr<LlmBackend> inner, const std::string& path)
    : inner_(std::move(inner)), path_(path), out_(path, std::ios::binary | std::ios::app) {
  if (!out_) {
    throw TranscriptWriteFailed("cannot open transcript '" + path + "' for writing");
  }
}

LlmResponse RecordingBackend::complete(const LlmRequest& request) {
  LlmResponse response = inner_->complete(request);
  std::lock_guard lock(mu_);
  if (written_.insert(sha256_hex(request.prompt)).second) {
    out_ << transcript_line(request.prompt, response.text) << '\n';
    out_.flush();
    if (!out_) {
      throw TranscriptWriteFailed("write to transcript '" + path_ + "' failed");
    }
  }
  return response;
}

}  // namespace promptfold
