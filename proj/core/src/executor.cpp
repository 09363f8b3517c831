#include "promptfold/executor.hpp"

#include <filesystem>
#include <json.hpp>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

using nlohmann::json;

std::string_view to_string(ExecStatus status) noexcept {
  switch (status) {
    case ExecStatus::ok:
      return "ok";
    case ExecStatus::coding_error:
      return "coding_error";
    case ExecStatus::timeout:
      return "timeout";
    case ExecStatus::sandbox_unavailable:
      return "sandbox_unavailable";
  }
  return "sandbox_unavailable";
}

ExecStatus parse_exec_status(std::string_view text) {
  for (auto s : {ExecStatus::ok, ExecStatus::coding_error, ExecStatus::timeout,
                 ExecStatus::sandbox_unavailable}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  throw InvalidArgument("unknown execution status '" + std::string(text) + "'");
}

SceneFixture parse_scene(std::string_view json_text) {
  SceneFixture scene;
  scene.json = std::string(json_text);
  try {
    auto doc = json::parse(json_text);
    scene.scene_id = doc.at("scene_id").get<std::string>();
    scene.width = doc.at("width").get<double>();
    scene.height = doc.at("height").get<double>();
    for (const auto& o : doc.at("objects")) {
      SceneObject obj;
      obj.name = o.at("name").get<std::string>();
      auto box = o.at("bbox");
      if (!box.is_array() || box.size() != 4) {
        throw ConfigError("scene '" + scene.scene_id + "': bbox of '" + obj.name + "' needs 4 numbers");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        obj.bbox[i] = box[i].get<double>();
      }
      if (o.contains("attributes")) {
        for (const auto& [k, v] : o["attributes"].items()) {
          obj.attributes[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      obj.depth = o.value("depth", 0.0);
      scene.objects.push_back(std::move(obj));
    }
    for (const char* key : {"query_overrides", "global_facts"}) {
      auto& target = std::string_view(key) == "query_overrides" ? scene.query_overrides : scene.global_facts;
      if (doc.contains(key)) {
        for (const auto& [k, v] : doc[key].items()) {
          target[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad scene fixture: ") + e.what());
  }
  for (const auto& o : scene.objects) {
    const auto& b = o.bbox;
    bool ok = !o.name.empty() && 0 <= b[0] && b[0] < b[2] && b[2] <= scene.width && 0 <= b[1] &&
              b[1] < b[3] && b[3] <= scene.height;
    if (!ok) {
      throw ConfigError("scene '" + scene.scene_id + "': object '" + o.name + "' has an invalid bbox");
    }
  }
  return scene;
}

SceneFixture load_scene(const std::string& scene_dir, const std::string& scene_id) {
  auto path = std::filesystem::path(scene_dir) / (scene_id + ".json");
  auto scene = parse_scene(detail::read_file(path.string()));
  if (scene.scene_id != scene_id) {
    throw ConfigError("scene file " + path.string() + " declares id '" + scene.scene_id + "'");
  }
  return scene;
}

std::string encode_request(const ExecutionRequest& request) {
  nlohmann::ordered_json doc;
  doc["program"] = request.program;
  doc["entry_point"] = request.entry_point;
  if (!request.scene_json.empty()) {
    doc["scene"] = json::parse(request.scene_json);
  } else {
    doc["scene"] = request.scene;
  }
  doc["time_limit_ms"] = request.time_limit_ms;
  doc["memory_limit_mb"] = request.memory_limit_mb;
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

ExecutionResult result_from(const json& doc) {
  ExecutionResult r;
  r.status = parse_exec_status(doc.at("status").get<std::string>());
  if (r.status == ExecStatus::ok) {
    const auto& a = doc.at("answer");
    r.answer = a.is_string() ? a.get<std::string>() : a.dump();
  }
  if (doc.contains("trace")) {
    for (const auto& ev : doc["trace"]) {
      auto str = [&](const char* k) {
        if (!ev.contains(k)) {
          return std::string{};
        }
        return ev[k].is_string() ? ev[k].get<std::string>() : ev[k].dump();
      };
      r.trace.push_back({str("name"), str("args"), str("result")});
    }
  }
  r.stderr_tail = doc.value("stderr_tail", "");
  r.protocol_error = doc.value("protocol_error", false);
  return r;
}

}  // namespace

ExecutionResult decode_response(std::string_view line) {
  try {
    return result_from(json::parse(line));
  } catch (const std::exception& e) {
    ExecutionResult r;
    r.status = ExecStatus::coding_error;
    r.protocol_error = true;
    r.stderr_tail = std::string("unreadable sandbox response: ") + e.what();
    return r;
  }
}

std::string encode_response(const ExecutionResult& result) {
  nlohmann::ordered_json doc;
  doc["status"] = to_string(result.status);
  if (result.answer) {
    doc["answer"] = *result.answer;
  }
  json trace = json::array();
  for (const auto& ev : result.trace) {
    trace.push_back({{"name", ev.name}, {"args", ev.args}, {"result", ev.result}});
  }
  doc["trace"] = trace;
  if (!result.stderr_tail.empty()) {
    doc["stderr_tail"] = result.stderr_tail;
  }
  if (result.protocol_error) {
    doc["protocol_error"] = true;
  }
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

ExecutionResult UnavailableExecutor::execute(const ExecutionRequest&) {
  ExecutionResult r;
  r.status = ExecStatus::sandbox_unavailable;
  r.stderr_tail = "no execution sandbox configured";
  return r;
}

std::shared_ptr<StubExecutor> StubExecutor::parse(std::string_view jsonl) {
  auto stub = std::shared_ptr<StubExecutor>(new StubExecutor());
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(jsonl)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    try {
      auto doc = json::parse(line);
      auto key = std::make_pair(doc.at("program_sha256").get<std::string>(), doc.at("scene").get<std::string>());
      stub->responses_[key] = result_from(doc.at("response"));
    } catch (const std::exception& e) {
      throw ConfigError("execution stub line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return stub;
}

std::shared_ptr<StubExecutor> StubExecutor::load(const std::string& path) {
  return parse(detail::read_file(path));
}

ExecutionResult StubExecutor::execute(const ExecutionRequest& request) {
  auto it = responses_.find({sha256_hex(request.program), request.scene});
  if (it == responses_.end()) {
    ExecutionResult r;
    r.status = ExecStatus::sandbox_unavailable;
    r.stderr_tail = "no recorded execution for this program and scene";
    return r;
  }
  return it->second;
}

}  // namespace promptfold
