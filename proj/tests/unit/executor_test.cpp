#include <gtest/gtest.h>

#include <json.hpp>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "promptfold/executor.hpp"
#include "promptfold/subprocess_executor.hpp"
#include "test_support.hpp"

using namespace promptfold;
using namespace promptfold::testing;
using namespace std::chrono_literals;

namespace {

ExecutionRequest request(std::string program, std::string scene = "kitchen", int time_limit_ms = 2000) {
  ExecutionRequest r;
  r.program = std::move(program);
  r.scene = std::move(scene);
  r.time_limit_ms = time_limit_ms;
  return r;
}

SubprocessOptions fake_options() {
  SubprocessOptions o;
  o.argv = {FAKE_SANDBOX_PATH};
  o.grace = 300ms;
  return o;
}

}  // namespace

TEST(ExecStatus, Names) {
  for (auto s : {ExecStatus::ok, ExecStatus::coding_error, ExecStatus::timeout, ExecStatus::sandbox_unavailable}) {
    EXPECT_EQ(parse_exec_status(to_string(s)), s);
  }
  EXPECT_THROW(parse_exec_status("crashed"), InvalidArgument);
}

TEST(Protocol, RequestLine) {
  auto line = encode_request(request("def execute_command(image):\n    return 1\n"));
  EXPECT_EQ(line.find('\n'), std::string::npos);
  auto doc = nlohmann::json::parse(line);
  EXPECT_EQ(doc["entry_point"], "execute_command");
  EXPECT_EQ(doc["scene"], "kitchen");
  EXPECT_EQ(doc["time_limit_ms"], 2000);
  EXPECT_EQ(doc["memory_limit_mb"], 512);

  auto inline_req = request("x");
  inline_req.scene_json = "{\"scene_id\": \"k\"}";
  EXPECT_EQ(nlohmann::json::parse(encode_request(inline_req))["scene"]["scene_id"], "k");
}

TEST(Protocol, ResponseRoundTrip) {
  ExecutionResult r;
  r.status = ExecStatus::ok;
  r.answer = "blue";
  r.trace = {{"find", "[\"cup\"]", "[ImagePatch(1)]"}, {"simple_query", "[\"color?\"]", "blue"}};
  EXPECT_EQ(decode_response(encode_response(r)), r);

  auto numeric = decode_response(R"({"status":"ok","answer":3,"trace":[]})");
  EXPECT_EQ(numeric.answer, "3");

  auto bad = decode_response("Traceback (most recent call last)");
  EXPECT_EQ(bad.status, ExecStatus::coding_error);
  EXPECT_TRUE(bad.protocol_error);
  auto bad_status = decode_response(R"({"status":"exploded"})");
  EXPECT_TRUE(bad_status.protocol_error);
}

TEST(Scenes, ShippedFixturesParse) {
  for (std::string id : {"kitchen", "living_room", "street_cafe"}) {
    auto scene = load_scene(data_path("demo/scenes"), id);
    EXPECT_EQ(scene.scene_id, id);
    EXPECT_FALSE(scene.objects.empty());
    for (const auto& o : scene.objects) {
      EXPECT_LT(o.bbox[0], o.bbox[2]);
      EXPECT_LT(o.bbox[1], o.bbox[3]);
    }
  }
  EXPECT_THROW(load_scene(data_path("demo/scenes"), "moon"), ConfigError);
}

TEST(Scenes, BboxInvariants) {
  auto make = [](const char* bbox) {
    return std::string(R"({"scene_id":"s","width":100,"height":100,"objects":[{"name":"a","bbox":)") + bbox + "}]}";
  };
  EXPECT_NO_THROW(parse_scene(make("[0,0,10,10]")));
  EXPECT_THROW(parse_scene(make("[10,0,5,10]")), ConfigError);
  EXPECT_THROW(parse_scene(make("[0,0,10,200]")), ConfigError);
  EXPECT_THROW(parse_scene(make("[0,0,10]")), ConfigError);
}

TEST(StubExecutor, ServesRecordedResponses) {
  std::string program = "def execute_command(image):\n    return 'yes'\n";
  auto stub = StubExecutor::parse("{\"program_sha256\": \"" + sha256_hex(program) +
                                  "\", \"scene\": \"kitchen\", \"response\": {\"status\": \"ok\", \"answer\": "
                                  "\"yes\", \"trace\": []}}\n");
  EXPECT_EQ(stub->size(), 1u);
  auto hit = stub->execute(request(program));
  EXPECT_EQ(hit.status, ExecStatus::ok);
  EXPECT_EQ(hit.answer, "yes");
  EXPECT_EQ(stub->execute(request(program, "street_cafe")).status, ExecStatus::sandbox_unavailable);
  EXPECT_EQ(stub->execute(request(program + " ")).status, ExecStatus::sandbox_unavailable);
  EXPECT_EQ(StubExecutor::load(data_path("demo/exec_stub.jsonl"))->size(), 40u);
  EXPECT_THROW(StubExecutor::parse("{\"scene\": \"k\"}\n"), ConfigError);
}

TEST(UnavailableExecutor, AlwaysUnavailable) {
  UnavailableExecutor ex;
  auto r = ex.execute(request("x"));
  EXPECT_EQ(r.status, ExecStatus::sandbox_unavailable);
  EXPECT_FALSE(r.answer.has_value());
}

TEST(SubprocessExecutor, AnswersInRequestOrderOnOneChild) {
  SubprocessExecutor ex(fake_options());
  EXPECT_EQ(ex.spawn_count(), 0);
  for (int i = 1; i <= 5; ++i) {
    auto r = ex.execute(request("ok", "scene" + std::to_string(i)));
    ASSERT_EQ(r.status, ExecStatus::ok);
    EXPECT_EQ(r.answer, "scene" + std::to_string(i) + "#" + std::to_string(i));
    ASSERT_EQ(r.trace.size(), 1u);
    EXPECT_EQ(r.trace[0].name, "find");
    EXPECT_EQ(r.trace[0].result, "[]");
  }
  EXPECT_EQ(ex.spawn_count(), 1);
}

TEST(SubprocessExecutor, MalformedLineAndCodingErrorKeepTheChild) {
  SubprocessExecutor ex(fake_options());
  auto garbled = ex.execute(request("GARBLE"));
  EXPECT_EQ(garbled.status, ExecStatus::coding_error);
  EXPECT_TRUE(garbled.protocol_error);
  auto raised = ex.execute(request("RAISE"));
  EXPECT_EQ(raised.status, ExecStatus::coding_error);
  EXPECT_EQ(raised.stderr_tail, "ZeroDivisionError");
  EXPECT_EQ(ex.execute(request("ok", "s")).answer, "s#3");
  EXPECT_EQ(ex.spawn_count(), 1);
}

TEST(SubprocessExecutor, DeadlineKillsAndRestarts) {
  SubprocessExecutor ex(fake_options());
  auto start = std::chrono::steady_clock::now();
  auto r = ex.execute(request("HANG", "kitchen", 200));
  auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(r.status, ExecStatus::timeout);
  EXPECT_GE(elapsed, 500ms);
  EXPECT_LT(elapsed, 3s);
  auto next = ex.execute(request("ok", "after"));
  EXPECT_EQ(next.status, ExecStatus::ok);
  EXPECT_EQ(next.answer, "after#1");
  EXPECT_EQ(ex.spawn_count(), 2);
}

TEST(SubprocessExecutor, CrashingChildIsRespawnedOnce) {
  SubprocessExecutor ex(fake_options());
  auto r = ex.execute(request("CRASH"));
  EXPECT_EQ(r.status, ExecStatus::sandbox_unavailable);
  EXPECT_EQ(ex.spawn_count(), 2);
  EXPECT_EQ(ex.execute(request("ok", "k")).status, ExecStatus::ok);
}

TEST(SubprocessExecutor, MissingBinaryIsSandboxUnavailable) {
  SubprocessOptions o;
  o.argv = {"/nonexistent/sandbox-server"};
  SubprocessExecutor ex(o);
  auto r = ex.execute(request("ok"));
  EXPECT_EQ(r.status, ExecStatus::sandbox_unavailable);
  EXPECT_FALSE(r.stderr_tail.empty());
}

TEST(SubprocessExecutor, InlineScenesFromSceneDir) {
  auto o = fake_options();
  o.scene_dir = data_path("demo/scenes");
  SubprocessExecutor ex(o);
  EXPECT_EQ(ex.execute(request("ok", "kitchen")).answer, "inline#1");
  EXPECT_EQ(ex.execute(request("ok", "moon")).status, ExecStatus::sandbox_unavailable);
}
