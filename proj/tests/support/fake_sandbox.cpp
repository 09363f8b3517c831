// Stand-in sandbox server for executor tests. Reads one JSON request per
// line and answers according to markers in the program text:
//   "HANG"   never answers
//   "CRASH"  exits without answering
//   "GARBLE" answers with a non-JSON line
//   "RAISE"  answers coding_error
// otherwise answers ok with the scene id and request number.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

namespace {

std::string field(const std::string& line, const std::string& key) {
  auto k = line.find("\"" + key + "\":\"");
  if (k == std::string::npos) {
    return {};
  }
  auto begin = k + key.size() + 4;
  auto end = line.find('"', begin);
  return line.substr(begin, end - begin);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--banner") {
    std::cerr << "fake sandbox ready\n";
  }
  std::string line;
  int n = 0;
  while (std::getline(std::cin, line)) {
    ++n;
    if (line.find("HANG") != std::string::npos) {
      std::this_thread::sleep_for(std::chrono::hours(1));
    }
    if (line.find("CRASH") != std::string::npos) {
      return 3;
    }
    if (line.find("GARBLE") != std::string::npos) {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    if (line.find("RAISE") != std::string::npos) {
      std::cout << R"({"status":"coding_error","trace":[],"stderr_tail":"ZeroDivisionError"})" << std::endl;
      continue;
    }
    std::string scene = field(line, "scene");
    if (line.find("\"scene\":{") != std::string::npos) {
      scene = "inline";
    }
    std::cout << R"({"status":"ok","answer":")" << scene << "#" << n
              << R"(","trace":[{"name":"find","args":"[\"x\"]","result":"[]"}]})" << std::endl;
  }
  return 0;
}
