#include "promptfold/prompt_set.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "promptfold/digest.hpp"
#include "promptfold/errors.hpp"
#include "text_util.hpp"

namespace promptfold {

using ojson = nlohmann::ordered_json;

namespace {

ojson bundle_json(const SnippetBundle& bundle) {
  ojson list = ojson::array();
  for (const auto& s : bundle.snippets) {
    list.push_back({{"id", s.id}, {"code", s.code}});
  }
  return {{"snippets", list}};
}

SnippetBundle bundle_from(const ojson& doc, const ApiDefinitionIndex& defs) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& s : doc.at("snippets")) {
    items.emplace_back(s.at("id").get<std::string>(), s.at("code").get<std::string>());
  }
  return make_bundle(items, defs);
}

ojson body_json(const CompressedPromptSet& set) {
  ojson doc;
  doc["version"] = kPromptSetVersion;
  doc["tokenizer"] = set.provenance.tokenizer;
  doc["api_defs"] = set.api_defs.source_text();
  ojson types = ojson::object();
  for (const auto& [name, bundle] : set.per_type) {
    types[name] = bundle_json(bundle);
  }
  doc["types"] = types;
  if (set.generic) {
    doc["generic"] = bundle_json(*set.generic);
  }
  const auto& p = set.provenance;
  ojson counts = ojson::object();
  for (const auto& [k, v] : p.token_counts) {
    counts[k] = v;
  }
  doc["provenance"] = {{"backend_id", p.backend_id},
                       {"created_at", p.created_at},
                       {"template_version", p.template_version},
                       {"token_counts", counts},
                       {"warnings", p.warnings}};
  return doc;
}

std::string checksum_of(const ojson& body) { return sha256_hex(body.dump(2)); }

}  // namespace

std::string serialize_set(const CompressedPromptSet& set) {
  ojson doc = body_json(set);
  doc["checksum"] = checksum_of(doc);
  return doc.dump(2) + "\n";
}

CompressedPromptSet deserialize_set(std::string_view text,
                                    const std::optional<std::string>& expected_tokenizer) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCache(std::string("compressed set is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) {
      throw CorruptCache("compressed set is not a JSON object");
    }
    if (doc.value("version", -1) != kPromptSetVersion) {
      throw CorruptCache("unsupported compressed set version");
    }
    std::string recorded = doc.at("checksum").get<std::string>();
    ojson body = doc;
    body.erase("checksum");
    if (checksum_of(body) != recorded) {
      throw CorruptCache("checksum mismatch");
    }
    CompressedPromptSet set;
    try {
      set.api_defs = parse_api_definitions(doc.at("api_defs").get<std::string>());
    } catch (const MalformedDefinitions& e) {
      throw CorruptCache(std::string("stored definitions do not parse: ") + e.what());
    }
    for (const auto& [name, bundle] : doc.at("types").items()) {
      set.per_type.emplace(name, bundle_from(bundle, set.api_defs));
    }
    if (doc.contains("generic")) {
      set.generic = bundle_from(doc["generic"], set.api_defs);
    }
    auto& p = set.provenance;
    const auto& pj = doc.at("provenance");
    p.tokenizer = doc.at("tokenizer").get<std::string>();
    p.backend_id = pj.at("backend_id").get<std::string>();
    p.created_at = pj.at("created_at").get<std::string>();
    p.template_version = pj.at("template_version").get<std::string>();
    for (const auto& [k, v] : pj.at("token_counts").items()) {
      p.token_counts[k] = v.get<std::size_t>();
    }
    p.warnings = pj.value("warnings", std::vector<std::string>{});
    set.tokenizer_mismatch = expected_tokenizer && *expected_tokenizer != p.tokenizer;
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCache(std::string("compressed set schema error: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptCache(e.what());
  }
}

void save_set(const CompressedPromptSet& set, const std::string& path) {
  std::string tmp = path + ".tmp";
  detail::write_file(tmp, serialize_set(set));
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw ConfigError("cannot write compressed set to '" + path + "': " + ec.message());
  }
}

CompressedPromptSet load_set(const std::string& path, const std::optional<std::string>& expected_tokenizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CorruptCache("cannot read compressed set '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_set(ss.str(), expected_tokenizer);
}

}  // namespace promptfold
