#include "schema_check.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#define RAPIDJSON_SCHEMA_USE_INTERNALREGEX 0
#define RAPIDJSON_SCHEMA_USE_STDREGEX 1
#include <rapidjson/document.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

namespace testing_support {

namespace {

const rapidjson::SchemaDocument& schema(std::string_view name) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<rapidjson::SchemaDocument>, std::less<>> cache;
  std::lock_guard lk(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return *it->second;
  const std::string path = std::string(RVPIPE_SCHEMA_DIR) + "/" + std::string(name) + ".schema.json";
  std::ifstream f(path);
  if (!f) throw std::runtime_error("missing schema " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  rapidjson::Document d;
  if (d.Parse(ss.str().c_str()).HasParseError()) throw std::runtime_error("unparseable schema " + path);
  auto doc = std::make_unique<rapidjson::SchemaDocument>(d);
  return *cache.emplace(std::string(name), std::move(doc)).first->second;
}

}  // namespace

std::string schema_errors(std::string_view name, const nlohmann::json& doc) {
  rapidjson::Document d;
  if (d.Parse(doc.dump().c_str()).HasParseError()) return "payload does not parse";
  rapidjson::SchemaValidator v(schema(name));
  if (d.Accept(v)) return {};
  rapidjson::StringBuffer sp, dp;
  v.GetInvalidSchemaPointer().StringifyUriFragment(sp);
  v.GetInvalidDocumentPointer().StringifyUriFragment(dp);
  return std::string("keyword '") + v.GetInvalidSchemaKeyword() + "' schema " + sp.GetString() + " document " +
         dp.GetString();
}

}  // namespace testing_support
