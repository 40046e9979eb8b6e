#pragma once

#include "skintone/error.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace skintone::detail {

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

inline nlohmann::json parse_model_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("model file: ") + e.what());
  }
}

/// Typed field access that reports a malformed model instead of a json error.
template <class T>
T field(const nlohmann::json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw Error(Errc::malformed_model, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::malformed_model, std::string("field '") + name + "' has the wrong type");
  }
}

inline void check_header(const nlohmann::json& doc, const char* format, int version) {
  if (!doc.is_object()) throw Error(Errc::malformed_model, "model file is not a JSON object");
  const auto fmt = field<std::string>(doc, "format");
  if (fmt != format) {
    throw Error(Errc::malformed_model, "expected format '" + std::string(format) + "', found '" + fmt + "'");
  }
  const auto v = field<long long>(doc, "version");
  if (v != version) {
    throw Error(Errc::version_mismatch, "unsupported " + std::string(format) + " version " +
                                            std::to_string(v) + " (expected " +
                                            std::to_string(version) + ")");
  }
}

} // namespace skintone::detail
