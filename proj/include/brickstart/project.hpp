#pragma once

// Project state (profiles, reconstruction method, linear list of mesh
// stages) and its versioned JSON file form. Meshes themselves are not
// stored; each stage keeps the digest of its input and of its output so a
// replay can be checked byte for byte.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/obj.hpp"
#include "brickstart/stage_params.hpp"

namespace brickstart {

inline constexpr int kProjectVersion = 1;
inline constexpr std::string_view kProjectExtension = ".bsp.json";

// --- digests and timestamps ------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

inline std::string mesh_digest(const TriangleMesh& m) { return digest(obj_string(m)); }

inline std::string format_timestamp(std::int64_t epoch_seconds) {
  const std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// UTC now, or SOURCE_DATE_EPOCH when set (reproducible project files).
inline std::string current_timestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return format_timestamp(v);
  }
  return format_timestamp(static_cast<std::int64_t>(std::time(nullptr)));
}

inline bool valid_timestamp(const std::string& s) {
  int y, mo, d, h, mi, se;
  char z;
  if (s.size() != 20 || std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &se, &z) != 7) {
    return false;
  }
  return z == 'Z' && mo >= 1 && mo <= 12 && d >= 1 && d <= 31 && h < 24 && mi < 60 && se < 61;
}

// --- state ----------------------------------------------------------------------

struct MethodSpec {
  Operation operation = Operation::Extrude;
  Json params = Json::object();
  bool operator==(const MethodSpec&) const = default;
};

struct MeshStage {
  Operation operation = Operation::Extrude;
  Json params = Json::object();
  std::string input_digest;
  std::string digest;
  std::vector<Warning> warnings;
  bool operator==(const MeshStage&) const = default;
};

struct ProjectState {
  std::string id;
  std::string created;
  std::string modified;
  std::map<Side, Profile> profiles;
  std::optional<MethodSpec> method;
  std::vector<MeshStage> stages;

  bool operator==(const ProjectState&) const = default;
};

inline ProjectState new_project(std::string id) {
  ProjectState p;
  p.id = std::move(id);
  p.created = p.modified = current_timestamp();
  return p;
}

/// Digest of everything a reconstruction reads.
inline std::string profiles_digest(const std::map<Side, Profile>& profiles) {
  std::string canon;
  char buf[96];
  for (const auto& [side, p] : profiles) {
    const auto& c = p.cell();
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", c.width_mm, c.depth_mm, c.height_mm);
    canon += std::string(to_string(side)) + "\n" + buf + to_text(p.mask());
  }
  return digest(canon);
}

// --- JSON form ----------------------------------------------------------------------

namespace detail {

inline Json cell_json(const CellDimensions& c) {
  return Json{{"width_mm", c.width_mm}, {"depth_mm", c.depth_mm}, {"height_mm", c.height_mm}};
}

inline Json mask_json(const BrickBitmask& m) {
  Json rows = Json::array();
  std::istringstream in(to_text(m));
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

inline Json warnings_json(const std::vector<Warning>& ws) {
  Json out = Json::array();
  for (const auto& w : ws) out.push_back(Json{{"code", w.code}, {"message", w.message}});
  return out;
}

/// Strict reader: every failure names the JSON path it happened at.
class DocReader {
 public:
  [[noreturn]] static void malformed(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ParseError, "project", path + ": " + what);
  }

  static void only(const Json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
        throw Error(ErrorCode::VersionMismatch, "project",
                    path + "." + it.key() + ": unknown field (file written by a newer version?)");
      }
    }
  }

  static const Json& object(const Json& j, const std::string& path) {
    if (!j.is_object()) malformed(path, "expected an object");
    return j;
  }
  static const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) malformed(path, "expected an array");
    return j;
  }
  static const Json& field(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) malformed(path, std::string("missing field '") + key + "'");
    return obj.at(key);
  }
  static std::string string(const Json& j, const std::string& path) {
    if (!j.is_string()) malformed(path, "expected a string");
    return j.get<std::string>();
  }
  static double number(const Json& j, const std::string& path) {
    if (!j.is_number()) malformed(path, "expected a number");
    return j.get<double>();
  }
};

inline Operation operation_at(const Json& j, const std::string& path) {
  const auto name = DocReader::string(j, path);
  if (auto op = find_operation(name)) return *op;
  throw Error(ErrorCode::VersionMismatch, "project", path + ": unknown operation '" + name + "'");
}

inline Json params_at(Operation op, const Json& j, const std::string& path) {
  DocReader::object(j, path);
  const auto keys = param_keys(op);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      throw Error(ErrorCode::VersionMismatch, "project", path + "." + it.key() + ": unknown parameter");
    }
  }
  try {
    return normalize_params(op, j);
  } catch (const Error& e) {
    DocReader::malformed(path, e.what());
  }
}

inline std::vector<Warning> warnings_at(const Json& j, const std::string& path) {
  std::vector<Warning> out;
  DocReader::array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    DocReader::object(j[i], p);
    DocReader::only(j[i], p, {"code", "message"});
    out.push_back({DocReader::string(DocReader::field(j[i], p, "code"), p + ".code"),
                   DocReader::string(DocReader::field(j[i], p, "message"), p + ".message")});
  }
  return out;
}

}  // namespace detail

/// Deterministic: fixed key order, two-space indent, trailing newline.
inline std::string save_project(const ProjectState& p) {
  Json doc = Json::object();
  doc["version"] = kProjectVersion;
  doc["id"] = p.id;
  doc["created"] = p.created;
  doc["modified"] = p.modified;
  Json profiles = Json::object();
  for (const auto& [side, prof] : p.profiles) {
    profiles[std::string(to_string(side))] = Json{{"cell", detail::cell_json(prof.cell())},
                                                  {"mask", detail::mask_json(prof.mask())}};
  }
  doc["profiles"] = profiles;
  doc["method"] = p.method ? Json{{"operation", to_string(p.method->operation)}, {"params", p.method->params}}
                           : Json(nullptr);
  Json stages = Json::array();
  for (const auto& s : p.stages) {
    stages.push_back(Json{{"operation", to_string(s.operation)},
                          {"params", s.params},
                          {"input_digest", s.input_digest},
                          {"digest", s.digest},
                          {"warnings", detail::warnings_json(s.warnings)}});
  }
  doc["stages"] = stages;
  return doc.dump(2) + "\n";
}

inline ProjectState load_project(std::string_view text) {
  using detail::DocReader;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "project",
                "invalid JSON at offset " + std::to_string(e.byte ? e.byte - 1 : 0) + ": " + e.what());
  }
  DocReader::object(doc, "$");
  const Json& version = DocReader::field(doc, "$", "version");
  if (!version.is_number_integer()) DocReader::malformed("$.version", "expected an integer");
  if (version.get<long long>() != kProjectVersion) {
    throw Error(ErrorCode::VersionMismatch, "project",
                "$.version: file is version " + version.dump() + ", this build reads version " +
                    std::to_string(kProjectVersion));
  }
  DocReader::only(doc, "$", {"version", "id", "created", "modified", "profiles", "method", "stages"});

  ProjectState p;
  p.id = DocReader::string(DocReader::field(doc, "$", "id"), "$.id");
  if (p.id.empty()) DocReader::malformed("$.id", "must not be empty");
  for (const char* key : {"created", "modified"}) {
    const std::string path = std::string("$.") + key;
    std::string ts = DocReader::string(DocReader::field(doc, "$", key), path);
    if (!valid_timestamp(ts)) DocReader::malformed(path, "expected YYYY-MM-DDTHH:MM:SSZ");
    (key[0] == 'c' ? p.created : p.modified) = std::move(ts);
  }

  const Json& profiles = DocReader::object(DocReader::field(doc, "$", "profiles"), "$.profiles");
  for (auto it = profiles.begin(); it != profiles.end(); ++it) {
    const std::string path = "$.profiles." + it.key();
    Side side;
    try {
      side = parse_side(it.key());
    } catch (const Error&) {
      throw Error(ErrorCode::VersionMismatch, "project", path + ": unknown side");
    }
    const Json& pj = DocReader::object(it.value(), path);
    DocReader::only(pj, path, {"cell", "mask"});
    const Json& cj = DocReader::object(DocReader::field(pj, path, "cell"), path + ".cell");
    DocReader::only(cj, path + ".cell", {"width_mm", "depth_mm", "height_mm"});
    CellDimensions cell{DocReader::number(DocReader::field(cj, path + ".cell", "width_mm"), path + ".cell.width_mm"),
                        DocReader::number(DocReader::field(cj, path + ".cell", "depth_mm"), path + ".cell.depth_mm"),
                        DocReader::number(DocReader::field(cj, path + ".cell", "height_mm"), path + ".cell.height_mm")};
    const Json& rows = DocReader::array(DocReader::field(pj, path, "mask"), path + ".mask");
    std::string text;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      text += DocReader::string(rows[i], path + ".mask[" + std::to_string(i) + "]") + "\n";
    }
    try {
      p.profiles.insert_or_assign(side, Profile(parse_bitmask(text), side, cell));
    } catch (const Error& e) {
      DocReader::malformed(path, e.what());
    }
  }

  const Json& method = DocReader::field(doc, "$", "method");
  if (!method.is_null()) {
    DocReader::object(method, "$.method");
    DocReader::only(method, "$.method", {"operation", "params"});
    MethodSpec m;
    m.operation = detail::operation_at(DocReader::field(method, "$.method", "operation"), "$.method.operation");
    if (!is_reconstruction(m.operation)) DocReader::malformed("$.method.operation", "not a reconstruction method");
    m.params = detail::params_at(m.operation, DocReader::field(method, "$.method", "params"), "$.method.params");
    p.method = std::move(m);
  }

  const Json& stages = DocReader::array(DocReader::field(doc, "$", "stages"), "$.stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string path = "$.stages[" + std::to_string(i) + "]";
    const Json& sj = DocReader::object(stages[i], path);
    DocReader::only(sj, path, {"operation", "params", "input_digest", "digest", "warnings"});
    MeshStage s;
    s.operation = detail::operation_at(DocReader::field(sj, path, "operation"), path + ".operation");
    if (i == 0 && !is_reconstruction(s.operation)) {
      DocReader::malformed(path + ".operation", "the first stage must be a reconstruction");
    }
    s.params = detail::params_at(s.operation, DocReader::field(sj, path, "params"), path + ".params");
    s.input_digest = DocReader::string(DocReader::field(sj, path, "input_digest"), path + ".input_digest");
    s.digest = DocReader::string(DocReader::field(sj, path, "digest"), path + ".digest");
    s.warnings = detail::warnings_at(DocReader::field(sj, path, "warnings"), path + ".warnings");
    if (!is_reconstruction(s.operation) && s.input_digest != p.stages.back().digest) {
      DocReader::malformed(path + ".input_digest", "does not match the digest of stage " + std::to_string(i - 1));
    }
    p.stages.push_back(std::move(s));
  }
  if (!p.stages.empty() && !p.method) DocReader::malformed("$.method", "stages recorded without a method");
  return p;
}

inline void write_project(const ProjectState& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << save_project(p);
  if (!out) throw Error(ErrorCode::IoError, "project", "cannot write " + path);
}

inline ProjectState read_project(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "project", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_project(ss.str());
}

}  // namespace brickstart
