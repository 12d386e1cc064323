#pragma once

// Wavefront OBJ export and import. Output is byte-deterministic: fixed
// six-decimal coordinates, triangles only, '\n' line endings.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/mesh.hpp"

#ifndef BRICKSTART_VERSION
#define BRICKSTART_VERSION "0.0.0"
#endif

namespace brickstart {

inline constexpr std::string_view kToolName = "brickstart";
inline constexpr std::string_view kToolVersion = BRICKSTART_VERSION;

namespace detail {

inline void append_fixed6(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string_view s(buf);
  if (s == "-0.000000") s = "0.000000";
  out.append(s);
}

}  // namespace detail

inline std::string obj_string(const TriangleMesh& m) {
  std::string out;
  out.reserve(32 + m.vertex_count() * 36 + m.triangle_count() * 20);
  out += "# ";
  out += kToolName;
  out += ' ';
  out += kToolVersion;
  out += '\n';
  for (const auto& v : m.vertices()) {
    out += "v ";
    detail::append_fixed6(out, v.x);
    out += ' ';
    detail::append_fixed6(out, v.y);
    out += ' ';
    detail::append_fixed6(out, v.z);
    out += '\n';
  }
  for (const auto& t : m.triangles()) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' + std::to_string(t[2] + 1) + '\n';
  }
  return out;
}

inline void write_obj(const TriangleMesh& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "export", "cannot open '" + path + "' for writing");
  const std::string s = obj_string(m);
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "export", "write to '" + path + "' failed");
}

/// Reads "v" and "f" records; polygons are fanned into triangles, texture
/// and normal references ("1/2/3") and negative indices are accepted, other
/// records ignored.
inline TriangleMesh parse_obj(std::string_view text) {
  std::vector<Vec3> verts;
  std::vector<Triangle> tris;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorCode::ParseError, "import", "line " + std::to_string(line_no) + ": " + msg);
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream in(line);
    std::string tag;
    if (!(in >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(in >> v.x >> v.y >> v.z)) fail("vertex needs three coordinates");
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<std::uint32_t> idx;
      std::string tok;
      while (in >> tok) {
        long long i = 0;
        try {
          std::size_t used = 0;
          i = std::stoll(tok.substr(0, tok.find('/')), &used);
        } catch (const std::exception&) {
          fail("bad face index '" + tok + "'");
        }
        if (i < 0) i += static_cast<long long>(verts.size()) + 1;
        if (i < 1 || i > static_cast<long long>(verts.size())) fail("face index " + tok + " out of range");
        idx.push_back(static_cast<std::uint32_t>(i - 1));
      }
      if (idx.size() < 3) fail("face needs at least three vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) tris.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  try {
    return TriangleMesh(std::move(verts), std::move(tris));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, "import", e.what());
  }
}

inline TriangleMesh read_obj(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "import", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_obj(ss.str());
}

}  // namespace brickstart
