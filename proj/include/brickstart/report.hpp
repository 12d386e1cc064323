#pragma once

// JSON renderings shared by `brickstart analyze` and the HTTP service.

#include <string>
#include <vector>

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/mesh.hpp"
#include "brickstart/meshops.hpp"
#include "brickstart/stage_params.hpp"

namespace brickstart {

inline Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

inline Json analysis_json(const MeshAnalysis& a) {
  return Json{{"volume_mm3", a.volume_mm3},
              {"surface_area_mm2", a.surface_area_mm2},
              {"watertight", a.watertight},
              {"shell_count", a.shell_count},
              {"euler_characteristic", a.euler_characteristic},
              {"degenerate_triangles", a.degenerate_triangles},
              {"bbox", Json{{"min", vec_json(a.bbox.min)}, {"max", vec_json(a.bbox.max)}}}};
}

inline Json balance_json(const BalanceReport& b) {
  Json poly = Json::array();
  for (const auto& p : b.support_polygon) poly.push_back(Json::array({p.u, p.v}));
  return Json{{"center_of_mass", vec_json(b.center_of_mass)},
              {"support_polygon", poly},
              {"stable", b.stable},
              {"margin_mm", b.margin_mm}};
}

/// Analysis plus balance; balance is null for meshes that are not closed.
inline Json mesh_report(const TriangleMesh& m, UpAxis up = UpAxis::Y) {
  const MeshAnalysis a = analyze(m);
  Json out{{"vertices", m.vertex_count()}, {"triangles", m.triangle_count()}, {"analysis", analysis_json(a)}};
  out["up"] = std::string(to_string(up));
  out["balance"] = a.watertight ? balance_json(balance_report(m, up)) : Json(nullptr);
  return out;
}

/// Flat arrays for browser rendering.
inline Json mesh_arrays_json(const TriangleMesh& m) {
  Json v = Json::array(), t = Json::array();
  for (const auto& p : m.vertices()) {
    v.push_back(p.x);
    v.push_back(p.y);
    v.push_back(p.z);
  }
  for (const auto& tri : m.triangles())
    for (auto i : tri) t.push_back(i);
  return Json{{"vertices", v}, {"triangles", t}};
}

inline Json warnings_json(const std::vector<Warning>& ws) {
  Json out = Json::array();
  for (const auto& w : ws) out.push_back(Json{{"code", w.code}, {"message", w.message}});
  return out;
}

inline Json error_json(const Error& e) {
  return Json{{"stage", e.stage()}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

}  // namespace brickstart
