#pragma once

// Runs recorded stages against the geometry library. The CLI and the HTTP
// service both go through ProjectSession, so the two produce the same bytes
// for the same requests.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brickstart/meshops.hpp"
#include "brickstart/project.hpp"
#include "brickstart/reconstruct.hpp"
#include "brickstart/stage_params.hpp"

namespace brickstart {

struct StageOutput {
  TriangleMesh mesh;
  /// Cell-aligned solid behind the mesh, when there is one (lattice needs it).
  std::optional<VoxelSolid> solid;
  std::vector<Warning> warnings;
};

namespace detail {

inline const Profile& require_profile(const std::map<Side, Profile>& profiles, const Json& side_name,
                                      Operation op) {
  const Side side = parse_side(side_name.get<std::string>());
  auto it = profiles.find(side);
  if (it == profiles.end()) {
    throw Error(ErrorCode::MissingProfile, std::string(to_string(op)),
                "no " + std::string(to_string(side)) + " profile");
  }
  return it->second;
}

}  // namespace detail

/// Fills in choices that depend on the available profiles: the side of an
/// extrude/lathe when only one profile exists, the side list of triplanar.
inline Json resolve_reconstruction_params(Operation op, const Json& given, const std::map<Side, Profile>& profiles) {
  Json p = given.is_null() ? Json::object() : given;
  if ((op == Operation::Extrude || op == Operation::Lathe) && p.is_object() && !p.contains("side") &&
      profiles.size() == 1) {
    p["side"] = std::string(to_string(profiles.begin()->first));
  }
  if (op == Operation::Triplanar && p.is_object() && (!p.contains("sides") || p["sides"].empty())) {
    Json sides = Json::array();
    for (const auto& [side, prof] : profiles) sides.push_back(std::string(to_string(side)));
    if (sides.size() < 2) {
      throw Error(ErrorCode::MissingProfile, "triplanar",
                  "triplanar needs two or three profiles, project has " + std::to_string(profiles.size()));
    }
    p["sides"] = sides;
  }
  return normalize_params(op, p);
}

/// `params` must be normalized.
inline StageOutput run_reconstruction(Operation op, const Json& params, const std::map<Side, Profile>& profiles) {
  switch (op) {
    case Operation::Extrude: {
      const Profile& p = detail::require_profile(profiles, params.at("side"), op);
      const ExtrudeParams e = extrude_params(params);
      Reconstruction r = extrude(p, e);
      VoxelSolid s = e.depth_mm ? profile_solid(p, 1, *e.depth_mm, e.direction) : extrude_solid(p, e);
      return {std::move(r.mesh), std::move(s), std::move(r.warnings)};
    }
    case Operation::Lathe: {
      const Profile& p = detail::require_profile(profiles, params.at("side"), op);
      Reconstruction r = lathe(p, lathe_params(params));
      return {std::move(r.mesh), std::nullopt, std::move(r.warnings)};
    }
    case Operation::Triplanar: {
      std::vector<Profile> views;
      for (const auto& s : params.at("sides")) views.push_back(detail::require_profile(profiles, s, op));
      Reconstruction r = triplanar_mesh(views);
      return {std::move(r.mesh), triplanar(views), std::move(r.warnings)};
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "pipeline", std::string(to_string(op)) + " is not a reconstruction");
  }
}

/// `params` must be normalized.
inline StageOutput run_post(Operation op, const Json& params, const StageOutput& in) {
  switch (op) {
    case Operation::Smooth:
      return {smooth(in.mesh, smooth_params(params)), std::nullopt, {}};
    case Operation::Lattice:
      if (!in.solid) {
        throw Error(ErrorCode::StateConflict, "lattice",
                    "lattice needs a cell-aligned solid; apply it before smoothing and not after lathe");
      }
      return {lattice(*in.solid, params.at("strut_mm").get<double>()), std::nullopt, {}};
    case Operation::Scale: {
      const double f = params.at("factor").get<double>();
      StageOutput out{scale(in.mesh, f), std::nullopt, {}};
      if (in.solid) out.solid = scale_solid(*in.solid, vertex_centroid(in.mesh), f);
      return out;
    }
    case Operation::Merge: {
      MergeResult r = merge_primitive(in.mesh, merge_primitive_params(params), params.at("resolution_mm").get<double>());
      return {std::move(r.mesh), std::move(r.solid), std::move(r.warnings)};
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "pipeline", std::string(to_string(op)) + " is not a post-processing step");
  }
}

/// A project plus the meshes of its stages, computed on demand.
class ProjectSession {
 public:
  explicit ProjectSession(ProjectState state) : state_(std::move(state)), cache_(state_.stages.size()) {}

  const ProjectState& state() const { return state_; }

  void set_profile(Profile p) {
    const Side side = p.side();
    state_.profiles.insert_or_assign(side, std::move(p));
    touch();
  }

  /// Appends a reconstruction stage; returns its index.
  std::size_t reconstruct(Operation op, const Json& params) {
    if (!is_reconstruction(op)) {
      throw Error(ErrorCode::InvalidArgument, "reconstruct", std::string(to_string(op)) + " is not a reconstruction");
    }
    if (state_.profiles.empty()) throw Error(ErrorCode::MissingProfile, "reconstruct", "project has no profiles");
    const Json norm = resolve_reconstruction_params(op, params, state_.profiles);
    StageOutput out = run_reconstruction(op, norm, state_.profiles);
    state_.method = MethodSpec{op, norm};
    return append(op, norm, profiles_digest(state_.profiles), std::move(out));
  }

  /// Appends a post-processing stage working on the latest stage.
  std::size_t post(Operation op, const Json& params) {
    if (is_reconstruction(op)) {
      throw Error(ErrorCode::InvalidArgument, "post", std::string(to_string(op)) + " is a reconstruction");
    }
    const Json norm = normalize_params(op, params);
    if (state_.stages.empty()) {
      throw Error(ErrorCode::StateConflict, std::string(to_string(op)), "nothing to post-process: reconstruct first");
    }
    const std::size_t last = state_.stages.size() - 1;
    StageOutput out = run_post(op, norm, output(last));
    return append(op, norm, state_.stages[last].digest, std::move(out));
  }

  /// Mesh of stage `i`, replaying the chain if needed. A replay that does
  /// not reproduce the recorded digests means the inputs changed.
  const StageOutput& output(std::size_t i) {
    if (i >= state_.stages.size()) {
      throw Error(ErrorCode::NotFound, "pipeline", "no stage " + std::to_string(i));
    }
    if (cache_[i]) return *cache_[i];
    const MeshStage& s = state_.stages[i];
    StageOutput out = compute(i);
    if (mesh_digest(out.mesh) != s.digest) {
      throw Error(ErrorCode::StateConflict, "pipeline",
                  "stage " + std::to_string(i) + " (" + std::string(to_string(s.operation)) +
                      ") no longer matches its recorded digest; run the pipeline to refresh it");
    }
    cache_[i] = std::move(out);
    return *cache_[i];
  }

  const StageOutput& latest() {
    if (state_.stages.empty()) throw Error(ErrorCode::NotFound, "pipeline", "project has no stages");
    return output(state_.stages.size() - 1);
  }

  /// Recomputes every stage and rewrites input/output digests and warnings.
  /// Returns the number of stages whose record changed.
  std::size_t replay() {
    std::size_t changed = 0;
    cache_.assign(state_.stages.size(), std::nullopt);
    for (std::size_t i = 0; i < state_.stages.size(); ++i) {
      StageOutput out = compute(i);
      MeshStage& s = state_.stages[i];
      const std::string input =
          is_reconstruction(s.operation) ? profiles_digest(state_.profiles) : state_.stages[i - 1].digest;
      MeshStage fresh{s.operation, s.params, input, mesh_digest(out.mesh), out.warnings};
      if (!(fresh == s)) {
        s = std::move(fresh);
        ++changed;
      }
      cache_[i] = std::move(out);
    }
    if (changed) touch();
    return changed;
  }

 private:
  StageOutput compute(std::size_t i) {
    const MeshStage& s = state_.stages[i];
    if (is_reconstruction(s.operation)) return run_reconstruction(s.operation, s.params, state_.profiles);
    return run_post(s.operation, s.params, output_unchecked(i - 1));
  }

  const StageOutput& output_unchecked(std::size_t i) {
    if (!cache_[i]) cache_[i] = compute(i);
    return *cache_[i];
  }

  std::size_t append(Operation op, const Json& params, std::string input, StageOutput out) {
    state_.stages.push_back({op, params, std::move(input), mesh_digest(out.mesh), out.warnings});
    cache_.push_back(std::move(out));
    touch();
    return state_.stages.size() - 1;
  }

  void touch() { state_.modified = current_timestamp(); }

  ProjectState state_;
  std::vector<std::optional<StageOutput>> cache_;
};

}  // namespace brickstart
