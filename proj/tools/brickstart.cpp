// brickstart: photos of brick models -> profiles -> meshes -> OBJ.
//
// stdout carries data (profile text, OBJ, JSON reports); stderr carries
// warnings and, on failure, one JSON line {stage, code, message}.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "brickstart/brickstart.hpp"
#include "brickstart/synth.hpp"
#include "brickstart/vision.hpp"

using namespace brickstart;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path, const char* stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, stage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes, const char* stage) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw Error(ErrorCode::IoError, stage, "cannot write '" + path + "'");
}

/// Data goes to the named file, or to stdout when no file is given.
void emit(const std::string& path, const std::string& bytes, const char* stage) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
  } else {
    write_file(path, bytes, stage);
  }
}

void warn(const std::vector<Warning>& ws) {
  for (const auto& w : ws) std::cerr << Json{{"warning", w.code}, {"message", w.message}}.dump() << "\n";
}

bool is_project_path(const std::string& p) { return p.size() >= 5 && p.compare(p.size() - 5, 5, ".json") == 0; }

std::string project_id(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  if (name.size() > kProjectExtension.size() &&
      name.compare(name.size() - kProjectExtension.size(), kProjectExtension.size(), kProjectExtension) == 0) {
    return name.substr(0, name.size() - kProjectExtension.size());
  }
  return fs::path(path).stem().string();
}

ProjectSession open_project(const std::string& path, bool create) {
  if (create && !fs::exists(path)) return ProjectSession(new_project(project_id(path)));
  return ProjectSession(read_project(path));
}

CellDimensions parse_cell(const std::vector<double>& v) {
  if (v.empty()) return {};
  if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "cli", "--cell takes W,D,H in millimetres");
  CellDimensions c{v[0], v[1], v[2]};
  c.validate();
  return c;
}

Json stage_summary(const ProjectState& p, std::size_t i) {
  const MeshStage& s = p.stages[i];
  return Json{{"stage", i},
              {"operation", std::string(to_string(s.operation))},
              {"digest", s.digest},
              {"warnings", warnings_json(s.warnings)}};
}

/// Mesh from an OBJ file or from a stage of a project file.
TriangleMesh load_mesh(const std::string& input, const std::optional<std::size_t>& stage) {
  if (!is_project_path(input)) {
    if (stage) throw Error(ErrorCode::InvalidArgument, "cli", "--stage only applies to project files");
    return read_obj(input);
  }
  ProjectSession s = open_project(input, false);
  return stage ? s.output(*stage).mesh : s.latest().mesh;
}

// --- subcommands -------------------------------------------------------------------

struct ScanArgs {
  std::string image, side, config, debug_dir, out, project;
  std::vector<std::string> sets;
};

int run_scan(const ScanArgs& a) {
  PipelineConfig cfg;
  if (!a.config.empty()) cfg = parse_config(read_file(a.config, "config"));
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "config", "--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, detail::trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
  }
  cfg.validate();
  const Side side = parse_side(a.side);
  const RawImage img = read_image(a.image);

  ScanStages stages;
  auto dump_stages = [&] {
    if (a.debug_dir.empty()) return;
    fs::create_directories(a.debug_dir);
    const fs::path d(a.debug_dir);
    if (!stages.preprocessed.empty()) write_image(stages.preprocessed, (d / "1_preprocessed.png").string());
    if (!stages.quantized.empty()) write_image(stages.quantized, (d / "2_quantized.png").string());
    if (stages.edges.width > 0) write_image(raster_image(stages.edges), (d / "3_edges.png").string());
    if (stages.foreground.width > 0) write_image(raster_image(stages.foreground), (d / "4_foreground.png").string());
  };
  ScanResult r = [&] {
    try {
      return scan_profile(img, side, cfg, &stages);
    } catch (const Error&) {
      dump_stages();
      throw;
    }
  }();
  dump_stages();
  warn(r.warnings);
  std::cerr << Json{{"px_per_cell", {r.segmentation.px_per_cell_x, r.segmentation.px_per_cell_y}},
                    {"cols", r.profile.mask().cols()},
                    {"rows", r.profile.mask().rows()}}
                   .dump()
            << "\n";

  if (!a.project.empty()) {
    ProjectSession s = open_project(a.project, true);
    s.set_profile(r.profile);
    write_project(s.state(), a.project);
  }
  if (!a.out.empty() || a.project.empty()) emit(a.out, to_text(r.profile.mask()), "scan");
  return kExitOk;
}

struct SynthArgs {
  std::string mask, out;
  std::uint64_t seed = 1;
  double noise = 0.0;
  std::vector<int> ppc{14, 11};
};

int run_synth(const SynthArgs& a) {
  if (a.ppc.size() != 2) throw Error(ErrorCode::InvalidArgument, "synth", "--px-per-cell takes X,Y");
  const BrickBitmask mask = parse_bitmask(read_file(a.mask, "synth"));
  SynthParams p;
  p.seed = a.seed;
  p.noise_sigma = a.noise;
  p.px_per_cell_x = a.ppc[0];
  p.px_per_cell_y = a.ppc[1];
  const SynthRender r = synth_render(mask, p);
  write_image(r.image, a.out);

  Json rows = Json::array();
  std::istringstream lines(to_text(mask));
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  const Json truth{{"mask", rows},
                   {"white_cell", {r.truth.white_col, r.truth.white_row}},
                   {"px_per_cell", {r.truth.px_per_cell_x, r.truth.px_per_cell_y}},
                   {"origin", {r.truth.origin_x, r.truth.origin_y}},
                   {"image_size", {r.image.width(), r.image.height()}},
                   {"seed", a.seed},
                   {"noise_sigma", a.noise}};
  const fs::path sidecar = fs::path(a.out).replace_extension(".truth.json");
  write_file(sidecar.string(), truth.dump(2) + "\n", "synth");
  return kExitOk;
}

struct ReconstructArgs {
  std::string method, front, right, top, project, out, side, direction, axis;
  std::vector<double> cell;
  CLI::Option* depth = nullptr;
  CLI::Option* depth_mm = nullptr;
  CLI::Option* segments = nullptr;
  int depth_v = 1, segments_v = 64;
  double depth_mm_v = 0.0;
};

int run_reconstruct(const ReconstructArgs& a) {
  const Operation op = parse_operation(a.method);
  if (!is_reconstruction(op)) throw Error(ErrorCode::InvalidArgument, "cli", a.method + " is not a reconstruction method");
  const CellDimensions cell = parse_cell(a.cell);

  ProjectSession s = a.project.empty() ? ProjectSession(new_project("cli")) : open_project(a.project, true);
  for (auto [path, side] : {std::pair{a.front, Side::Front}, {a.right, Side::Right}, {a.top, Side::Top}}) {
    if (!path.empty()) s.set_profile(Profile(parse_bitmask(read_file(path, "reconstruct")), side, cell));
  }

  Json params = Json::object();
  if (!a.side.empty()) params["side"] = a.side;
  if (a.depth->count()) params["depth"] = a.depth_v;
  if (a.depth_mm->count()) params["depth_mm"] = a.depth_mm_v;
  if (!a.direction.empty()) params["direction"] = a.direction;
  if (!a.axis.empty()) params["axis"] = a.axis;
  if (a.segments->count()) params["segments"] = a.segments_v;

  const std::size_t stage = s.reconstruct(op, params);
  warn(s.state().stages[stage].warnings);
  if (!a.project.empty()) {
    write_project(s.state(), a.project);
    if (a.out.empty()) {
      std::cout << stage_summary(s.state(), stage).dump() << "\n";
      return kExitOk;
    }
  }
  emit(a.out, obj_string(s.output(stage).mesh), "export");
  return kExitOk;
}

struct PostArgs {
  std::string op, project, mesh, out, primitive;
  CLI::Option* iterations = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* mu = nullptr;
  CLI::Option* strut = nullptr;
  CLI::Option* factor = nullptr;
  CLI::Option* size = nullptr;
  CLI::Option* at = nullptr;
  CLI::Option* segments = nullptr;
  CLI::Option* resolution = nullptr;
  bool no_preserve_volume = false;
  int iterations_v = 10, segments_v = 32;
  double lambda_v = 0.5, mu_v = -0.53, strut_v = 2.0, factor_v = 1.0, size_v = 1.0, resolution_v = 1.0;
  std::vector<double> at_v;
};

int run_post_cmd(const PostArgs& a) {
  const Operation op = parse_operation(a.op);
  if (is_reconstruction(op)) throw Error(ErrorCode::InvalidArgument, "cli", a.op + " is not a post-processing step");
  Json params = Json::object();
  if (a.iterations->count()) params["iterations"] = a.iterations_v;
  if (a.lambda->count()) params["lambda"] = a.lambda_v;
  if (a.mu->count()) params["mu"] = a.mu_v;
  if (a.no_preserve_volume) params["preserve_volume"] = false;
  if (a.strut->count()) params["strut_mm"] = a.strut_v;
  if (a.factor->count()) params["factor"] = a.factor_v;
  if (!a.primitive.empty()) params["primitive"] = a.primitive;
  if (a.size->count()) params["size"] = a.size_v;
  if (a.at->count()) params["translation"] = a.at_v;
  if (a.segments->count()) params["segments"] = a.segments_v;
  if (a.resolution->count()) params["resolution_mm"] = a.resolution_v;

  if (a.project.empty() == a.mesh.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cli", "give exactly one of --project or --mesh");
  }
  if (!a.mesh.empty()) {
    const StageOutput in{read_obj(a.mesh), std::nullopt, {}};
    const StageOutput out = run_post(op, normalize_params(op, params), in);
    warn(out.warnings);
    emit(a.out, obj_string(out.mesh), "export");
    return kExitOk;
  }
  ProjectSession s = open_project(a.project, false);
  const std::size_t stage = s.post(op, params);
  warn(s.state().stages[stage].warnings);
  write_project(s.state(), a.project);
  if (a.out.empty()) {
    std::cout << stage_summary(s.state(), stage).dump() << "\n";
  } else {
    write_file(a.out, obj_string(s.output(stage).mesh), "export");
  }
  return kExitOk;
}

int run_analyze(const std::string& input, const std::optional<std::size_t>& stage, const std::string& up) {
  const TriangleMesh m = load_mesh(input, stage);
  std::cout << mesh_report(m, parse_up_axis(up)).dump(2) << "\n";
  return kExitOk;
}

int run_export(const std::string& input, const std::optional<std::size_t>& stage, const std::string& out) {
  emit(out, obj_string(load_mesh(input, stage)), "export");
  return kExitOk;
}

int run_pipeline(const std::string& path) {
  ProjectSession s = open_project(path, false);
  const std::size_t refreshed = s.replay();
  if (refreshed) write_project(s.state(), path);
  for (const auto& st : s.state().stages) warn(st.warnings);
  const auto& stages = s.state().stages;
  std::cout << Json{{"stages", stages.size()},
                    {"refreshed", refreshed},
                    {"digest", stages.empty() ? Json(nullptr) : Json(stages.back().digest)}}
                   .dump()
            << "\n";
  return kExitOk;
}

void fail_line(const Error& e) { std::cerr << error_json(e).dump() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brickstart: brick-model photos to printable meshes"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Recover a profile bitmask from a photo");
  scan_cmd->add_option("image", scan.image, "PNG or JPEG photo")->required();
  scan_cmd->add_option("--side", scan.side, "front, right or top")->required();
  scan_cmd->add_option("--config", scan.config, "key = value pipeline settings");
  scan_cmd->add_option("--set", scan.sets, "override one setting, key=value (repeatable)");
  scan_cmd->add_option("--debug-dir", scan.debug_dir, "write per-stage PNGs here");
  scan_cmd->add_option("-o,--output", scan.out, "profile text file (default stdout)");
  scan_cmd->add_option("--project", scan.project, "store the profile in this project file");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic photo of a bitmask");
  synth_cmd->add_option("mask", synth.mask, "bitmask text file")->required();
  synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise sigma (8-bit units)");
  synth_cmd->add_option("--px-per-cell", synth.ppc, "X,Y pixels per cell")->delimiter(',')->expected(2);
  synth_cmd->add_option("-o,--output", synth.out, "image file")->required();

  ReconstructArgs rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Build a mesh from profiles");
  rec_cmd->add_option("method", rec.method, "extrude, lathe or triplanar")->required();
  rec_cmd->add_option("--front", rec.front, "front profile text file");
  rec_cmd->add_option("--right", rec.right, "right profile text file");
  rec_cmd->add_option("--top", rec.top, "top profile text file");
  rec_cmd->add_option("--cell", rec.cell, "W,D,H cell size in mm for the given profiles")->delimiter(',')->expected(3);
  rec_cmd->add_option("--side", rec.side, "profile to extrude or revolve");
  rec.depth = rec_cmd->add_option("--depth", rec.depth_v, "extrusion depth in cells");
  rec.depth_mm = rec_cmd->add_option("--depth-mm", rec.depth_mm_v, "extrusion depth in mm");
  rec_cmd->add_option("--direction", rec.direction, "positive or negative");
  rec_cmd->add_option("--axis", rec.axis, "lathe axis: left or right");
  rec.segments = rec_cmd->add_option("--segments", rec.segments_v, "lathe angular segments");
  rec_cmd->add_option("--project", rec.project, "project file to update");
  rec_cmd->add_option("-o,--output", rec.out, "OBJ file");

  PostArgs post;
  auto* post_cmd = app.add_subcommand("post", "Post-process the latest mesh");
  post_cmd->add_option("operation", post.op, "smooth, lattice, scale or merge")->required();
  post_cmd->add_option("--project", post.project, "project file to update");
  post_cmd->add_option("--mesh", post.mesh, "OBJ input instead of a project");
  post_cmd->add_option("-o,--output", post.out, "OBJ file");
  post.iterations = post_cmd->add_option("--iterations", post.iterations_v, "smooth: iterations");
  post.lambda = post_cmd->add_option("--lambda", post.lambda_v, "smooth: shrink step");
  post.mu = post_cmd->add_option("--mu", post.mu_v, "smooth: inflate step");
  post_cmd->add_flag("--no-preserve-volume", post.no_preserve_volume, "smooth: skip volume correction");
  post.strut = post_cmd->add_option("--strut-mm", post.strut_v, "lattice: strut thickness");
  post.factor = post_cmd->add_option("--factor", post.factor_v, "scale: uniform factor");
  post_cmd->add_option("--primitive", post.primitive, "merge: cube or sphere");
  post.size = post_cmd->add_option("--size", post.size_v, "merge: cube edge or sphere diameter in mm");
  post.at = post_cmd->add_option("--at", post.at_v, "merge: X,Y,Z centre in mm")->delimiter(',')->expected(3);
  post.segments = post_cmd->add_option("--segments", post.segments_v, "merge: sphere segments");
  post.resolution = post_cmd->add_option("--resolution", post.resolution_v, "merge: voxel size in mm");

  std::string analyze_in, analyze_up = "y";
  std::optional<std::size_t> analyze_stage;
  auto* analyze_cmd = app.add_subcommand("analyze", "Mesh report as JSON");
  analyze_cmd->add_option("input", analyze_in, "OBJ or project file")->required();
  analyze_cmd->add_option("--stage", analyze_stage, "project stage (default latest)");
  analyze_cmd->add_option("--up", analyze_up, "up axis for the balance check: x, y or z");

  std::string export_in, export_out;
  std::optional<std::size_t> export_stage;
  auto* export_cmd = app.add_subcommand("export", "Write a mesh as OBJ");
  export_cmd->add_option("input", export_in, "project or OBJ file")->required();
  export_cmd->add_option("--stage", export_stage, "project stage (default latest)");
  export_cmd->add_option("-o,--output", export_out, "OBJ file")->required();

  std::string pipeline_in;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Replay all recorded stages of a project");
  pipeline_cmd->add_option("project", pipeline_in, "project file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    fail_line(Error(ErrorCode::InvalidArgument, "usage", e.what()));
    return kExitUsage;
  }

  try {
    if (*scan_cmd) return run_scan(scan);
    if (*synth_cmd) return run_synth(synth);
    if (*rec_cmd) return run_reconstruct(rec);
    if (*post_cmd) return run_post_cmd(post);
    if (*analyze_cmd) return run_analyze(analyze_in, analyze_stage, analyze_up);
    if (*export_cmd) return run_export(export_in, export_stage, export_out);
    if (*pipeline_cmd) return run_pipeline(pipeline_in);
  } catch (const Error& e) {
    fail_line(e);
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << Json{{"stage", "internal"}, {"code", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return kExitUsage;
}
