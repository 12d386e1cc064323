#pragma once

// HTTP front end: in-memory sessions, each wrapping one ProjectSession.
// Geometry always comes from the pipeline engine; handlers only translate
// between HTTP and library calls.

#include <httplib.h>

#include <charconv>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include "brickstart/brickstart.hpp"
#include "brickstart/vision.hpp"

namespace brickstart {

class Service {
 public:
  Service() : rng_(std::random_device{}()) {}

  void mount(httplib::Server& srv) {
    srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(Json{{"status", "ok"}, {"version", std::string(kToolVersion)}}.dump(), "application/json");
    });
    srv.Post("/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) { create(req, res); }));
    srv.Get("/sessions/:id", wrap([this](const httplib::Request& req, httplib::Response& res) {
              with_session(req, [&](ProjectSession& s) { res.set_content(save_project(s.state()), "application/json"); });
            }));
    srv.Delete("/sessions/:id", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 std::unique_lock lock(sessions_mutex_);
                 if (sessions_.erase(req.path_params.at("id")) == 0) throw unknown_session(req);
                 res.status = 204;
               }));
    srv.Post("/sessions/:id/scan", wrap([this](const httplib::Request& req, httplib::Response& res) { scan(req, res); }));
    srv.Put("/sessions/:id/profiles/:side",
            wrap([this](const httplib::Request& req, httplib::Response& res) { put_profile(req, res); }));
    srv.Get("/sessions/:id/profiles/:side", wrap([this](const httplib::Request& req, httplib::Response& res) {
              with_session(req, [&](ProjectSession& s) {
                const Side side = parse_side(req.path_params.at("side"));
                auto it = s.state().profiles.find(side);
                if (it == s.state().profiles.end()) {
                  throw Error(ErrorCode::NotFound, "profile", "no " + std::string(to_string(side)) + " profile");
                }
                res.set_content(profile_json(it->second).dump(), "application/json");
              });
            }));
    srv.Post("/sessions/:id/reconstruct", wrap([this](const httplib::Request& req, httplib::Response& res) {
               const Json body = parse_body(req);
               const Operation op = parse_operation(body_string(body, "method"));
               if (!is_reconstruction(op)) {
                 throw Error(ErrorCode::InvalidArgument, "reconstruct", body_string(body, "method") + " is not a reconstruction method");
               }
               with_session(req, [&](ProjectSession& s) {
                 const std::size_t i = s.reconstruct(op, body.value("params", Json::object()));
                 res.status = 201;
                 res.set_content(stage_json(s.state(), i).dump(), "application/json");
               });
             }));
    srv.Post("/sessions/:id/post", wrap([this](const httplib::Request& req, httplib::Response& res) {
               const Json body = parse_body(req);
               const Operation op = parse_operation(body_string(body, "operation"));
               with_session(req, [&](ProjectSession& s) {
                 const std::size_t i = s.post(op, body.value("params", Json::object()));
                 res.status = 201;
                 res.set_content(stage_json(s.state(), i).dump(), "application/json");
               });
             }));
    srv.Get("/sessions/:id/mesh/:stage", wrap([this](const httplib::Request& req, httplib::Response& res) {
              const std::string format = req.has_param("format") ? req.get_param_value("format") : "obj";
              if (format != "obj" && format != "json") {
                throw Error(ErrorCode::InvalidArgument, "mesh", "format must be obj or json");
              }
              with_session(req, [&](ProjectSession& s) {
                const TriangleMesh& m = stage_output(s, req).mesh;
                if (format == "obj") {
                  res.set_content(obj_string(m), "text/plain");
                } else {
                  res.set_content(mesh_arrays_json(m).dump(), "application/json");
                }
              });
            }));
    srv.Get("/sessions/:id/analyze/:stage", wrap([this](const httplib::Request& req, httplib::Response& res) {
              const UpAxis up = parse_up_axis(req.has_param("up") ? req.get_param_value("up") : "y");
              with_session(req, [&](ProjectSession& s) {
                res.set_content(mesh_report(stage_output(s, req).mesh, up).dump(), "application/json");
              });
            }));
  }

  std::size_t session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
  }

 private:
  struct Session {
    std::mutex mutex;
    ProjectSession project;
    explicit Session(ProjectState s) : project(std::move(s)) {}
  };

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static Handler wrap(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        res.status = http_status(e.code());
        res.set_content(error_json(e).dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(Json{{"stage", "internal"}, {"code", "internal"}, {"message", e.what()}}.dump(),
                        "application/json");
      }
    };
  }

  static Error unknown_session(const httplib::Request& req) {
    return Error(ErrorCode::NotFound, "session", "no session '" + req.path_params.at("id") + "'");
  }

  static Json parse_body(const httplib::Request& req) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, "request", std::string("malformed JSON body: ") + e.what());
    }
    if (!body.is_object()) throw Error(ErrorCode::ParseError, "request", "body must be a JSON object");
    for (auto it = body.begin(); it != body.end(); ++it) {
      if (it.key() != "method" && it.key() != "operation" && it.key() != "params") {
        throw Error(ErrorCode::ParseError, "request", "unknown field '" + it.key() + "'");
      }
    }
    return body;
  }

  static std::string body_string(const Json& body, const char* key) {
    if (!body.contains(key) || !body.at(key).is_string()) {
      throw Error(ErrorCode::ParseError, "request", std::string("body needs a string field '") + key + "'");
    }
    return body.at(key).get<std::string>();
  }

  static Json stage_json(const ProjectState& p, std::size_t i) {
    const MeshStage& s = p.stages[i];
    return Json{{"stage", i},
                {"operation", std::string(to_string(s.operation))},
                {"params", s.params},
                {"input_digest", s.input_digest},
                {"digest", s.digest},
                {"warnings", warnings_json(s.warnings)}};
  }

  static Json profile_json(const Profile& p) {
    const auto& c = p.cell();
    return Json{{"side", std::string(to_string(p.side()))},
                {"cols", p.mask().cols()},
                {"rows", p.mask().rows()},
                {"cells", to_text(p.mask())},
                {"cell", {{"width_mm", c.width_mm}, {"depth_mm", c.depth_mm}, {"height_mm", c.height_mm}}}};
  }

  static const StageOutput& stage_output(ProjectSession& s, const httplib::Request& req) {
    const std::string& key = req.path_params.at("stage");
    if (key == "latest") return s.latest();
    std::size_t i = 0;
    auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), i);
    if (ec != std::errc() || p != key.data() + key.size()) {
      throw Error(ErrorCode::NotFound, "mesh", "no stage '" + key + "'");
    }
    return s.output(i);
  }

  std::shared_ptr<Session> find(const httplib::Request& req) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(req.path_params.at("id"));
    if (it == sessions_.end()) throw unknown_session(req);
    return it->second;
  }

  /// Runs `f` holding the session lock: one request per session at a time.
  template <class F>
  void with_session(const httplib::Request& req, F&& f) {
    auto s = find(req);
    std::lock_guard lock(s->mutex);
    f(s->project);
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    std::string id;
    {
      std::unique_lock lock(sessions_mutex_);
      do {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
        id = buf;
      } while (sessions_.count(id));
    }
    // A project document in the body restores a saved session.
    ProjectState state = req.body.empty() ? new_project(id) : load_project(req.body);
    state.id = id;
    auto session = std::make_shared<Session>(std::move(state));
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(id, session);
    }
    res.status = 201;
    res.set_content(Json{{"id", id}}.dump(), "application/json");
  }

  void scan(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
      throw Error(ErrorCode::ParseError, "request", "scan expects multipart/form-data with 'image' and 'side'");
    }
    if (!req.has_file("image")) throw Error(ErrorCode::ParseError, "request", "missing 'image' part");
    if (!req.has_file("side")) throw Error(ErrorCode::ParseError, "request", "missing 'side' part");
    const Side side = parse_side(req.get_file_value("side").content);
    PipelineConfig cfg;
    for (const auto& [name, part] : req.files) {
      if (name == "image" || name == "side") continue;
      set_config_value(cfg, name, part.content);
    }
    cfg.validate();
    const RawImage img = decode_image(req.get_file_value("image").content);
    // The scan itself touches no session state; only storing the result does.
    find(req);
    const ScanResult r = scan_profile(img, side, cfg);
    with_session(req, [&](ProjectSession& s) { s.set_profile(r.profile); });
    Json out = profile_json(r.profile);
    out["px_per_cell"] = Json::array({r.segmentation.px_per_cell_x, r.segmentation.px_per_cell_y});
    out["warnings"] = warnings_json(r.warnings);
    res.set_content(out.dump(), "application/json");
  }

  void put_profile(const httplib::Request& req, httplib::Response& res) {
    const Side side = parse_side(req.path_params.at("side"));
    const CellDimensions def;
    auto mm = [&](const char* key, double fallback) {
      if (!req.has_param(key)) return fallback;
      const std::string v = req.get_param_value(key);
      double x = 0.0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc() || p != v.data() + v.size()) {
        throw Error(ErrorCode::InvalidArgument, "profile", std::string(key) + " must be a number");
      }
      return x;
    };
    const CellDimensions cell{mm("cell_width_mm", def.width_mm), mm("cell_depth_mm", def.depth_mm),
                              mm("cell_height_mm", def.height_mm)};
    if (!cell.valid()) throw Error(ErrorCode::InvalidArgument, "profile", "cell dimensions must be positive");
    BrickBitmask mask = parse_bitmask(req.body);
    const Profile p(std::move(mask), side, cell);
    with_session(req, [&](ProjectSession& s) { s.set_profile(p); });
    Json out = profile_json(p);
    out["warnings"] = Json::array();
    if (auto w = disconnection_warning(p.mask())) out["warnings"] = warnings_json({*w});
    res.set_content(out.dump(), "application/json");
  }

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
};

}  // namespace brickstart
