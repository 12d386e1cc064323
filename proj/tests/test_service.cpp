#include <gtest/gtest.h>

#include <thread>

#include "brickstart/service.hpp"
#include "brickstart/synth.hpp"

using namespace brickstart;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_.mount(srv_);
    port_ = srv_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  void TearDown() override {
    srv_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

  std::string new_session() {
    auto r = client().Post("/sessions");
    EXPECT_EQ(r->status, 201);
    return Json::parse(r->body).at("id").get<std::string>();
  }

  httplib::Result put_profile(const std::string& id, const char* side, const std::string& text) {
    return client().Put("/sessions/" + id + "/profiles/" + side, text, "text/plain");
  }

  httplib::Result post_json(const std::string& path, const Json& body) {
    return client().Post(path, body.dump(), "application/json");
  }

  static void expect_error(const httplib::Result& r, int status, const char* code) {
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, status) << r->body;
    const Json body = Json::parse(r->body);
    EXPECT_EQ(body.at("code"), code) << r->body;
    EXPECT_TRUE(body.contains("stage"));
    EXPECT_TRUE(body.at("message").is_string());
    EXPECT_EQ(body.size(), 3u);
  }

  httplib::Server srv_;
  Service service_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(ServiceTest, Health) {
  auto r = client().Get("/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(Json::parse(r->body).at("status"), "ok");
}

TEST_F(ServiceTest, ScanReconstructMeshMatchesLibrary) {
  const std::string id = new_session();
  const BrickBitmask mask = parse_bitmask("4 3\n####\n#..#\n####\n");
  const RawImage img = synth_render(mask, {.seed = 4, .px_per_cell_x = 16, .px_per_cell_y = 12}).image;

  httplib::MultipartFormDataItems items = {{"image", encode_png(img), "photo.png", "image/png"},
                                           {"side", "front", "", ""}};
  auto scan = client().Post("/sessions/" + id + "/scan", items);
  ASSERT_TRUE(scan);
  ASSERT_EQ(scan->status, 200) << scan->body;
  const Json summary = Json::parse(scan->body);
  EXPECT_EQ(summary.at("cols"), 4);
  EXPECT_EQ(summary.at("rows"), 3);
  EXPECT_EQ(summary.at("cells"), to_text(mask));
  EXPECT_EQ(summary.at("px_per_cell").size(), 2u);

  auto rec = post_json("/sessions/" + id + "/reconstruct", {{"method", "extrude"}, {"params", {{"depth", 2}}}});
  ASSERT_EQ(rec->status, 201) << rec->body;
  EXPECT_EQ(Json::parse(rec->body).at("stage"), 0);

  auto obj = client().Get("/sessions/" + id + "/mesh/0?format=obj");
  ASSERT_EQ(obj->status, 200);
  const Profile direct = scan_profile(img, Side::Front, PipelineConfig{}).profile;
  EXPECT_EQ(obj->body, obj_string(extrude(direct, {2}).mesh));

  auto json = client().Get("/sessions/" + id + "/mesh/latest?format=json");
  const Json arrays = Json::parse(json->body);
  const TriangleMesh m = extrude(direct, {2}).mesh;
  EXPECT_EQ(arrays.at("vertices").size(), 3 * m.vertex_count());
  EXPECT_EQ(arrays.at("triangles").size(), 3 * m.triangle_count());
  EXPECT_DOUBLE_EQ(arrays.at("vertices")[3].get<double>(), m.vertices()[1].x);
}

TEST_F(ServiceTest, ScanErrorsNameVisionStage) {
  const std::string id = new_session();
  httplib::MultipartFormDataItems items = {{"image", encode_png(RawImage(320, 240)), "black.png", "image/png"},
                                           {"side", "top", "", ""}};
  auto r = client().Post("/sessions/" + id + "/scan", items);
  expect_error(r, 422, "no_model_found");
  EXPECT_EQ(Json::parse(r->body).at("stage"), "foreground");

  RawImage red(300, 255);
  for (int y = 100; y < 140; ++y)
    for (int x = 100; x < 160; ++x) red.set(x, y, {200, 40, 40});
  items[0].content = encode_png(red);
  r = client().Post("/sessions/" + id + "/scan", items);
  expect_error(r, 422, "reference_not_found");
  EXPECT_EQ(Json::parse(r->body).at("stage"), "reference");

  items[0].content = "not an image";
  expect_error(client().Post("/sessions/" + id + "/scan", items), 400, "parse_error");
  expect_error(client().Post("/sessions/" + id + "/scan", "{}", "application/json"), 400, "parse_error");
  items[0].content = encode_png(red);
  items.push_back({"blur_sigma", "-1", "", ""});
  expect_error(client().Post("/sessions/" + id + "/scan", items), 422, "invalid_argument");
}

TEST_F(ServiceTest, ScanAcceptsConfigFields) {
  const std::string id = new_session();
  const BrickBitmask mask = parse_bitmask("2 2\n##\n#.\n");
  const RawImage img = synth_render(mask, {.seed = 2, .px_per_cell_x = 20, .px_per_cell_y = 20}).image;
  httplib::MultipartFormDataItems items = {{"image", encode_png(img), "p.png", "image/png"},
                                           {"side", "right", "", ""},
                                           {"cell_depth_mm", "8", "", ""}};
  auto r = client().Post("/sessions/" + id + "/scan", items);
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(Json::parse(r->body).at("cell").at("depth_mm"), 8.0);
  items.push_back({"sharpness", "3", "", ""});
  expect_error(client().Post("/sessions/" + id + "/scan", items), 400, "parse_error");
}

TEST_F(ServiceTest, UnknownSessionAndStage) {
  expect_error(client().Get("/sessions/nope"), 404, "not_found");
  expect_error(client().Get("/sessions/nope/mesh/0"), 404, "not_found");
  const std::string id = new_session();
  expect_error(client().Get("/sessions/" + id + "/mesh/0"), 404, "not_found");
  ASSERT_EQ(put_profile(id, "front", "1 1\n#\n")->status, 200);
  ASSERT_EQ(post_json("/sessions/" + id + "/reconstruct", {{"method", "extrude"}})->status, 201);
  EXPECT_EQ(client().Get("/sessions/" + id + "/mesh/0")->status, 200);
  expect_error(client().Get("/sessions/" + id + "/mesh/1"), 404, "not_found");
  expect_error(client().Get("/sessions/" + id + "/mesh/abc"), 404, "not_found");
  expect_error(client().Get("/sessions/" + id + "/analyze/7"), 404, "not_found");
  expect_error(client().Get("/sessions/" + id + "/profiles/top"), 404, "not_found");
}

TEST_F(ServiceTest, TriplanarMismatchIsConflictNamingAxes) {
  const std::string id = new_session();
  put_profile(id, "front", "3 2\n###\n###\n");
  put_profile(id, "right", "2 4\n##\n##\n##\n##\n");
  auto r = post_json("/sessions/" + id + "/reconstruct", {{"method", "triplanar"}});
  expect_error(r, 409, "dimension_mismatch");
  const std::string msg = Json::parse(r->body).at("message");
  EXPECT_NE(msg.find("front.rows = 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("right.rows = 4"), std::string::npos) << msg;
}

TEST_F(ServiceTest, MissingProfilesAreConflicts) {
  const std::string id = new_session();
  expect_error(post_json("/sessions/" + id + "/reconstruct", {{"method", "extrude"}}), 409, "missing_profile");
  put_profile(id, "front", "2 1\n##\n");
  expect_error(post_json("/sessions/" + id + "/reconstruct", {{"method", "triplanar"}}), 409, "missing_profile");
  expect_error(post_json("/sessions/" + id + "/post", {{"operation", "smooth"}}), 409, "state_conflict");
}

TEST_F(ServiceTest, MalformedAndInvalidRequests) {
  const std::string id = new_session();
  put_profile(id, "front", "2 2\n##\n##\n");
  const std::string rec = "/sessions/" + id + "/reconstruct";
  expect_error(client().Post(rec, "{\"method\": ", "application/json"), 400, "parse_error");
  expect_error(post_json(rec, Json::array()), 400, "parse_error");
  expect_error(post_json(rec, {{"params", Json::object()}}), 400, "parse_error");
  expect_error(post_json(rec, {{"method", "extrude"}, {"extra", 1}}), 400, "parse_error");
  expect_error(post_json(rec, {{"method", "carve"}}), 422, "invalid_argument");
  expect_error(post_json(rec, {{"method", "smooth"}}), 422, "invalid_argument");
  expect_error(post_json(rec, {{"method", "extrude"}, {"params", {{"depth", 0}}}}), 422, "invalid_argument");
  expect_error(post_json(rec, {{"method", "lathe"}, {"params", {{"depth", 2}}}}), 422, "invalid_argument");
  expect_error(put_profile(id, "front", "2 2\n#x\n##\n"), 400, "parse_error");
  expect_error(put_profile(id, "front", "2 1\n..\n"), 422, "no_model_found");
  expect_error(client().Put("/sessions/" + id + "/profiles/front?cell_width_mm=wide", "1 1\n#\n", "text/plain"), 422,
               "invalid_argument");
  ASSERT_EQ(post_json(rec, {{"method", "lathe"}})->status, 201);
  expect_error(post_json("/sessions/" + id + "/post", {{"operation", "lattice"}}), 409, "state_conflict");
  expect_error(post_json("/sessions/" + id + "/post", {{"operation", "scale"}}), 422, "invalid_argument");
  expect_error(client().Get("/sessions/" + id + "/mesh/0?format=stl"), 422, "invalid_argument");
  expect_error(client().Get("/sessions/" + id + "/analyze/0?up=w"), 422, "invalid_argument");
}

TEST_F(ServiceTest, PostStagesAndAnalyze) {
  const std::string id = new_session();
  ASSERT_EQ(client().Put("/sessions/" + id + "/profiles/front?cell_height_mm=9.6", "3 2\n###\n#.#\n", "text/plain")->status,
            200);
  post_json("/sessions/" + id + "/reconstruct", {{"method", "extrude"}, {"params", {{"depth", 3}}}});
  auto lat = post_json("/sessions/" + id + "/post", {{"operation", "lattice"}, {"params", {{"strut_mm", 1.5}}}});
  ASSERT_EQ(lat->status, 201) << lat->body;
  auto sc = post_json("/sessions/" + id + "/post", {{"operation", "scale"}, {"params", {{"factor", 0.5}}}});
  ASSERT_EQ(sc->status, 201);
  const Json stage = Json::parse(sc->body);
  EXPECT_EQ(stage.at("stage"), 2);
  EXPECT_EQ(stage.at("params").at("factor"), 0.5);

  const Profile p(parse_bitmask("3 2\n###\n#.#\n"), Side::Front, {15.8, 15.8, 9.6});
  const TriangleMesh expected = scale(lattice(extrude_solid(p, {3}), 1.5), 0.5);
  EXPECT_EQ(client().Get("/sessions/" + id + "/mesh/2")->body, obj_string(expected));

  auto an = client().Get("/sessions/" + id + "/analyze/2?up=y");
  ASSERT_EQ(an->status, 200);
  const Json report = Json::parse(an->body);
  EXPECT_NEAR(report.at("analysis").at("volume_mm3").get<double>(), signed_volume(expected), 1e-9);
  EXPECT_EQ(report.at("analysis").at("shell_count"), 1);
  EXPECT_TRUE(report.at("analysis").at("watertight").get<bool>());
  EXPECT_EQ(report.at("balance").at("stable"), balance_report(expected).stable);
}

TEST_F(ServiceTest, SnapshotRestoreAndDelete) {
  const std::string id = new_session();
  put_profile(id, "front", "2 3\n##\n#.\n##\n");
  post_json("/sessions/" + id + "/reconstruct", {{"method", "lathe"}, {"params", {{"segments", 24}}}});
  post_json("/sessions/" + id + "/post", {{"operation", "smooth"}, {"params", {{"iterations", 4}}}});
  const std::string snapshot = client().Get("/sessions/" + id)->body;
  const ProjectState state = load_project(snapshot);
  EXPECT_EQ(state.id, id);
  EXPECT_EQ(state.stages.size(), 2u);

  auto restored = client().Post("/sessions", snapshot, "application/json");
  ASSERT_EQ(restored->status, 201);
  const std::string id2 = Json::parse(restored->body).at("id");
  EXPECT_NE(id2, id);
  EXPECT_EQ(client().Get("/sessions/" + id2 + "/mesh/1")->body, client().Get("/sessions/" + id + "/mesh/1")->body);

  expect_error(client().Post("/sessions", "{\"version\": 2}", "application/json"), 409, "version_mismatch");
  expect_error(client().Post("/sessions", "{\"version\": 1,", "application/json"), 400, "parse_error");

  EXPECT_EQ(client().Delete("/sessions/" + id)->status, 204);
  expect_error(client().Get("/sessions/" + id), 404, "not_found");
  expect_error(client().Delete("/sessions/" + id), 404, "not_found");
  EXPECT_EQ(service_.session_count(), 1u);
}

TEST_F(ServiceTest, ConcurrentSessionsDoNotInterfere) {
  constexpr int kSessions = 4, kPosts = 5;
  std::vector<std::string> ids;
  for (int i = 0; i < kSessions; ++i) {
    ids.push_back(new_session());
    put_profile(ids.back(), "front", std::to_string(i + 1) + " 1\n" + std::string(i + 1, '#') + "\n");
    post_json("/sessions/" + ids.back() + "/reconstruct", {{"method", "extrude"}});
  }
  // Every session gets hammered by two threads at once.
  std::vector<std::thread> workers;
  std::atomic<int> failures{0};
  for (int t = 0; t < 2 * kSessions; ++t) {
    workers.emplace_back([&, t] {
      auto c = client();
      for (int k = 0; k < kPosts; ++k) {
        auto r = c.Post("/sessions/" + ids[t % kSessions] + "/post",
                        Json{{"operation", "scale"}, {"params", {{"factor", 1.0 + 0.01 * (t + 1)}}}}.dump(), "application/json");
        if (!r || r->status != 201) ++failures;
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(failures, 0);
  for (int i = 0; i < kSessions; ++i) {
    const ProjectState p = load_project(client().Get("/sessions/" + ids[i])->body);
    ASSERT_EQ(p.stages.size(), 1u + 2 * kPosts);
    for (std::size_t k = 1; k < p.stages.size(); ++k) EXPECT_EQ(p.stages[k].input_digest, p.stages[k - 1].digest);
    // The replayed chain reproduces every digest: no interleaved corruption.
    ProjectSession replay(p);
    EXPECT_EQ(replay.replay(), 0u);
    const double volume = signed_volume(replay.latest().mesh);
    double factor = 1.0;
    for (std::size_t k = 1; k < p.stages.size(); ++k) factor *= p.stages[k].params.at("factor").get<double>();
    EXPECT_NEAR(volume, (i + 1) * 15.8 * 15.8 * 11.4 * factor * factor * factor, 1e-6 * volume);
  }
}

}  // namespace
