#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brickstart/reconstruct.hpp"
#include "test_support.hpp"

using namespace brickstart;

namespace {

constexpr CellDimensions kCube10{10.0, 10.0, 10.0};

void expect_clean(const TriangleMesh& m) {
  const auto a = analyze(m);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.degenerate_triangles, 0u);
}

BrickBitmask mask_from(std::initializer_list<const char*> rows) {
  std::string text = std::to_string(std::string(*rows.begin()).size()) + " " + std::to_string(rows.size()) + "\n";
  for (const char* r : rows) text += std::string(r) + "\n";
  return parse_bitmask(text);
}

}  // namespace

TEST(SolidToMesh, SingleVoxel) {
  VoxelSolid s(1, 1, 1, {2.0, 3.0, 4.0});
  s.set(0, 0, 0, true);
  const auto m = solid_to_mesh(s);
  EXPECT_EQ(m.triangle_count(), 12u);
  EXPECT_EQ(m.vertex_count(), 8u);
  const auto a = analyze(m);
  EXPECT_NEAR(a.volume_mm3, 24.0, 1e-12);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.euler_characteristic, 2);
  EXPECT_EQ(a.shell_count, 1u);
}

TEST(SolidToMesh, Block2x2x2) {
  VoxelSolid s(2, 2, 2, kCube10);
  for (int i = 0; i < 8; ++i) s.set(i & 1, (i >> 1) & 1, i >> 2, true);
  const auto a = analyze(solid_to_mesh(s));
  EXPECT_NEAR(a.volume_mm3, 8000.0, 1e-9);
  EXPECT_NEAR(a.surface_area_mm2, 24 * 100.0, 1e-9);
  EXPECT_TRUE(a.watertight);
}

TEST(SolidToMesh, EmptyRejected) {
  try {
    solid_to_mesh(VoxelSolid(2, 2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySolid);
  }
}

TEST(SolidToMesh, EdgeTouchingVoxelsStayManifold) {
  VoxelSolid s(2, 2, 1, kCube10);
  s.set(0, 0, 0, true);
  s.set(1, 1, 0, true);
  const auto m = solid_to_mesh(s);
  const auto a = analyze(m);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.shell_count, 2u);
  EXPECT_NEAR(a.volume_mm3, 2000.0, 1e-9);
  EXPECT_EQ(a.degenerate_triangles, 0u);
}

TEST(SolidToMesh, CornerTouchingVoxelsGetSeparateVertices) {
  VoxelSolid s(2, 2, 2, kCube10);
  s.set(0, 0, 0, true);
  s.set(1, 1, 1, true);
  const auto m = solid_to_mesh(s);
  const auto a = analyze(m);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.shell_count, 2u);
  EXPECT_EQ(m.vertex_count(), 16u);
  EXPECT_EQ(a.euler_characteristic, 4);
}

TEST(SolidToMesh, PinchedAroundALoop) {
  // Two voxels touching along an edge while joined through a third layer:
  // both ends of the shared edge see one connected fan.
  VoxelSolid s(2, 2, 3, kCube10);
  s.set(0, 0, 1, true);
  s.set(1, 1, 1, true);
  for (int z : {0, 2}) {
    s.set(0, 0, z, true);
    s.set(1, 0, z, true);
    s.set(1, 1, z, true);
  }
  expect_clean(solid_to_mesh(s));
}

TEST(SolidToMesh, RandomSolidsMatchFaceOracle) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const double density = 0.2 + 0.05 * trial;
    auto s = bstest::random_solid(rng, 16, 16, 16, density, {1.5, 1.5, 1.5});
    const auto m = solid_to_mesh(s);
    const auto a = analyze(m);
    EXPECT_TRUE(a.watertight);
    EXPECT_EQ(a.degenerate_triangles, 0u);
    const double voxel = 1.5 * 1.5 * 1.5;
    EXPECT_NEAR(a.volume_mm3 / (s.count() * voxel), 1.0, 1e-9);
    EXPECT_NEAR(a.surface_area_mm2 / (bstest::boundary_face_count(s) * 1.5 * 1.5), 1.0, 1e-9);
  }
}

// ---------------------------------------------------------------------------

TEST(Extrude, UnitCellBox) {
  Profile p(BrickBitmask::filled(1, 1), Side::Front, kCube10);
  const auto r = extrude(p, {.depth_cells = 2});
  const auto a = analyze(r.mesh);
  EXPECT_NEAR(a.volume_mm3, 2000.0, 1e-9);
  EXPECT_NEAR(a.bbox.extent().x, 10.0, 1e-12);
  EXPECT_NEAR(a.bbox.extent().y, 10.0, 1e-12);
  EXPECT_NEAR(a.bbox.extent().z, 20.0, 1e-12);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Extrude, RingHasGenusOne) {
  Profile p(mask_from({"###", "#.#", "###"}), Side::Front, kCube10);
  const auto a = analyze(extrude(p, {.depth_cells = 1}).mesh);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.euler_characteristic, 0);
  EXPECT_EQ(a.shell_count, 1u);
}

TEST(Extrude, RandomVolumesMatchCellCount) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = bstest::random_mask(rng, 12, 12, 0.5);
    if (m.empty()) continue;
    CellDimensions cell{15.8, 15.8, 11.4};
    Profile p(m, Side::Front, cell);
    const auto r = extrude(p, {.depth_cells = 5});
    const double expected = m.count() * cell.width_mm * cell.height_mm * 5 * cell.depth_mm;
    const auto a = analyze(r.mesh);
    EXPECT_LT(std::abs(a.volume_mm3 - expected) / expected, 1e-9);
    EXPECT_TRUE(a.watertight);
    EXPECT_EQ(a.degenerate_triangles, 0u);
    EXPECT_EQ(!r.warnings.empty(), bstest::flood_fill_components(m) > 1);
  }
}

TEST(Extrude, DoublingDepthDoublesVolumeExactly) {
  std::mt19937 rng(32);
  auto m = bstest::random_mask(rng, 8, 8, 0.6);
  m.set(0, 0, true);
  Profile p(m, Side::Front);
  const double v1 = signed_volume(extrude(p, {.depth_mm = 7.25}).mesh);
  const double v2 = signed_volume(extrude(p, {.depth_mm = 14.5}).mesh);
  EXPECT_EQ(v2, 2.0 * v1);
}

TEST(Extrude, MillimetreDepthAndDirection) {
  Profile p(BrickBitmask::filled(2, 1), Side::Front, kCube10);
  const auto pos = analyze(extrude(p, {.depth_mm = 3.3}).mesh);
  EXPECT_NEAR(pos.bbox.min.z, 0.0, 1e-12);
  EXPECT_NEAR(pos.bbox.max.z, 3.3, 1e-12);
  const auto neg = analyze(extrude(p, {.depth_mm = 3.3, .direction = ExtrudeDirection::Negative}).mesh);
  EXPECT_NEAR(neg.bbox.min.z, -3.3, 1e-12);
  EXPECT_NEAR(neg.bbox.max.z, 0.0, 1e-12);
  EXPECT_NEAR(neg.volume_mm3, pos.volume_mm3, 1e-9);
  // voxel path snaps to whole layers
  EXPECT_EQ(extrude_solid(p, {.depth_mm = 16.0}).nz(), 2);
  EXPECT_EQ(extrude_solid(p, {.depth_mm = 1.0}).nz(), 1);
}

TEST(Extrude, SidesExtrudeAlongTheirNormal) {
  Profile right(BrickBitmask::filled(3, 2), Side::Right, {1.0, 2.0, 3.0});
  const auto a = analyze(extrude(right, {.depth_cells = 1}).mesh);
  EXPECT_NEAR(a.bbox.extent().x, 1.0, 1e-12);  // width cell along x
  EXPECT_NEAR(a.bbox.extent().z, 6.0, 1e-12);  // 3 columns of depth 2
  EXPECT_NEAR(a.bbox.extent().y, 6.0, 1e-12);  // 2 rows of height 3
  Profile top(BrickBitmask::filled(3, 2), Side::Top, {1.0, 2.0, 3.0});
  const auto b = analyze(extrude(top, {.depth_cells = 2}).mesh);
  EXPECT_NEAR(b.bbox.extent().x, 3.0, 1e-12);
  EXPECT_NEAR(b.bbox.extent().z, 4.0, 1e-12);
  EXPECT_NEAR(b.bbox.extent().y, 6.0, 1e-12);
}

TEST(Extrude, InvalidDepth) {
  Profile p(BrickBitmask::filled(1, 1), Side::Front);
  EXPECT_THROW(extrude(p, {.depth_cells = 0}), Error);
  EXPECT_THROW(extrude(p, {.depth_mm = -1.0}), Error);
}

TEST(Extrude, DisconnectedMaskWarns) {
  Profile p(mask_from({"#.#"}), Side::Front);
  const auto r = extrude(p, {.depth_cells = 1});
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, "disconnected_parts");
  EXPECT_EQ(analyze(r.mesh).shell_count, 2u);
}

// ---------------------------------------------------------------------------

TEST(Lathe, PolygonFactor) {
  EXPECT_NEAR(polygon_area_factor(64), 64 / (2 * std::numbers::pi) * std::sin(2 * std::numbers::pi / 64), 1e-15);
  EXPECT_NEAR(polygon_area_factor(4), 2.0 / std::numbers::pi, 1e-15);
}

TEST(Lathe, SingleCellCylinder) {
  Profile p(BrickBitmask::filled(1, 1), Side::Front, kCube10);
  EXPECT_NEAR(lathe_volume(p, LatheParams::Axis::LeftEdge), 3141.592653589793, 1e-9);
  const auto r = lathe(p, {.angular_segments = 64});
  const auto a = analyze(r.mesh);
  const double f64 = (64 / (2 * std::numbers::pi)) * std::sin(2 * std::numbers::pi / 64);
  EXPECT_LT(std::abs(a.volume_mm3 - std::numbers::pi * 1000.0 * f64) / (std::numbers::pi * 1000.0 * f64), 1e-6);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.euler_characteristic, 2);
  EXPECT_EQ(a.degenerate_triangles, 0u);
}

TEST(Lathe, HoleAtAxisGivesAnnulus) {
  Profile p(mask_from({".#"}), Side::Front, kCube10);
  const auto r = lathe(p, {.angular_segments = 32});
  const auto a = analyze(r.mesh);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.shell_count, 1u);
  EXPECT_EQ(a.euler_characteristic, 0);
  EXPECT_LT(std::abs(a.volume_mm3 - 3 * std::numbers::pi * 1000.0 * polygon_area_factor(32)) / a.volume_mm3, 1e-9);
  // same cell measured from the other edge touches the axis
  const auto b = analyze(lathe(p, {.axis_side = LatheParams::Axis::RightEdge, .angular_segments = 32}).mesh);
  EXPECT_EQ(b.euler_characteristic, 2);
}

TEST(Lathe, SeparateRingsAreSeparateShells) {
  Profile q(mask_from({"#.#"}), Side::Front, kCube10);
  const auto r = lathe(q, {.angular_segments = 32});
  const auto b = analyze(r.mesh);
  EXPECT_TRUE(b.watertight);
  EXPECT_EQ(b.shell_count, 2u);
  EXPECT_EQ(b.euler_characteristic, 2);  // cylinder + annulus
  EXPECT_FALSE(r.warnings.empty());
  Profile cup(mask_from({"..#", "###"}), Side::Front, kCube10);
  EXPECT_TRUE(analyze(lathe(cup, {}).mesh).watertight);
}

TEST(Lathe, DiagonalCellsAcrossRingsStayManifold) {
  Profile p(mask_from({".#", "#."}), Side::Front, kCube10);
  const auto a = analyze(lathe(p, {.angular_segments = 12}).mesh);
  EXPECT_TRUE(a.watertight);
  EXPECT_EQ(a.degenerate_triangles, 0u);
}

TEST(Lathe, RandomProfilesMatchPappus) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = bstest::random_nonempty_mask(rng, 6, 6, 0.5);
    Profile p(m, Side::Front);
    for (auto axis : {LatheParams::Axis::LeftEdge, LatheParams::Axis::RightEdge}) {
      const auto r = lathe(p, {.axis_side = axis, .angular_segments = 64});
      const auto a = analyze(r.mesh);
      const double expected = lathe_volume(p, axis, 64);
      EXPECT_LT(std::abs(a.volume_mm3 - expected) / expected, 1e-6);
      EXPECT_TRUE(a.watertight);
      EXPECT_EQ(a.degenerate_triangles, 0u);
    }
  }
}

TEST(Lathe, MirrorAndSwapAxisIsSameMesh) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = bstest::random_nonempty_mask(rng, 5, 5, 0.6);
    Profile p(m, Side::Front);
    Profile q(m.mirrored(), Side::Front);
    const auto a = lathe(p, {.axis_side = LatheParams::Axis::LeftEdge, .angular_segments = 24});
    const auto b = lathe(q, {.axis_side = LatheParams::Axis::RightEdge, .angular_segments = 24});
    EXPECT_EQ(a.mesh, b.mesh);
  }
}

TEST(Lathe, RejectsTooFewSegments) {
  Profile p(BrickBitmask::filled(1, 1), Side::Front);
  EXPECT_THROW(lathe(p, {.angular_segments = 7}), Error);
}

// ---------------------------------------------------------------------------

namespace {

// occupancy(x, y, z) = Front(x, y) & Right(z, y) & Top(x, z), written out
// with the view conventions directly.
VoxelSolid triple_loop(const BrickBitmask* f, const BrickBitmask* r, const BrickBitmask* t, int nx, int ny, int nz) {
  VoxelSolid s(nx, ny, nz);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (int z = 0; z < nz; ++z) {
        bool v = true;
        if (f) v = v && f->at(x, ny - 1 - y);
        if (r) v = v && r->at(nz - 1 - z, ny - 1 - y);
        if (t) v = v && t->at(x, z);
        s.set(x, y, z, v);
      }
  return s;
}

}  // namespace

TEST(Triplanar, FullProfilesGiveBox) {
  const auto s = triplanar({Profile(BrickBitmask::filled(2, 3), Side::Front),
                            Profile(BrickBitmask::filled(4, 3), Side::Right),
                            Profile(BrickBitmask::filled(2, 4), Side::Top)});
  EXPECT_EQ(s.count(), 24u);
  EXPECT_EQ(s.nx(), 2);
  EXPECT_EQ(s.ny(), 3);
  EXPECT_EQ(s.nz(), 4);
}

TEST(Triplanar, AllFilledViewsReduceToExtrusion) {
  const auto plus = mask_from({".#.", "###", ".#."});
  const auto s = triplanar({Profile(plus, Side::Front), Profile(BrickBitmask::filled(4, 3), Side::Right),
                            Profile(BrickBitmask::filled(3, 4), Side::Top)});
  const auto e = voxelize_extrusion(plus, 4);
  EXPECT_EQ(s.occupancy(), e.occupancy());
}

TEST(Triplanar, RandomTriplesMatchTripleLoop) {
  std::mt19937 rng(51);
  std::uniform_int_distribution<int> dim(1, 16);
  for (int trial = 0; trial < 100; ++trial) {
    const int nx = dim(rng), ny = dim(rng), nz = dim(rng);
    auto f = bstest::random_mask(rng, nx, ny, 0.7);
    auto r = bstest::random_mask(rng, nz, ny, 0.7);
    auto t = bstest::random_mask(rng, nx, nz, 0.7);
    f.set(0, 0, true);
    r.set(0, 0, true);
    t.set(0, 0, true);
    const auto expected = triple_loop(&f, &r, &t, nx, ny, nz);
    const auto got = triplanar({Profile(f, Side::Front), Profile(r, Side::Right), Profile(t, Side::Top)});
    EXPECT_EQ(got.occupancy(), expected.occupancy());
    // argument order does not matter
    const auto swapped = triplanar({Profile(t, Side::Top), Profile(f, Side::Front), Profile(r, Side::Right)});
    EXPECT_EQ(swapped.occupancy(), expected.occupancy());
    // two views: the missing one counts as all-filled
    const auto two = triplanar({Profile(f, Side::Front), Profile(t, Side::Top)});
    EXPECT_EQ(two.occupancy(), triple_loop(&f, nullptr, &t, nx, ny, nz).occupancy());
  }
}

TEST(Triplanar, MismatchNamesAxes) {
  try {
    triplanar({Profile(BrickBitmask::filled(2, 3), Side::Front), Profile(BrickBitmask::filled(4, 5), Side::Right)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("front.rows"), std::string::npos);
    EXPECT_NE(msg.find("right.rows"), std::string::npos);
    EXPECT_NE(msg.find("3"), std::string::npos);
    EXPECT_NE(msg.find("5"), std::string::npos);
  }
}

TEST(Triplanar, RejectsDuplicateSidesAndWrongCount) {
  try {
    triplanar({Profile(BrickBitmask::filled(2, 3), Side::Front), Profile(BrickBitmask::filled(2, 3), Side::Front)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateSide);
  }
  EXPECT_THROW(triplanar({Profile(BrickBitmask::filled(2, 3), Side::Front)}), Error);
}

TEST(Triplanar, MeshAndWarnings) {
  const auto r = triplanar_mesh({Profile(mask_from({"#.#", "###"}), Side::Front),
                                 Profile(mask_from({"##", "##"}), Side::Right)});
  expect_clean(r.mesh);
  EXPECT_TRUE(r.warnings.empty());
  const auto d = triplanar_mesh({Profile(mask_from({"#.#"}), Side::Front), Profile(mask_from({"#"}), Side::Right)});
  EXPECT_FALSE(d.warnings.empty());
}
