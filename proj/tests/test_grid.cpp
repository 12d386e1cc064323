#include <gtest/gtest.h>

#include <random>

#include "brickstart/grid.hpp"
#include "test_support.hpp"

using namespace brickstart;

namespace {

BrickBitmask mask_from(std::initializer_list<const char*> rows) {
  std::string text = std::to_string(std::string(*rows.begin()).size()) + " " + std::to_string(rows.size()) + "\n";
  for (const char* r : rows) text += std::string(r) + "\n";
  return parse_bitmask(text);
}

// Even-odd rule at every cell centre, polygons in cell units with y up.
BrickBitmask rasterize(const std::vector<Polygon>& polys, int cols, int rows) {
  BrickBitmask out(cols, rows);
  for (int j = 0; j < rows; ++j) {
    for (int c = 0; c < cols; ++c) {
      const double px = c + 0.5, py = j + 0.5;
      bool inside = false;
      for (const auto& poly : polys) {
        const auto& v = poly.vertices;
        for (std::size_t i = 0, k = v.size() - 1; i < v.size(); k = i++) {
          if ((v[i].y > py) != (v[k].y > py)) {
            const double x = v[k].x + (py - v[k].y) * (v[i].x - v[k].x) / double(v[i].y - v[k].y);
            if (px < x) inside = !inside;
          }
        }
      }
      out.set(c, rows - 1 - j, inside);
    }
  }
  return out;
}

}  // namespace

TEST(Components, LShapeIsOneComponent) {
  BrickBitmask m(3, 3);
  m.set(0, 0, true);
  m.set(1, 0, true);
  m.set(2, 0, true);
  m.set(2, 1, true);
  EXPECT_EQ(connected_components(m).count, 1);
}

TEST(Components, DiagonalCellsAreSeparate) {
  BrickBitmask m(2, 2);
  m.set(0, 0, true);
  m.set(1, 1, true);
  auto labels = connected_components(m);
  EXPECT_EQ(labels.count, 2);
  EXPECT_NE(labels.labels[0], labels.labels[3]);
  EXPECT_EQ(labels.labels[1], -1);
}

TEST(Components, EmptyMaskHasNoComponents) {
  EXPECT_EQ(connected_components(BrickBitmask(4, 4)).count, 0);
}

TEST(Components, MatchesFloodFillOracle) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = bstest::random_mask(rng, 20, 20, 0.45);
    const int expected = bstest::flood_fill_components(m);
    EXPECT_EQ(connected_components(m).count, expected);
    EXPECT_EQ(connected_components(m.transposed()).count, expected);
    EXPECT_EQ(connected_components(m.mirrored()).count, expected);
  }
}

TEST(Components, EveryFilledCellLabelledOnce) {
  std::mt19937 rng(8);
  const auto m = bstest::random_mask(rng, 15, 11, 0.5);
  const auto labels = connected_components(m);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const int l = labels.labels[static_cast<std::size_t>(r) * m.cols() + c];
      if (m.at(c, r)) {
        EXPECT_GE(l, 0);
        EXPECT_LT(l, labels.count);
        // 4-neighbours share the label
        if (m.get(c + 1, r)) EXPECT_EQ(l, labels.labels[static_cast<std::size_t>(r) * m.cols() + c + 1]);
        if (m.get(c, r + 1)) EXPECT_EQ(l, labels.labels[static_cast<std::size_t>(r + 1) * m.cols() + c]);
      } else {
        EXPECT_EQ(l, -1);
      }
    }
  }
}

TEST(Components, DisconnectionWarning) {
  EXPECT_FALSE(disconnection_warning(mask_from({"##", "#."})).has_value());
  auto w = disconnection_warning(mask_from({"#.", ".#"}));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->code, "disconnected_parts");
}

TEST(Outline, SingleCellIsSquare) {
  BrickBitmask m(1, 1);
  m.set(0, 0, true);
  auto polys = outline_polygons(m);
  ASSERT_EQ(polys.size(), 1u);
  EXPECT_EQ(polys[0].vertices.size(), 4u);
  EXPECT_FALSE(polys[0].hole);
  EXPECT_EQ(polys[0].twice_signed_area(), 2);
}

TEST(Outline, RingHasOuterAndHole) {
  auto polys = outline_polygons(mask_from({"###", "#.#", "###"}));
  ASSERT_EQ(polys.size(), 2u);
  int holes = 0;
  for (const auto& p : polys) {
    EXPECT_EQ(p.vertices.size(), 4u);
    if (p.hole) {
      ++holes;
      EXPECT_EQ(p.twice_signed_area(), -2);
    } else {
      EXPECT_EQ(p.twice_signed_area(), 18);
    }
  }
  EXPECT_EQ(holes, 1);
}

TEST(Outline, DiagonalCellsGiveTwoLoops) {
  auto polys = outline_polygons(mask_from({"#.", ".#"}));
  ASSERT_EQ(polys.size(), 2u);
  for (const auto& p : polys) {
    EXPECT_EQ(p.vertices.size(), 4u);
    EXPECT_FALSE(p.hole);
  }
}

TEST(Outline, RasterizationRoundTrip) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = bstest::random_mask(rng, 10, 10, 0.55);
    if (m.empty()) continue;
    const auto polys = outline_polygons(m);
    EXPECT_EQ(rasterize(polys, m.cols(), m.rows()), m) << to_text(m);
    long long area = 0;
    for (const auto& p : polys) {
      area += p.twice_signed_area();
      EXPECT_EQ(p.hole, p.twice_signed_area() < 0);
      // axis-aligned
      for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        const auto& a = p.vertices[i];
        const auto& b = p.vertices[(i + 1) % p.vertices.size()];
        EXPECT_TRUE(a.x == b.x || a.y == b.y);
      }
    }
    EXPECT_EQ(area, 2 * static_cast<long long>(m.count()));
  }
}

TEST(Extrusion, Counts) {
  BrickBitmask one(1, 1);
  one.set(0, 0, true);
  EXPECT_EQ(voxelize_extrusion(one, 1).count(), 1u);
  EXPECT_EQ(voxelize_extrusion(BrickBitmask::filled(2, 3), 4).count(), 24u);
  EXPECT_THROW(voxelize_extrusion(one, 0), Error);

  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = bstest::random_mask(rng, 9, 9, 0.4);
    const int depth = 1 + trial % 5;
    const auto s = voxelize_extrusion(m, depth);
    std::size_t brute = 0;
    for (int z = 0; z < s.nz(); ++z)
      for (int y = 0; y < s.ny(); ++y)
        for (int x = 0; x < s.nx(); ++x) {
          brute += s.at(x, y, z);
          EXPECT_EQ(s.at(x, y, z), m.at(x, m.rows() - 1 - y));
        }
    EXPECT_EQ(brute, m.count() * depth);
  }
}

TEST(TextFormat, RoundTripIsBitExact) {
  const std::string text = "4 3\n#..#\n####\n.##.\n";
  EXPECT_EQ(to_text(parse_bitmask(text)), text);
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto m = bstest::random_mask(rng, 1 + i, 1 + (i * 7) % 13, 0.5);
    EXPECT_EQ(parse_bitmask(to_text(m)), m);
  }
}

TEST(TextFormat, AcceptsCrlfAndMissingFinalNewline) {
  EXPECT_EQ(parse_bitmask("2 1\r\n#.\r\n"), parse_bitmask("2 1\n#."));
}

TEST(TextFormat, RejectsMalformed) {
  EXPECT_THROW(parse_bitmask(""), Error);
  EXPECT_THROW(parse_bitmask("2\n##\n"), Error);
  EXPECT_THROW(parse_bitmask("2 2\n##\n"), Error);
  EXPECT_THROW(parse_bitmask("2 1\n#x\n"), Error);
  EXPECT_THROW(parse_bitmask("3 1\n##\n"), Error);
  EXPECT_THROW(parse_bitmask("0 1\n\n"), Error);
  try {
    parse_bitmask("2 1\n#x\n");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(ProfileType, RejectsEmptyMaskAndBadCells) {
  try {
    Profile p(BrickBitmask(2, 2), Side::Front);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoModelFound);
  }
  EXPECT_THROW(Profile(BrickBitmask::filled(1, 1), Side::Top, CellDimensions{0.0, 1.0, 1.0}), Error);
  Profile p(BrickBitmask::filled(2, 1), Side::Right);
  EXPECT_DOUBLE_EQ(p.cell().width_mm, 15.8);
  EXPECT_DOUBLE_EQ(p.cell().height_mm, 11.4);
  EXPECT_EQ(parse_side("top"), Side::Top);
  EXPECT_THROW(parse_side("back"), Error);
}

TEST(Bitmask, ConstructorInvariants) {
  EXPECT_THROW(BrickBitmask(0, 3), Error);
  EXPECT_THROW(BrickBitmask(2, 2, std::vector<std::uint8_t>(3, 1)), Error);
  EXPECT_EQ(BrickBitmask(2, 2, {1, 0, 0, 1}).count(), 2u);
}

TEST(Bitmask, Cropped) {
  auto m = mask_from({"....", ".#..", "..#.", "...."});
  EXPECT_EQ(m.cropped(), mask_from({"#.", ".#"}));
}

TEST(Voxel, SixConnectivity) {
  VoxelSolid s(2, 2, 2);
  s.set(0, 0, 0, true);
  s.set(1, 1, 0, true);
  s.set(1, 1, 1, true);
  EXPECT_EQ(connected_components(s).count, 2);
  s.set(1, 0, 0, true);
  EXPECT_EQ(connected_components(s).count, 1);
}
