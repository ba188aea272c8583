#include "riskplan/render.hpp"

#include <gtest/gtest.h>

namespace riskplan {
namespace {

TEST(RenderTest, SinglePixelRoadPpm) {
  const CostTable table = builtin_aeroscapes_table();
  const Image img = render_labels(LabelMap(1, 1, 12, table.find("Road")), table);
  const Rgb road = table.entry(table.find("Road")).color;
  EXPECT_EQ(img(0, 0), road);
  const std::string expected = std::string("P6\n1 1\n255\n") + char(road.r) + char(road.g) + char(road.b);
  EXPECT_EQ(encode_ppm(img), expected);
}

TEST(RenderTest, ZeroMapIsUniformBlack) {
  const Image img = render_ramp(ScalarMap(3, 4, 0.0));
  for (const Rgb& p : img.data()) EXPECT_EQ(p, (Rgb{0, 0, 0}));
}

TEST(RenderTest, RampEndpoints) {
  ScalarMap m(1, 2, 0.0);
  m(0, 1) = 7.5;
  const Image img = render_ramp(m);
  EXPECT_EQ(img(0, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(img(0, 1), (Rgb{255, 255, 255}));
}

TEST(RenderTest, OverlayRecolorsExactlyWaypoints) {
  const CostTable table = builtin_aeroscapes_table();
  const Image before = render_labels(LabelMap(4, 4, 12, table.find("Vegetation")), table);
  Image after = before;
  overlay_path(after, PlannedPath{{{0, 0}, {1, 1}, {1, 2}}, 0.0});
  int changed = 0;
  for (std::size_t i = 0; i < before.data().size(); ++i) changed += !(before.data()[i] == after.data()[i]);
  EXPECT_EQ(changed, 3);
  EXPECT_EQ(after(1, 2), kPathColor);
}

}  // namespace
}  // namespace riskplan
