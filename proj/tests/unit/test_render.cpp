#include <gtest/gtest.h>

#include <cmath>

#include "slitcarpet/geodesics.hpp"
#include "slitcarpet/modulus.hpp"
#include "slitcarpet/render.hpp"

using namespace slitcarpet;
using namespace slitcarpet::render;

namespace {

CarpetPoint pt(const char* x, const char* y, std::optional<Side> side = std::nullopt) {
  return CarpetPoint{Coord::parse(x), Coord::parse(y), side, std::nullopt};
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST(LensMap, OpensTheCentralSlit) {
  const RenderSpec spec{1, {1.0 / 64}};
  const Point2 left = lens_map(spec, pt("1/2", "1/2", Side::left));
  const Point2 right = lens_map(spec, pt("1/2", "1/2", Side::right));
  EXPECT_DOUBLE_EQ(right.x - left.x, 1.0 / 64);
  EXPECT_DOUBLE_EQ(left.y, 0.5);
  // tips stay put, far points stay put
  EXPECT_EQ(lens_map(spec, pt("1/2", "3/4")), (Point2{0.5, 0.75}));
  EXPECT_EQ(lens_map(spec, pt("1/8", "1/2")), (Point2{0.125, 0.5}));
  EXPECT_EQ(lens_map(spec, pt("3/4", "1/2")), (Point2{0.75, 0.5}));
  EXPECT_EQ(lens_map(spec, pt("1/2", "1/8")), (Point2{0.5, 0.125}));
}

TEST(LensMap, LevelZeroIsTheIdentity) {
  const RenderSpec spec{0, {}};
  EXPECT_EQ(lens_map(spec, pt("1/3", "2/7")), (Point2{1.0 / 3, 2.0 / 7}));
  const std::string svg = render_svg(spec);
  EXPECT_EQ(count(svg, "<polygon"), 1U);
}

TEST(LensMap, ExpansionCloseToOne) {
  const RenderSpec spec{1, {1.0 / 64}};
  const ExpansionReport r = lens_expansion(spec, 7);
  EXPECT_GT(r.pairs, 1000U);
  EXPECT_LE(r.max_ratio, 1.1);
  EXPECT_GE(r.min_ratio, 1.0 / 1.1);
  for (int n = 0; n <= 3; ++n) {
    const ExpansionReport d = lens_expansion({n, {}}, n + 4);
    EXPECT_LE(d.max_ratio, 1.1) << n;
    EXPECT_GE(d.min_ratio, 1.0 / 1.1) << n;
  }
}

TEST(LensMap, InjectiveOnSampleGrid) {
  for (int n = 0; n <= 3; ++n) {
    const InjectivityReport r = check_injective({n, {}}, 512);
    EXPECT_TRUE(r.injective) << n << ": " << r.failure;
    EXPECT_GT(r.samples, 513U * 513U - 1);
  }
  EXPECT_TRUE(check_injective({2, {}}, 300).injective);
}

TEST(LensMap, SpecValidation) {
  EXPECT_THROW(validate({1, {0.5}}), std::invalid_argument);          // wider than its neighbourhood
  EXPECT_THROW(validate({2, {0.01, 0.02}}), std::invalid_argument);   // not decreasing
  EXPECT_THROW(validate({1, {-0.01}}), std::invalid_argument);
  EXPECT_THROW(validate({-1, {}}), std::invalid_argument);
  RenderSpec bad{1, {}};
  bad.scale = 0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  EXPECT_NO_THROW(validate({3, {}}));
  EXPECT_DOUBLE_EQ(default_width(1), std::ldexp(1.0, -8));
}

TEST(Svg, DrawsOneLensPerSlit) {
  const std::string svg = render_svg({3, {}});
  EXPECT_EQ(svg.rfind("<?xml", 0), 0U);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_EQ(count(svg, "<polygon"), 1U + 21U);
  EXPECT_EQ(svg, render_svg({3, {}}));
}

TEST(Svg, PathOverlayFollowsTheLens) {
  const RenderSpec spec{1, {1.0 / 64}};
  const auto path = geodesics::distance_level(1, pt("1/2", "1/2", Side::left), pt("1/2", "1/2", Side::right));
  ASSERT_DOUBLE_EQ(path.length, 0.5);
  Overlay overlay;
  overlay.paths.push_back(path.path);
  const std::string svg = render_svg(spec, overlay);
  EXPECT_EQ(count(svg, "<polyline"), 1U);
  // the route passes the tip at (1/2, 3/4) or (1/2, 1/4), drawn at y = 128 or 384
  EXPECT_TRUE(svg.find("256.0000,128.0000") != std::string::npos ||
              svg.find("256.0000,384.0000") != std::string::npos);
}

TEST(Svg, PotentialLevelSets) {
  const auto solution = modulus::laplace_solve(1, 5, modulus::BoundarySpec::connecting(modulus::Direction::LR));
  Overlay overlay;
  overlay.field = &solution.potential;
  overlay.levels = {0.25, 0.5, 0.75};
  const std::string svg = render_svg({1, {}}, overlay);
  EXPECT_GT(count(svg, "<path"), 3U * 32U - 10U);
  const auto wrong_level = modulus::laplace_solve(2, 5, modulus::BoundarySpec::connecting(modulus::Direction::LR));
  overlay.field = &wrong_level.potential;
  EXPECT_THROW(render_svg({1, {}}, overlay), std::invalid_argument);
}
