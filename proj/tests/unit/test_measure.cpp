#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "random_points.hpp"
#include "slitcarpet/measure.hpp"

using namespace slitcarpet;
using namespace slitcarpet::measure;

namespace {

constexpr double kPi = std::numbers::pi;

CarpetPoint pt(const char* x, const char* y, std::optional<Side> side = std::nullopt,
               std::optional<Copy> copy = std::nullopt) {
  return CarpetPoint{Coord::parse(x), Coord::parse(y), side, copy};
}

// cell counting error of a disk of radius r on a grid of step h, with room
// for the grid metric overestimating distances by up to two steps
double disk_tolerance(double r, int g) { return 2 * kPi * r * 3 * std::ldexp(1.0, -g); }

}  // namespace

TEST(BallMass, EuclideanDisks) {
  const int g = 8;
  EXPECT_NEAR(ball_mass(0, pt("1/2", "1/2"), 0.25, g), kPi / 16, disk_tolerance(0.25, g));
  EXPECT_NEAR(ball_mass(0, pt("0", "0"), 0.25, g), kPi / 64, disk_tolerance(0.25, g) / 4);
  // around the seam the ball spreads over both copies
  EXPECT_NEAR(ball_mass(0, pt("0", "1/2"), 0.25, g, Ambient::DS2), kPi / 16, disk_tolerance(0.25, g));
}

TEST(BallMass, SlitBlocksTheBall) {
  const int g = 8;
  const double plain = ball_mass(0, pt("1/2", "1/2"), 0.125, g);
  const double slit = ball_mass(2, pt("1/2", "1/2", Side::left), 0.125, g);
  EXPECT_LT(slit, plain);
  EXPECT_LT(slit, kPi * 0.125 * 0.125);
  EXPECT_NEAR(slit, plain / 2, disk_tolerance(0.125, g));  // one side of the slit only
}

TEST(BallMass, MonotoneInRadius) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = test_support::random_grid_point(rng, 2, 5);
    double prev = 0.0;
    for (double r : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
      const double m = ball_mass(2, p, r, 6);
      EXPECT_GE(m, prev);
      prev = m;
    }
    EXPECT_NEAR(prev, 1.0, 1e-12);  // radius 1.6 covers the level-2 square
  }
  EXPECT_THROW(ball_mass(0, pt("0", "0"), 0.0, 4), std::invalid_argument);
  EXPECT_THROW(ball_mass(0, pt("0", "0"), 3.5, 4), std::invalid_argument);
}

TEST(Ahlfors, ReportBracketsEverySample) {
  const double radii[] = {0.25, 0.125};
  const auto a = ahlfors_scan(0, 30, radii, 6, 5);
  EXPECT_LE(a.constant(), 16 / kPi * 1.05);
  for (const auto& s : a.samples) {
    EXPECT_LE(s.mass, a.c_upper * s.r * s.r * (1 + 1e-12));
    EXPECT_GE(s.mass * a.c_lower * (1 + 1e-12), s.r * s.r);
  }
  const auto b = ahlfors_scan(0, 30, radii, 6, 5);
  EXPECT_EQ(a.c_upper, b.c_upper);
  EXPECT_EQ(a.c_lower, b.c_lower);
  EXPECT_EQ(a.samples.size(), 60u);
}

TEST(Ahlfors, FrozenConstantAcrossLevels) {
  const double radii[] = {0.5, 0.25, 0.125};
  for (int n = 1; n <= 3; ++n) {
    const auto r = ahlfors_scan(n, 25, radii, 6, 100 + n);
    EXPECT_LE(r.constant(), kAhlforsConstant) << n;
  }
}

TEST(Ahlfors, LocallyEuclidean) {
  const double r = 1.0 / 32;
  const double mass = ball_mass(3, pt("5/16", "1/2"), r, 9);
  EXPECT_NEAR(mass / (r * r), kPi, 0.1);
}

TEST(Porosity, Witnesses) {
  const double half[] = {0.5};
  const auto r = porosity_scan(3, 40, half, 9);
  EXPECT_EQ(r.flagged, 0);
  EXPECT_LE(r.worst, 8.0);
  for (const auto& s : r.samples) EXPECT_LE(s.witness->generation, 2);

  const double tiny[] = {1.0 / 16};
  const auto t = porosity_scan(2, 10, tiny, 9);
  EXPECT_EQ(t.flagged, 10);

  const double radii[] = {2.0, 1.0, 0.5, 0.25};
  for (int n = 2; n <= 4; ++n) EXPECT_LE(porosity_scan(n, 30, radii, 10 + n).worst, kPorosityConstant);
}

TEST(Inclusion, Examples) {
  const auto top = incl_check(2, pt("1/4", "1/8"), 3.0, 8);
  EXPECT_EQ(top.q, pt("1/2", "1/2"));
  EXPECT_EQ(top.scale, 0);
  EXPECT_TRUE(top.verified);
  EXPECT_GT(top.checked, 100u);

  const auto slit = incl_check(2, pt("1/2", "1/2", Side::left), 0.25, 8);
  EXPECT_EQ(slit.scale, 4);
  EXPECT_EQ(slit.q, pt("15/32", "17/32"));  // the square left of the slit
  EXPECT_TRUE(slit.verified);
  EXPECT_EQ(incl_check(2, pt("1/2", "1/2", Side::right), 0.25, 8).q, pt("17/32", "17/32"));
  EXPECT_TRUE(incl_check(0, pt("1/3", "1/3"), 0.1, 8).verified);
  EXPECT_NEAR(slit.radius, 0.25 / 12, 1e-15);
}

TEST(Inclusion, RandomSamplesVerify) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> log_r(std::log(1.0 / 64), std::log(3.0));
  for (int n = 0; n <= 3; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto p = test_support::random_grid_point(rng, n, 8);
      const double r = std::exp(log_r(rng));
      const auto w = incl_check(n, p, r, 8);
      EXPECT_TRUE(w.verified) << p.to_string() << " r=" << r;
    }
  }
}

TEST(Covering, Examples) {
  EXPECT_EQ(covering_check(0, pt("1/3", "1/5"), 0.2, 6).count, 1);
  const auto c = covering_check(1, pt("1/2", "1/2"), 1.0 / 16, 7);
  EXPECT_EQ(c.count, 2);
  EXPECT_EQ(c.radius, 1.0 / 8);
  EXPECT_THROW(covering_check(1, pt("0", "0"), 0.0, 5), std::invalid_argument);
}

TEST(Covering, BoundedByFrozenConstant) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> log_r(std::log(1.0 / 64), std::log(2.0));
  for (int n = 0; n <= 3; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto p = test_support::random_real_point(rng);
      EXPECT_LE(covering_check(n, p, std::exp(log_r(rng)), 6).count, kCoveringConstant);
    }
  }
}

TEST(Comparability, SquareAndDouble) {
  // cells hugging both sides of the generation-1 slit (grid 2^-4)
  std::vector<GridCell> square;
  std::vector<GridCell> doubled;
  for (int j = 4; j < 12; ++j) {
    for (int i : {7, 8}) {
      square.push_back({i, j, std::nullopt});
      doubled.push_back({i, j, Copy::front});
      doubled.push_back({i, j, Copy::back});
    }
  }
  const auto s = measure_comparability(1, 4, square);
  EXPECT_EQ(s.ratio, 1.0);
  EXPECT_EQ(s.mass, 16.0 / 256);
  const auto d = measure_comparability(1, 4, doubled, Ambient::DS2);
  EXPECT_EQ(d.ratio, 2.0);

  std::vector<GridCell> all;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) all.push_back({i, j, std::nullopt});
  EXPECT_EQ(measure_comparability(2, 4, all).mass, 1.0);

  EXPECT_THROW(measure_comparability(1, 4, doubled), std::invalid_argument);
  const GridCell outside[] = {{16, 0, std::nullopt}};
  EXPECT_THROW(measure_comparability(1, 4, outside), std::invalid_argument);
}

TEST(Comparability, RandomRegionsWithinFrozenConstant) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng() % 4);
    const int g = n + 3;
    const int cells = 1 << g;
    std::vector<GridCell> region;
    const int count = 1 + static_cast<int>(rng() % 40);
    for (int k = 0; k < count; ++k) {
      region.push_back({static_cast<int>(rng() % cells), static_cast<int>(rng() % cells),
                        rng() % 2 ? Copy::front : Copy::back});
    }
    const auto r = measure_comparability(n, g, region, Ambient::DS2);
    EXPECT_GE(r.ratio, 1.0 / kComparabilityConstant);
    EXPECT_LE(r.ratio, kComparabilityConstant);
  }
}
