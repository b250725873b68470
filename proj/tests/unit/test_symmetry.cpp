#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "random_points.hpp"
#include "slitcarpet/symmetry.hpp"

using namespace slitcarpet;
using namespace slitcarpet::symmetry;

namespace {

Dyadic d(const char* text) { return Dyadic::parse(text); }

CarpetPoint pt(const char* x, const char* y, std::optional<Side> side = std::nullopt,
               std::optional<Copy> copy = std::nullopt) {
  return CarpetPoint{Coord::parse(x), Coord::parse(y), side, copy};
}

std::vector<std::uint8_t> bits_of(std::uint32_t mask, int length) {
  std::vector<std::uint8_t> bits(length);
  for (int m = 0; m < length; ++m) bits[m] = (mask >> m) & 1;
  return bits;
}

// Random member of the group: grid values at i / 2^N in 2^(1 - m(i)) Z.
// A single segment needs an even slope, so N = 0 draws on the grid of step 1/2.
LFunction random_member(std::mt19937_64& rng, int N) {
  if (N == 0) return random_member(rng, 1).simplified();
  std::uniform_int_distribution<std::int64_t> small(-3, 3);
  std::vector<Dyadic> v((std::size_t{1} << N) + 1);
  for (std::size_t i = 1; i < v.size(); ++i) {
    int m = N;
    for (std::size_t k = i; m > 0 && k % 2 == 0; k /= 2) --m;
    if (i + 1 == v.size()) m = 0;
    v[i] = m == 0 ? Dyadic(small(rng)) : Dyadic(small(rng), static_cast<std::uint32_t>(m - 1));
  }
  return LFunction(N, std::move(v));
}

std::vector<CarpetPoint> sample_points(int level, int exponent, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CarpetPoint> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(test_support::random_grid_point(rng, level, exponent, Ambient::DS2));
  }
  return out;
}

// Position along the closed vertical curve through p: front y, back 2 - y.
double loop_coordinate(const CarpetPoint& p) {
  return p.copy == Copy::back ? 2.0 - p.y.value() : p.y.value();
}

// Signed arc from a to b on the loop of length 2, in (-1, 1].
double loop_step(const CarpetPoint& a, const CarpetPoint& b) {
  double s = std::fmod(loop_coordinate(b) - loop_coordinate(a) + 4.0, 2.0);
  if (s > 1.0) s -= 2.0;
  return s;
}

}  // namespace

// ---------------------------------------------------------------- isometries

TEST(Isometries, SquareGroupHasOrderFour) {
  const GroupTable t = isometry_table(Ambient::S2);
  ASSERT_EQ(t.elements.size(), 4U);
  EXPECT_TRUE(t.abelian);
  EXPECT_TRUE(t.involutive);
  const IsometryElement r{Ambient::S2, true, false, false};
  const IsometryElement v{Ambient::S2, false, true, false};
  const IsometryElement h{Ambient::S2, true, true, false};
  EXPECT_EQ(h.name(), "R_h");
  for (const CarpetPoint& p : {pt("1/8", "3/8"), pt("1/2", "3/8", Side::left), pt("0", "1/16")}) {
    EXPECT_EQ(apply(h, p), apply(r, apply(v, p)));
  }
  // the half-turn about the centre
  EXPECT_EQ(apply(r, pt("1/8", "1/4")), pt("7/8", "3/4"));
}

TEST(Isometries, DoubleGroupIsZ2Cubed) {
  const GroupTable t = isometry_table(Ambient::DS2);
  ASSERT_EQ(t.elements.size(), 8U);
  EXPECT_TRUE(t.abelian);
  EXPECT_TRUE(t.involutive);
  std::set<int> row(t.product[3].begin(), t.product[3].end());
  EXPECT_EQ(row.size(), 8U);
  EXPECT_THROW(apply({Ambient::S2, false, false, true}, pt("1/8", "1/8")), std::invalid_argument);
}

TEST(Isometries, SideTagsFollowReflections) {
  const IsometryElement v{Ambient::DS2, false, true, false};
  EXPECT_EQ(apply(v, pt("1/4", "1/4", Side::left, Copy::front)), pt("3/4", "1/4", Side::right, Copy::front));
  const IsometryElement fb{Ambient::DS2, false, false, true};
  EXPECT_EQ(apply(fb, pt("1/2", "1/2", Side::left, Copy::front)), pt("1/2", "1/2", Side::left, Copy::back));
}

// ---------------------------------------------------------------- LFunction

TEST(LFunction, TentExamples) {
  const LFunction h = h0();
  EXPECT_EQ(h(d("3/4")), d("1/2"));
  EXPECT_EQ(h(d("1/2")), Dyadic(0));
  EXPECT_EQ(h(d("7/8")), d("1/4"));
  EXPECT_EQ(h0_eval(d("7/8")), d("1/4"));
  EXPECT_DOUBLE_EQ(h0_eval(0.875), 0.25);
  EXPECT_EQ(h.lip(), Dyadic(2));
  const LValidation v = validate_L(h, 8);
  EXPECT_TRUE(v.valid);
  EXPECT_EQ(v.lip, Dyadic(2));
  EXPECT_THROW(h(d("5/4")), std::domain_error);
  EXPECT_THROW(h(-0.25), std::domain_error);
}

TEST(LFunction, ZeroIsValid) {
  const LValidation v = validate_L(LFunction(), 6);
  EXPECT_TRUE(v.valid);
  EXPECT_TRUE(v.lip.is_zero());
}

TEST(LFunction, TentAtOneHalfIsRejected) {
  const LFunction bad(1, {Dyadic(0), d("1/2"), Dyadic(0)});
  const LValidation v = validate_L(bad, 6);
  EXPECT_FALSE(v.valid);
  ASSERT_TRUE(v.violation);
  EXPECT_EQ(*v.violation, d("1/2"));
  EXPECT_FALSE(bad.in_group());
}

TEST(LFunction, GridValuesInCoarsestLatticeAreNotEnough) {
  // every grid value is a multiple of 2^(1-N) for N = 2, yet h(1/2) = 1/2
  const LFunction h(2, {Dyadic(0), Dyadic(0), d("1/2"), Dyadic(0), Dyadic(0)});
  EXPECT_FALSE(validate_L(h, 7).valid);
  EXPECT_FALSE(h.in_group());
}

TEST(LFunction, EndpointConstraints) {
  EXPECT_EQ(validate_L(LFunction(0, {Dyadic(1), Dyadic(1)}), 3).reason, "h(0) != 0");
  EXPECT_EQ(validate_L(LFunction(0, {Dyadic(0), d("1/2")}), 3).reason, "h(1) is not an integer");
  EXPECT_TRUE(validate_L(LFunction(0, {Dyadic(0), Dyadic(2)}), 10).valid);
  // the slope 3 breaks the constraint at 1/2 although both grid values are integers
  const LFunction steep(0, {Dyadic(0), Dyadic(3)});
  EXPECT_EQ(validate_L(steep, 10).violation, d("1/2"));
  EXPECT_FALSE(steep.in_group());
  EXPECT_TRUE(steep.refined(1).values()[1] == d("3/2"));
  EXPECT_THROW(validate_L(h0(), 1), std::invalid_argument);
  EXPECT_THROW(LFunction(2, {Dyadic(0), Dyadic(0)}), std::invalid_argument);
}

TEST(LFunction, EpsilonExamples) {
  const std::uint8_t one[] = {1};
  EXPECT_EQ(h_epsilon(one)(d("3/4")), d("1/2"));
  EXPECT_EQ(h_epsilon(one), h0());
  const std::uint8_t second[] = {0, 1};
  const LFunction h = h_epsilon(second);
  EXPECT_EQ(h(d("3/16")), Dyadic(0));
  EXPECT_EQ(h(d("7/16")), d("1/8"));
  EXPECT_TRUE(validate_L(h, 9).valid);
  EXPECT_EQ(h.lip(), Dyadic(2));
}

TEST(LFunction, EpsilonIsInjectiveOnTwelveBits) {
  const int length = 12;
  const int depth = 14;
  // hash the grid values; a shared hash is resolved by comparing the functions
  std::unordered_map<std::uint64_t, std::uint32_t> seen;
  for (std::uint32_t mask = 0; mask < (1U << length); ++mask) {
    const LFunction h = h_epsilon(bits_of(mask, length));
    ASSERT_EQ(h.exponent(), depth);
    ASSERT_TRUE(h.in_group()) << mask;
    std::uint64_t key = 1469598103934665603ULL;
    for (const Dyadic& v : h.values()) {
      key = (key ^ static_cast<std::uint64_t>(v.scaled(depth).numerator())) * 1099511628211ULL;
    }
    const auto [it, fresh] = seen.emplace(key, mask);
    if (!fresh) ASSERT_FALSE(h_epsilon(bits_of(it->second, length)) == h) << it->second << " and " << mask;
  }
  EXPECT_EQ(seen.size(), 4096U);
}

TEST(LFunction, EpsilonMembersValidate) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 40; ++k) {
    const auto bits = bits_of(static_cast<std::uint32_t>(rng()), 6);
    const LFunction h = h_epsilon(bits);
    EXPECT_TRUE(validate_L(h, h.exponent() + 3).valid);
  }
}

TEST(LFunction, AbelianGroupLaws) {
  const LFunction h = h0();
  EXPECT_EQ(h + (-h), LFunction());
  EXPECT_EQ((h + h)(d("3/4")), Dyadic(1));
  const std::uint8_t a[] = {1, 0};
  const std::uint8_t b[] = {0, 1};
  const std::uint8_t ab[] = {1, 1};
  EXPECT_EQ(h_epsilon(a) + h_epsilon(b), h_epsilon(ab));

  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const LFunction f = random_member(rng, 1 + static_cast<int>(rng() % 4));
    const LFunction g = random_member(rng, 1 + static_cast<int>(rng() % 4));
    const LFunction e = random_member(rng, 1 + static_cast<int>(rng() % 4));
    EXPECT_EQ(f + g, g + f);
    EXPECT_EQ((f + g) + e, f + (g + e));
    EXPECT_EQ(f - f, LFunction());
    EXPECT_TRUE((f + g).in_group());
    EXPECT_TRUE((-f).in_group());
  }
}

TEST(LFunction, RefineAndSimplifyRoundTrip) {
  const LFunction h = h0();
  const LFunction fine = h.refined(6);
  EXPECT_EQ(fine.exponent(), 6);
  EXPECT_EQ(fine, h);
  const LFunction back = fine.simplified();
  EXPECT_EQ(back.exponent(), 2);
  EXPECT_EQ(back.values(), h.values());
  EXPECT_EQ(LFunction(3, std::vector<Dyadic>(9)).simplified().exponent(), 0);
}

TEST(LFunction, SerializationRoundTrip) {
  const LFunction h = h0();
  EXPECT_EQ(h.to_string(), "2 0 0 0 1/2^1 0");
  EXPECT_EQ(LFunction::parse(h.to_string()), h);
  EXPECT_THROW(LFunction::parse("2 0 1"), std::invalid_argument);
  EXPECT_THROW(LFunction::parse(""), std::invalid_argument);
}

TEST(LFunction, SufficientGridCriterion) {
  // grid constraints at each breakpoint imply every finer dyadic constraint
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const int N = static_cast<int>(rng() % 5);
    const LFunction h = random_member(rng, N);
    ASSERT_TRUE(h.in_group());
    const LValidation v = validate_L(h, N + 5);
    ASSERT_TRUE(v.valid) << h.to_string() << ": " << v.reason;
    ASSERT_EQ(v.lip, h.lip());
  }
}

// ---------------------------------------------------------------- shears

TEST(Shear, Examples) {
  const LFunction h = h0();
  EXPECT_EQ(shear_apply(h, pt("3/4", "1/4", std::nullopt, Copy::front)), pt("3/4", "3/4", std::nullopt, Copy::front));
  EXPECT_EQ(shear_apply(h, pt("3/4", "3/4", std::nullopt, Copy::front)), pt("3/4", "3/4", std::nullopt, Copy::back));
  // the back copy moves the other way in y
  EXPECT_EQ(shear_apply(h, pt("3/4", "3/4", std::nullopt, Copy::back)), pt("3/4", "1/4", std::nullopt, Copy::back));
  for (const CarpetPoint& p : sample_points(3, 5, 200, 1)) EXPECT_EQ(shear_apply(LFunction(), p), p);
}

TEST(Shear, KeepsSideTags) {
  const LFunction h = h0();
  const CarpetPoint p = pt("3/4", "3/8", Side::left, Copy::front);
  const CarpetPoint q = shear_apply(h, p);
  EXPECT_EQ(q.side, Side::left);
  EXPECT_EQ(q.x, p.x);
}

TEST(Shear, CompositionLaw) {
  std::mt19937_64 rng(17);
  const auto points = sample_points(4, 6, 1000, 3);
  for (int k = 0; k < 5; ++k) {
    const LFunction a = random_member(rng, 3);
    const LFunction b = h_epsilon(bits_of(static_cast<std::uint32_t>(rng()), 4));
    const LFunction sum = a + b;
    for (const CarpetPoint& p : points) {
      ASSERT_EQ(shear_apply(a, shear_apply(b, p)), shear_apply(sum, p)) << p.to_string();
    }
  }
}

// ---------------------------------------------------------------- group

TEST(QSGroup, ConjugationExamples) {
  const LFunction h = h0();
  const auto id = IsometryElement::identity();
  EXPECT_EQ(conjugate(id, h).shear, h);
  EXPECT_TRUE(conjugate(id, h).residual.is_identity());

  const IsometryElement fb{Ambient::DS2, false, false, true};
  EXPECT_EQ(conjugate(fb, h).shear, -h);

  // x -> 1 - x: h'(x) = h(1 - x) - h(1)
  const IsometryElement v{Ambient::DS2, false, true, false};
  const Conjugation c = conjugate(v, h);
  EXPECT_EQ(c.shear(d("1/4")), d("1/2"));
  EXPECT_TRUE(c.residual.is_identity());

  // an odd h(1) leaves the isometry (1, 1, 1) behind
  const LFunction odd(1, {Dyadic(0), Dyadic(0), Dyadic(1)});
  const Conjugation co = conjugate(v, odd);
  EXPECT_EQ(co.residual.bits(), "111");
  EXPECT_TRUE(co.shear.in_group());
}

TEST(QSGroup, ConjugationVerifiedForEveryIsometry) {
  std::mt19937_64 rng(23);
  for (const IsometryElement& iso : isometry_group(Ambient::DS2)) {
    for (int k = 0; k < 6; ++k) {
      const LFunction h = random_member(rng, static_cast<int>(rng() % 4));
      Conjugation c;
      ASSERT_NO_THROW(c = conjugate(iso, h)) << iso.bits() << " " << h.to_string();
      EXPECT_TRUE(c.shear.in_group());
    }
  }
}

TEST(QSGroup, ComposeMatchesPointwise) {
  std::mt19937_64 rng(31);
  const auto points = sample_points(4, 5, 300, 8);
  const QSElement identity{};
  for (int k = 0; k < 30; ++k) {
    const QSElement a = random_element(rng);
    const QSElement b = random_element(rng);
    const QSElement ab = qs_compose(a, b);
    ASSERT_NO_THROW(validate(ab));
    const QSElement inv = qs_inverse(a);
    EXPECT_EQ(qs_compose(a, inv), identity);
    EXPECT_EQ(qs_compose(inv, a), identity);
    EXPECT_EQ(qs_compose(identity, a), a);
    for (const CarpetPoint& p : points) {
      ASSERT_EQ(qs_apply(ab, p), qs_apply(a, qs_apply(b, p)));
      ASSERT_EQ(qs_apply(inv, qs_apply(a, p)), p);
    }
  }
}

TEST(QSGroup, ShearSubgroupIsAbelian) {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 10; ++k) {
    const QSElement a{IsometryElement::identity(), random_member(rng, 3)};
    const QSElement b{IsometryElement::identity(), random_member(rng, 2)};
    EXPECT_EQ(qs_compose(a, b).shear, a.shear + b.shear);
    EXPECT_EQ(qs_compose(a, b), qs_compose(b, a));
  }
}

TEST(QSGroup, InverseOnThousandPoints) {
  std::mt19937_64 rng(41);
  const auto points = sample_points(4, 6, 1000, 9);
  for (int k = 0; k < 3; ++k) {
    const QSElement g = random_element(rng);
    const QSElement inv = qs_inverse(g);
    for (const CarpetPoint& p : points) ASSERT_EQ(qs_apply(g, qs_apply(inv, p)), p);
  }
}

TEST(QSGroup, ParseAndValidate) {
  const QSElement g{{Ambient::DS2, true, false, true}, h0()};
  EXPECT_EQ(g.to_string(), "101 2 0 0 0 1/2^1 0");
  EXPECT_EQ(QSElement::parse(g.to_string()), g);
  EXPECT_EQ(QSElement::parse("000"), QSElement{});
  EXPECT_THROW(QSElement::parse("12 0 0 0"), std::invalid_argument);
  EXPECT_THROW(QSElement::parse("000 1 0 1/2^1 0"), std::invalid_argument);
  EXPECT_THROW(validate({{Ambient::S2, false, false, false}, LFunction()}), std::invalid_argument);
}

TEST(QSGroup, IsometriesAreNotShears) {
  const auto points = sample_points(3, 4, 300, 12);
  for (const IsometryElement& iso : isometry_group(Ambient::DS2)) {
    const auto witness = shear_disagreement(iso, points);
    EXPECT_EQ(witness.has_value(), !iso.is_identity()) << iso.name();
  }
}

// ---------------------------------------------------------------- vertical curves

TEST(VerticalCurves, Signatures) {
  const auto half = vertical_curve_signature(Coord(d("1/2")));
  EXPECT_EQ(half.generation, 1);
  EXPECT_EQ(half.slits_per_copy, 1);
  EXPECT_DOUBLE_EQ(half.slit_diameter, 0.5);
  EXPECT_DOUBLE_EQ(half.curve_count, 4.0);
  EXPECT_EQ(enumerate_closed_vertical_curves(Coord(d("1/2")), 3).size(), 4U);

  const auto quarter = vertical_curve_signature(Coord(d("1/4")));
  EXPECT_EQ(quarter.slits_per_copy, 2);
  EXPECT_DOUBLE_EQ(quarter.slit_diameter, 0.25);
  EXPECT_DOUBLE_EQ(quarter.curve_count, 16.0);
  EXPECT_EQ(enumerate_closed_vertical_curves(Coord(d("1/4")), 2).size(), 16U);

  const auto third = vertical_curve_signature(Coord::real(1.0 / 3.0));
  EXPECT_FALSE(third.x.has_value());
  EXPECT_EQ(third.slits_per_copy, 0);
  EXPECT_DOUBLE_EQ(third.curve_count, 1.0);
  EXPECT_EQ(enumerate_closed_vertical_curves(Coord::real(1.0 / 3.0), 4).size(), 1U);
}

TEST(VerticalCurves, ClosedCurveVisitsBothCopies) {
  const Side sides[] = {Side::left, Side::right};
  const auto c = closed_vertical_curve(Coord(d("1/2")), 1, sides);
  EXPECT_TRUE(geodesics::is_vertical(c));
  EXPECT_EQ(c.vertices.front(), c.vertices.back());
  EXPECT_EQ(c.vertices[2], pt("1/2", "1/2", Side::left, Copy::front));
  EXPECT_EQ(c.vertices[6], pt("1/2", "1/2", Side::right, Copy::back));
  for (const auto& v : c.vertices) EXPECT_NO_THROW(validate_point(v, 1, Ambient::DS2));
  EXPECT_THROW(closed_vertical_curve(Coord(d("1/2")), 1, std::span(sides, 1)), std::invalid_argument);
}

TEST(VerticalCurves, RotationProperty) {
  // every group element moves a closed vertical curve isometrically onto a
  // closed vertical curve; shears keep the orientation
  std::mt19937_64 rng(43);
  std::vector<QSElement> elements;
  for (const IsometryElement& iso : isometry_group(Ambient::DS2)) elements.push_back({iso, h0()});
  for (int k = 0; k < 8; ++k) elements.push_back(random_element(rng));
  for (const char* x : {"1/2", "1/4", "3/8", "1/8"}) {
    const auto all = enumerate_closed_vertical_curves(Coord(d(x)), 3);
    for (int pick = 0; pick < 4; ++pick) {
      const auto& sides = all[rng() % all.size()];
      const auto curve = closed_vertical_curve(Coord(d(x)), 3, sides);
      for (const QSElement& g : elements) {
        const double orientation = g.iso.flips_y() ? -1.0 : 1.0;
        for (std::size_t i = 0; i + 1 < curve.vertices.size(); ++i) {
          const CarpetPoint& a = curve.vertices[i];
          const CarpetPoint& b = curve.vertices[i + 1];
          const double step = loop_step(a, b);
          const double image = loop_step(qs_apply(g, a), qs_apply(g, b));
          ASSERT_NEAR(image, orientation * step, 1e-12) << g.to_string() << " at " << a.to_string();
          EXPECT_EQ(qs_apply(g, a).x, apply(g.iso, a).x);
        }
      }
    }
  }
}

// ---------------------------------------------------------------- checks

TEST(Checks, CohopfForIsometriesAndShears) {
  const CohopfReport id = cohopf_check({}, 4);
  EXPECT_TRUE(id.ok) << id.failure;
  EXPECT_EQ(id.slits, 2 * SlitSchedule::up_to(4).size());
  for (const IsometryElement& iso : isometry_group(Ambient::DS2)) {
    const CohopfReport r = cohopf_check({iso, LFunction()}, 4);
    EXPECT_TRUE(r.ok) << iso.name() << ": " << r.failure;
  }
  const CohopfReport tent = cohopf_check({IsometryElement::identity(), h0()}, 4);
  EXPECT_TRUE(tent.ok) << tent.failure;
  std::mt19937_64 rng(47);
  for (int k = 0; k < 10; ++k) {
    const QSElement g = random_element(rng);
    const CohopfReport r = cohopf_check(g, 4);
    EXPECT_TRUE(r.ok) << g.to_string() << ": " << r.failure;
  }
}

TEST(Checks, BilipschitzSmall) {
  const BilipschitzReport id = bilipschitz_estimate({}, 1, 50, 3);
  EXPECT_DOUBLE_EQ(id.max_ratio, 1.0);
  EXPECT_DOUBLE_EQ(id.min_ratio, 1.0);
  const BilipschitzReport iso = bilipschitz_estimate({{Ambient::DS2, true, false, true}, LFunction()}, 1, 50, 3);
  EXPECT_NEAR(iso.max_ratio, 1.0, 1e-12);
  EXPECT_NEAR(iso.min_ratio, 1.0, 1e-12);
  const BilipschitzReport tent = bilipschitz_estimate({IsometryElement::identity(), h0()}, 1, 200, 3);
  EXPECT_NEAR(tent.bound, 3.0 * std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(tent.within(0.05));
  EXPECT_GT(tent.max_ratio, 1.0);
  EXPECT_EQ(tent.pairs, 200);
}

TEST(Checks, VerticalCurvesStayVertical) {
  const auto curves = sample_vertical_curves(3, 100, 5);
  ASSERT_EQ(curves.size(), 100U);
  for (const auto& c : curves) {
    ASSERT_TRUE(geodesics::is_vertical(c));
    for (const auto& v : c.vertices) ASSERT_NO_THROW(validate_point(v, 3, Ambient::DS2));
  }
  EXPECT_TRUE(verttovert_check({IsometryElement::identity(), h0()}, curves));
  EXPECT_TRUE(verttovert_check({{Ambient::DS2, true, false, false}, h0()}, curves));

  // R_v moves x = 1/4 to x = 3/4
  geodesics::Polyline c;
  c.vertices = {pt("1/4", "0"), pt("1/4", "1/8", std::nullopt, Copy::front)};
  const CarpetPoint image = qs_apply({{Ambient::DS2, false, true, false}, LFunction()}, c.vertices[1]);
  EXPECT_EQ(image.x, Coord(d("3/4")));
  geodesics::Polyline slanted;
  slanted.vertices = {pt("1/4", "0"), pt("3/8", "1/8", std::nullopt, Copy::front)};
  EXPECT_THROW(verttovert_check({}, std::span(&slanted, 1)), std::invalid_argument);
}
