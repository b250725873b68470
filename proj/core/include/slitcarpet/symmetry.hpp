#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slitcarpet/carpet.hpp"
#include "slitcarpet/geodesics.hpp"

namespace slitcarpet::symmetry {

/// Continuous piecewise-linear function on [0, 1] with breakpoints i / 2^N
/// and exact dyadic values. Members of the shear group satisfy h(0) = 0,
/// h(1) in Z and h(k / 2^m) in 2Z / 2^m at every reduced dyadic; the object
/// itself may hold any values so that the constraint can be tested.
class LFunction {
 public:
  static constexpr int kMaxExponent = 20;

  LFunction();  // h = 0
  LFunction(int exponent, std::vector<Dyadic> values);

  int exponent() const { return exponent_; }
  const std::vector<Dyadic>& values() const { return values_; }
  /// Exact Lipschitz constant: the largest slope magnitude.
  const Dyadic& lip() const { return lip_; }

  Dyadic operator()(const Dyadic& t) const;
  double operator()(double t) const;
  Coord operator()(const Coord& t) const;

  /// The same function sampled on the grid of step 2^-exponent (>= current).
  LFunction refined(int exponent) const;
  /// The same function on the coarsest dyadic grid carrying it.
  LFunction simplified() const;

  /// Membership test from the grid values alone: h(0) = 0, h(1) in Z and
  /// each breakpoint value at a reduced k / 2^m lies in 2^(1-m) Z, read on a
  /// grid of step at most 1/2. Linear interpolation then keeps every finer
  /// dyadic constraint.
  bool in_group() const;

  friend LFunction operator+(const LFunction& a, const LFunction& b);
  friend LFunction operator-(const LFunction& a, const LFunction& b);
  LFunction operator-() const;
  /// Equality as functions.
  friend bool operator==(const LFunction& a, const LFunction& b);

  /// "N v_0 v_1 ... v_{2^N}" with values as "num/2^e".
  std::string to_string() const;
  static LFunction parse(std::string_view text);

 private:
  int exponent_ = 0;
  std::vector<Dyadic> values_;
  Dyadic lip_;
};

struct LValidation {
  bool valid = false;
  std::optional<Dyadic> violation;  // first failing dyadic (by depth, then position)
  std::string reason;
  Dyadic lip;
};

/// Brute-force check of the group constraints at every reduced dyadic k / 2^m
/// with m <= depth (depth >= h.exponent()).
LValidation validate_L(const LFunction& h, int depth);

/// 0 on [0, 1/2], 1/2 - 2 |t - 3/4| on [1/2, 1]; zero outside [0, 1].
Dyadic h0_eval(const Dyadic& t);
double h0_eval(double t);
/// h0 on the grid of step 1/4: values (0, 0, 0, 1/2, 0).
LFunction h0();
/// sum over m of bits[m] 2^-m h0(2^m t), on the grid of step 2^-(M+2).
LFunction h_epsilon(std::span<const std::uint8_t> bits);

/// Isometry of the square (bits r, v) or of the double (bits r, v, fb):
/// R_r is the half-turn, R_v the reflection x -> 1 - x, R_fb swaps the copies.
/// The bits commute, so the element is R_r^r R_v^v R_fb^fb in any order.
struct IsometryElement {
  Ambient ambient = Ambient::DS2;
  bool r = false;
  bool v = false;
  bool fb = false;

  static IsometryElement identity(Ambient a = Ambient::DS2) { return {a, false, false, false}; }
  bool is_identity() const { return !r && !v && !fb; }
  bool flips_x() const { return r != v; }
  /// Reverses the vertical orientation of closed vertical curves.
  bool flips_y() const { return r != fb; }
  /// Composition (this after other).
  IsometryElement operator*(const IsometryElement& other) const;
  IsometryElement inverse() const { return *this; }
  /// "id", "R_r", "R_v", "R_h", "R_fb", "R_r R_fb", ...
  std::string name() const;
  /// "rvf" as three 0/1 digits.
  std::string bits() const;
  friend bool operator==(const IsometryElement&, const IsometryElement&) = default;
};

CarpetPoint apply(const IsometryElement& iso, const CarpetPoint& p);

struct GroupTable {
  std::vector<IsometryElement> elements;
  std::vector<std::vector<int>> product;  // index of elements[a] * elements[b]
  bool abelian = false;
  bool involutive = false;
};

std::vector<IsometryElement> isometry_group(Ambient ambient);
GroupTable isometry_table(Ambient ambient);

/// The shear induced by (x, y) -> (x, y + h(x)) on the strip covering the
/// double. Side tags are kept; the copy follows the fold.
CarpetPoint shear_apply(const LFunction& h, const CarpetPoint& p);

/// iso o shear(h) with h in the group.
struct QSElement {
  IsometryElement iso;
  LFunction shear;

  /// "rvf N v_0 ... v_{2^N}"
  std::string to_string() const;
  static QSElement parse(std::string_view text);
  friend bool operator==(const QSElement&, const QSElement&) = default;
};

/// Throws std::invalid_argument unless the shear is in the group and the
/// isometry acts on the double.
void validate(const QSElement& g);

CarpetPoint qs_apply(const QSElement& g, const CarpetPoint& p);
/// Uniform isometry together with h_epsilon of `bits` random bits.
QSElement random_element(std::mt19937_64& rng, int bits = 4);
/// a o b
QSElement qs_compose(const QSElement& a, const QSElement& b);
QSElement qs_inverse(const QSElement& g);

/// iso o shear(h) o iso^-1 = residual o shear(conjugated). When iso reverses
/// x the induced map moves the left side by the integer h(1); an odd shift
/// is the isometry with bits (1, 1, 1).
struct Conjugation {
  LFunction shear;
  IsometryElement residual;
};

/// Closed form, verified against the pointwise definition on about 10^3
/// points; a mismatch throws std::logic_error.
Conjugation conjugate(const IsometryElement& iso, const LFunction& h);

/// A sample point at which iso differs from every shear, or nullopt when no
/// sample distinguishes it (the identity).
std::optional<CarpetPoint> shear_disagreement(const IsometryElement& iso, std::span<const CarpetPoint> samples);

struct VerticalCurveSignature {
  std::optional<Dyadic> x;  // empty for non-dyadic abscissae
  int generation = 0;
  std::int64_t slits_per_copy = 0;
  double slit_diameter = 0.0;
  double curve_count = 1.0;  // 2^(2 * slits_per_copy)
};

VerticalCurveSignature vertical_curve_signature(const Coord& x);

/// One side per slit met by the closed vertical curve at x (0 < x < 1) at
/// `level`: front slits bottom to top, then back slits top to bottom.
std::vector<std::vector<Side>> enumerate_closed_vertical_curves(const Coord& x, int level);

/// Up the front copy and down the back one, through the sides chosen.
geodesics::Polyline closed_vertical_curve(const Coord& x, int level, std::span<const Side> sides);

struct CohopfReport {
  bool ok = false;
  std::size_t slits = 0;  // slits of both copies checked
  std::string failure;
};

/// Transports both tips and one interior point of every level-N slit of
/// each copy and checks the images are the slits of the same generation,
/// each hit once.
CohopfReport cohopf_check(const QSElement& g, int level);

struct BilipschitzReport {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double bound = 0.0;  // sqrt(2) (1 + Lip h)
  int pairs = 0;
  bool within(double tol) const { return max_ratio <= bound + tol && min_ratio >= 1.0 / bound - tol; }
};

/// Distance ratios d(gp, gq) / d(p, q) in the level-n double over seeded
/// random pairs of grid points of step 2^-(n+2).
BilipschitzReport bilipschitz_estimate(const QSElement& g, int level, int num_pairs, std::uint64_t seed);

/// Seeded vertical polylines of the level-n double: a random abscissa, a
/// random copy and height range, vertices at every slit tip crossed.
std::vector<geodesics::Polyline> sample_vertical_curves(int level, int count, std::uint64_t seed);

/// True when every image of every curve is vertical (all x equal).
bool verttovert_check(const QSElement& g, std::span<const geodesics::Polyline> curves);

}  // namespace slitcarpet::symmetry
