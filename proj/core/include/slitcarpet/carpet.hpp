#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slitcarpet/dyadic.hpp"

namespace slitcarpet {

/// Raised when a point's tags do not match its position at the working level.
class InvalidPoint : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Side : std::uint8_t { left, right };
enum class Copy : std::uint8_t { front, back };
enum class Ambient : std::uint8_t { S2, DS2 };

inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }
inline Copy opposite(Copy c) { return c == Copy::front ? Copy::back : Copy::front; }
char to_char(Side s);
char to_char(Copy c);

/// A coordinate that is either an exact dyadic rational or a general real.
///
/// Reals whose binary expansion stops by 2^-kMaxExactExponent are promoted
/// to exact form on construction (no value change); anything finer stays a
/// floating value and never coincides with a slit of a working level.
class Coord {
 public:
  static constexpr std::uint32_t kMaxExactExponent = 40;

  Coord() : Coord(Dyadic{}) {}
  Coord(const Dyadic& d) : exact_(d), value_(d.to_double()) {}  // NOLINT(implicit)
  static Coord real(double v);
  static Coord parse(const std::string& text);

  bool is_exact() const { return exact_.has_value(); }
  const std::optional<Dyadic>& exact() const { return exact_; }
  double value() const { return value_; }

  /// Reduced exponent of an exact dyadic value (0 for integers); nullopt for reals.
  std::optional<std::uint32_t> dyadic_exponent() const;

  Coord snapped(std::uint32_t exponent) const { return Coord(Dyadic::snap(value_, exponent)); }

  friend Coord operator+(const Coord& a, const Coord& b);
  friend Coord operator-(const Coord& a, const Coord& b);
  Coord operator-() const;
  /// 1 - c
  Coord reflected() const;

  friend bool operator==(const Coord& a, const Coord& b);
  /// Exact comparison when both are exact, floating otherwise.
  friend bool operator<(const Coord& a, const Coord& b);
  friend bool operator<=(const Coord& a, const Coord& b) { return !(b < a); }
  friend bool operator>(const Coord& a, const Coord& b) { return b < a; }
  friend bool operator>=(const Coord& a, const Coord& b) { return !(a < b); }

  std::string to_string() const;

 private:
  std::optional<Dyadic> exact_;
  double value_ = 0.0;
};

/// Generation-k vertical slit at x = (2i+1)/2^k spanning ((4j+1)/2^{k+1}, (4j+3)/2^{k+1}).
struct Slit {
  int generation = 1;
  std::int64_t i = 0;
  std::int64_t j = 0;

  Dyadic x() const { return Dyadic(2 * i + 1, static_cast<std::uint32_t>(generation)); }
  Dyadic y_lo() const { return Dyadic(4 * j + 1, static_cast<std::uint32_t>(generation + 1)); }
  Dyadic y_hi() const { return Dyadic(4 * j + 3, static_cast<std::uint32_t>(generation + 1)); }
  Dyadic length() const { return Dyadic(1, static_cast<std::uint32_t>(generation)); }

  bool valid() const;
  friend bool operator==(const Slit&, const Slit&) = default;
  friend auto operator<=>(const Slit&, const Slit&) = default;
};

/// All slits of generations 1..level, ordered by (generation, i, j).
class SlitSchedule {
 public:
  SlitSchedule() = default;
  static SlitSchedule up_to(int level);

  int level() const { return level_; }
  const std::vector<Slit>& slits() const { return slits_; }
  std::size_t size() const { return slits_.size(); }

  /// Slit whose open interior contains (x, y), if any.
  std::optional<Slit> slit_at(const Coord& x, const Coord& y) const;
  /// Slit having (x, y) as an endpoint, if any.
  std::optional<Slit> slit_with_tip(const Coord& x, const Coord& y) const;
  /// Generation of the slit column through x at this level (nullopt if none).
  std::optional<int> column_generation(const Coord& x) const;
  bool contains(const Slit& s) const;
  std::size_t index_of(const Slit& s) const;

  /// Line format: optional "# ..." comment lines, then one "k i j" per slit.
  void write(std::ostream& out) const;
  static SlitSchedule read(std::istream& in);

 private:
  int level_ = 0;
  std::vector<Slit> slits_;
};

/// Point of a finite-level carpet, of its completion, or of the double.
struct CarpetPoint {
  Coord x;
  Coord y;
  std::optional<Side> side;
  std::optional<Copy> copy;

  /// Validating constructor: checks the side tag against the slits of
  /// `level` and drops the copy tag on the outer square.
  static CarpetPoint at_level(Coord x, Coord y, int level, std::optional<Side> side = std::nullopt,
                              std::optional<Copy> copy = std::nullopt);

  bool on_outer_square() const;
  /// "x y [L|R] [F|B]"
  std::string to_string() const;
  friend bool operator==(const CarpetPoint&, const CarpetPoint&) = default;
};

enum class LocationKind : std::uint8_t { interior, outer_square, slit_tip, slit_interior };

struct Location {
  LocationKind kind = LocationKind::interior;
  std::optional<Slit> slit;  // set for slit_tip and slit_interior
  bool needs_side() const { return kind == LocationKind::slit_interior; }
};

/// Classifies (x, y) against the slits of generation <= level.
/// Throws std::out_of_range outside the unit square.
Location locate(const Coord& x, const Coord& y, int level);

/// Throws InvalidPoint unless the tags of p are exactly those required at `level`.
void validate_point(const CarpetPoint& p, int level, Ambient ambient = Ambient::S2);

/// The natural projection from level `from` to level `to` (to <= from).
CarpetPoint project(const CarpetPoint& p, int from, int to);

/// Point of the strip {0 <= x <= 1} covering the double; sheet = floor(y).
struct StripPoint {
  Coord x;
  Coord y;
  std::optional<Side> side;

  std::int64_t sheet() const;
  friend bool operator==(const StripPoint&, const StripPoint&) = default;
};

/// Covering map onto the double: even sheets land on the front copy.
CarpetPoint fold(const StripPoint& s);
/// Lift of p onto `sheet`; the sheet parity must match p's copy (front: even).
StripPoint unfold(const CarpetPoint& p, std::int64_t sheet);

}  // namespace slitcarpet
