#include "slitcarpet/carpet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace slitcarpet {

char to_char(Side s) { return s == Side::left ? 'L' : 'R'; }
char to_char(Copy c) { return c == Copy::front ? 'F' : 'B'; }

// ---------------------------------------------------------------- Coord

Coord Coord::real(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("Coord: non-finite value");
  if (auto d = Dyadic::from_double(v, kMaxExactExponent)) return Coord(*d);
  Coord c;
  c.exact_.reset();
  c.value_ = v;
  return c;
}

Coord Coord::parse(const std::string& text) {
  try {
    return Coord(Dyadic::parse(text));
  } catch (const std::invalid_argument&) {
  }
  // general fractions such as "1/3" are accepted as reals
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const Coord num = parse(text.substr(0, slash));
    const Coord den = parse(text.substr(slash + 1));
    if (den.value() == 0.0) throw std::invalid_argument("not a coordinate: '" + text + "'");
    return real(num.value() / den.value());
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a coordinate: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a coordinate: '" + text + "'");
  return real(v);
}

std::optional<std::uint32_t> Coord::dyadic_exponent() const {
  if (!exact_) return std::nullopt;
  return exact_->exponent();
}

Coord operator+(const Coord& a, const Coord& b) {
  if (a.exact_ && b.exact_) return Coord(*a.exact_ + *b.exact_);
  return Coord::real(a.value_ + b.value_);
}

Coord operator-(const Coord& a, const Coord& b) {
  if (a.exact_ && b.exact_) return Coord(*a.exact_ - *b.exact_);
  return Coord::real(a.value_ - b.value_);
}

Coord Coord::operator-() const {
  if (exact_) return Coord(-*exact_);
  return real(-value_);
}

Coord Coord::reflected() const { return Coord(Dyadic(1)) - *this; }

bool operator==(const Coord& a, const Coord& b) {
  if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
  return a.value_ == b.value_;
}

bool operator<(const Coord& a, const Coord& b) {
  if (a.exact_ && b.exact_) return *a.exact_ < *b.exact_;
  return a.value_ < b.value_;
}

std::string Coord::to_string() const {
  if (exact_ && exact_->exponent() > 52) return exact_->to_string();
  return fmt::format("{}", value_);
}

// ---------------------------------------------------------------- Slit & schedule

bool Slit::valid() const {
  if (generation < 1 || generation > 60) return false;
  const std::int64_t count = std::int64_t{1} << (generation - 1);
  return i >= 0 && i < count && j >= 0 && j < count;
}

SlitSchedule SlitSchedule::up_to(int level) {
  if (level < 0) throw std::invalid_argument("slits_up_to: level must be >= 0");
  if (level > 12) throw std::invalid_argument("slits_up_to: level too large (max 12)");
  SlitSchedule s;
  s.level_ = level;
  for (int k = 1; k <= level; ++k) {
    const std::int64_t count = std::int64_t{1} << (k - 1);
    for (std::int64_t i = 0; i < count; ++i)
      for (std::int64_t j = 0; j < count; ++j) s.slits_.push_back(Slit{k, i, j});
  }
  return s;
}

namespace {

// Generation of the column x at `level`, or nullopt if x carries no slit.
std::optional<int> generation_of_column(const Coord& x, int level) {
  const auto e = x.dyadic_exponent();
  if (!e || *e == 0 || static_cast<int>(*e) > level) return std::nullopt;
  return static_cast<int>(*e);
}

// Position of y within the column of generation k: t = y * 2^{k+1}.
// Returns (j, classification) where classification is
// 0 = strictly inside slit j, 1 = tip of slit j, -1 = none.
std::pair<std::int64_t, int> classify_in_column(const Coord& y, int k) {
  const std::int64_t count = std::int64_t{1} << (k - 1);
  if (y.is_exact()) {
    const Dyadic t = y.exact()->scaled(k + 1);
    // t - 1 in [4j, 4j + 4)
    const std::int64_t j = (t - Dyadic(1)).scaled(-2).floor();
    if (j < 0 || j >= count) return {-1, -1};
    const Dyadic lo(4 * j + 1);
    const Dyadic hi(4 * j + 3);
    if (t == lo || t == hi) return {j, 1};
    if (lo < t && t < hi) return {j, 0};
    return {-1, -1};
  }
  const double t = std::ldexp(y.value(), k + 1);
  const auto j = static_cast<std::int64_t>(std::floor((t - 1.0) / 4.0));
  if (j < 0 || j >= count) return {-1, -1};
  const double lo = static_cast<double>(4 * j + 1);
  const double hi = static_cast<double>(4 * j + 3);
  if (t == lo || t == hi) return {j, 1};
  if (lo < t && t < hi) return {j, 0};
  return {-1, -1};
}

}  // namespace

std::optional<int> SlitSchedule::column_generation(const Coord& x) const {
  return generation_of_column(x, level_);
}

std::optional<Slit> SlitSchedule::slit_at(const Coord& x, const Coord& y) const {
  const auto k = generation_of_column(x, level_);
  if (!k) return std::nullopt;
  const auto [j, cls] = classify_in_column(y, *k);
  if (cls != 0) return std::nullopt;
  const std::int64_t i = (x.exact()->numerator() - 1) / 2;
  return Slit{*k, i, j};
}

std::optional<Slit> SlitSchedule::slit_with_tip(const Coord& x, const Coord& y) const {
  const auto k = generation_of_column(x, level_);
  if (!k) return std::nullopt;
  const auto [j, cls] = classify_in_column(y, *k);
  if (cls != 1) return std::nullopt;
  const std::int64_t i = (x.exact()->numerator() - 1) / 2;
  return Slit{*k, i, j};
}

bool SlitSchedule::contains(const Slit& s) const { return s.valid() && s.generation <= level_; }

std::size_t SlitSchedule::index_of(const Slit& s) const {
  if (!contains(s)) throw std::out_of_range("slit not in schedule");
  // generations before k contribute (4^{k-1} - 1) / 3 slits
  const std::size_t before = ((std::size_t{1} << (2 * (s.generation - 1))) - 1) / 3;
  const std::size_t count = std::size_t{1} << (s.generation - 1);
  return before + static_cast<std::size_t>(s.i) * count + static_cast<std::size_t>(s.j);
}

void SlitSchedule::write(std::ostream& out) const {
  out << "# slitcarpet-schedule v1 level " << level_ << '\n';
  for (const Slit& s : slits_) out << s.generation << ' ' << s.i << ' ' << s.j << '\n';
}

SlitSchedule SlitSchedule::read(std::istream& in) {
  std::vector<Slit> slits;
  std::optional<int> declared;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("level");
      if (pos != std::string::npos) declared = std::stoi(line.substr(pos + 5));
      continue;
    }
    std::istringstream ls(line);
    Slit s;
    std::string extra;
    if (!(ls >> s.generation >> s.i >> s.j) || (ls >> extra)) {
      throw std::invalid_argument(fmt::format("schedule line {}: expected 'k i j'", lineno));
    }
    if (!s.valid()) throw std::invalid_argument(fmt::format("schedule line {}: invalid slit", lineno));
    slits.push_back(s);
  }
  int level = declared.value_or(0);
  if (!declared)
    for (const Slit& s : slits) level = std::max(level, s.generation);
  SlitSchedule expected = up_to(level);
  std::sort(slits.begin(), slits.end());
  if (slits != expected.slits_) {
    throw std::invalid_argument(fmt::format("schedule is not the complete level-{} schedule", level));
  }
  return expected;
}

// ---------------------------------------------------------------- points

Location locate(const Coord& x, const Coord& y, int level) {
  const Coord zero(Dyadic(0));
  const Coord one(Dyadic(1));
  if (x < zero || x > one || y < zero || y > one) {
    throw std::out_of_range("locate: point outside the unit square");
  }
  if (x == zero || x == one || y == zero || y == one) return {LocationKind::outer_square, std::nullopt};
  const auto k = generation_of_column(x, level);
  if (!k) return {LocationKind::interior, std::nullopt};
  const auto [j, cls] = classify_in_column(y, *k);
  if (cls < 0) return {LocationKind::interior, std::nullopt};
  const Slit s{*k, (x.exact()->numerator() - 1) / 2, j};
  return {cls == 0 ? LocationKind::slit_interior : LocationKind::slit_tip, s};
}

bool CarpetPoint::on_outer_square() const {
  const Coord zero(Dyadic(0));
  const Coord one(Dyadic(1));
  return x == zero || x == one || y == zero || y == one;
}

CarpetPoint CarpetPoint::at_level(Coord x, Coord y, int level, std::optional<Side> side,
                                  std::optional<Copy> copy) {
  CarpetPoint p{std::move(x), std::move(y), side, copy};
  if (p.on_outer_square()) p.copy.reset();
  validate_point(p, level, p.copy ? Ambient::DS2 : Ambient::S2);
  return p;
}

void validate_point(const CarpetPoint& p, int level, Ambient ambient) {
  Location loc;
  try {
    loc = locate(p.x, p.y, level);
  } catch (const std::out_of_range& e) {
    throw InvalidPoint(std::string(e.what()) + ": " + p.to_string());
  }
  if (loc.needs_side() && !p.side) {
    throw InvalidPoint("point on an open slit needs a side tag: " + p.to_string());
  }
  if (!loc.needs_side() && p.side) {
    throw InvalidPoint(fmt::format("side tag on a point that is not inside a level-{} slit: {}", level,
                                   p.to_string()));
  }
  if (ambient == Ambient::S2 && p.copy) throw InvalidPoint("copy tag on a point of S2: " + p.to_string());
  if (ambient == Ambient::DS2) {
    if (loc.kind == LocationKind::outer_square && p.copy) {
      throw InvalidPoint("copy tag on the outer square: " + p.to_string());
    }
    if (loc.kind != LocationKind::outer_square && !p.copy) {
      throw InvalidPoint("point of the double needs a copy tag: " + p.to_string());
    }
  }
}

CarpetPoint project(const CarpetPoint& p, int from, int to) {
  if (to > from) throw std::invalid_argument("project: target level exceeds source level");
  if (to < 0) throw std::invalid_argument("project: negative level");
  CarpetPoint q = p;
  if (q.side) {
    const auto e = q.x.dyadic_exponent();
    if (!e || static_cast<int>(*e) > to) q.side.reset();
  }
  return q;
}

std::string CarpetPoint::to_string() const {
  std::string s = x.to_string() + " " + y.to_string();
  if (side) {
    s += ' ';
    s += to_char(*side);
  }
  if (copy) {
    s += ' ';
    s += to_char(*copy);
  }
  return s;
}

// ---------------------------------------------------------------- strip

std::int64_t StripPoint::sheet() const {
  if (y.is_exact()) return y.exact()->floor();
  return static_cast<std::int64_t>(std::floor(y.value()));
}

CarpetPoint fold(const StripPoint& s) {
  const Coord zero(Dyadic(0));
  const Coord one(Dyadic(1));
  if (s.x < zero || s.x > one) throw std::out_of_range("fold: x outside [0,1]");
  // r = y mod 2 in [0, 2)
  Coord r;
  if (s.y.is_exact()) {
    const Dyadic y = *s.y.exact();
    const std::int64_t pairs = y.scaled(-1).floor();
    r = Coord(y - Dyadic(2 * pairs));
  } else {
    double v = std::fmod(s.y.value(), 2.0);
    if (v < 0) v += 2.0;
    r = Coord::real(v);
  }
  CarpetPoint p;
  p.x = s.x;
  p.side = s.side;
  if (r <= one) {
    p.y = r;
    p.copy = Copy::front;
  } else {
    p.y = Coord(Dyadic(2)) - r;
    p.copy = Copy::back;
  }
  if (p.on_outer_square()) p.copy.reset();
  return p;
}

StripPoint unfold(const CarpetPoint& p, std::int64_t sheet) {
  const bool odd = (sheet % 2 + 2) % 2 == 1;
  if (p.copy) {
    if ((*p.copy == Copy::back) != odd) {
      throw std::invalid_argument("unfold: sheet parity does not match the copy tag");
    }
  } else if (!p.on_outer_square()) {
    throw std::invalid_argument("unfold: point of the double needs a copy tag off the outer square");
  }
  const Coord base{Dyadic(sheet)};
  StripPoint s;
  s.x = p.x;
  s.side = p.side;
  s.y = odd ? base + p.y.reflected() : base + p.y;
  return s;
}

}  // namespace slitcarpet
