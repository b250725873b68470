#include "slitcarpet/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "slitcarpet/cut_grid.hpp"

namespace slitcarpet::symmetry {

// ------------------------------------------------------------------ LFunction

namespace {

Dyadic compute_lip(int exponent, const std::vector<Dyadic>& v) {
  Dyadic best;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    Dyadic slope = (v[i + 1] - v[i]).scaled(exponent);
    if (sign(slope) < 0) slope = -slope;
    if (slope > best) best = slope;
  }
  return best;
}

// Reduced exponent of i / 2^N (0 for the endpoints).
int reduced_exponent(std::int64_t i, int N) {
  if (i == 0) return 0;
  int m = N;
  while (m > 0 && i % 2 == 0) {
    i /= 2;
    --m;
  }
  return m;
}

}  // namespace

LFunction::LFunction() : values_{Dyadic(0), Dyadic(0)} {}

LFunction::LFunction(int exponent, std::vector<Dyadic> values) : exponent_(exponent), values_(std::move(values)) {
  if (exponent < 0 || exponent > kMaxExponent) {
    throw std::invalid_argument(fmt::format("LFunction exponent {} outside [0, {}]", exponent, kMaxExponent));
  }
  if (values_.size() != (std::size_t{1} << exponent) + 1) {
    throw std::invalid_argument(fmt::format("LFunction with exponent {} needs {} values, got {}", exponent,
                                            (std::size_t{1} << exponent) + 1, values_.size()));
  }
  lip_ = compute_lip(exponent_, values_);
}

Dyadic LFunction::operator()(const Dyadic& t) const {
  if (sign(t) < 0 || t > Dyadic(1)) throw std::domain_error("LFunction evaluated outside [0, 1]");
  const Dyadic scaled = t.scaled(exponent_);
  const std::int64_t last = std::int64_t{1} << exponent_;
  const std::int64_t i = std::min(scaled.floor(), last - 1);
  const Dyadic frac = scaled - Dyadic(i);
  return values_[i] + (values_[i + 1] - values_[i]) * frac;
}

double LFunction::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("LFunction evaluated outside [0, 1]");
  const double scaled = std::ldexp(t, exponent_);
  const std::int64_t last = std::int64_t{1} << exponent_;
  const std::int64_t i = std::min(static_cast<std::int64_t>(std::floor(scaled)), last - 1);
  const double frac = scaled - static_cast<double>(i);
  const double a = values_[i].to_double();
  const double b = values_[i + 1].to_double();
  return a + (b - a) * frac;
}

Coord LFunction::operator()(const Coord& t) const {
  if (t.is_exact()) return Coord((*this)(*t.exact()));
  return Coord::real((*this)(t.value()));
}

LFunction LFunction::refined(int exponent) const {
  if (exponent < exponent_) throw std::invalid_argument("refined: cannot coarsen");
  if (exponent == exponent_) return *this;
  std::vector<Dyadic> v((std::size_t{1} << exponent) + 1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (*this)(Dyadic(static_cast<std::int64_t>(i), exponent));
  return LFunction(exponent, std::move(v));
}

LFunction LFunction::simplified() const {
  int N = exponent_;
  std::vector<Dyadic> v = values_;
  while (N > 0) {
    bool collinear = true;
    for (std::size_t i = 1; i + 1 < v.size() && collinear; i += 2) {
      collinear = (v[i - 1] + v[i + 1]).scaled(-1) == v[i];
    }
    if (!collinear) break;
    std::vector<Dyadic> coarse;
    coarse.reserve(v.size() / 2 + 1);
    for (std::size_t i = 0; i < v.size(); i += 2) coarse.push_back(v[i]);
    v = std::move(coarse);
    --N;
  }
  return LFunction(N, std::move(v));
}

bool LFunction::in_group() const {
  // on a single segment the test needs the midpoint too: h(t) = t fails at 1/2
  if (exponent_ == 0) return refined(1).in_group();
  if (!values_.front().is_zero() || !values_.back().is_integer()) return false;
  const auto last = static_cast<std::int64_t>(values_.size()) - 1;
  for (std::int64_t i = 1; i < last; ++i) {
    if (!values_[i].is_multiple_of_pow2(reduced_exponent(i, exponent_) - 1)) return false;
  }
  return true;
}

LFunction operator+(const LFunction& a, const LFunction& b) {
  const int N = std::max(a.exponent_, b.exponent_);
  const LFunction ra = a.refined(N);
  const LFunction rb = b.refined(N);
  std::vector<Dyadic> v(ra.values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ra.values_[i] + rb.values_[i];
  return LFunction(N, std::move(v)).simplified();
}

LFunction LFunction::operator-() const {
  std::vector<Dyadic> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -values_[i];
  return LFunction(exponent_, std::move(v));
}

LFunction operator-(const LFunction& a, const LFunction& b) { return a + (-b); }

bool operator==(const LFunction& a, const LFunction& b) {
  const int N = std::max(a.exponent_, b.exponent_);
  return a.refined(N).values_ == b.refined(N).values_;
}

std::string LFunction::to_string() const {
  std::string out = std::to_string(exponent_);
  for (const Dyadic& d : values_) {
    out += ' ';
    out += d.to_string();
  }
  return out;
}

LFunction LFunction::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  int N = -1;
  if (!(in >> N)) throw std::invalid_argument("LFunction: missing exponent");
  if (N < 0 || N > kMaxExponent) throw std::invalid_argument(fmt::format("LFunction: bad exponent {}", N));
  std::vector<Dyadic> values;
  std::string token;
  while (in >> token) values.push_back(Dyadic::parse(token));
  return LFunction(N, std::move(values));
}

LValidation validate_L(const LFunction& h, int depth) {
  if (depth < h.exponent()) throw std::invalid_argument("validate_L: depth below the breakpoint exponent");
  if (depth > 30) throw std::invalid_argument("validate_L: depth above 30");
  LValidation out;
  out.lip = h.lip();
  if (!h(Dyadic(0)).is_zero()) {
    out.violation = Dyadic(0);
    out.reason = "h(0) != 0";
    return out;
  }
  if (!h(Dyadic(1)).is_integer()) {
    out.violation = Dyadic(1);
    out.reason = "h(1) is not an integer";
    return out;
  }
  for (int m = 1; m <= depth; ++m) {
    for (std::int64_t k = 1; k < (std::int64_t{1} << m); k += 2) {
      const Dyadic t(k, static_cast<std::uint32_t>(m));
      const Dyadic value = h(t);
      if (!value.is_multiple_of_pow2(m - 1)) {
        out.violation = t;
        out.reason = fmt::format("h({}) = {} is not in 2Z/2^{}", t.to_string(), value.to_string(), m);
        return out;
      }
    }
  }
  out.valid = true;
  return out;
}

Dyadic h0_eval(const Dyadic& t) {
  if (t <= Dyadic(1, 1) || t >= Dyadic(1)) return Dyadic(0);
  Dyadic offset = t - Dyadic(3, 2);
  if (sign(offset) < 0) offset = -offset;
  return Dyadic(1, 1) - offset.scaled(1);
}

double h0_eval(double t) {
  if (t <= 0.5 || t >= 1.0) return 0.0;
  return 0.5 - 2.0 * std::abs(t - 0.75);
}

LFunction h0() { return LFunction(2, {Dyadic(0), Dyadic(0), Dyadic(0), Dyadic(1, 1), Dyadic(0)}); }

LFunction h_epsilon(std::span<const std::uint8_t> bits) {
  if (bits.empty()) throw std::invalid_argument("h_epsilon: need at least one bit");
  const int M = static_cast<int>(bits.size());
  const int N = M + 2;
  if (N > LFunction::kMaxExponent) throw std::invalid_argument("h_epsilon: too many bits");
  std::vector<Dyadic> v((std::size_t{1} << N) + 1);
  for (int m = 0; m < M; ++m) {
    if (bits[m] > 1) throw std::invalid_argument("h_epsilon: bits must be 0 or 1");
    if (!bits[m]) continue;
    // term m lives on [2^-(m+1), 2^-m], which holds the grid indices below
    const std::int64_t lo = std::int64_t{1} << (N - m - 1);
    for (std::int64_t i = lo; i <= 2 * lo; ++i) {
      v[i] += h0_eval(Dyadic(i, static_cast<std::uint32_t>(N - m))).scaled(-m);
    }
  }
  return LFunction(N, std::move(v));
}

// ------------------------------------------------------------------ isometries

IsometryElement IsometryElement::operator*(const IsometryElement& other) const {
  if (ambient != other.ambient) throw std::invalid_argument("isometries of different spaces");
  return {ambient, r != other.r, v != other.v, fb != other.fb};
}

std::string IsometryElement::name() const {
  std::vector<std::string> parts;
  if (r && v) {
    parts.emplace_back("R_h");
  } else if (r) {
    parts.emplace_back("R_r");
  } else if (v) {
    parts.emplace_back("R_v");
  }
  if (fb) parts.emplace_back("R_fb");
  if (parts.empty()) return "id";
  return parts.size() == 1 ? parts[0] : parts[0] + " " + parts[1];
}

std::string IsometryElement::bits() const {
  return std::string{r ? '1' : '0', v ? '1' : '0', fb ? '1' : '0'};
}

CarpetPoint apply(const IsometryElement& iso, const CarpetPoint& p) {
  if (iso.ambient == Ambient::S2 && iso.fb) throw std::invalid_argument("R_fb acts on the double only");
  CarpetPoint q = p;
  if (iso.flips_x()) {
    q.x = p.x.reflected();
    if (q.side) q.side = opposite(*q.side);
  }
  if (iso.r) q.y = p.y.reflected();
  if (iso.fb && q.copy) q.copy = opposite(*q.copy);
  return q;
}

std::vector<IsometryElement> isometry_group(Ambient ambient) {
  std::vector<IsometryElement> out;
  const int fb_states = ambient == Ambient::DS2 ? 2 : 1;
  for (int fb = 0; fb < fb_states; ++fb) {
    for (int v = 0; v < 2; ++v) {
      for (int r = 0; r < 2; ++r) out.push_back({ambient, r == 1, v == 1, fb == 1});
    }
  }
  return out;
}

GroupTable isometry_table(Ambient ambient) {
  GroupTable t;
  t.elements = isometry_group(ambient);
  const std::size_t n = t.elements.size();
  // products are computed on points, not from the bit arithmetic
  std::vector<CarpetPoint> probes;
  for (const char* x : {"1/8", "3/8", "5/8"}) {
    for (const char* y : {"1/16", "5/16"}) {
      const auto copy = ambient == Ambient::DS2 ? std::optional(Copy::front) : std::nullopt;
      probes.push_back({Coord::parse(x), Coord::parse(y), std::nullopt, copy});
    }
  }
  auto same_map = [&](auto&& f, const IsometryElement& e) {
    return std::all_of(probes.begin(), probes.end(), [&](const CarpetPoint& p) { return f(p) == apply(e, p); });
  };
  t.product.assign(n, std::vector<int>(n, -1));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      auto ab = [&](const CarpetPoint& p) { return apply(t.elements[a], apply(t.elements[b], p)); };
      for (std::size_t c = 0; c < n; ++c) {
        if (same_map(ab, t.elements[c])) {
          t.product[a][b] = static_cast<int>(c);
          break;
        }
      }
      if (t.product[a][b] < 0) throw std::logic_error("isometry group is not closed");
    }
  }
  t.abelian = true;
  t.involutive = true;
  for (std::size_t a = 0; a < n; ++a) {
    if (t.product[a][a] != 0) t.involutive = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (t.product[a][b] != t.product[b][a]) t.abelian = false;
    }
  }
  return t;
}

// ------------------------------------------------------------------ shears

CarpetPoint shear_apply(const LFunction& h, const CarpetPoint& p) {
  const std::int64_t sheet = (p.copy == Copy::back) ? 1 : 0;
  StripPoint s = unfold(p, sheet);
  s.y = s.y + h(p.x);
  return fold(s);
}

std::string QSElement::to_string() const { return iso.bits() + " " + shear.to_string(); }

QSElement QSElement::parse(std::string_view text) {
  const auto space = text.find(' ');
  const std::string_view bits = text.substr(0, space);
  if (bits.size() != 3 || bits.find_first_not_of("01") != std::string_view::npos) {
    throw std::invalid_argument(fmt::format("QSElement: bad isometry bits '{}'", bits));
  }
  QSElement g;
  g.iso = {Ambient::DS2, bits[0] == '1', bits[1] == '1', bits[2] == '1'};
  g.shear = space == std::string_view::npos ? LFunction() : LFunction::parse(text.substr(space + 1));
  validate(g);
  return g;
}

void validate(const QSElement& g) {
  if (g.iso.ambient != Ambient::DS2) throw std::invalid_argument("group elements act on the double");
  if (!g.shear.in_group()) throw std::invalid_argument("shear function violates the dyadic constraints");
}

CarpetPoint qs_apply(const QSElement& g, const CarpetPoint& p) { return apply(g.iso, shear_apply(g.shear, p)); }

QSElement random_element(std::mt19937_64& rng, int bits) {
  if (bits < 1) throw std::invalid_argument("random_element: need at least one bit");
  std::bernoulli_distribution coin(0.5);
  QSElement g;
  g.iso = {Ambient::DS2, coin(rng), coin(rng), coin(rng)};
  std::vector<std::uint8_t> eps(bits);
  for (auto& b : eps) b = coin(rng) ? 1 : 0;
  g.shear = h_epsilon(eps).simplified();
  return g;
}

namespace {

// Dyadic points of both copies and the seam, on a grid fine enough to see
// every breakpoint of h.
std::vector<CarpetPoint> conjugation_probes(int exponent) {
  std::vector<CarpetPoint> out;
  const int xe = std::min(exponent + 1, 9);
  std::mt19937_64 rng(0x5eed);
  const std::int64_t xs = std::int64_t{1} << xe;
  const int per_column = static_cast<int>(std::max<std::int64_t>(1, 500 / (xs + 1)));
  for (std::int64_t i = 0; i <= xs; ++i) {
    const Coord x(Dyadic(i, static_cast<std::uint32_t>(xe)));
    for (int k = 0; k < per_column; ++k) {
      const Coord y(Dyadic(static_cast<std::int64_t>(rng() % 65), 6));
      for (Copy c : {Copy::front, Copy::back}) {
        CarpetPoint p{x, y, std::nullopt, c};
        if (p.on_outer_square()) p.copy.reset();
        out.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace

Conjugation conjugate(const IsometryElement& iso, const LFunction& h) {
  if (iso.ambient != Ambient::DS2) throw std::invalid_argument("conjugate: isometry of the double required");
  // On the strip iso is (x, y) -> (xi(x), s y + c); conjugating the shear by
  // it gives (x, y) -> (x, y + s h(xi(x))).
  const std::int64_t last = static_cast<std::int64_t>(h.values().size()) - 1;
  std::vector<Dyadic> v(h.values().size());
  for (std::int64_t i = 0; i <= last; ++i) {
    const Dyadic& hv = h.values()[iso.flips_x() ? last - i : i];
    v[i] = iso.flips_y() ? -hv : hv;
  }
  Conjugation out{LFunction(), IsometryElement::identity()};
  const Dyadic shift = v[0];  // integer: +-h(1) when x is reversed, else 0
  for (Dyadic& d : v) d -= shift;
  out.shear = LFunction(h.exponent(), std::move(v)).simplified();
  if (shift.numerator() % 2 != 0) out.residual = {Ambient::DS2, true, true, true};

  for (const CarpetPoint& p : conjugation_probes(h.exponent())) {
    const CarpetPoint lhs = apply(iso, shear_apply(h, apply(iso.inverse(), p)));
    const CarpetPoint rhs = apply(out.residual, shear_apply(out.shear, p));
    if (!(lhs == rhs)) {
      throw std::logic_error(fmt::format("conjugation formula fails at {}: {} vs {}", p.to_string(),
                                         lhs.to_string(), rhs.to_string()));
    }
  }
  return out;
}

QSElement qs_compose(const QSElement& a, const QSElement& b) {
  // a.iso a.shear b.iso b.shear = a.iso b.iso (b.iso^-1 a.shear b.iso) b.shear
  const Conjugation c = conjugate(b.iso.inverse(), a.shear);
  return {a.iso * b.iso * c.residual, c.shear + b.shear};
}

QSElement qs_inverse(const QSElement& g) {
  // shear(-h) iso^-1 = iso^-1 (iso shear(-h) iso^-1)
  const Conjugation c = conjugate(g.iso, -g.shear);
  return {g.iso.inverse() * c.residual, c.shear};
}

std::optional<CarpetPoint> shear_disagreement(const IsometryElement& iso, std::span<const CarpetPoint> samples) {
  // A shear fixes x and the side tag, fixes the left side pointwise and
  // moves each vertical line by one strip displacement.
  auto strip_y = [](const CarpetPoint& p) { return unfold(p, p.copy == Copy::back ? 1 : 0).y.value(); };
  std::vector<std::pair<double, double>> displacement;  // (x, shift mod 2)
  for (const CarpetPoint& p : samples) {
    const CarpetPoint q = apply(iso, p);
    if (!(q.x == p.x) || q.side != p.side) return p;
    if (p.x.value() == 0.0) {
      if (!(q == p)) return p;
      continue;
    }
    if (p.on_outer_square() || q.on_outer_square()) continue;
    const double shift = std::fmod(strip_y(q) - strip_y(p) + 4.0, 2.0);
    for (const auto& [x, s] : displacement) {
      if (x == p.x.value() && std::abs(s - shift) > 1e-12 && std::abs(std::abs(s - shift) - 2.0) > 1e-12) return p;
    }
    displacement.emplace_back(p.x.value(), shift);
  }
  return std::nullopt;
}

// ------------------------------------------------------------ vertical curves

VerticalCurveSignature vertical_curve_signature(const Coord& x) {
  VerticalCurveSignature s;
  if (!x.is_exact()) return s;
  const Dyadic d = *x.exact();
  if (sign(d) < 0 || d > Dyadic(1)) throw std::out_of_range("vertical_curve_signature: x outside [0, 1]");
  s.x = d;
  if (d.is_integer()) return s;  // the outer square
  s.generation = static_cast<int>(d.exponent());
  s.slits_per_copy = std::int64_t{1} << (s.generation - 1);
  s.slit_diameter = std::ldexp(1.0, -s.generation);
  s.curve_count = std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(2 * s.slits_per_copy, 2000)));
  return s;
}

namespace {

std::vector<Slit> slits_on_column(const Coord& x, int level) {
  std::vector<Slit> out;
  if (!x.is_exact()) return out;
  const Dyadic d = *x.exact();
  const auto k = static_cast<int>(d.exponent());
  if (k < 1 || k > level) return out;
  const std::int64_t i = (d.numerator() - 1) / 2;
  for (std::int64_t j = 0; j < (std::int64_t{1} << (k - 1)); ++j) out.push_back({k, i, j});
  return out;
}

}  // namespace

std::vector<std::vector<Side>> enumerate_closed_vertical_curves(const Coord& x, int level) {
  const std::size_t met = 2 * slits_on_column(x, level).size();
  if (met > 20) throw std::invalid_argument("enumerate_closed_vertical_curves: more than 2^20 curves");
  std::vector<std::vector<Side>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << met); ++mask) {
    std::vector<Side> sides(met);
    for (std::size_t b = 0; b < met; ++b) sides[b] = (mask >> b) & 1 ? Side::right : Side::left;
    out.push_back(std::move(sides));
  }
  return out;
}

geodesics::Polyline closed_vertical_curve(const Coord& x, int level, std::span<const Side> sides) {
  if (!(x > Coord(Dyadic(0)) && x < Coord(Dyadic(1)))) throw std::invalid_argument("closed curves need 0 < x < 1");
  const std::vector<Slit> slits = slits_on_column(x, level);
  if (sides.size() != 2 * slits.size()) throw std::invalid_argument("one side per slit met is required");
  geodesics::Polyline c;
  auto push = [&](const Dyadic& y, std::optional<Side> side, std::optional<Copy> copy) {
    CarpetPoint p{x, Coord(y), side, copy};
    if (p.on_outer_square()) p.copy.reset();
    c.vertices.push_back(p);
  };
  push(Dyadic(0), std::nullopt, std::nullopt);
  for (std::size_t k = 0; k < slits.size(); ++k) {
    const Slit& s = slits[k];
    push(s.y_lo(), std::nullopt, Copy::front);
    push((s.y_lo() + s.y_hi()).scaled(-1), sides[k], Copy::front);
    push(s.y_hi(), std::nullopt, Copy::front);
  }
  push(Dyadic(1), std::nullopt, std::nullopt);
  for (std::size_t k = 0; k < slits.size(); ++k) {
    const Slit& s = slits[slits.size() - 1 - k];
    push(s.y_hi(), std::nullopt, Copy::back);
    push((s.y_lo() + s.y_hi()).scaled(-1), sides[slits.size() + k], Copy::back);
    push(s.y_lo(), std::nullopt, Copy::back);
  }
  push(Dyadic(0), std::nullopt, std::nullopt);
  c.length = 2.0;
  return c;
}

// ------------------------------------------------------------------ checks

CohopfReport cohopf_check(const QSElement& g, int level) {
  validate(g);
  const SlitSchedule schedule = SlitSchedule::up_to(level);
  CohopfReport report;
  std::set<std::pair<std::size_t, Copy>> hit;
  for (const Slit& s : schedule.slits()) {
    for (Copy c : {Copy::front, Copy::back}) {
      ++report.slits;
      const Coord x(s.x());
      const CarpetPoint lo = qs_apply(g, {x, Coord(s.y_lo()), std::nullopt, c});
      const CarpetPoint hi = qs_apply(g, {x, Coord(s.y_hi()), std::nullopt, c});
      const CarpetPoint mid = qs_apply(g, {x, Coord((s.y_lo() + s.y_hi()).scaled(-1)), Side::left, c});
      const Location at = locate(lo.x, lo.y, level);
      std::optional<Slit> image = at.kind == LocationKind::slit_tip ? at.slit : std::nullopt;
      const bool same_copy = lo.copy && lo.copy == hi.copy && lo.copy == mid.copy;
      const bool tips_match =
          image && image->generation == s.generation && lo.x == hi.x && lo.x == mid.x &&
          ((lo.y == Coord(image->y_lo()) && hi.y == Coord(image->y_hi())) ||
           (lo.y == Coord(image->y_hi()) && hi.y == Coord(image->y_lo())));
      const bool mid_inside = image && mid.side && schedule.slit_at(mid.x, mid.y) == image;
      if (!same_copy || !tips_match || !mid_inside) {
        report.failure = fmt::format("slit ({}, {}, {}) {} maps to tips {} / {}", s.generation, s.i, s.j,
                                     to_char(c), lo.to_string(), hi.to_string());
        return report;
      }
      if (!hit.emplace(schedule.index_of(*image), *lo.copy).second) {
        report.failure = fmt::format("slit ({}, {}, {}) is hit twice", image->generation, image->i, image->j);
        return report;
      }
    }
  }
  report.ok = hit.size() == 2 * schedule.size();
  if (!report.ok) report.failure = "image misses some slits";
  return report;
}

BilipschitzReport bilipschitz_estimate(const QSElement& g, int level, int num_pairs, std::uint64_t seed) {
  validate(g);
  const CutGrid grid(level, level + 2, Ambient::DS2);
  std::uniform_int_distribution<std::size_t> pick(0, grid.node_count() - 1);
  std::mt19937_64 rng(seed);
  BilipschitzReport r;
  r.bound = std::sqrt(2.0) * (1.0 + g.shear.lip().to_double());
  r.min_ratio = INFINITY;
  while (r.pairs < num_pairs) {
    const CarpetPoint p = grid.point(pick(rng));
    const CarpetPoint q = grid.point(pick(rng));
    const double d = geodesics::distance_double(level, p, q).length;
    if (d == 0.0) continue;
    const double e = geodesics::distance_double(level, qs_apply(g, p), qs_apply(g, q)).length;
    r.max_ratio = std::max(r.max_ratio, e / d);
    r.min_ratio = std::min(r.min_ratio, e / d);
    ++r.pairs;
  }
  return r;
}

std::vector<geodesics::Polyline> sample_vertical_curves(int level, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int e = level + 2;
  const std::int64_t cells = std::int64_t{1} << e;
  std::vector<geodesics::Polyline> out;
  const SlitSchedule schedule = SlitSchedule::up_to(level);
  while (static_cast<int>(out.size()) < count) {
    const Coord x(Dyadic(static_cast<std::int64_t>(rng() % (cells + 1)), static_cast<std::uint32_t>(e)));
    std::int64_t a = static_cast<std::int64_t>(rng() % (cells + 1));
    std::int64_t b = static_cast<std::int64_t>(rng() % (cells + 1));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const Copy copy = rng() % 2 ? Copy::back : Copy::front;
    std::vector<Dyadic> ys;
    for (std::int64_t k = a; k <= b; ++k) ys.emplace_back(k, static_cast<std::uint32_t>(e));
    for (const Slit& s : slits_on_column(x, level)) {
      for (const Dyadic& y : {s.y_lo(), s.y_hi()}) {
        if (y > ys.front() && y < ys.back()) ys.push_back(y);
      }
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    geodesics::Polyline c;
    std::optional<Slit> current;
    Side side = Side::left;
    for (const Dyadic& y : ys) {
      CarpetPoint p{x, Coord(y), std::nullopt, copy};
      if (const auto inside = schedule.slit_at(p.x, p.y)) {
        if (inside != current) {
          current = inside;
          side = rng() % 2 ? Side::right : Side::left;
        }
        p.side = side;
      }
      if (p.on_outer_square()) p.copy.reset();
      c.vertices.push_back(p);
    }
    c.length = (ys.back() - ys.front()).to_double();
    out.push_back(std::move(c));
  }
  return out;
}

bool verttovert_check(const QSElement& g, std::span<const geodesics::Polyline> curves) {
  for (const auto& c : curves) {
    if (!geodesics::is_vertical(c)) throw std::invalid_argument("verttovert_check: sample curve is not vertical");
    geodesics::Polyline image;
    for (const CarpetPoint& p : c.vertices) image.vertices.push_back(qs_apply(g, p));
    if (!geodesics::is_vertical(image)) return false;
  }
  return true;
}

}  // namespace slitcarpet::symmetry
