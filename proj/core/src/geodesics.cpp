#include "slitcarpet/geodesics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace slitcarpet::geodesics {

namespace {

using i128 = __int128;

// Exact coordinates are compared as integers scaled by 2^kScale. Exact
// coordinates have exponent <= Coord::kMaxExactExponent and the unfolded
// domains stay within [-1, 2], so every product below fits in 128 bits.
constexpr std::uint32_t kScale = 48;
static_assert(Coord::kMaxExactExponent <= kScale);

constexpr double kTieTolerance = 1e-12;
constexpr double kRebuildTolerance = 1e-9;
// Floating fallback for non-dyadic endpoints: the crossing must clear a tip
// by more than this to count as blocked (touching is never blocking).
constexpr double kFloatEpsilon = 1e-12;
// Inside this band around a tip the floating test is replaced by the exact one.
constexpr double kAmbiguityBand = 1e-9;

i128 to_fixed(const Dyadic& d) { return static_cast<i128>(d.numerator()) << (kScale - d.exponent()); }

struct VPoint {
  Coord cx;
  Coord cy;
  double x = 0.0;
  double y = 0.0;
  bool exact = false;
  i128 X = 0;
  i128 Y = 0;
  std::optional<Side> side;
  int col = -1;  // slit holding a tagged point
  int iv = -1;
};

int tag_rank(const std::optional<Side>& s) { return s ? (*s == Side::left ? 1 : 2) : 0; }

bool key_less(const VPoint& a, const VPoint& b) {
  return std::tuple(a.x, a.y, tag_rank(a.side)) < std::tuple(b.x, b.y, tag_rank(b.side));
}

double euclid(const VPoint& a, const VPoint& b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct Segment {
  Dyadic x;
  Dyadic lo;
  Dyadic hi;
};

struct Column {
  double x = 0.0;
  i128 X = 0;
  std::vector<double> lo, hi;
  std::vector<i128> LO, HI;
};

// Vertical segment obstacles in some planar domain, plus the visibility graph
// on their endpoints.
class Domain {
 public:
  explicit Domain(std::vector<Segment> segs) {
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
      return a.x != b.x ? a.x < b.x : a.lo < b.lo;
    });
    for (const Segment& s : segs) {
      if (cols_.empty() || cols_.back().X != to_fixed(s.x)) {
        Column c;
        c.x = s.x.to_double();
        c.X = to_fixed(s.x);
        cols_.push_back(std::move(c));
      }
      Column& c = cols_.back();
      c.lo.push_back(s.lo.to_double());
      c.hi.push_back(s.hi.to_double());
      c.LO.push_back(to_fixed(s.lo));
      c.HI.push_back(to_fixed(s.hi));
      tips_.push_back(make_point(Coord(s.x), Coord(s.lo), std::nullopt));
      tips_.push_back(make_point(Coord(s.x), Coord(s.hi), std::nullopt));
    }
    std::sort(tips_.begin(), tips_.end(), key_less);
    adj_.resize(tips_.size());
    for (std::size_t a = 0; a < tips_.size(); ++a) {
      for (std::size_t b = a + 1; b < tips_.size(); ++b) {
        if (!visible(tips_[a], tips_[b])) continue;
        const double w = euclid(tips_[a], tips_[b]);
        adj_[a].emplace_back(static_cast<std::uint32_t>(b), w);
        adj_[b].emplace_back(static_cast<std::uint32_t>(a), w);
      }
    }
  }

  const std::vector<VPoint>& tips() const { return tips_; }
  const std::vector<std::pair<std::uint32_t, double>>& adjacent(std::size_t t) const { return adj_[t]; }

  VPoint make_point(const Coord& x, const Coord& y, std::optional<Side> side) const {
    VPoint p;
    p.cx = x;
    p.cy = y;
    p.x = x.value();
    p.y = y.value();
    p.exact = x.is_exact() && y.is_exact();
    if (p.exact) {
      p.X = to_fixed(*x.exact());
      p.Y = to_fixed(*y.exact());
    }
    p.side = side;
    if (side) {
      if (!p.exact) throw InvalidPoint("side tag on a point off every slit: " + x.to_string() + " " + y.to_string());
      const auto it = std::lower_bound(cols_.begin(), cols_.end(), p.X,
                                       [](const Column& c, i128 v) { return c.X < v; });
      if (it != cols_.end() && it->X == p.X) {
        for (std::size_t k = 0; k < it->LO.size(); ++k) {
          if (it->LO[k] < p.Y && p.Y < it->HI[k]) {
            p.col = static_cast<int>(it - cols_.begin());
            p.iv = static_cast<int>(k);
          }
        }
      }
      if (p.col < 0) throw InvalidPoint("side tag on a point off every slit: " + x.to_string() + " " + y.to_string());
    }
    return p;
  }

  bool visible(const VPoint& a, const VPoint& b) const {
    if (a.x == b.x) {
      // running along a column; only the two sides of one slit are separated
      return !(a.side && b.side && *a.side != *b.side && a.col == b.col && a.iv == b.iv);
    }
    const VPoint& l = a.x < b.x ? a : b;
    const VPoint& r = a.x < b.x ? b : a;
    if (l.side == Side::left || r.side == Side::right) return false;
    auto first = std::upper_bound(cols_.begin(), cols_.end(), l.x, [](double v, const Column& c) { return v < c.x; });
    auto last = std::lower_bound(cols_.begin(), cols_.end(), r.x, [](const Column& c, double v) { return c.x < v; });
    for (auto it = first; it < last; ++it) {
      if (crosses(*it, l, r)) return false;
    }
    return true;
  }

  std::pair<int, int> slit_index(const Slit& s) const {
    const i128 X = to_fixed(s.x());
    const i128 LO = to_fixed(s.y_lo());
    const auto it = std::lower_bound(cols_.begin(), cols_.end(), X, [](const Column& c, i128 v) { return c.X < v; });
    if (it == cols_.end() || it->X != X) throw std::out_of_range("slit not in this domain");
    const auto k = std::find(it->LO.begin(), it->LO.end(), LO);
    if (k == it->LO.end()) throw std::out_of_range("slit not in this domain");
    return {static_cast<int>(it - cols_.begin()), static_cast<int>(k - it->LO.begin())};
  }

  const Column& column(int c) const { return cols_[c]; }

 private:
  // Strict crossing of the open interval of some slit in column c by the
  // segment l-r with l.x < c.x < r.x.
  static bool crosses(const Column& c, const VPoint& l, const VPoint& r) {
    const double t = (c.x - l.x) / (r.x - l.x);
    const double yx = l.y + (r.y - l.y) * t;
    const auto up = std::upper_bound(c.lo.begin(), c.lo.end(), yx);
    const std::ptrdiff_t idx = (up - c.lo.begin()) - 1;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(idx, 0);
         k <= idx + 1 && k < static_cast<std::ptrdiff_t>(c.lo.size()); ++k) {
      const double lo = c.lo[k];
      const double hi = c.hi[k];
      if (!(l.exact && r.exact)) {
        if (yx > lo + kFloatEpsilon && yx < hi - kFloatEpsilon) return true;
        continue;
      }
      if (yx > lo + kAmbiguityBand && yx < hi - kAmbiguityBand) return true;
      if (yx < lo - kAmbiguityBand || yx > hi + kAmbiguityBand) continue;
      // (y(X) - v) * (r.X - l.X) = (l.Y - v) * D + (r.Y - l.Y) * (X - l.X)
      const i128 d = r.X - l.X;
      const i128 rise = (r.Y - l.Y) * (c.X - l.X);
      const i128 above_lo = (l.Y - c.LO[k]) * d + rise;
      const i128 below_hi = (l.Y - c.HI[k]) * d + rise;
      if (above_lo > 0 && below_hi < 0) return true;
    }
    return false;
  }

  std::vector<Column> cols_;
  std::vector<VPoint> tips_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj_;
};

// ------------------------------------------------------------- level domains

enum class Fold : std::uint8_t { bottom, top, left, right };
constexpr std::array<Fold, 4> kFolds{Fold::bottom, Fold::top, Fold::left, Fold::right};

// The back copy reflected across one side of the square; an involution.
Coord reflect_x(Fold f, const Coord& x) {
  if (f == Fold::left) return -x;
  if (f == Fold::right) return Coord(Dyadic(2)) - x;
  return x;
}
Coord reflect_y(Fold f, const Coord& y) {
  if (f == Fold::bottom) return -y;
  if (f == Fold::top) return Coord(Dyadic(2)) - y;
  return y;
}
bool swaps_sides(Fold f) { return f == Fold::left || f == Fold::right; }

std::optional<Side> reflect_side(Fold f, std::optional<Side> s) {
  if (s && swaps_sides(f)) return opposite(*s);
  return s;
}

// +1 in the front half of the unfolded domain, -1 in the back half, 0 on the seam line.
int half_of(Fold f, double x, double y) {
  switch (f) {
    case Fold::bottom: return y > 0 ? 1 : (y < 0 ? -1 : 0);
    case Fold::top: return y < 1 ? 1 : (y > 1 ? -1 : 0);
    case Fold::left: return x > 0 ? 1 : (x < 0 ? -1 : 0);
    case Fold::right: return x < 1 ? 1 : (x > 1 ? -1 : 0);
  }
  return 0;
}

std::vector<Segment> level_segments(int n) {
  std::vector<Segment> segs;
  const SlitSchedule schedule = SlitSchedule::up_to(n);
  for (const Slit& s : schedule.slits()) segs.push_back({s.x(), s.y_lo(), s.y_hi()});
  return segs;
}

std::vector<Segment> unfolded_segments(int n, Fold f) {
  std::vector<Segment> segs = level_segments(n);
  const std::size_t count = segs.size();
  for (std::size_t k = 0; k < count; ++k) {
    const Segment s = segs[k];
    const Dyadic x = *reflect_x(f, Coord(s.x)).exact();
    const Dyadic a = *reflect_y(f, Coord(s.lo)).exact();
    const Dyadic b = *reflect_y(f, Coord(s.hi)).exact();
    segs.push_back({x, std::min(a, b), std::max(a, b)});
  }
  return segs;
}

struct LevelDomains {
  std::shared_ptr<const Domain> plain;
  std::array<std::shared_ptr<const Domain>, 4> unfolded;
  std::array<std::once_flag, 4> once;
};

LevelDomains& level_domains(int n) {
  if (n < 0 || n > kMaxExactLevel) {
    throw std::invalid_argument(fmt::format("exact metric supports levels 0..{}, got {}", kMaxExactLevel, n));
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<LevelDomains>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<LevelDomains>();
    slot->plain = std::make_shared<const Domain>(level_segments(n));
  }
  return *slot;
}

std::shared_ptr<const Domain> plain_domain(int n) { return level_domains(n).plain; }

std::shared_ptr<const Domain> unfolded_domain(int n, Fold f) {
  LevelDomains& d = level_domains(n);
  const auto k = static_cast<std::size_t>(f);
  std::call_once(d.once[k], [&] { d.unfolded[k] = std::make_shared<const Domain>(unfolded_segments(n, f)); });
  return d.unfolded[k];
}

// ------------------------------------------------------------- source fields

struct Field {
  std::shared_ptr<const Domain> dom;
  VPoint src;
  std::vector<double> dist;
  std::vector<int> hops;
  std::vector<char> src_visible;
};

Field make_field(std::shared_ptr<const Domain> dom, VPoint src) {
  Field f{std::move(dom), std::move(src), {}, {}, {}};
  const auto& tips = f.dom->tips();
  const std::size_t T = tips.size();
  f.dist.assign(T, std::numeric_limits<double>::infinity());
  f.hops.assign(T, std::numeric_limits<int>::max());
  f.src_visible.assign(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    if (f.dom->visible(f.src, tips[t])) {
      f.src_visible[t] = 1;
      f.dist[t] = euclid(f.src, tips[t]);
      f.hops[t] = 1;
    }
  }
  // Dense Dijkstra: the tip graphs are small and often dense.
  std::vector<char> done(T, 0);
  for (std::size_t step = 0; step < T; ++step) {
    std::size_t u = T;
    for (std::size_t t = 0; t < T; ++t) {
      if (done[t] || !std::isfinite(f.dist[t])) continue;
      if (u == T || f.dist[t] < f.dist[u] - kTieTolerance ||
          (f.dist[t] <= f.dist[u] + kTieTolerance && f.hops[t] < f.hops[u])) {
        u = t;
      }
    }
    if (u == T) break;
    done[u] = 1;
    for (const auto& [v, w] : f.dom->adjacent(u)) {
      if (done[v]) continue;
      const double nd = f.dist[u] + w;
      if (nd < f.dist[v] - kTieTolerance) {
        f.dist[v] = nd;
        f.hops[v] = f.hops[u] + 1;
      } else if (nd <= f.dist[v] + kTieTolerance) {
        f.dist[v] = std::min(f.dist[v], nd);
        f.hops[v] = std::min(f.hops[v], f.hops[u] + 1);
      }
    }
  }
  return f;
}

struct RawPath {
  double length = std::numeric_limits<double>::infinity();
  std::vector<VPoint> vertices;  // from the query to the source
};

double query_distance(const Field& f, const VPoint& q) {
  double best = std::numeric_limits<double>::infinity();
  if (f.dom->visible(q, f.src)) best = euclid(q, f.src);
  const auto& tips = f.dom->tips();
  for (std::size_t t = 0; t < tips.size(); ++t) {
    if (!std::isfinite(f.dist[t])) continue;
    const double via = f.dist[t] + euclid(q, tips[t]);
    if (via < best && f.dom->visible(q, tips[t])) best = via;
  }
  return best;
}

RawPath query_path(const Field& f, const VPoint& q) {
  const auto& tips = f.dom->tips();
  const std::size_t T = tips.size();
  RawPath out;
  // candidates for the first bend: T stands for the source itself
  std::vector<std::pair<std::size_t, double>> cands;
  if (f.dom->visible(q, f.src)) cands.emplace_back(T, euclid(q, f.src));
  for (std::size_t t = 0; t < T; ++t) {
    if (std::isfinite(f.dist[t]) && f.dom->visible(q, tips[t])) cands.emplace_back(t, f.dist[t] + euclid(q, tips[t]));
  }
  if (cands.empty()) return out;
  for (const auto& c : cands) out.length = std::min(out.length, c.second);

  auto hops_of = [&](std::size_t t) { return t == T ? 0 : f.hops[t]; };
  auto better = [&](std::size_t a, std::size_t b) {
    if (hops_of(a) != hops_of(b)) return hops_of(a) < hops_of(b);
    if (a == T || b == T) return a == T;
    return key_less(tips[a], tips[b]);
  };
  std::size_t cur = T + 1;
  for (const auto& [t, len] : cands) {
    if (len <= out.length + kTieTolerance && (cur == T + 1 || better(t, cur))) cur = t;
  }
  out.vertices.push_back(q);
  for (std::size_t guard = 0; cur != T && guard <= T; ++guard) {
    out.vertices.push_back(tips[cur]);
    std::size_t next = T + 1;
    double next_len = std::numeric_limits<double>::infinity();
    bool next_on_hops = false;
    auto consider = [&](std::size_t w, double through) {
      const bool on_hops = hops_of(w) == f.hops[cur] - 1 && through <= f.dist[cur] + kRebuildTolerance;
      if (next == T + 1 || (on_hops && !next_on_hops) ||
          (on_hops == next_on_hops &&
           (on_hops ? better(w, next) : through < next_len))) {
        next = w;
        next_len = through;
        next_on_hops = on_hops;
      }
    };
    if (f.src_visible[cur]) consider(T, euclid(tips[cur], f.src));
    for (const auto& [w, wt] : f.dom->adjacent(cur)) {
      if (std::isfinite(f.dist[w])) consider(w, f.dist[w] + wt);
    }
    cur = next;
  }
  out.vertices.push_back(f.src);
  return out;
}

// ------------------------------------------------------------- helpers

auto point_key(const CarpetPoint& p) {
  const int copy = p.copy ? (*p.copy == Copy::front ? 1 : 2) : 0;
  return std::tuple(p.x.value(), p.y.value(), tag_rank(p.side), copy);
}

void check_level(int n) {
  if (n < 0 || n > kMaxExactLevel) {
    throw std::invalid_argument(fmt::format("exact metric supports levels 0..{}, got {}", kMaxExactLevel, n));
  }
}

CarpetPoint plain_label(const VPoint& v) { return CarpetPoint{v.cx, v.cy, v.side, std::nullopt}; }

PathResult finish(double length, std::vector<CarpetPoint> vertices) {
  PathResult r;
  r.length = length;
  r.path.length = polyline_length(vertices);
  r.path.vertices = std::move(vertices);
  return r;
}

PathResult level_path(int n, const CarpetPoint& p, const CarpetPoint& q) {
  // The field is always grown from the larger endpoint so that swapping p and
  // q reproduces the same floating sums.
  const bool swapped = point_key(q) < point_key(p);
  const CarpetPoint& a = swapped ? q : p;
  const CarpetPoint& b = swapped ? p : q;
  const auto dom = plain_domain(n);
  const Field f = make_field(dom, dom->make_point(b.x, b.y, b.side));
  const RawPath raw = query_path(f, dom->make_point(a.x, a.y, a.side));
  if (raw.vertices.empty()) throw std::logic_error("no path found; the slit square is connected");
  std::vector<CarpetPoint> verts;
  for (const VPoint& v : raw.vertices) verts.push_back(plain_label(v));
  verts.front() = a;
  verts.back() = b;
  if (swapped) std::reverse(verts.begin(), verts.end());
  return finish(raw.length, std::move(verts));
}

}  // namespace

// ------------------------------------------------------------- public API

double polyline_length(std::span<const CarpetPoint> vertices) {
  double total = 0.0;
  for (std::size_t k = 1; k < vertices.size(); ++k) {
    total += std::hypot(vertices[k].x.value() - vertices[k - 1].x.value(),
                        vertices[k].y.value() - vertices[k - 1].y.value());
  }
  return total;
}

bool segment_visible(int n, const CarpetPoint& a, const CarpetPoint& b) {
  const auto dom = plain_domain(n);
  return dom->visible(dom->make_point(a.x, a.y, a.side), dom->make_point(b.x, b.y, b.side));
}

PathResult distance_level(int n, const CarpetPoint& p, const CarpetPoint& q) {
  check_level(n);
  validate_point(p, n, Ambient::S2);
  validate_point(q, n, Ambient::S2);
  return level_path(n, p, q);
}

PathResult distance_double(int n, const CarpetPoint& p, const CarpetPoint& q) {
  check_level(n);
  validate_point(p, n, Ambient::DS2);
  validate_point(q, n, Ambient::DS2);

  if (!p.copy || !q.copy || *p.copy == *q.copy) {
    // One copy suffices: a detour through the other copy can be reflected back.
    const std::optional<Copy> copy = p.copy ? p.copy : q.copy;
    CarpetPoint ps = p;
    CarpetPoint qs = q;
    ps.copy.reset();
    qs.copy.reset();
    PathResult r = level_path(n, ps, qs);
    for (CarpetPoint& v : r.path.vertices) {
      if (!v.on_outer_square()) v.copy = copy;
    }
    return r;
  }

  const bool swapped = point_key(q) < point_key(p);
  const CarpetPoint& a = swapped ? q : p;
  const CarpetPoint& b = swapped ? p : q;

  auto to_domain = [](const Domain& dom, Fold f, const CarpetPoint& c) {
    if (*c.copy == Copy::front) return dom.make_point(c.x, c.y, c.side);
    return dom.make_point(reflect_x(f, c.x), reflect_y(f, c.y), reflect_side(f, c.side));
  };

  struct Candidate {
    RawPath raw;
    Fold fold;
  };
  std::optional<Candidate> best;
  for (const Fold f : kFolds) {
    const auto dom = unfolded_domain(n, f);
    const Field field = make_field(dom, to_domain(*dom, f, b));
    RawPath raw = query_path(field, to_domain(*dom, f, a));
    if (!best || raw.length < best->raw.length - kTieTolerance ||
        (raw.length <= best->raw.length + kTieTolerance && raw.vertices.size() < best->raw.vertices.size())) {
      const double shortest = best ? std::min(best->raw.length, raw.length) : raw.length;
      best = Candidate{std::move(raw), f};
      best->raw.length = shortest;
    } else {
      best->raw.length = std::min(best->raw.length, raw.length);
    }
  }

  const Fold f = best->fold;
  auto label = [f](const VPoint& v) {
    const int h = half_of(f, v.x, v.y);
    if (h >= 0) {
      CarpetPoint c{v.cx, v.cy, v.side, Copy::front};
      if (h == 0 || c.on_outer_square()) c.copy.reset();
      return c;
    }
    CarpetPoint c{reflect_x(f, v.cx), reflect_y(f, v.cy), reflect_side(f, v.side), Copy::back};
    if (c.on_outer_square()) c.copy.reset();
    return c;
  };
  auto crossing = [f](const VPoint& u, const VPoint& w) {
    CarpetPoint c;
    if (f == Fold::bottom || f == Fold::top) {
      const double line = f == Fold::bottom ? 0.0 : 1.0;
      const double t = (u.y - line) / (u.y - w.y);
      c.x = Coord::real(u.x + t * (w.x - u.x));
      c.y = Coord(Dyadic(f == Fold::bottom ? 0 : 1));
    } else {
      const double line = f == Fold::left ? 0.0 : 1.0;
      const double t = (u.x - line) / (u.x - w.x);
      c.x = Coord(Dyadic(f == Fold::left ? 0 : 1));
      c.y = Coord::real(u.y + t * (w.y - u.y));
    }
    return c;
  };

  const auto& rv = best->raw.vertices;
  if (rv.empty()) throw std::logic_error("no path found; the double is connected");
  std::vector<CarpetPoint> verts;
  for (std::size_t k = 0; k < rv.size(); ++k) {
    if (k > 0 && half_of(f, rv[k - 1].x, rv[k - 1].y) * half_of(f, rv[k].x, rv[k].y) < 0) {
      verts.push_back(crossing(rv[k - 1], rv[k]));
    }
    verts.push_back(k == 0 ? a : (k + 1 == rv.size() ? b : label(rv[k])));
  }
  if (swapped) std::reverse(verts.begin(), verts.end());
  return finish(best->raw.length, std::move(verts));
}

LimitReport distance_limit(const CarpetPoint& p, const CarpetPoint& q, int n_max) {
  check_level(n_max);
  validate_point(p, n_max, Ambient::S2);
  validate_point(q, n_max, Ambient::S2);
  LimitReport r;
  for (int n = 0; n <= n_max; ++n) {
    const double d = level_path(n, project(p, n_max, n), project(q, n_max, n)).length;
    if (!r.sequence.empty() && d < r.sequence.back().second - kTieTolerance) r.nondecreasing = false;
    r.sequence.emplace_back(n, d);
  }
  if (r.sequence.size() >= 2) r.final_gap = r.sequence.back().second - r.sequence[r.sequence.size() - 2].second;
  return r;
}

// ------------------------------------------------------------- DistanceField

struct DistanceField::Impl {
  int level;
  CarpetPoint source;
  Field field;
};

DistanceField::DistanceField(int n, const CarpetPoint& source) {
  check_level(n);
  validate_point(source, n, Ambient::S2);
  const auto dom = plain_domain(n);
  impl_ = std::make_unique<Impl>(Impl{n, source, make_field(dom, dom->make_point(source.x, source.y, source.side))});
}

DistanceField::~DistanceField() = default;
DistanceField::DistanceField(DistanceField&&) noexcept = default;
DistanceField& DistanceField::operator=(DistanceField&&) noexcept = default;

int DistanceField::level() const { return impl_->level; }
const CarpetPoint& DistanceField::source() const { return impl_->source; }

double DistanceField::distance_to(const CarpetPoint& q) const {
  validate_point(q, impl_->level, Ambient::S2);
  return query_distance(impl_->field, impl_->field.dom->make_point(q.x, q.y, q.side));
}

PathResult DistanceField::path_from(const CarpetPoint& q) const {
  validate_point(q, impl_->level, Ambient::S2);
  const RawPath raw = query_path(impl_->field, impl_->field.dom->make_point(q.x, q.y, q.side));
  if (raw.vertices.empty()) throw std::logic_error("no path found; the slit square is connected");
  std::vector<CarpetPoint> verts;
  for (const VPoint& v : raw.vertices) verts.push_back(plain_label(v));
  verts.front() = q;
  verts.back() = impl_->source;
  return finish(raw.length, std::move(verts));
}

double DistanceField::distance_to_slit(const Slit& s) const {
  const Field& f = impl_->field;
  const Domain& dom = *f.dom;
  const auto [col, iv] = dom.slit_index(s);
  const Column& c = dom.column(col);
  const Coord x(s.x());
  const double lo = c.lo[iv];
  const double hi = c.hi[iv];
  double best = std::numeric_limits<double>::infinity();
  // A geodesic to a segment ends at a tip or perpendicularly at the foot of
  // its last bend.
  auto try_from = [&](const VPoint& v, double base) {
    if (!std::isfinite(base)) return;
    for (const Side side : {Side::left, Side::right}) {
      VPoint foot;
      if (v.y <= lo) {
        foot = dom.make_point(x, Coord(s.y_lo()), std::nullopt);
      } else if (v.y >= hi) {
        foot = dom.make_point(x, Coord(s.y_hi()), std::nullopt);
      } else {
        foot = dom.make_point(x, v.cy, side);
      }
      const double d = base + euclid(v, foot);
      if (d < best && dom.visible(v, foot)) best = d;
    }
  };
  try_from(f.src, 0.0);
  for (std::size_t t = 0; t < dom.tips().size(); ++t) try_from(dom.tips()[t], f.dist[t]);
  return best;
}

// ------------------------------------------------------------- misc

bool is_vertical(const Polyline& path) {
  for (const CarpetPoint& v : path.vertices) {
    if (!(v.x == path.vertices.front().x)) return false;
  }
  return true;
}

void write_path(std::ostream& out, const Polyline& path) {
  for (const CarpetPoint& v : path.vertices) out << v.to_string() << '\n';
}

// ------------------------------------------------------------- grid oracle

GridField grid_distances(std::shared_ptr<const CutGrid> grid, std::span<const GridSeed> seeds, double radius) {
  const CutGrid& G = *grid;
  const std::size_t N = G.node_count();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> g(N, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(N, kNone);
  std::vector<char> settled(N, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const GridSeed& s : seeds) {
    if (s.distance < g[s.node]) {
      g[s.node] = s.distance;
      parent[s.node] = s.node;
      pq.emplace(s.distance, s.node);
    }
  }
  const double h = G.step();
  auto dist = [&](std::size_t a, std::size_t b) {
    return h * std::hypot(static_cast<double>(G.node(a).i - G.node(b).i),
                          static_cast<double>(G.node(a).j - G.node(b).j));
  };
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (settled[u] || d > g[u]) continue;
    if (d >= radius) break;
    settled[u] = 1;
    const std::size_t pu = parent[u];
    G.for_each_neighbor8(u, [&](std::size_t v) {
      if (settled[v]) return;
      double cand;
      std::size_t par;
      if (pu != u && G.line_of_sight(pu, v)) {
        cand = g[pu] + dist(pu, v);
        par = pu;
      } else {
        cand = g[u] + dist(u, v);
        par = u;
      }
      if (cand < g[v]) {
        g[v] = cand;
        parent[v] = par;
        pq.emplace(cand, v);
      }
    });
  }
  for (std::size_t k = 0; k < N; ++k) {
    if (!settled[k]) g[k] = std::numeric_limits<double>::infinity();
  }
  return GridField{std::move(grid), std::move(g)};
}

GridField ball_distances(int n, const CarpetPoint& p, double radius, int exponent, Ambient ambient) {
  validate_point(p, n, ambient);
  auto grid = std::make_shared<const CutGrid>(n, exponent, ambient);
  const auto node = grid->find(p);
  if (!node) {
    throw std::invalid_argument(fmt::format("source {} is not a node of the 2^-{} grid", p.to_string(), exponent));
  }
  const GridSeed seed{*node, 0.0};
  return grid_distances(std::move(grid), std::span(&seed, 1), radius);
}

}  // namespace slitcarpet::geodesics
