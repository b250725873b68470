#include "slitcarpet/render.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace slitcarpet::render {

double default_width(int generation) { return std::ldexp(1.0, -6 - 2 * generation); }

double RenderSpec::width(int generation) const {
  if (generation >= 1 && static_cast<std::size_t>(generation) <= widths.size()) return widths[generation - 1];
  return default_width(generation);
}

void validate(const RenderSpec& spec) {
  if (spec.level < 0 || spec.level > 12) {
    throw std::invalid_argument(fmt::format("render level {} outside [0, 12]", spec.level));
  }
  if (!(spec.scale > 0.0) || !(spec.stroke > 0.0)) throw std::invalid_argument("scale and stroke must be positive");
  const double reach = std::ldexp(1.0, -(spec.level + 1));
  double previous = INFINITY;
  for (int k = 1; k <= spec.level; ++k) {
    const double w = spec.width(k);
    if (!(w > 0.0)) throw std::invalid_argument(fmt::format("lens width of generation {} must be positive", k));
    if (!(w < previous)) throw std::invalid_argument("lens widths must strictly decrease with the generation");
    if (!(w < reach)) {
      throw std::invalid_argument(fmt::format("lens width {} of generation {} overlaps its neighbours (needs < {})", w,
                                              k, reach));
    }
    previous = w;
  }
}

namespace {

struct LensHit {
  double column = 0.0;      // slit abscissa
  double half_width = 0.0;  // lens half-width at this height
};

// The slit of generation <= level in the column nearest to x that spans y.
std::optional<LensHit> lens_at(const RenderSpec& spec, double x, double y) {
  if (spec.level == 0) return std::nullopt;
  const double cols = std::ldexp(1.0, spec.level);
  const auto m = static_cast<std::int64_t>(std::llround(x * cols));
  if (m <= 0 || m >= static_cast<std::int64_t>(cols)) return std::nullopt;
  const int k = spec.level - std::countr_zero(static_cast<std::uint64_t>(m));
  const double t = std::ldexp(y, k + 1);
  const double j = std::floor((t - 1.0) / 4.0);
  const double lo = 4.0 * j + 1.0;
  if (t < lo || t > lo + 2.0) return std::nullopt;
  // distance to the nearer tip, relative to half the slit length
  const double profile = std::min(t - lo, lo + 2.0 - t);
  return LensHit{std::ldexp(static_cast<double>(m), -spec.level), 0.5 * spec.width(k) * profile};
}

}  // namespace

Point2 lens_map(const RenderSpec& spec, const CarpetPoint& p) {
  const double x = p.x.value();
  const double y = p.y.value();
  const auto hit = lens_at(spec, x, y);
  if (!hit) return {x, y};
  const double reach = std::ldexp(1.0, -(spec.level + 1));
  const double d = x - hit->column;
  double direction = 0.0;
  if (d > 0.0 || (d == 0.0 && p.side == Side::right)) direction = 1.0;
  if (d < 0.0 || (d == 0.0 && p.side == Side::left)) direction = -1.0;
  return {x + direction * hit->half_width * (1.0 - std::abs(d) / reach), y};
}

InjectivityReport check_injective(const RenderSpec& spec, int samples_per_side) {
  validate(spec);
  if (samples_per_side < 1 || samples_per_side > (1 << 14)) {
    throw std::invalid_argument("samples_per_side out of range");
  }
  InjectivityReport report;
  const auto e = static_cast<std::uint32_t>(std::bit_width(static_cast<unsigned>(samples_per_side)) - 1);
  const bool dyadic = (1 << e) == samples_per_side;
  auto coord = [&](int i) {
    return dyadic ? Coord(Dyadic(i, e)) : Coord::real(static_cast<double>(i) / samples_per_side);
  };
  for (int j = 0; j <= samples_per_side; ++j) {
    const Coord y = coord(j);
    double last = -INFINITY;
    for (int i = 0; i <= samples_per_side; ++i) {
      const Coord x = coord(i);
      std::vector<std::optional<Side>> sides{std::nullopt};
      if (x.is_exact() && y.is_exact() && locate(x, y, spec.level).needs_side()) sides = {Side::left, Side::right};
      for (const auto& side : sides) {
        const Point2 image = lens_map(spec, {x, y, side, std::nullopt});
        ++report.samples;
        if (image.y != y.value() || !(image.x > last)) {
          report.failure = fmt::format("row {} collapses at column {}", j, i);
          return report;
        }
        last = image.x;
      }
    }
  }
  report.injective = true;
  return report;
}

ExpansionReport lens_expansion(const RenderSpec& spec, int exponent) {
  validate(spec);
  const CutGrid grid(spec.level, exponent);
  ExpansionReport r;
  r.min_ratio = INFINITY;
  for (const auto& edge : grid.edges()) {
    const Point2 a = lens_map(spec, grid.point(edge.a));
    const Point2 b = lens_map(spec, grid.point(edge.b));
    const double before = std::hypot(grid.x(edge.a) - grid.x(edge.b), grid.y(edge.a) - grid.y(edge.b));
    if (before == 0.0) continue;
    const double ratio = std::hypot(a.x - b.x, a.y - b.y) / before;
    r.max_ratio = std::max(r.max_ratio, ratio);
    r.min_ratio = std::min(r.min_ratio, ratio);
    ++r.pairs;
  }
  return r;
}

namespace {

class SvgWriter {
 public:
  explicit SvgWriter(const RenderSpec& spec) : spec_(spec) {
    const double size = spec.scale;
    const double pad = 4.0 * spec.stroke;
    out_ = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.2f}\" height=\"{0:.2f}\" "
        "viewBox=\"{1:.2f} {1:.2f} {0:.2f} {0:.2f}\">\n",
        size + 2 * pad, -pad);
  }

  std::string point(const Point2& p) const {
    return fmt::format("{:.4f},{:.4f}", p.x * spec_.scale, (1.0 - p.y) * spec_.scale);
  }

  void polygon(const std::vector<Point2>& pts, const char* fill, const char* stroke) {
    out_ += fmt::format("<polygon fill=\"{}\" stroke=\"{}\" stroke-width=\"{:.3f}\" points=\"", fill, stroke,
                        spec_.stroke);
    append_points(pts);
    out_ += "\"/>\n";
  }

  void polyline(const std::vector<Point2>& pts, const char* stroke, double width) {
    out_ += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{:.3f}\" points=\"", stroke, width);
    append_points(pts);
    out_ += "\"/>\n";
  }

  void line(const Point2& a, const Point2& b, const char* stroke, double width) {
    const std::string pa = point(a);
    const std::string pb = point(b);
    out_ += fmt::format("<path fill=\"none\" stroke=\"{}\" stroke-width=\"{:.3f}\" d=\"M{}L{}\"/>\n", stroke, width,
                        pa, pb);
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  void append_points(const std::vector<Point2>& pts) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k) out_ += ' ';
      out_ += point(pts[k]);
    }
  }

  const RenderSpec& spec_;
  std::string out_;
};

// Side tag for an interpolated point of a path segment lying inside a slit.
std::optional<Side> side_between(const CarpetPoint& a, const CarpetPoint& b, const Coord& x, const Coord& y,
                                 int level) {
  if (!x.is_exact() || !y.is_exact() || !locate(x, y, level).needs_side()) return std::nullopt;
  if (a.side) return a.side;
  if (b.side) return b.side;
  const CarpetPoint& off = a.x == x ? b : a;
  return off.x < x ? Side::left : Side::right;
}

std::vector<Point2> trace(const RenderSpec& spec, const geodesics::Polyline& path) {
  constexpr int kSteps = 32;  // subdivisions per segment: 2^5
  std::vector<Point2> pts;
  for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
    const CarpetPoint& a = path.vertices[k];
    const CarpetPoint& b = path.vertices[k + 1];
    for (int s = 0; s < kSteps; ++s) {
      if (s == 0) {
        pts.push_back(lens_map(spec, a));
        continue;
      }
      const Coord t(Dyadic(s, 5));
      auto mix = [&](const Coord& u, const Coord& v) {
        if (u.is_exact() && v.is_exact()) return Coord(*u.exact() + (*v.exact() - *u.exact()) * *t.exact());
        return Coord::real(u.value() + (v.value() - u.value()) * t.value());
      };
      const Coord x = mix(a.x, b.x);
      const Coord y = mix(a.y, b.y);
      pts.push_back(lens_map(spec, {x, y, side_between(a, b, x, y, spec.level), std::nullopt}));
    }
  }
  if (!path.vertices.empty()) pts.push_back(lens_map(spec, path.vertices.back()));
  return pts;
}

// Marching squares over the cells of a square grid field. Corners on a slit
// column take the side facing into the cell.
void contours(SvgWriter& svg, const RenderSpec& spec, const GridField& field, const std::vector<double>& levels) {
  const CutGrid& grid = *field.grid;
  if (grid.ambient() != Ambient::S2) throw std::invalid_argument("level sets are drawn on the square only");
  if (grid.level() != spec.level) throw std::invalid_argument("field level differs from the render level");
  const std::int32_t n = grid.cells();
  const double h = grid.step();
  auto value = [&](std::int32_t i, std::int32_t j, Side facing) {
    return field.at(i, j, grid.is_split(i, j) ? std::optional(facing) : std::nullopt);
  };
  auto corner_point = [&](double x, double y, Side facing, bool on_column) {
    CarpetPoint p{Coord::real(x), Coord::real(y), std::nullopt, std::nullopt};
    if (on_column) p.side = facing;
    return lens_map(spec, p);
  };
  for (double level : levels) {
    for (std::int32_t i = 0; i < n; ++i) {
      for (std::int32_t j = 0; j < n; ++j) {
        // corners counterclockwise from (i, j); left corners face right
        const double v[4] = {value(i, j, Side::right), value(i + 1, j, Side::left), value(i + 1, j + 1, Side::left),
                             value(i, j + 1, Side::right)};
        const double cx[4] = {i * h, (i + 1) * h, (i + 1) * h, i * h};
        const double cy[4] = {j * h, j * h, (j + 1) * h, (j + 1) * h};
        std::vector<Point2> crossings;
        for (int e = 0; e < 4; ++e) {
          const int f = (e + 1) % 4;
          if ((v[e] < level) == (v[f] < level)) continue;
          const double t = (level - v[e]) / (v[f] - v[e]);
          const double x = cx[e] + t * (cx[f] - cx[e]);
          const double y = cy[e] + t * (cy[f] - cy[e]);
          // vertical edges on the left (e = 3) and right (e = 1) of the cell
          const bool on_left = e == 3 && grid.is_slit_column(i);
          const bool on_right = e == 1 && grid.is_slit_column(i + 1);
          crossings.push_back(corner_point(x, y, on_left ? Side::right : Side::left, on_left || on_right));
        }
        for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
          svg.line(crossings[c], crossings[c + 1], "#1f77b4", 0.75 * spec.stroke);
        }
      }
    }
  }
}

}  // namespace

std::string render_svg(const RenderSpec& spec, const Overlay& overlay) {
  validate(spec);
  SvgWriter svg(spec);
  svg.polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, "#f4f1e8", "#222222");
  for (const Slit& s : SlitSchedule::up_to(spec.level).slits()) {
    const Coord x(s.x());
    const Coord mid((s.y_lo() + s.y_hi()).scaled(-1));
    svg.polygon({lens_map(spec, {x, Coord(s.y_lo()), std::nullopt, std::nullopt}),
                 lens_map(spec, {x, mid, Side::right, std::nullopt}),
                 lens_map(spec, {x, Coord(s.y_hi()), std::nullopt, std::nullopt}),
                 lens_map(spec, {x, mid, Side::left, std::nullopt})},
                "#ffffff", "#222222");
  }
  if (overlay.field) contours(svg, spec, *overlay.field, overlay.levels);
  for (const auto& path : overlay.paths) svg.polyline(trace(spec, path), "#d62728", 1.5 * spec.stroke);
  return svg.finish();
}

}  // namespace slitcarpet::render
