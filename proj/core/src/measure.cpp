#include "slitcarpet/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "slitcarpet/cut_grid.hpp"
#include "slitcarpet/geodesics.hpp"

namespace slitcarpet::measure {

namespace {

void check_radius(double r) {
  if (!(r > 0.0 && r <= kDiameterBound)) {
    throw std::invalid_argument(fmt::format("radius {} outside (0, {}]", r, kDiameterBound));
  }
}

CarpetPoint random_node(std::mt19937_64& rng, const CutGrid& grid) {
  std::uniform_int_distribution<std::size_t> pick(0, grid.node_count() - 1);
  return grid.point(pick(rng));
}

}  // namespace

double ball_mass(int n, const CarpetPoint& p, double r, int g, Ambient ambient) {
  check_radius(r);
  // cell centres are the odd-odd nodes of the grid one step finer
  const GridField f = geodesics::ball_distances(n, p, r, g + 1, ambient);
  std::size_t cells = 0;
  for (std::size_t id = 0; id < f.values.size(); ++id) {
    const GridNode& node = f.grid->node(id);
    if ((node.i & 1) && (node.j & 1) && f.values[id] < r) ++cells;
  }
  return std::ldexp(static_cast<double>(cells), -2 * g);
}

RegularityReport ahlfors_scan(int n, int num_samples, std::span<const double> radii, int g, std::uint64_t seed,
                              Ambient ambient) {
  if (radii.empty()) throw std::invalid_argument("ahlfors_scan: no radii");
  for (double r : radii) check_radius(r);
  const double r_max = *std::max_element(radii.begin(), radii.end());

  RegularityReport report;
  report.level = n;
  report.grid_step = std::ldexp(1.0, -g);
  const CutGrid grid(n, g, ambient);
  std::mt19937_64 rng(seed);
  for (int s = 0; s < num_samples; ++s) {
    const CarpetPoint p = random_node(rng, grid);
    const GridField f = geodesics::ball_distances(n, p, r_max, g + 1, ambient);
    for (double r : radii) {
      std::size_t cells = 0;
      for (std::size_t id = 0; id < f.values.size(); ++id) {
        const GridNode& node = f.grid->node(id);
        if ((node.i & 1) && (node.j & 1) && f.values[id] < r) ++cells;
      }
      const double mass = std::ldexp(static_cast<double>(cells), -2 * g);
      report.samples.push_back({p, r, mass});
      report.c_upper = std::max(report.c_upper, mass / (r * r));
      report.c_lower = std::max(report.c_lower, mass > 0 ? r * r / mass : INFINITY);
    }
  }
  return report;
}

PorosityReport porosity_scan(int n, int num_samples, std::span<const double> radii, std::uint64_t seed) {
  for (double r : radii) check_radius(r);
  const SlitSchedule schedule = SlitSchedule::up_to(n);
  const CutGrid grid(n, n + 3);
  const double finest = std::ldexp(1.0, -n);
  std::mt19937_64 rng(seed);
  PorosityReport report;
  for (int s = 0; s < num_samples; ++s) {
    const CarpetPoint p = random_node(rng, grid);
    const geodesics::DistanceField field(n, p);
    std::vector<double> to_slit;
    to_slit.reserve(schedule.size());
    for (const Slit& J : schedule.slits()) to_slit.push_back(field.distance_to_slit(J));
    for (double r : radii) {
      PorositySample sample{p, r, std::nullopt, 0.0, true};
      if (r >= finest) {
        double best = INFINITY;
        for (std::size_t k = 0; k < schedule.size(); ++k) {
          if (!(to_slit[k] < r)) continue;
          const double diam = schedule.slits()[k].length().to_double();
          const double ratio = std::max(r / diam, diam / r);
          if (ratio < best) {
            best = ratio;
            sample.witness = schedule.slits()[k];
          }
        }
        if (sample.witness) {
          sample.ratio = best;
          sample.flagged = false;
          report.worst = std::max(report.worst, best);
        }
      }
      if (sample.flagged) ++report.flagged;
      report.samples.push_back(sample);
    }
  }
  return report;
}

InclusionWitness incl_check(int n, const CarpetPoint& p, double r, int g) {
  check_radius(r);
  InclusionWitness w;
  while (std::ldexp(r, w.scale) < kDiameterBound) ++w.scale;
  const std::int64_t cells = std::int64_t{1} << w.scale;
  // a point on the left side of a slit belongs to the square on its left
  auto centre = [&](const Coord& c, bool lean_left) {
    const double t = std::ldexp(c.value(), w.scale);
    auto k = static_cast<std::int64_t>(std::floor(t));
    if (lean_left && static_cast<double>(k) == t) --k;
    k = std::clamp<std::int64_t>(k, 0, cells - 1);
    return Coord(Dyadic(2 * k + 1, static_cast<std::uint32_t>(w.scale + 1)));
  };
  w.q = CarpetPoint{centre(p.x, p.side == Side::left), centre(p.y, false), std::nullopt, std::nullopt};
  w.radius = r * kInclusionFactor;

  // exact distances at the grid nodes of the small ball
  const geodesics::DistanceField field(n, p);
  const double step = std::ldexp(1.0, -g);
  const auto cells_g = std::int64_t{1} << g;
  const double qx = w.q.x.value();
  const double qy = w.q.y.value();
  const auto lo = [&](double c) {
    return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((c - w.radius) / step)));
  };
  const auto hi = [&](double c) {
    return std::min<std::int64_t>(cells_g, static_cast<std::int64_t>(std::ceil((c + w.radius) / step)));
  };
  w.verified = true;
  for (std::int64_t i = lo(qx); i <= hi(qx); ++i) {
    for (std::int64_t j = lo(qy); j <= hi(qy); ++j) {
      if (!(std::hypot(i * step - qx, j * step - qy) < w.radius)) continue;
      const Coord x(Dyadic(i, static_cast<std::uint32_t>(g)));
      const Coord y(Dyadic(j, static_cast<std::uint32_t>(g)));
      ++w.checked;
      bool reached;
      if (locate(x, y, n).needs_side()) {
        reached = field.distance_to({x, y, Side::left, std::nullopt}) < r ||
                  field.distance_to({x, y, Side::right, std::nullopt}) < r;
      } else {
        reached = field.distance_to({x, y, std::nullopt, std::nullopt}) < r;
      }
      if (!reached) w.verified = false;
    }
  }
  return w;
}

CoveringReport covering_check(int n, const CarpetPoint& p, double r, int g) {
  if (!(r > 0.0)) throw std::invalid_argument("covering_check: radius must be positive");
  auto grid = std::make_shared<const CutGrid>(n, g);
  const double px = p.x.value();
  const double py = p.y.value();
  std::vector<std::size_t> preimage;
  for (std::size_t id = 0; id < grid->node_count(); ++id) {
    if (std::hypot(grid->x(id) - px, grid->y(id) - py) < r) preimage.push_back(id);
  }
  CoveringReport report;
  report.radius = 2.0 * r;
  report.covered = preimage.size();
  std::vector<char> covered(grid->node_count(), 0);
  for (std::size_t id : preimage) {
    if (covered[id]) continue;
    ++report.count;
    report.centres.push_back(grid->point(id));
    const geodesics::GridSeed seed{id, 0.0};
    const GridField f = geodesics::grid_distances(grid, std::span(&seed, 1), report.radius);
    for (std::size_t other : preimage) {
      if (f.values[other] < report.radius) covered[other] = 1;
    }
  }
  return report;
}

ComparabilityReport measure_comparability(int n, int g, std::span<const GridCell> region, Ambient ambient) {
  const CutGrid grid(n, g, ambient);  // validates the alignment
  std::set<GridCell> cells;
  std::set<std::pair<std::int32_t, std::int32_t>> projected;
  for (const GridCell& c : region) {
    if (c.i < 0 || c.j < 0 || c.i >= grid.cells() || c.j >= grid.cells()) {
      throw std::invalid_argument(fmt::format("cell ({}, {}) outside the 2^-{} grid", c.i, c.j, g));
    }
    if (c.copy.has_value() != (ambient == Ambient::DS2)) {
      throw std::invalid_argument("cells carry a copy tag exactly on the double");
    }
    cells.insert(c);
    projected.emplace(c.i, c.j);
  }
  ComparabilityReport report;
  report.mass = std::ldexp(static_cast<double>(cells.size()), -2 * g);
  report.projected_mass = std::ldexp(static_cast<double>(projected.size()), -2 * g);
  report.ratio = report.projected_mass > 0 ? report.mass / report.projected_mass : 1.0;
  return report;
}

}  // namespace slitcarpet::measure
