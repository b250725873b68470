#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "slitcarpet/carpet.hpp"
#include "slitcarpet/cut_grid.hpp"
#include "slitcarpet/geodesics.hpp"

namespace slitcarpet::render {

/// Opening width used for generation-k slits when none is given.
double default_width(int generation);

struct RenderSpec {
  int level = 0;
  /// Lens width per generation, widths[k - 1] for generation k. Missing
  /// entries fall back to default_width.
  std::vector<double> widths;
  double scale = 512.0;  // SVG units per unit length
  double stroke = 1.0;

  double width(int generation) const;
};

/// Throws std::invalid_argument for a negative level, non-positive scale or
/// widths, widths that do not strictly decrease with the generation, or
/// lenses too wide to stay inside their own neighbourhood (width must be
/// below 2^-(level+1)).
void validate(const RenderSpec& spec);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Planar embedding of the level-n square: each slit is opened into a lens
/// whose half-width grows linearly from the tips to eta/2 at the midpoint.
/// Points within 2^-(n+1) of the slit column are pushed sideways, the push
/// decaying linearly to zero at that distance; y is unchanged. Side tags
/// pick the lens boundary.
Point2 lens_map(const RenderSpec& spec, const CarpetPoint& p);

struct InjectivityReport {
  bool injective = false;
  std::size_t samples = 0;
  std::string failure;
};

/// Maps the (samples_per_side + 1)^2 grid (both sides of each slit point)
/// and checks that every row of images is strictly increasing in x. Since
/// the map keeps y, this shows the sampled map is injective.
InjectivityReport check_injective(const RenderSpec& spec, int samples_per_side = 512);

struct ExpansionReport {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t pairs = 0;
};

/// |L(a) - L(b)| / |a - b| over the edges of the cut grid of step 2^-exponent.
ExpansionReport lens_expansion(const RenderSpec& spec, int exponent);

struct Overlay {
  std::vector<geodesics::Polyline> paths;
  const GridField* field = nullptr;  // level-set source, square only
  std::vector<double> levels;
};

/// SVG 1.1 document of the opened square with optional overlays.
std::string render_svg(const RenderSpec& spec, const Overlay& overlay = {});

}  // namespace slitcarpet::render
