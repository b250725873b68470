#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "slitcarpet/carpet.hpp"
#include "slitcarpet/cut_grid.hpp"

namespace slitcarpet::geodesics {

/// Largest level for which exact metric queries are supported.
inline constexpr int kMaxExactLevel = 6;

struct Polyline {
  std::vector<CarpetPoint> vertices;
  double length = 0.0;
};

struct PathResult {
  double length = 0.0;
  Polyline path;
};

/// Sum of Euclidean lengths of consecutive segments.
double polyline_length(std::span<const CarpetPoint> vertices);

/// True when the straight segment a-b is a path of the level-n square: it
/// crosses no open slit transversally and leaves tagged endpoints on their
/// own side. Touching a tip and running along a slit are allowed.
bool segment_visible(int n, const CarpetPoint& a, const CarpetPoint& b);

/// Shortest-path distance in the completed level-n slit square with one
/// realizing polyline from p to q. Bends occur only at slit tips; among
/// equal-length paths the one with fewer vertices, then the smaller vertex
/// sequence, is returned. Symmetric to the last bit.
PathResult distance_level(int n, const CarpetPoint& p, const CarpetPoint& q);

/// Shortest-path distance in the double of the level-n square. Paths change
/// copies only through the outer square; seam crossings appear as vertices.
PathResult distance_double(int n, const CarpetPoint& p, const CarpetPoint& q);

struct LimitReport {
  std::vector<std::pair<int, double>> sequence;  // (n, d_n) for n = 0..n_max
  double final_gap = 0.0;                        // d_{n_max} - d_{n_max - 1}
  bool nondecreasing = true;
};

/// Level-n distances between the projections of p and q for n = 0..n_max.
/// These are lower bounds for the limit distance; no extrapolation is done.
LimitReport distance_limit(const CarpetPoint& p, const CarpetPoint& q, int n_max);

/// Exact distances from one source point of the level-n square, reusable for
/// many targets.
class DistanceField {
 public:
  DistanceField(int n, const CarpetPoint& source);
  ~DistanceField();
  DistanceField(DistanceField&&) noexcept;
  DistanceField& operator=(DistanceField&&) noexcept;

  int level() const;
  const CarpetPoint& source() const;
  double distance_to(const CarpetPoint& q) const;
  /// Path from q back to the source.
  PathResult path_from(const CarpetPoint& q) const;
  /// Distance to the closed slit s (either side, tips included).
  double distance_to_slit(const Slit& s) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Predicate of vertical curves: all vertices share one x.
bool is_vertical(const Polyline& path);

/// One vertex per line, "x y [L|R] [F|B]".
void write_path(std::ostream& out, const Polyline& path);

/// Seed of a grid distance computation.
struct GridSeed {
  std::size_t node;
  double distance;
};

/// Any-angle Dijkstra on a cut grid: parents are propagated along unobstructed
/// straight segments, so distances follow the Euclidean path metric up to the
/// grid step. Nodes at distance >= radius are left at +infinity.
GridField grid_distances(std::shared_ptr<const CutGrid> grid, std::span<const GridSeed> seeds,
                         double radius = std::numeric_limits<double>::infinity());

/// Grid distance field from p on the cut grid of step 2^-exponent at level n
/// (or on its double). p must be a grid node valid in that ambient.
GridField ball_distances(int n, const CarpetPoint& p, double radius, int exponent,
                         Ambient ambient = Ambient::S2);

}  // namespace slitcarpet::geodesics
