#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "slitcarpet/carpet.hpp"

namespace slitcarpet {

/// Node of a cut grid. Nodes strictly inside a slit exist twice (left and
/// right); on the double, nodes on the outer square are shared by both copies
/// and carry no copy tag.
struct GridNode {
  std::int32_t i = 0;
  std::int32_t j = 0;
  std::optional<Side> side;
  std::optional<Copy> copy;
};

/// Square grid of step 2^-exponent over the level-`level` slit square
/// (or its double), with slit columns duplicated and no edge crossing a slit.
///
/// Conductance edges follow the 5-point stencil with dual-cell weights:
/// 1 in the interior, 1/2 along the outer square and on each side of a slit.
/// With these weights the linear potentials x and y have energy exactly 1.
class CutGrid {
 public:
  struct Edge {
    std::size_t a;
    std::size_t b;
    double weight;
  };

  CutGrid(int level, int exponent, Ambient ambient = Ambient::S2);

  int level() const { return level_; }
  int exponent() const { return exponent_; }
  Ambient ambient() const { return ambient_; }
  std::int32_t cells() const { return cells_; }
  double step() const { return step_; }

  std::size_t node_count() const { return nodes_.size(); }
  const GridNode& node(std::size_t id) const { return nodes_[id]; }
  CarpetPoint point(std::size_t id) const;
  double x(std::size_t id) const { return nodes_[id].i * step_; }
  double y(std::size_t id) const { return nodes_[id].j * step_; }

  /// Strictly inside a slit column interval of this level.
  bool is_split(std::int32_t i, std::int32_t j) const;
  bool is_seam(std::int32_t i, std::int32_t j) const {
    return i == 0 || j == 0 || i == cells_ || j == cells_;
  }
  bool is_slit_column(std::int32_t i) const;

  /// Id of a node; side is required on split nodes, copy on off-seam nodes
  /// of the double. Returns nullopt on a tag mismatch or out-of-range index.
  std::optional<std::size_t> find(std::int32_t i, std::int32_t j, std::optional<Side> side = std::nullopt,
                                  std::optional<Copy> copy = std::nullopt) const;
  /// Node for a carpet point lying on the grid.
  std::optional<std::size_t> find(const CarpetPoint& p) const;

  /// 4-neighbour conductance edges, duplicates merged.
  const std::vector<Edge>& edges() const { return edges_; }

  /// Calls f(neighbour_id) for each 8-neighbour reachable without crossing a slit.
  template <class F>
  void for_each_neighbor8(std::size_t id, F&& f) const;

  /// True when the straight segment a-b stays in one sheet and crosses no
  /// open slit interior transversally; tagged endpoints must depart into
  /// their own half-plane.
  bool line_of_sight(std::size_t a, std::size_t b) const;

 private:
  std::size_t base_index(int sheet, std::int32_t i, std::int32_t j) const {
    return (static_cast<std::size_t>(sheet) * (cells_ + 1) + i) * (cells_ + 1) + j;
  }
  int sheet_of(std::size_t id) const;
  void build_edges();

  int level_;
  int exponent_;
  Ambient ambient_;
  std::int32_t cells_;
  double step_;
  std::int32_t column_stride_;  // slit columns are the multiples of this
  std::vector<GridNode> nodes_;
  std::vector<std::uint32_t> first_;  // base (sheet, i, j) -> first node id
  std::vector<Edge> edges_;
};

/// Scalar values on the nodes of a cut grid.
struct GridField {
  std::shared_ptr<const CutGrid> grid;
  std::vector<double> values;

  double at(std::int32_t i, std::int32_t j, std::optional<Side> side = std::nullopt,
            std::optional<Copy> copy = std::nullopt) const;
};

template <class F>
void CutGrid::for_each_neighbor8(std::size_t id, F&& f) const {
  const GridNode& n = nodes_[id];
  const bool seam = is_seam(n.i, n.j);
  const int sheets = (ambient_ == Ambient::DS2 && seam) ? 2 : 1;
  const int own_sheet = sheet_of(id);
  for (int s = 0; s < sheets; ++s) {
    const int sheet = sheets == 2 ? s : own_sheet;
    for (int di = -1; di <= 1; ++di) {
      if (n.side == Side::left && di > 0) continue;
      if (n.side == Side::right && di < 0) continue;
      const std::int32_t ti = n.i + di;
      if (ti < 0 || ti > cells_) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const std::int32_t tj = n.j + dj;
        if (tj < 0 || tj > cells_) continue;
        const std::uint32_t first = first_[base_index(is_seam(ti, tj) ? 0 : sheet, ti, tj)];
        if (!is_split(ti, tj)) {
          f(static_cast<std::size_t>(first));
        } else if (di == 1) {
          f(static_cast<std::size_t>(first));  // left copy faces us
        } else if (di == -1) {
          f(static_cast<std::size_t>(first) + 1);
        } else if (n.side) {
          f(static_cast<std::size_t>(first) + (*n.side == Side::left ? 0 : 1));
        } else {
          f(static_cast<std::size_t>(first));
          f(static_cast<std::size_t>(first) + 1);
        }
      }
    }
  }
}

}  // namespace slitcarpet
