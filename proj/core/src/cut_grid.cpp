#include "slitcarpet/cut_grid.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include <fmt/format.h>

namespace slitcarpet {

namespace {

constexpr int kMaxGridExponent = 12;

// Slit geometry of a column, in grid units: slits occupy (lo, hi) with
// lo = (4j+1)*unit, hi = (4j+3)*unit for j < count.
struct ColumnSlits {
  std::int64_t unit;
  std::int64_t count;
};

}  // namespace

CutGrid::CutGrid(int level, int exponent, Ambient ambient)
    : level_(level), exponent_(exponent), ambient_(ambient) {
  if (level < 0) throw std::invalid_argument("CutGrid: negative level");
  if (exponent <= level) {
    throw std::invalid_argument(
        fmt::format("grid exponent {} must exceed the level {} so slit tips lie on grid rows", exponent, level));
  }
  if (exponent > kMaxGridExponent) {
    throw std::invalid_argument(fmt::format("grid exponent {} too large (max {})", exponent, kMaxGridExponent));
  }
  cells_ = std::int32_t{1} << exponent;
  step_ = 1.0 / cells_;
  column_stride_ = std::int32_t{1} << (exponent - level);

  const int sheets = ambient == Ambient::DS2 ? 2 : 1;
  const std::size_t side = static_cast<std::size_t>(cells_) + 1;
  first_.assign(sheets * side * side, 0);
  for (int sheet = 0; sheet < sheets; ++sheet) {
    for (std::int32_t i = 0; i <= cells_; ++i) {
      for (std::int32_t j = 0; j <= cells_; ++j) {
        if (sheet == 1 && is_seam(i, j)) {
          first_[base_index(1, i, j)] = first_[base_index(0, i, j)];
          continue;
        }
        first_[base_index(sheet, i, j)] = static_cast<std::uint32_t>(nodes_.size());
        std::optional<Copy> copy;
        if (ambient == Ambient::DS2 && !is_seam(i, j)) copy = sheet == 0 ? Copy::front : Copy::back;
        if (is_split(i, j)) {
          nodes_.push_back({i, j, Side::left, copy});
          nodes_.push_back({i, j, Side::right, copy});
        } else {
          nodes_.push_back({i, j, std::nullopt, copy});
        }
      }
    }
  }
  build_edges();
}

bool CutGrid::is_slit_column(std::int32_t i) const {
  return i > 0 && i < cells_ && i % column_stride_ == 0;
}

bool CutGrid::is_split(std::int32_t i, std::int32_t j) const {
  if (!is_slit_column(i)) return false;
  const std::int64_t unit = std::int64_t{1} << (std::countr_zero(static_cast<std::uint32_t>(i)) - 1);
  const std::int64_t m = j % (4 * unit);
  return unit < m && m < 3 * unit;
}

int CutGrid::sheet_of(std::size_t id) const { return nodes_[id].copy == Copy::back ? 1 : 0; }

CarpetPoint CutGrid::point(std::size_t id) const {
  const GridNode& n = nodes_[id];
  const auto e = static_cast<std::uint32_t>(exponent_);
  return CarpetPoint{Coord(Dyadic(n.i, e)), Coord(Dyadic(n.j, e)), n.side, n.copy};
}

std::optional<std::size_t> CutGrid::find(std::int32_t i, std::int32_t j, std::optional<Side> side,
                                         std::optional<Copy> copy) const {
  if (i < 0 || j < 0 || i > cells_ || j > cells_) return std::nullopt;
  if (is_split(i, j) != side.has_value()) return std::nullopt;
  int sheet = 0;
  if (ambient_ == Ambient::S2) {
    if (copy) return std::nullopt;
  } else if (is_seam(i, j)) {
    if (copy) return std::nullopt;
  } else {
    if (!copy) return std::nullopt;
    sheet = *copy == Copy::back ? 1 : 0;
  }
  const std::size_t first = first_[base_index(sheet, i, j)];
  return first + (side == Side::right ? 1 : 0);
}

std::optional<std::size_t> CutGrid::find(const CarpetPoint& p) const {
  const auto ex = p.x.dyadic_exponent();
  const auto ey = p.y.dyadic_exponent();
  if (!ex || !ey || static_cast<int>(*ex) > exponent_ || static_cast<int>(*ey) > exponent_) return std::nullopt;
  const Dyadic xi = p.x.exact()->scaled(exponent_);
  const Dyadic yj = p.y.exact()->scaled(exponent_);
  if (xi.numerator() < 0 || yj.numerator() < 0 || xi.numerator() > cells_ || yj.numerator() > cells_) {
    return std::nullopt;
  }
  return find(static_cast<std::int32_t>(xi.numerator()), static_cast<std::int32_t>(yj.numerator()), p.side,
              p.copy);
}

void CutGrid::build_edges() {
  const int sheets = ambient_ == Ambient::DS2 ? 2 : 1;
  std::vector<Edge> raw;
  raw.reserve(nodes_.size() * 2 + 16);
  auto add = [&](std::size_t a, std::size_t b, double w) {
    if (a > b) std::swap(a, b);
    raw.push_back({a, b, w});
  };
  for (int sheet = 0; sheet < sheets; ++sheet) {
    for (std::int32_t i = 0; i <= cells_; ++i) {
      for (std::int32_t j = 0; j <= cells_; ++j) {
        const std::size_t here = first_[base_index(sheet, i, j)];
        const bool split_here = is_split(i, j);
        if (i < cells_) {
          const double w = (j == 0 || j == cells_) ? 0.5 : 1.0;
          const std::size_t right_of_here = here + (split_here ? 1 : 0);
          const std::size_t east = first_[base_index(sheet, i + 1, j)];  // left copy if split
          add(right_of_here, east, w);
        }
        if (j < cells_) {
          const double w = (i == 0 || i == cells_) ? 0.5 : 1.0;
          const std::size_t north = first_[base_index(sheet, i, j + 1)];
          const bool split_north = is_split(i, j + 1);
          if (split_here || split_north) {
            for (int s = 0; s < 2; ++s) {
              add(here + (split_here ? s : 0), north + (split_north ? s : 0), 0.5 * w);
            }
          } else {
            add(here, north, w);
          }
        }
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Edge& x, const Edge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  edges_.clear();
  for (const Edge& e : raw) {
    if (!edges_.empty() && edges_.back().a == e.a && edges_.back().b == e.b) {
      edges_.back().weight += e.weight;  // seam edge seen from both copies
    } else {
      edges_.push_back(e);
    }
  }
}

bool CutGrid::line_of_sight(std::size_t ia, std::size_t ib) const {
  const GridNode* a = &nodes_[ia];
  const GridNode* b = &nodes_[ib];
  if (ambient_ == Ambient::DS2 && a->copy && b->copy && *a->copy != *b->copy) return false;
  if (a->i > b->i) std::swap(a, b);
  // a is now to the left of (or level with) b
  if (a->i < b->i) {
    if (a->side == Side::left || b->side == Side::right) return false;
  }
  if (a->i == b->i) {
    if (a->side && b->side && *a->side != *b->side) {
      // opposite sides of one slit cannot see each other; of distinct slits they can, via the gap
      const std::int64_t unit = std::int64_t{1} << (std::countr_zero(static_cast<std::uint32_t>(a->i)) - 1);
      if (a->j / (4 * unit) == b->j / (4 * unit)) return false;
    }
    return true;
  }
  const std::int64_t d = b->i - a->i;
  const std::int64_t dj = b->j - a->j;
  std::int64_t c = (a->i / column_stride_ + 1) * static_cast<std::int64_t>(column_stride_);
  for (; c < b->i; c += column_stride_) {
    if (c <= 0 || c >= cells_) continue;
    // y(c) * d in grid units
    const std::int64_t num = a->j * d + dj * (c - a->i);
    const std::int64_t unit = std::int64_t{1} << (std::countr_zero(static_cast<std::uint64_t>(c)) - 1);
    const std::int64_t period = 4 * unit * d;
    const std::int64_t rem = num % period;
    if (unit * d < rem && rem < 3 * unit * d) return false;
  }
  return true;
}

double GridField::at(std::int32_t i, std::int32_t j, std::optional<Side> side, std::optional<Copy> copy) const {
  const auto id = grid->find(i, j, side, copy);
  if (!id) throw std::out_of_range(fmt::format("GridField::at: no node ({}, {}) with these tags", i, j));
  return values[*id];
}

}  // namespace slitcarpet
