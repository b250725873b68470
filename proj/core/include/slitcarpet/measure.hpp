#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slitcarpet/carpet.hpp"

namespace slitcarpet::measure {

// Constants frozen from scans at levels 0..4 (see the tests); the regularity
// statements only assert that such constants exist.
inline constexpr double kAhlforsConstant = 4.0;
inline constexpr double kPorosityConstant = 8.0;
inline constexpr int kCoveringConstant = 6;
inline constexpr double kComparabilityConstant = 2.0;
inline constexpr double kInclusionFactor = 1.0 / 12.0;
/// Upper bound for the diameter of the carpet used to choose witness scales.
inline constexpr double kDiameterBound = 3.0;

/// Area with multiplicity of the open ball B(p, r) in the level-n square (or
/// its double): the number of grid cells of step 2^-g whose centre lies at
/// grid distance < r from p, times 4^-g. p must be a node of that grid.
double ball_mass(int n, const CarpetPoint& p, double r, int g, Ambient ambient = Ambient::S2);

struct BallSample {
  CarpetPoint p;
  double r = 0.0;
  double mass = 0.0;
};

struct RegularityReport {
  std::vector<BallSample> samples;
  double c_upper = 0.0;  // max mass / r^2
  double c_lower = 0.0;  // max r^2 / mass
  int level = 0;
  double grid_step = 0.0;

  /// Tightest C with r^2 / C <= mass <= C r^2 over all samples.
  double constant() const { return c_upper > c_lower ? c_upper : c_lower; }
};

/// Ball masses at random grid nodes (seeded) for every radius in `radii`.
RegularityReport ahlfors_scan(int n, int num_samples, std::span<const double> radii, int g, std::uint64_t seed,
                              Ambient ambient = Ambient::S2);

struct PorositySample {
  CarpetPoint p;
  double r = 0.0;
  std::optional<Slit> witness;  // empty when flagged
  double ratio = 0.0;           // max(r / diam J, diam J / r)
  bool flagged = false;
};

struct PorosityReport {
  std::vector<PorositySample> samples;
  double worst = 0.0;  // largest ratio needed over unflagged samples
  int flagged = 0;
};

/// For each random point p (grid nodes of step 2^-(n+3)) and radius r, the
/// slit J of level <= n meeting B(p, r) that minimises
/// max(r / diam J, diam J / r). Radii below 2^-n, or samples without any
/// slit in the ball, are flagged instead.
PorosityReport porosity_scan(int n, int num_samples, std::span<const double> radii, std::uint64_t seed);

struct InclusionWitness {
  CarpetPoint q;        // point of the unit square
  int scale = 0;        // q is the centre of a dyadic square of side 2^-scale
  double radius = 0.0;  // r / 12
  std::size_t checked = 0;  // grid nodes verified inside B(q, radius)
  bool verified = false;
};

/// Witness for the ball inclusion B(q, r/12) within the projection of B(p, r)
/// to the unit square: q is the centre of the dyadic square of side 2^-m
/// containing p, with 3 <= 2^m r < 6 (m = 0 for r >= 3). Verified at the
/// nodes of the grid of step 2^-g: every node within r/12 of q has a lift at
/// exact level-n distance < r from p (n <= geodesics::kMaxExactLevel).
InclusionWitness incl_check(int n, const CarpetPoint& p, double r, int g);

struct CoveringReport {
  int count = 0;
  double radius = 0.0;  // radius of the covering balls (2r)
  std::vector<CarpetPoint> centres;
  std::size_t covered = 0;  // grid nodes in the preimage
};

/// Greedy cover of the preimage in the level-n square of the Euclidean ball
/// B(p, r) of the unit square by level-n balls of radius 2r centred in the
/// preimage, on the cut grid of step 2^-g.
CoveringReport covering_check(int n, const CarpetPoint& p, double r, int g);

/// Open grid cell [i, i+1] x [j, j+1] (times 2^-g); the copy is required on
/// the double and forbidden on the square.
struct GridCell {
  std::int32_t i = 0;
  std::int32_t j = 0;
  std::optional<Copy> copy;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

struct ComparabilityReport {
  double mass = 0.0;            // area with multiplicity of E
  double projected_mass = 0.0;  // area of the projection of E to the unit square
  double ratio = 0.0;           // mass / projected_mass
};

/// Compares the mass of a union of grid cells of the level-n square (or its
/// double) with the mass of its projection to the unit square.
ComparabilityReport measure_comparability(int n, int g, std::span<const GridCell> region,
                                          Ambient ambient = Ambient::S2);

}  // namespace slitcarpet::measure
