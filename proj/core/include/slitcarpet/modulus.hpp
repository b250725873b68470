#pragma once

#include <iosfwd>

#include "slitcarpet/cut_grid.hpp"

namespace slitcarpet::modulus {

enum class Direction : std::uint8_t { LR, TB };

enum class Boundary : std::uint8_t { insulated, zero, one };

/// Boundary data of the potential on the four sides of the square.
struct BoundarySpec {
  Boundary left = Boundary::insulated;
  Boundary right = Boundary::insulated;
  Boundary bottom = Boundary::insulated;
  Boundary top = Boundary::insulated;

  /// LR: u = 0 on the left, 1 on the right. TB: u = 0 at the bottom, 1 on top.
  static BoundarySpec connecting(Direction d);
};

enum class InitialGuess : std::uint8_t { zero, linear };

struct LaplaceOptions {
  double tolerance = 1e-10;  // relative residual
  long max_iterations = 1'000'000;
  InitialGuess guess = InitialGuess::linear;
};

struct LaplaceSolution {
  GridField potential;
  BoundarySpec boundary;
  double energy = 0.0;    // sum over conductance edges of w * (du)^2
  double flux = 0.0;      // current leaving the u = 1 side
  double residual = 0.0;  // ||b - A u|| / ||b|| over the free nodes
  long iterations = 0;
};

/// Discrete Dirichlet problem on the cut grid of step 2^-g at level n; slits
/// are insulating. Throws std::runtime_error when the iteration cap is hit.
LaplaceSolution laplace_solve(int n, int g, const BoundarySpec& boundary, const LaplaceOptions& options = {});

/// Effective conductance between opposite sides, which equals the discrete
/// modulus of the family of curves joining them.
double conductance(int n, int g, Direction d, double tolerance = 1e-10);

/// Largest absolute residual of the linear potential u = x (LR) or u = y (TB)
/// in the discrete equations at the free nodes. Zero for TB on every level.
double linear_potential_residual(int n, int g, Direction d);

struct NonverticalBound {
  int m = 0;                 // smallest m with 2^m > 2k
  double conductance = 0.0;  // level-n LR conductance
  double bound = 0.0;        // 4^m * conductance
};

/// Upper bound for the modulus of curves whose x-oscillation is at least 1/k
/// at level m + n, from the tiling of the square by 4^m rescaled copies.
NonverticalBound modulus_upper_nonvertical(int k, int n, int g);

enum class FamilyKind : std::uint8_t { connect_lr, connect_tb, oscillation, vertical };

struct CurveFamilySpec {
  FamilyKind kind = FamilyKind::connect_lr;
  int k = 1;  // oscillation families: x-range of length >= 1/k
};

struct DirectModulus {
  double lower = 0.0;     // 1 / energy of the unit path flow
  double upper = 0.0;     // mass of the induced density, made admissible
  double shortest = 0.0;  // rho-length of the shortest family path at exit
  int paths = 0;          // generated paths
  long iterations = 0;    // oracle calls
};

/// Grid modulus of a curve family (edge densities rho with mass
/// sum w_e rho_e^2). Paths are generated one at a time as the currently
/// shortest family path under rho, until every family path has rho-length
/// >= 1 - tol once the generated paths have unit length. lower and upper are
/// both certified; upper / lower <= (1 - tol)^-2.
/// Intended for small grids (about 10^4 nodes).
DirectModulus modulus_direct(const CurveFamilySpec& family, int n, int g, double tol = 1e-3);

struct VerticalBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds for the modulus of the vertical family: Fubini over the columns
/// that miss every slit (scaled by the measure comparability constant), and
/// the mass of the admissible density 1.
VerticalBounds vertical_family_bounds(int n, int g, double comparability = 1.0);

/// "x y [L|R] value" per node.
void write_potential(std::ostream& out, const LaplaceSolution& s);

}  // namespace slitcarpet::modulus
