#include "slitcarpet/modulus.hpp"

#include "amg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>

namespace slitcarpet::modulus {

BoundarySpec BoundarySpec::connecting(Direction d) {
  BoundarySpec b;
  if (d == Direction::LR) {
    b.left = Boundary::zero;
    b.right = Boundary::one;
  } else {
    b.bottom = Boundary::zero;
    b.top = Boundary::one;
  }
  return b;
}

namespace {

constexpr double kUnset = -1.0;

// Dirichlet value of each node (kUnset for free nodes).
std::vector<double> dirichlet_values(const CutGrid& grid, const BoundarySpec& b) {
  const std::int32_t N = grid.cells();
  std::vector<double> fixed(grid.node_count(), kUnset);
  auto apply = [&](std::size_t id, Boundary kind) {
    if (kind == Boundary::insulated) return;
    const double v = kind == Boundary::one ? 1.0 : 0.0;
    if (fixed[id] != kUnset && fixed[id] != v) {
      throw std::invalid_argument("boundary spec assigns two values to a corner");
    }
    fixed[id] = v;
  };
  for (std::size_t id = 0; id < grid.node_count(); ++id) {
    const GridNode& n = grid.node(id);
    if (n.i == 0) apply(id, b.left);
    if (n.i == N) apply(id, b.right);
    if (n.j == 0) apply(id, b.bottom);
    if (n.j == N) apply(id, b.top);
  }
  return fixed;
}

double side_value(Boundary b) { return b == Boundary::one ? 1.0 : 0.0; }

double initial_value(const CutGrid& grid, std::size_t id, const BoundarySpec& b, InitialGuess guess) {
  if (guess == InitialGuess::zero) return 0.0;
  if (b.left != Boundary::insulated && b.right != Boundary::insulated) {
    return side_value(b.left) + (side_value(b.right) - side_value(b.left)) * grid.x(id);
  }
  if (b.bottom != Boundary::insulated && b.top != Boundary::insulated) {
    return side_value(b.bottom) + (side_value(b.top) - side_value(b.bottom)) * grid.y(id);
  }
  return 0.0;
}

}  // namespace

LaplaceSolution laplace_solve(int n, int g, const BoundarySpec& boundary, const LaplaceOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("laplace_solve: tolerance must be positive");
  auto grid = std::make_shared<const CutGrid>(n, g);
  const CutGrid& G = *grid;
  const std::vector<double> fixed = dirichlet_values(G, boundary);

  std::vector<std::int64_t> unknown(G.node_count(), -1);
  std::int64_t free_count = 0;
  for (std::size_t id = 0; id < G.node_count(); ++id) {
    if (fixed[id] == kUnset) unknown[id] = free_count++;
  }
  if (free_count == 0 || free_count == static_cast<std::int64_t>(G.node_count())) {
    throw std::invalid_argument("laplace_solve: need both free and Dirichlet nodes");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(G.edges().size() * 4);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(free_count);
  for (const auto& e : G.edges()) {
    const std::int64_t a = unknown[e.a];
    const std::int64_t b = unknown[e.b];
    if (a >= 0) triplets.emplace_back(a, a, e.weight);
    if (b >= 0) triplets.emplace_back(b, b, e.weight);
    if (a >= 0 && b >= 0) {
      triplets.emplace_back(a, b, -e.weight);
      triplets.emplace_back(b, a, -e.weight);
    } else if (a >= 0) {
      rhs[a] += e.weight * fixed[e.b];
    } else if (b >= 0) {
      rhs[b] += e.weight * fixed[e.a];
    }
  }
  detail::RowMatrix A(free_count, free_count);
  A.setFromTriplets(triplets.begin(), triplets.end());
  triplets.clear();
  triplets.shrink_to_fit();

  Eigen::VectorXd x0(free_count);
  for (std::size_t id = 0; id < G.node_count(); ++id) {
    if (unknown[id] >= 0) x0[unknown[id]] = initial_value(G, id, boundary, options.guess);
  }

  const detail::AmgPreconditioner amg(A);
  Eigen::VectorXd x = x0;
  const detail::PcgResult run = detail::pcg(A, rhs, x, amg, options.tolerance, options.max_iterations);
  if (!run.converged) {
    throw std::runtime_error(fmt::format("laplace_solve: no convergence after {} iterations (residual {:.3e})",
                                         run.iterations, run.relative_residual));
  }

  LaplaceSolution s;
  s.boundary = boundary;
  s.iterations = run.iterations;
  const double bnorm = rhs.norm();
  s.residual = bnorm > 0 ? (rhs - A * x).norm() / bnorm : (A * x).norm();

  std::vector<double> u(G.node_count());
  for (std::size_t id = 0; id < G.node_count(); ++id) u[id] = unknown[id] >= 0 ? x[unknown[id]] : fixed[id];
  for (const auto& e : G.edges()) {
    const double d = u[e.a] - u[e.b];
    s.energy += e.weight * d * d;
    const bool a_one = fixed[e.a] == 1.0;
    const bool b_one = fixed[e.b] == 1.0;
    if (a_one != b_one) s.flux += e.weight * (a_one ? 1.0 - u[e.b] : 1.0 - u[e.a]);
  }
  s.potential = GridField{std::move(grid), std::move(u)};
  return s;
}

double conductance(int n, int g, Direction d, double tolerance) {
  LaplaceOptions o;
  o.tolerance = tolerance;
  return laplace_solve(n, g, BoundarySpec::connecting(d), o).energy;
}

double linear_potential_residual(int n, int g, Direction d) {
  const CutGrid grid(n, g);
  const std::vector<double> fixed = dirichlet_values(grid, BoundarySpec::connecting(d));
  auto u = [&](std::size_t id) { return d == Direction::LR ? grid.x(id) : grid.y(id); };
  std::vector<double> r(grid.node_count(), 0.0);
  for (const auto& e : grid.edges()) {
    const double flow = e.weight * (u(e.a) - u(e.b));
    r[e.a] += flow;
    r[e.b] -= flow;
  }
  double worst = 0.0;
  for (std::size_t id = 0; id < grid.node_count(); ++id) {
    if (fixed[id] == kUnset) worst = std::max(worst, std::abs(r[id]));
  }
  return worst;
}

NonverticalBound modulus_upper_nonvertical(int k, int n, int g) {
  if (k < 1) throw std::invalid_argument("modulus_upper_nonvertical: k must be >= 1");
  NonverticalBound r;
  while ((std::int64_t{1} << r.m) <= 2 * static_cast<std::int64_t>(k)) ++r.m;
  r.conductance = conductance(n, g, Direction::LR);
  r.bound = std::ldexp(r.conductance, 2 * r.m);
  return r;
}

// ------------------------------------------------------------- direct modulus

namespace {

constexpr std::size_t kMaxDirectNodes = 20000;
constexpr long kMaxOracleCalls = 20000;
constexpr int kInnerSteps = 50;

using Path = std::vector<std::uint32_t>;  // edge indices

// The modulus of a path family on a weighted graph is the reciprocal of the
// least energy sum F_e^2 / w_e of a unit flow carried by family paths. The
// flow is grown by column generation (pairwise Frank-Wolfe): each round adds
// the shortest family path under rho_e = F_e / w_e and shifts flow from the
// longest active path towards it. Every iterate certifies
//   1 / E(F) <= modulus <= E(F) / L^2,
// L being the shortest family path under rho.
class FlowModulus {
 public:
  FlowModulus(const CutGrid& grid, const CurveFamilySpec& family) : grid_(grid), family_(family) {
    const std::size_t N = grid.node_count();
    offsets_.assign(N + 1, 0);
    for (const auto& e : grid.edges()) {
      ++offsets_[e.a + 1];
      ++offsets_[e.b + 1];
    }
    for (std::size_t k = 0; k < N; ++k) offsets_[k + 1] += offsets_[k];
    incident_.resize(offsets_[N]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t k = 0; k < grid.edges().size(); ++k) {
      incident_[fill[grid.edges()[k].a]++] = static_cast<std::uint32_t>(k);
      incident_[fill[grid.edges()[k].b]++] = static_cast<std::uint32_t>(k);
    }
    flow_.assign(grid.edges().size(), 0.0);
    rho_.assign(grid.edges().size(), 0.0);
  }

  DirectModulus run(double tol) {
    DirectModulus out;
    // start from the shortest path for the resistances 1 / w
    for (std::size_t e = 0; e < rho_.size(); ++e) rho_[e] = 1.0 / grid_.edges()[e].weight;
    active_.push_back({shortest_path().second, 1.0});
    ++out.paths;
    add_flow(active_.back().path, 1.0);
    for (;;) {
      update_rho();
      const double energy = current_energy();
      auto [length, path] = shortest_path();
      out.lower = 1.0 / energy;
      out.upper = energy / (length * length);
      out.shortest = length / energy;
      if (out.shortest >= 1.0 - tol) break;
      if (++out.iterations > kMaxOracleCalls) throw std::runtime_error("modulus_direct: iteration cap reached");
      std::size_t target = find_active(path);
      if (target == active_.size()) {
        active_.push_back({std::move(path), 0.0});
        ++out.paths;
      }
      pairwise_step(target);
      for (int s = 0; s < kInnerSteps; ++s) {
        update_rho();
        if (!inner_step()) break;
      }
      std::erase_if(active_, [](const Active& a) { return a.weight <= 0.0; });
    }
    return out;
  }

 private:
  struct Active {
    Path path;
    double weight;
  };

  std::size_t other(std::uint32_t e, std::size_t v) const {
    const auto& edge = grid_.edges()[e];
    return edge.a == v ? edge.b : edge.a;
  }

  void add_flow(const Path& p, double amount) {
    for (std::uint32_t e : p) flow_[e] += amount;
  }

  void update_rho() {
    // cancellation can leave tiny negative flows; Dijkstra needs rho >= 0
    for (std::size_t e = 0; e < rho_.size(); ++e) rho_[e] = std::max(0.0, flow_[e]) / grid_.edges()[e].weight;
  }

  double current_energy() const {
    double s = 0.0;
    for (std::size_t e = 0; e < rho_.size(); ++e) s += flow_[e] * rho_[e];
    return s;
  }

  double length(const Path& p) const {
    double s = 0.0;
    for (std::uint32_t e : p) s += rho_[e];
    return s;
  }

  std::size_t find_active(const Path& p) const {
    for (std::size_t k = 0; k < active_.size(); ++k) {
      if (active_[k].path == p) return k;
    }
    return active_.size();
  }

  // Moves the largest useful amount of flow from `from` to `to` along the
  // exact line search of the quadratic energy. Returns the amount moved.
  double shift(std::size_t from, std::size_t to) {
    std::vector<std::pair<std::uint32_t, double>> d;
    for (std::uint32_t e : active_[to].path) d.emplace_back(e, 1.0);
    for (std::uint32_t e : active_[from].path) d.emplace_back(e, -1.0);
    std::sort(d.begin(), d.end());
    double slope = 0.0;
    double curvature = 0.0;
    for (std::size_t k = 0; k < d.size();) {
      const std::uint32_t e = d[k].first;
      double coef = 0.0;
      for (; k < d.size() && d[k].first == e; ++k) coef += d[k].second;
      if (coef == 0.0) continue;
      slope += coef * rho_[e];
      curvature += coef * coef / grid_.edges()[e].weight;
    }
    if (curvature <= 0.0 || slope >= 0.0) return 0.0;
    const double t = std::min(active_[from].weight, -slope / curvature);
    active_[from].weight -= t;
    active_[to].weight += t;
    add_flow(active_[from].path, -t);
    add_flow(active_[to].path, t);
    if (active_[from].weight < 1e-15) active_[from].weight = 0.0;
    return t;
  }

  std::size_t longest_active() const {
    std::size_t best = 0;
    double best_len = -1.0;
    for (std::size_t k = 0; k < active_.size(); ++k) {
      if (active_[k].weight <= 0.0) continue;
      const double l = length(active_[k].path);
      if (l > best_len) {
        best_len = l;
        best = k;
      }
    }
    return best;
  }

  void pairwise_step(std::size_t to) {
    const std::size_t from = longest_active();
    if (from != to) shift(from, to);
  }

  // Pairwise step inside the active set; false once it is balanced.
  bool inner_step() {
    std::size_t lo = active_.size();
    std::size_t hi = active_.size();
    double lo_len = std::numeric_limits<double>::infinity();
    double hi_len = -1.0;
    for (std::size_t k = 0; k < active_.size(); ++k) {
      const double l = length(active_[k].path);
      if (l < lo_len) {
        lo_len = l;
        lo = k;
      }
      if (active_[k].weight > 0.0 && l > hi_len) {
        hi_len = l;
        hi = k;
      }
    }
    if (lo == hi || hi_len - lo_len <= 1e-12 * hi_len) return false;
    return shift(hi, lo) > 0.0;
  }

  // Multi-source Dijkstra under rho.
  void dijkstra(const std::vector<std::size_t>& sources, std::vector<double>& dist,
                std::vector<std::int64_t>& via) const {
    const std::size_t N = grid_.node_count();
    dist.assign(N, std::numeric_limits<double>::infinity());
    via.assign(N, -1);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t s : sources) {
      dist[s] = 0.0;
      pq.emplace(0.0, s);
    }
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
        const std::uint32_t e = incident_[k];
        const std::size_t v = other(e, u);
        const double nd = d + rho_[e];
        if (nd < dist[v]) {
          dist[v] = nd;
          via[v] = e;
          pq.emplace(nd, v);
        }
      }
    }
  }

  std::vector<std::size_t> column_nodes(std::int32_t i) const {
    std::vector<std::size_t> out;
    for (std::int32_t j = 0; j <= grid_.cells(); ++j) {
      if (grid_.is_split(i, j)) {
        out.push_back(*grid_.find(i, j, Side::left));
        out.push_back(*grid_.find(i, j, Side::right));
      } else {
        out.push_back(*grid_.find(i, j));
      }
    }
    return out;
  }

  std::vector<std::size_t> row_nodes(std::int32_t j) const {
    std::vector<std::size_t> out;
    for (std::int32_t i = 0; i <= grid_.cells(); ++i) out.push_back(*grid_.find(i, j));
    return out;
  }

  std::pair<double, Path> connecting(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) const {
    std::vector<double> dist;
    std::vector<std::int64_t> via;
    dijkstra(from, dist, via);
    std::size_t best = to.front();
    for (std::size_t t : to) {
      if (dist[t] < dist[best]) best = t;
    }
    Path p;
    for (std::size_t v = best; via[v] >= 0; v = other(static_cast<std::uint32_t>(via[v]), v)) {
      p.push_back(static_cast<std::uint32_t>(via[v]));
    }
    return {dist[best], std::move(p)};
  }

  std::optional<std::uint32_t> edge_between(std::size_t a, std::size_t b) const {
    for (std::size_t k = offsets_[a]; k < offsets_[a + 1]; ++k) {
      if (other(incident_[k], a) == b) return incident_[k];
    }
    return std::nullopt;
  }

  // Cheapest bottom-to-top path inside column i (one side per slit).
  std::pair<double, Path> vertical(std::int32_t i) const {
    Path p;
    double total = 0.0;
    Path run[2];
    double run_len[2] = {0.0, 0.0};
    for (std::int32_t j = 0; j < grid_.cells(); ++j) {
      const bool split_lo = grid_.is_split(i, j);
      const bool split_hi = grid_.is_split(i, j + 1);
      if (!split_lo && !split_hi) {
        const auto e = *edge_between(*grid_.find(i, j), *grid_.find(i, j + 1));
        p.push_back(e);
        total += rho_[e];
        continue;
      }
      for (int s = 0; s < 2; ++s) {
        const auto side = s == 0 ? Side::left : Side::right;
        const auto a = *grid_.find(i, j, split_lo ? std::optional(side) : std::nullopt);
        const auto b = *grid_.find(i, j + 1, split_hi ? std::optional(side) : std::nullopt);
        const auto e = *edge_between(a, b);
        run[s].push_back(e);
        run_len[s] += rho_[e];
      }
      if (!split_hi) {
        const int s = run_len[0] <= run_len[1] ? 0 : 1;
        p.insert(p.end(), run[s].begin(), run[s].end());
        total += run_len[s];
        run[0].clear();
        run[1].clear();
        run_len[0] = run_len[1] = 0.0;
      }
    }
    return {total, std::move(p)};
  }

  std::pair<double, Path> shortest_path() const {
    const std::int32_t N = grid_.cells();
    switch (family_.kind) {
      case FamilyKind::connect_lr: return connecting(column_nodes(0), column_nodes(N));
      case FamilyKind::connect_tb: return connecting(row_nodes(0), row_nodes(N));
      case FamilyKind::oscillation: {
        // a grid path of x-range >= 1/k joins two columns w apart
        const std::int32_t w = (N + family_.k - 1) / family_.k;
        std::pair<double, Path> best{std::numeric_limits<double>::infinity(), {}};
        for (std::int32_t c = 0; c + w <= N; ++c) {
          auto r = connecting(column_nodes(c), column_nodes(c + w));
          if (r.first < best.first) best = std::move(r);
        }
        return best;
      }
      case FamilyKind::vertical: {
        std::pair<double, Path> best{std::numeric_limits<double>::infinity(), {}};
        for (std::int32_t i = 0; i <= N; ++i) {
          auto r = vertical(i);
          if (r.first < best.first) best = std::move(r);
        }
        return best;
      }
    }
    throw std::logic_error("unknown family");
  }

  const CutGrid& grid_;
  CurveFamilySpec family_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> incident_;
  std::vector<double> flow_;
  std::vector<double> rho_;
  std::vector<Active> active_;
};

}  // namespace

DirectModulus modulus_direct(const CurveFamilySpec& family, int n, int g, double tol) {
  if (family.kind == FamilyKind::oscillation && family.k < 1) {
    throw std::invalid_argument("modulus_direct: oscillation families need k >= 1");
  }
  const CutGrid grid(n, g);
  if (grid.node_count() > kMaxDirectNodes) {
    throw std::invalid_argument(fmt::format("modulus_direct: {} grid nodes exceed the cap of {}",
                                            grid.node_count(), kMaxDirectNodes));
  }
  return FlowModulus(grid, family).run(tol);
}

VerticalBounds vertical_family_bounds(int n, int g, double comparability) {
  if (!(comparability >= 1.0)) throw std::invalid_argument("comparability constant must be >= 1");
  const CutGrid grid(n, g);  // validates the alignment
  // Unobstructed columns carry total dual width 1 - (2^n - 1) 2^-g.
  const double free_width = 1.0 - std::ldexp((std::ldexp(1.0, n) - 1.0), -g);
  return {free_width / comparability, 1.0};
}

void write_potential(std::ostream& out, const LaplaceSolution& s) {
  const CutGrid& G = *s.potential.grid;
  for (std::size_t id = 0; id < G.node_count(); ++id) {
    const GridNode& node = G.node(id);
    out << fmt::format("{} {}", G.x(id), G.y(id));
    if (node.side) out << ' ' << to_char(*node.side);
    out << fmt::format(" {}\n", s.potential.values[id]);
  }
}

}  // namespace slitcarpet::modulus
