#include "amg.hpp"

#include <cmath>
#include <stdexcept>

namespace slitcarpet::detail {

namespace {

constexpr Eigen::Index kCoarsestSize = 400;
constexpr std::size_t kMaxLevels = 25;
constexpr double kStrength = 0.08;
constexpr double kOmega = 2.0 / 3.0;  // Jacobi damping for a spectrum of D^-1 A in [0, 2]

// Greedy aggregation over the strong-connection graph. Returns the aggregate
// of each row and the number of aggregates.
std::vector<int> aggregate(const RowMatrix& A, const Eigen::VectorXd& diag, int& count) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> agg(n, -1);
  auto strong = [&](int i, RowMatrix::InnerIterator& it) {
    const int j = static_cast<int>(it.col());
    return j != i && std::abs(it.value()) >= kStrength * std::sqrt(diag[i] * diag[j]);
  };
  count = 0;
  // seeds whose whole strong neighbourhood is free
  for (int i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    bool free = true;
    for (RowMatrix::InnerIterator it(A, i); it && free; ++it) {
      if (strong(i, it) && agg[it.col()] >= 0) free = false;
    }
    if (!free) continue;
    agg[i] = count;
    for (RowMatrix::InnerIterator it(A, i); it; ++it) {
      if (strong(i, it)) agg[it.col()] = count;
    }
    ++count;
  }
  // attach leftovers to the strongest aggregated neighbour
  std::vector<int> joined = agg;
  for (int i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    double best = 0.0;
    for (RowMatrix::InnerIterator it(A, i); it; ++it) {
      if (strong(i, it) && agg[it.col()] >= 0 && std::abs(it.value()) > best) {
        best = std::abs(it.value());
        joined[i] = agg[it.col()];
      }
    }
  }
  agg = std::move(joined);
  // isolated leftovers form their own aggregates
  for (int i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    agg[i] = count;
    for (RowMatrix::InnerIterator it(A, i); it; ++it) {
      if (strong(i, it) && agg[it.col()] < 0) agg[it.col()] = count;
    }
    ++count;
  }
  return agg;
}

void gauss_seidel(const RowMatrix& A, const Eigen::VectorXd& diag, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                  bool forward) {
  const Eigen::Index n = A.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = forward ? k : n - 1 - k;
    double s = b[i];
    for (RowMatrix::InnerIterator it(A, i); it; ++it) {
      if (it.col() != i) s -= it.value() * x[it.col()];
    }
    x[i] = s / diag[i];
  }
}

}  // namespace

AmgPreconditioner::AmgPreconditioner(const RowMatrix& A) {
  RowMatrix current = A;
  for (;;) {
    Level level;
    level.A = std::move(current);
    level.diag = level.A.diagonal();
    if (level.A.rows() <= kCoarsestSize || levels_.size() + 1 >= kMaxLevels) {
      levels_.push_back(std::move(level));
      break;
    }
    int count = 0;
    const std::vector<int> agg = aggregate(level.A, level.diag, count);
    if (count >= level.A.rows()) {
      levels_.push_back(std::move(level));
      break;
    }
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(agg.size());
    for (std::size_t i = 0; i < agg.size(); ++i) t.emplace_back(static_cast<int>(i), agg[i], 1.0);
    RowMatrix tentative(level.A.rows(), count);
    tentative.setFromTriplets(t.begin(), t.end());
    const Eigen::VectorXd scale = kOmega * level.diag.cwiseInverse();
    RowMatrix smoother = scale.asDiagonal() * level.A;
    level.P = tentative - RowMatrix(smoother * tentative);
    level.R = level.P.transpose();
    current = RowMatrix(level.R * RowMatrix(level.A * level.P));
    levels_.push_back(std::move(level));
  }
  coarse_.compute(Eigen::SparseMatrix<double>(levels_.back().A));
  if (coarse_.info() != Eigen::Success) throw std::runtime_error("amg: coarse factorization failed");
}

void AmgPreconditioner::cycle(std::size_t l, const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
  const Level& L = levels_[l];
  if (l + 1 == levels_.size()) {
    x = coarse_.solve(b);
    return;
  }
  x.setZero(b.size());
  gauss_seidel(L.A, L.diag, b, x, true);
  const Eigen::VectorXd coarse_b = L.R * (b - L.A * x);
  Eigen::VectorXd coarse_x;
  cycle(l + 1, coarse_b, coarse_x);
  x += L.P * coarse_x;
  gauss_seidel(L.A, L.diag, b, x, false);
}

Eigen::VectorXd AmgPreconditioner::apply(const Eigen::VectorXd& r) const {
  Eigen::VectorXd x;
  cycle(0, r, x);
  return x;
}

PcgResult pcg(const RowMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, const AmgPreconditioner& M,
              double tol, long max_iterations) {
  PcgResult out;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    out.converged = true;
    return out;
  }
  Eigen::VectorXd r = b - A * x;
  out.relative_residual = r.norm() / bnorm;
  if (out.relative_residual <= tol) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXd z = M.apply(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  Eigen::VectorXd Ap(b.size());
  while (out.iterations < max_iterations) {
    Ap.noalias() = A * p;
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    ++out.iterations;
    out.relative_residual = r.norm() / bnorm;
    if (out.relative_residual <= tol) {
      out.converged = true;
      break;
    }
    z = M.apply(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return out;
}

}  // namespace slitcarpet::detail
