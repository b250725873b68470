#pragma once

// Smoothed-aggregation algebraic multigrid, used as a preconditioner for
// conjugate gradients on the cut-grid Laplacians.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace slitcarpet::detail {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

class AmgPreconditioner {
 public:
  explicit AmgPreconditioner(const RowMatrix& A);

  /// One symmetric V-cycle applied to r (zero initial guess).
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

  std::size_t levels() const { return levels_.size(); }

 private:
  struct Level {
    RowMatrix A;
    RowMatrix P;  // prolongation to this level from the next coarser one
    RowMatrix R;  // P^T
    Eigen::VectorXd diag;
  };

  void cycle(std::size_t l, const Eigen::VectorXd& b, Eigen::VectorXd& x) const;

  std::vector<Level> levels_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> coarse_;
};

struct PcgResult {
  long iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned CG for A x = b starting from x; stops at ||r|| <= tol ||b||.
PcgResult pcg(const RowMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, const AmgPreconditioner& M,
              double tol, long max_iterations);

}  // namespace slitcarpet::detail
