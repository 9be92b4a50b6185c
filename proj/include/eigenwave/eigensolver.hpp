#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace eigenwave {

inline constexpr double kAttainableResidualFactor = 1e3;

struct LanczosOptions {
  /// Start-block width; must be at least the largest eigenvalue multiplicity
  /// that has to be resolved.
  int block_size = 4;
  /// Krylov dimension at which a thick restart happens; 0 picks max(3N, N + 10 b).
  int max_subspace = 0;
  int max_restarts = 100;
  /// Required ||A psi - lambda psi|| / lambda. For badly conditioned A the
  /// target is raised to kAttainableResidualFactor * eps * ||A||_1 / lambda,
  /// the level set by rounding psi itself.
  double tolerance = 1e-8;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct EigenPairs {
  Eigen::VectorXd values;    ///< ascending
  Eigen::MatrixXd vectors;   ///< orthonormal columns, largest-magnitude entry positive
  Eigen::VectorXd residuals; ///< ||A psi - lambda psi|| / lambda
  int restarts = 0;
  int solves = 0;            ///< number of A^-1 applications (columns)
};

/// N smallest eigenpairs of a sparse SPD matrix by shift-invert: A is
/// factorized once and a block Lanczos iteration with full
/// reorthogonalization and thick restarts runs on A^-1, whose largest
/// eigenvalues are 1/lambda. Accepts 1 <= count <= A.rows().
///
/// Throws std::invalid_argument for a bad count, NumericalError when A is not
/// positive definite or the iteration does not converge within max_restarts
/// (the message lists the achieved residuals).
EigenPairs smallest_eigenpairs(const Eigen::SparseMatrix<double>& a, int count, const LanczosOptions& options = {});

} // namespace eigenwave
