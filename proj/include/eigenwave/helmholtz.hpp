#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "eigenwave/grid.hpp"
#include "eigenwave/model.hpp"

namespace eigenwave {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

/// Complex nodal field (pressure).
class ComplexField {
public:
  ComplexField() = default;
  ComplexField(const Grid2D& grid, Eigen::VectorXcd values);

  const Grid2D& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Complex operator()(int ix, int iz) const { return values_[static_cast<Eigen::Index>(grid_.index(ix, iz))]; }

private:
  Grid2D grid_;
  Eigen::VectorXcd values_;
};

enum class NodeKind : std::uint8_t { Interior, Dirichlet, AbcLeft, AbcRight, AbcBottom };

enum class BoundaryMode {
  FreeSurfaceAbc, ///< p = 0 on the top row, first-order absorbing rows elsewhere
  AllDirichlet,   ///< identity rows on every boundary node (manufactured-solution checks)
};

/// Discrete -lap - omega^2 m with boundary rows.
///
/// Interior rows use the 5-point Laplacian. Absorbing rows discretize
/// d_nu p - i omega sqrt(m) p = 0 with a one-sided difference toward the single
/// inward neighbour and are scaled by 1/h, giving
///   (1/h^2 - i omega sqrt(m)/h) p_b - p_in / h^2.
/// Bottom corners use the vertical-edge condition; top corners are Dirichlet.
class HelmholtzOperator {
public:
  static HelmholtzOperator assemble(const Model& model, double omega,
                                    BoundaryMode mode = BoundaryMode::FreeSurfaceAbc);

  const Grid2D& grid() const { return grid_; }
  double omega() const { return omega_; }
  BoundaryMode mode() const { return mode_; }
  const ComplexSparse& matrix() const { return matrix_; }
  NodeKind kind(std::size_t node) const { return kinds_[node]; }
  const std::vector<NodeKind>& kinds() const { return kinds_; }

  /// dA_jj / dm_j for every node; A depends on m_j only through its diagonal.
  const Eigen::VectorXcd& diagonal_sensitivity() const { return sensitivity_; }

  /// Zero the entries of a load vector that fall on boundary rows, so the
  /// boundary conditions stay homogeneous.
  void enforce_homogeneous_boundary(Eigen::VectorXcd& rhs) const;

private:
  Grid2D grid_;
  double omega_ = 0.0;
  BoundaryMode mode_ = BoundaryMode::FreeSurfaceAbc;
  ComplexSparse matrix_;
  std::vector<NodeKind> kinds_;
  Eigen::VectorXcd sensitivity_;
};

/// Owns a sparse LU factorization of a HelmholtzOperator and serves any
/// number of forward and adjoint solves from it. Every returned solution is
/// checked against ||A u - f|| <= 1e-10 max(1, ||f||).
class HelmholtzSolver {
public:
  explicit HelmholtzSolver(HelmholtzOperator op);
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;

  const HelmholtzOperator& op() const { return op_; }

  /// Columns of `rhs` are independent loads.
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;
  /// Solves A^H q = r column by column with the forward factors.
  Eigen::MatrixXcd solve_adjoint(const Eigen::MatrixXcd& rhs) const;

  std::vector<ComplexField> solve(const std::vector<Eigen::VectorXcd>& rhs) const;

  static constexpr double kResidualTolerance = 1e-10;

private:
  struct Factorization;
  HelmholtzOperator op_;
  std::unique_ptr<Factorization> lu_;
};

} // namespace eigenwave
