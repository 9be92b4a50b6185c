#pragma once

#include <Eigen/Core>

#include "eigenwave/grid.hpp"

namespace eigenwave {

/// Real nodal field on a Grid2D (models, lifts, eigenvectors, gradients).
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const Grid2D& grid, double fill = 0.0);
  /// Throws std::invalid_argument on length mismatch or non-finite entries.
  ScalarField(const Grid2D& grid, Eigen::VectorXd values);

  const Grid2D& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator()(int ix, int iz) const { return values_[static_cast<Eigen::Index>(grid_.index(ix, iz))]; }
  double& operator()(int ix, int iz) { return values_[static_cast<Eigen::Index>(grid_.index(ix, iz))]; }

  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }

private:
  Grid2D grid_;
  Eigen::VectorXd values_;
};

/// 100 * ||reference - estimate|| / ||reference|| with plain Euclidean norms.
double relative_error(const ScalarField& reference, const ScalarField& estimate);

} // namespace eigenwave
