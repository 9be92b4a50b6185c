#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "eigenwave/diffusion.hpp"
#include "eigenwave/eigensolver.hpp"
#include "eigenwave/field.hpp"

namespace eigenwave {

/// Lift plus the N smallest diffusion eigenpairs of a model.
/// Eigenvectors are stored as columns over all grid nodes and vanish on the boundary.
struct EigenBasis {
  DiffusionSpec spec;
  std::string source_model_hash;
  ScalarField m0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  const Grid2D& grid() const { return m0.grid(); }
  int size() const { return static_cast<int>(eigenvalues.size()); }
  /// k is zero-based.
  ScalarField psi(int k) const;
};

/// 64-bit FNV-1a digest (hex) of the grid description and the raw values.
std::string field_hash(const ScalarField& field);

/// Builds eta from m, the lift m0, and the n smallest eigenpairs.
std::shared_ptr<const EigenBasis> build_basis(const ScalarField& m, const DiffusionSpec& spec, int n,
                                              const LanczosOptions& options = {});

struct DecomposedModel {
  std::shared_ptr<const EigenBasis> basis;
  Eigen::VectorXd alpha; ///< one coefficient per active eigenvector

  int n_active() const { return static_cast<int>(alpha.size()); }
};

/// Least-squares coefficients of m - m0 on the first n_active eigenvectors.
DecomposedModel project(const ScalarField& m, std::shared_ptr<const EigenBasis> basis, int n_active);

/// m0 + sum_k alpha_k psi_k.
ScalarField reconstruct(const DecomposedModel& model);
Eigen::VectorXd reconstruct_values(const EigenBasis& basis, const Eigen::VectorXd& alpha);

// Archive: manifest.txt, m0.ewf, psi_0001.ewf ...
void write_basis_archive(const std::filesystem::path& dir, const EigenBasis& basis);
std::shared_ptr<const EigenBasis> read_basis_archive(const std::filesystem::path& dir);

} // namespace eigenwave
