#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "eigenwave/field.hpp"

namespace eigenwave {

/// Diffusion coefficient families, in the usual image-processing naming:
/// Eta1/Eta2 Perona-Malik, Eta3 Geman-Reynolds, Eta4 Green, Eta5 Charbonnier,
/// Eta6 Lorentzian, Eta7 Gaussian, Eta8 total variation, Eta9 Tikhonov.
enum class EtaKind { Eta1 = 1, Eta2, Eta3, Eta4, Eta5, Eta6, Eta7, Eta8, Eta9 };

std::string to_string(EtaKind kind);
/// Accepts "eta1".."eta9" (case-insensitive) or "1".."9".
EtaKind parse_eta_kind(std::string_view text);

struct DiffusionSpec {
  EtaKind kind = EtaKind::Eta9;
  double beta = 1.0; ///< scaling, ignored by Eta8 and Eta9

  bool uses_beta() const { return kind != EtaKind::Eta8 && kind != EtaKind::Eta9; }
  /// Throws std::invalid_argument for a nonpositive beta on kinds 1-7.
  void validate() const;
};

/// |grad m| normalized by its maximum, and |grad m|^2 normalized by its maximum.
struct GradientNorms {
  ScalarField magnitude; ///< raw |grad m|
  ScalarField ngrad1;
  ScalarField ngrad2;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  bool constant_model = false; ///< gamma == 0; ngrad fields are then identically 0
};

/// Central differences inside, first-order one-sided differences on the boundary.
GradientNorms gradient_norms(const ScalarField& m);

/// Below this raw gradient magnitude Eta4 and Eta8 take the value 1.
inline constexpr double kEtaGradientThreshold = 1e-12;
/// Output of eval_eta is floored at this fraction of its maximum.
inline constexpr double kEtaRelativeFloor = 1e-12;

ScalarField eval_eta(const DiffusionSpec& spec, const GradientNorms& norms);

/// Flux-form -div(eta grad .) restricted to interior nodes with homogeneous
/// Dirichlet boundary rows eliminated. Face coefficients are arithmetic means
/// of the two adjacent nodal values.
struct DiffusionOperator {
  Grid2D grid;
  Eigen::SparseMatrix<double> interior; ///< SPD, interior x interior
  Eigen::SparseMatrix<double> coupling; ///< interior x boundary, moves Dirichlet data to the rhs
  std::vector<std::size_t> interior_nodes;
  std::vector<std::size_t> boundary_nodes;

  /// Interior vector -> full nodal vector, zero on the boundary.
  Eigen::VectorXd scatter(const Eigen::VectorXd& interior_values) const;
  Eigen::VectorXd gather_interior(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd gather_boundary(const Eigen::VectorXd& nodal) const;
};

DiffusionOperator assemble_diffusion(const ScalarField& eta);

/// Solves the diffusion equation for m0 with m0 = m on the boundary.
ScalarField lift_m0(const ScalarField& m, const ScalarField& eta);
ScalarField lift_m0(const ScalarField& m, const DiffusionOperator& op);

} // namespace eigenwave
