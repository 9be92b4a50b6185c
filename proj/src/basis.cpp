#include "eigenwave/basis.hpp"

#include <bit>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>

#include "eigenwave/errors.hpp"

namespace eigenwave {

ScalarField EigenBasis::psi(int k) const {
  if (k < 0 || k >= size()) {
    throw std::out_of_range("EigenBasis::psi: index out of range");
  }
  return ScalarField(grid(), eigenvectors.col(k));
}

std::string field_hash(const ScalarField& field) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  const Grid2D& g = field.grid();
  mix(static_cast<std::uint64_t>(g.nx()));
  mix(static_cast<std::uint64_t>(g.nz()));
  for (double v : {g.hx(), g.hz(), g.x0(), g.z0()}) {
    mix(std::bit_cast<std::uint64_t>(v));
  }
  for (double v : field.values()) {
    mix(std::bit_cast<std::uint64_t>(v));
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::shared_ptr<const EigenBasis> build_basis(const ScalarField& m, const DiffusionSpec& spec, int n,
                                              const LanczosOptions& options) {
  spec.validate();
  const ScalarField eta = eval_eta(spec, gradient_norms(m));
  const DiffusionOperator op = assemble_diffusion(eta);
  EigenPairs pairs = smallest_eigenpairs(op.interior, n, options);

  auto basis = std::make_shared<EigenBasis>();
  basis->spec = spec;
  basis->source_model_hash = field_hash(m);
  basis->m0 = lift_m0(m, op);
  basis->eigenvalues = std::move(pairs.values);
  basis->eigenvectors.resize(static_cast<Eigen::Index>(m.grid().size()), n);
  for (int k = 0; k < n; ++k) {
    basis->eigenvectors.col(k) = op.scatter(pairs.vectors.col(k));
  }
  return basis;
}

DecomposedModel project(const ScalarField& m, std::shared_ptr<const EigenBasis> basis, int n_active) {
  if (!basis) {
    throw std::invalid_argument("project: null basis");
  }
  require_same_grid(m.grid(), basis->grid(), "project");
  if (n_active < 0 || n_active > basis->size()) {
    throw std::invalid_argument("project: n_active exceeds basis size");
  }
  DecomposedModel out{basis, Eigen::VectorXd::Zero(n_active)};
  if (n_active == 0) {
    return out;
  }
  const auto psi = basis->eigenvectors.leftCols(n_active);
  const Eigen::VectorXd target = m.values() - basis->m0.values();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(psi);
  if (qr.rank() < n_active) {
    throw NumericalError("project: eigenvector block is rank deficient");
  }
  out.alpha = qr.solve(target);
  return out;
}

Eigen::VectorXd reconstruct_values(const EigenBasis& basis, const Eigen::VectorXd& alpha) {
  if (alpha.size() > basis.size()) {
    throw std::invalid_argument("reconstruct: more coefficients than eigenvectors");
  }
  return basis.m0.values() + basis.eigenvectors.leftCols(alpha.size()) * alpha;
}

ScalarField reconstruct(const DecomposedModel& model) {
  return ScalarField(model.basis->grid(), reconstruct_values(*model.basis, model.alpha));
}

} // namespace eigenwave
