#include "eigenwave/helmholtz.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/SparseLU>

#include "eigenwave/errors.hpp"

namespace eigenwave {

ComplexField::ComplexField(const Grid2D& grid, Eigen::VectorXcd values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw std::invalid_argument("ComplexField: value count does not match grid");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("ComplexField: non-finite value");
  }
}

HelmholtzOperator HelmholtzOperator::assemble(const Model& model, double omega, BoundaryMode mode) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("HelmholtzOperator: omega must be positive");
  }
  HelmholtzOperator op;
  op.grid_ = model.grid();
  op.omega_ = omega;
  op.mode_ = mode;

  const Grid2D& g = op.grid_;
  const int nx = g.nx();
  const int nz = g.nz();
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihz2 = 1.0 / (g.hz() * g.hz());
  const double w2 = omega * omega;
  const Eigen::VectorXd& m = model.values();
  const Complex iw{0.0, omega};

  op.kinds_.assign(g.size(), NodeKind::Interior);
  op.sensitivity_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.size()));

  std::vector<Eigen::Triplet<Complex, int>> triplets;
  triplets.reserve(5 * g.size());
  auto add = [&](std::size_t row, std::size_t col, Complex v) {
    triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  };

  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t j = g.index(ix, iz);
      const auto je = static_cast<Eigen::Index>(j);
      const bool boundary = g.on_boundary(ix, iz);

      if (iz == 0 || (boundary && mode == BoundaryMode::AllDirichlet)) {
        op.kinds_[j] = NodeKind::Dirichlet;
        add(j, j, 1.0);
        continue;
      }
      if (boundary) {
        // Vertical edges own the bottom corners.
        std::size_t inward = 0;
        double h = 0.0;
        if (ix == 0 || ix == nx - 1) {
          op.kinds_[j] = ix == 0 ? NodeKind::AbcLeft : NodeKind::AbcRight;
          inward = g.index(ix == 0 ? 1 : nx - 2, iz);
          h = g.hx();
        } else {
          op.kinds_[j] = NodeKind::AbcBottom;
          inward = g.index(ix, nz - 2);
          h = g.hz();
        }
        const double sqrt_m = std::sqrt(m[je]);
        add(j, j, 1.0 / (h * h) - iw * sqrt_m / h);
        add(j, inward, -1.0 / (h * h));
        op.sensitivity_[je] = -iw / (2.0 * sqrt_m * h);
        continue;
      }
      add(j, j, 2.0 * ihx2 + 2.0 * ihz2 - w2 * m[je]);
      add(j, g.index(ix - 1, iz), -ihx2);
      add(j, g.index(ix + 1, iz), -ihx2);
      add(j, g.index(ix, iz - 1), -ihz2);
      add(j, g.index(ix, iz + 1), -ihz2);
      op.sensitivity_[je] = -w2;
    }
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  op.matrix_.resize(n, n);
  op.matrix_.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix_.makeCompressed();
  return op;
}

void HelmholtzOperator::enforce_homogeneous_boundary(Eigen::VectorXcd& rhs) const {
  if (static_cast<std::size_t>(rhs.size()) != grid_.size()) {
    throw std::invalid_argument("enforce_homogeneous_boundary: length mismatch");
  }
  for (std::size_t j = 0; j < kinds_.size(); ++j) {
    if (kinds_[j] != NodeKind::Interior) {
      rhs[static_cast<Eigen::Index>(j)] = 0.0;
    }
  }
}

struct HelmholtzSolver::Factorization {
  Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>> lu;
};

HelmholtzSolver::HelmholtzSolver(HelmholtzOperator op) : op_(std::move(op)), lu_(std::make_unique<Factorization>()) {
  lu_->lu.analyzePattern(op_.matrix());
  lu_->lu.factorize(op_.matrix());
  if (lu_->lu.info() != Eigen::Success) {
    std::ostringstream os;
    os << "HelmholtzSolver: LU factorization failed at omega = " << op_.omega() << ": "
       << lu_->lu.lastErrorMessage();
    throw NumericalError(os.str());
  }
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

namespace {

template <typename Apply, typename Solve>
Eigen::MatrixXcd solve_checked(const Eigen::MatrixXcd& rhs, Apply&& apply, Solve&& solve, const char* what) {
  Eigen::MatrixXcd x = solve(rhs);
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
    const double bound = HelmholtzSolver::kResidualTolerance * std::max(1.0, rhs.col(c).norm());
    double residual = 0.0;
    for (int refine = 0; refine <= 2; ++refine) {
      Eigen::VectorXcd r = rhs.col(c) - apply(x.col(c));
      residual = r.norm();
      if (residual <= bound || !std::isfinite(residual) || refine == 2) {
        break;
      }
      x.col(c) += solve(r);
    }
    if (!(residual <= bound)) {
      std::ostringstream os;
      os << what << ": residual " << residual << " exceeds " << bound << " for right-hand side " << c;
      throw NumericalError(os.str());
    }
  }
  return x;
}

} // namespace

Eigen::MatrixXcd HelmholtzSolver::solve(const Eigen::MatrixXcd& rhs) const {
  if (static_cast<std::size_t>(rhs.rows()) != op_.grid().size()) {
    throw std::invalid_argument("HelmholtzSolver::solve: right-hand side length mismatch");
  }
  const auto& a = op_.matrix();
  auto& lu = lu_->lu;
  return solve_checked(
      rhs, [&](const auto& v) -> Eigen::VectorXcd { return a * v; },
      [&](const auto& b) -> Eigen::MatrixXcd { return lu.solve(b); }, "HelmholtzSolver::solve");
}

Eigen::MatrixXcd HelmholtzSolver::solve_adjoint(const Eigen::MatrixXcd& rhs) const {
  if (static_cast<std::size_t>(rhs.rows()) != op_.grid().size()) {
    throw std::invalid_argument("HelmholtzSolver::solve_adjoint: right-hand side length mismatch");
  }
  const auto& a = op_.matrix();
  auto& lu = lu_->lu;
  return solve_checked(
      rhs, [&](const auto& v) -> Eigen::VectorXcd { return a.adjoint() * v; },
      [&](const auto& b) -> Eigen::MatrixXcd { return lu.adjoint().solve(b); }, "HelmholtzSolver::solve_adjoint");
}

std::vector<ComplexField> HelmholtzSolver::solve(const std::vector<Eigen::VectorXcd>& rhs) const {
  const auto n = static_cast<Eigen::Index>(op_.grid().size());
  Eigen::MatrixXcd batch(n, static_cast<Eigen::Index>(rhs.size()));
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    if (rhs[k].size() != n) {
      throw std::invalid_argument("HelmholtzSolver::solve: right-hand side length mismatch");
    }
    batch.col(static_cast<Eigen::Index>(k)) = rhs[k];
  }
  const Eigen::MatrixXcd x = solve(batch);
  std::vector<ComplexField> out;
  out.reserve(rhs.size());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    out.emplace_back(op_.grid(), x.col(k));
  }
  return out;
}

} // namespace eigenwave
