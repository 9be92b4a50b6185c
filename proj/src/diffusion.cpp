#include "eigenwave/diffusion.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "eigenwave/errors.hpp"

namespace eigenwave {

std::string to_string(EtaKind kind) { return "eta" + std::to_string(static_cast<int>(kind)); }

EtaKind parse_eta_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s.rfind("eta", 0) == 0) {
    s = s.substr(3);
  }
  if (s.size() == 1 && s[0] >= '1' && s[0] <= '9') {
    return static_cast<EtaKind>(s[0] - '0');
  }
  throw std::invalid_argument("unknown diffusion coefficient '" + std::string(text) + "'");
}

void DiffusionSpec::validate() const {
  if (uses_beta() && !(beta > 0.0 && std::isfinite(beta))) {
    throw std::invalid_argument(to_string(kind) + ": beta must be positive");
  }
}

GradientNorms gradient_norms(const ScalarField& m) {
  const Grid2D& g = m.grid();
  Eigen::VectorXd mag(static_cast<Eigen::Index>(g.size()));
  for (int iz = 0; iz < g.nz(); ++iz) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      double dx = 0.0;
      if (ix == 0) {
        dx = (m(1, iz) - m(0, iz)) / g.hx();
      } else if (ix == g.nx() - 1) {
        dx = (m(ix, iz) - m(ix - 1, iz)) / g.hx();
      } else {
        dx = (m(ix + 1, iz) - m(ix - 1, iz)) / (2.0 * g.hx());
      }
      double dz = 0.0;
      if (iz == 0) {
        dz = (m(ix, 1) - m(ix, 0)) / g.hz();
      } else if (iz == g.nz() - 1) {
        dz = (m(ix, iz) - m(ix, iz - 1)) / g.hz();
      } else {
        dz = (m(ix, iz + 1) - m(ix, iz - 1)) / (2.0 * g.hz());
      }
      mag[static_cast<Eigen::Index>(g.index(ix, iz))] = std::sqrt(dx * dx + dz * dz);
    }
  }
  GradientNorms out;
  out.gamma1 = mag.maxCoeff();
  out.gamma2 = out.gamma1 * out.gamma1;
  const Eigen::VectorXd sq = mag.array().square();
  if (out.gamma1 > 0.0) {
    out.ngrad1 = ScalarField(g, mag / out.gamma1);
    out.ngrad2 = ScalarField(g, sq / sq.maxCoeff());
    out.gamma2 = sq.maxCoeff();
  } else {
    out.constant_model = true;
    out.ngrad1 = ScalarField(g, 0.0);
    out.ngrad2 = ScalarField(g, 0.0);
  }
  out.magnitude = ScalarField(g, mag);
  return out;
}

namespace {

double eta_value(const DiffusionSpec& spec, double n1, double n2, double raw) {
  const double b = spec.beta;
  switch (spec.kind) {
  case EtaKind::Eta1:
    return b / (b + n2);
  case EtaKind::Eta2:
    return std::exp(-n2 / b);
  case EtaKind::Eta3:
    return 2.0 * b / ((b + n2) * (b + n2));
  case EtaKind::Eta4:
    return raw < kEtaGradientThreshold ? 1.0 : std::tanh(n1 / b) / (b * n1);
  case EtaKind::Eta5:
    return 1.0 / (b * std::sqrt((b + n2) / b));
  case EtaKind::Eta6:
    return b / ((1.0 + b * n2) * (1.0 + b * n2));
  case EtaKind::Eta7:
    return 1.0 / (b * std::exp(n2 / b));
  case EtaKind::Eta8:
    return raw < kEtaGradientThreshold ? 1.0 : 1.0 / n1;
  case EtaKind::Eta9:
    return 1.0;
  }
  return 1.0;
}

} // namespace

ScalarField eval_eta(const DiffusionSpec& spec, const GradientNorms& norms) {
  spec.validate();
  const Grid2D& g = norms.magnitude.grid();
  Eigen::VectorXd eta(static_cast<Eigen::Index>(g.size()));
  if (spec.kind == EtaKind::Eta2 || spec.kind == EtaKind::Eta7) {
    // Exponential kinds in log form. When even the largest value underflows,
    // return eta / max(eta): a constant factor leaves the lift and the
    // eigenvectors unchanged and only rescales the eigenvalues.
    const double offset = spec.kind == EtaKind::Eta7 ? -std::log(spec.beta) : 0.0;
    const Eigen::VectorXd log_eta = (-norms.ngrad2.values().array() / spec.beta + offset).matrix();
    const double top = log_eta.maxCoeff();
    const double shift = std::exp(top) >= std::numeric_limits<double>::min() ? 0.0 : top;
    eta = (log_eta.array() - shift).exp().matrix();
  } else {
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      eta[i] = eta_value(spec, norms.ngrad1.values()[i], norms.ngrad2.values()[i], norms.magnitude.values()[i]);
    }
  }
  if (!eta.allFinite()) {
    throw NumericalError("eval_eta: " + to_string(spec.kind) + " produced a non-finite coefficient");
  }
  const double floor = kEtaRelativeFloor * eta.maxCoeff();
  if (!(floor > 0.0)) {
    throw NumericalError("eval_eta: " + to_string(spec.kind) + " vanishes everywhere");
  }
  eta = eta.cwiseMax(floor);
  return ScalarField(g, std::move(eta));
}

Eigen::VectorXd DiffusionOperator::scatter(const Eigen::VectorXd& interior_values) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < interior_nodes.size(); ++k) {
    out[static_cast<Eigen::Index>(interior_nodes[k])] = interior_values[static_cast<Eigen::Index>(k)];
  }
  return out;
}

Eigen::VectorXd DiffusionOperator::gather_interior(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(interior_nodes.size()));
  for (std::size_t k = 0; k < interior_nodes.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = nodal[static_cast<Eigen::Index>(interior_nodes[k])];
  }
  return out;
}

Eigen::VectorXd DiffusionOperator::gather_boundary(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(boundary_nodes.size()));
  for (std::size_t k = 0; k < boundary_nodes.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = nodal[static_cast<Eigen::Index>(boundary_nodes[k])];
  }
  return out;
}

DiffusionOperator assemble_diffusion(const ScalarField& eta) {
  if (!(eta.values().minCoeff() > 0.0)) {
    throw std::invalid_argument("assemble_diffusion: coefficient must be strictly positive");
  }
  DiffusionOperator op;
  op.grid = eta.grid();
  const Grid2D& g = op.grid;
  const int nx = g.nx();
  const int nz = g.nz();

  // slot[node] >= 0: interior index; < 0: -(boundary index + 1).
  std::vector<long> slot(g.size());
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t j = g.index(ix, iz);
      if (g.on_boundary(ix, iz)) {
        slot[j] = -static_cast<long>(op.boundary_nodes.size()) - 1;
        op.boundary_nodes.push_back(j);
      } else {
        slot[j] = static_cast<long>(op.interior_nodes.size());
        op.interior_nodes.push_back(j);
      }
    }
  }

  std::vector<Eigen::Triplet<double>> inner;
  std::vector<Eigen::Triplet<double>> outer;
  inner.reserve(5 * op.interior_nodes.size());
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihz2 = 1.0 / (g.hz() * g.hz());

  for (std::size_t row = 0; row < op.interior_nodes.size(); ++row) {
    const std::size_t j = op.interior_nodes[row];
    const auto [ix, iz] = g.unflatten(j);
    const double ej = eta(ix, iz);
    double diag = 0.0;
    const std::array<std::array<int, 2>, 4> nbrs{{{ix - 1, iz}, {ix + 1, iz}, {ix, iz - 1}, {ix, iz + 1}}};
    for (int k = 0; k < 4; ++k) {
      const int nxi = nbrs[static_cast<std::size_t>(k)][0];
      const int nzi = nbrs[static_cast<std::size_t>(k)][1];
      const double w = 0.5 * (ej + eta(nxi, nzi)) * (k < 2 ? ihx2 : ihz2);
      diag += w;
      const long s = slot[g.index(nxi, nzi)];
      if (s >= 0) {
        inner.emplace_back(static_cast<int>(row), static_cast<int>(s), -w);
      } else {
        outer.emplace_back(static_cast<int>(row), static_cast<int>(-s - 1), -w);
      }
    }
    inner.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
  const auto ni = static_cast<Eigen::Index>(op.interior_nodes.size());
  const auto nb = static_cast<Eigen::Index>(op.boundary_nodes.size());
  op.interior.resize(ni, ni);
  op.interior.setFromTriplets(inner.begin(), inner.end());
  op.interior.makeCompressed();
  op.coupling.resize(ni, nb);
  op.coupling.setFromTriplets(outer.begin(), outer.end());
  op.coupling.makeCompressed();
  return op;
}

ScalarField lift_m0(const ScalarField& m, const ScalarField& eta) {
  require_same_grid(m.grid(), eta.grid(), "lift_m0");
  return lift_m0(m, assemble_diffusion(eta));
}

ScalarField lift_m0(const ScalarField& m, const DiffusionOperator& op) {
  require_same_grid(m.grid(), op.grid, "lift_m0");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(op.interior);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("lift_m0: factorization of the diffusion operator failed");
  }
  const Eigen::VectorXd boundary = op.gather_boundary(m.values());
  const Eigen::VectorXd rhs = -(op.coupling * boundary);
  Eigen::VectorXd interior = ldlt.solve(rhs);
  // One refinement step keeps the relative residual at roundoff level.
  interior += ldlt.solve(Eigen::VectorXd(rhs - op.interior * interior));
  const double residual = (op.interior * interior - rhs).norm();
  const double scale = std::max(rhs.norm(), (op.interior * interior).norm());
  if (!(residual <= 1e-10 * std::max(scale, 1e-300))) {
    std::ostringstream os;
    os << "lift_m0: relative residual " << residual / scale << " exceeds 1e-10";
    throw NumericalError(os.str());
  }
  Eigen::VectorXd full = op.scatter(interior);
  for (std::size_t k = 0; k < op.boundary_nodes.size(); ++k) {
    full[static_cast<Eigen::Index>(op.boundary_nodes[k])] = boundary[static_cast<Eigen::Index>(k)];
  }
  return ScalarField(m.grid(), std::move(full));
}

} // namespace eigenwave
