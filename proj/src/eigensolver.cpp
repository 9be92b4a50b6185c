#include "eigenwave/eigensolver.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "eigenwave/errors.hpp"

namespace eigenwave {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Orthonormalizes the columns of `w` against basis.leftCols(k) and against
/// each other (classical Gram-Schmidt, applied twice). Columns that collapse
/// are replaced by fresh random directions.
void orthonormalize_block(Matrix& w, const Matrix& basis, Eigen::Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const auto v = basis.leftCols(k);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double before = w.col(c).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (k > 0) {
          w.col(c) -= v * (v.transpose() * w.col(c));
        }
        if (c > 0) {
          w.col(c) -= w.leftCols(c) * (w.leftCols(c).transpose() * w.col(c));
        }
      }
      const double after = w.col(c).norm();
      if (after > 1e-10 * before && after > 0.0) {
        w.col(c) /= after;
        break;
      }
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        w(i, c) = normal(rng);
      }
    }
  }
}

} // namespace

EigenPairs smallest_eigenpairs(const Eigen::SparseMatrix<double>& a, int count, const LanczosOptions& options) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || n == 0) {
    throw std::invalid_argument("smallest_eigenpairs: matrix must be square and nonempty");
  }
  if (count < 1 || count > n) {
    std::ostringstream os;
    os << "smallest_eigenpairs: requested " << count << " eigenpairs of a " << n << "x" << n << " matrix";
    throw std::invalid_argument(os.str());
  }
  if (options.block_size < 1) {
    throw std::invalid_argument("smallest_eigenpairs: block size must be positive");
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
    throw NumericalError("smallest_eigenpairs: matrix is not positive definite");
  }

  const Eigen::Index nev = count;
  const Eigen::Index block = std::min<Eigen::Index>(options.block_size, n);
  Eigen::Index max_dim = options.max_subspace > 0 ? options.max_subspace : std::max(3 * nev, nev + 10 * block);
  max_dim = std::clamp(max_dim, std::min(n, nev + 2 * block), n);

  // Rounding in psi alone leaves ||A psi - lambda psi|| ~ eps ||A||, so the
  // attainable relative residual is bounded below by ~ eps ||A|| / lambda.
  double norm_a = 0.0;
  for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it) {
      col += std::abs(it.value());
    }
    norm_a = std::max(norm_a, col);
  }
  const double attainable = kAttainableResidualFactor * std::numeric_limits<double>::epsilon() * norm_a;
  auto target = [&](double lambda) { return std::max(options.tolerance, attainable / lambda); };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;

  Matrix basis(n, max_dim); // V, orthonormal columns
  Matrix image(n, max_dim); // Z = A^-1 V
  Eigen::Index dim = 0;

  Matrix next(n, block);
  for (Eigen::Index j = 0; j < next.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      next(i, j) = normal(rng);
    }
  }
  orthonormalize_block(next, basis, 0, rng);

  EigenPairs result;
  Vector ritz_values;
  Matrix ritz_vectors;
  Vector achieved = Vector::Constant(nev, std::numeric_limits<double>::infinity());

  for (;;) {
    const Eigen::Index width = next.cols();
    basis.middleCols(dim, width) = next;
    image.middleCols(dim, width) = ldlt.solve(next);
    result.solves += static_cast<int>(width);
    dim += width;

    bool converged = false;
    Eigen::SelfAdjointEigenSolver<Matrix> projected;
    if (dim >= nev) {
      Matrix h = basis.leftCols(dim).transpose() * image.leftCols(dim);
      h = 0.5 * (h + h.transpose()).eval();
      projected.compute(h);
      // Eigen sorts ascending; the wanted 1/lambda are the largest.
      const Matrix y = projected.eigenvectors().rightCols(nev).rowwise().reverse();
      const Vector theta = projected.eigenvalues().tail(nev).reverse();
      const Matrix psi = basis.leftCols(dim) * y;
      const Matrix r = image.leftCols(dim) * y - psi * theta.asDiagonal();
      // A psi - lambda psi = -lambda A r, so the relative residual is ||A r||.
      const Matrix ar = a * r;
      converged = true;
      for (Eigen::Index k = 0; k < nev; ++k) {
        achieved[k] = ar.col(k).norm();
        converged = converged && achieved[k] <= 0.1 * target(1.0 / theta[k]);
      }
      converged = converged || dim == n;
      if (converged) {
        ritz_vectors = psi;
        ritz_values = theta;
      }
    }
    if (converged) {
      break;
    }

    Matrix w = image.middleCols(dim - width, width);
    const Eigen::Index room = n - dim;
    if (room < w.cols()) {
      w.conservativeResize(Eigen::NoChange, room);
    }
    orthonormalize_block(w, basis, dim, rng);

    if (dim + w.cols() > max_dim) {
      if (result.restarts >= options.max_restarts) {
        std::ostringstream os;
        os << "smallest_eigenpairs: no convergence after " << result.restarts << " restarts; residuals";
        for (Eigen::Index k = 0; k < nev; ++k) {
          os << ' ' << achieved[k];
        }
        throw NumericalError(os.str());
      }
      // Thick restart: keep the leading Ritz vectors. Z stays equal to A^-1 V
      // because both are transformed by the same coefficients.
      const Eigen::Index keep = std::min(dim - block, std::max(nev + block, (dim + nev) / 2));
      const Matrix y = projected.eigenvectors().rightCols(keep);
      const Matrix v_new = basis.leftCols(dim) * y;
      const Matrix z_new = image.leftCols(dim) * y;
      basis.leftCols(keep) = v_new;
      image.leftCols(keep) = z_new;
      dim = keep;
      ++result.restarts;
      // w is orthogonal to the old basis, hence to the kept span.
      orthonormalize_block(w, basis, dim, rng);
    }
    next = std::move(w);
  }

  // Rayleigh quotients with A itself, then ascending order and sign convention.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(nev));
  Vector lambda(nev);
  for (Eigen::Index k = 0; k < nev; ++k) {
    ritz_vectors.col(k).normalize();
    lambda[k] = ritz_vectors.col(k).dot(a * ritz_vectors.col(k));
  }
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return lambda[i] < lambda[j]; });

  result.values.resize(nev);
  result.vectors.resize(n, nev);
  result.residuals.resize(nev);
  for (Eigen::Index k = 0; k < nev; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    Vector psi = ritz_vectors.col(src);
    Eigen::Index arg = 0;
    psi.cwiseAbs().maxCoeff(&arg);
    if (psi[arg] < 0.0) {
      psi = -psi;
    }
    result.values[k] = lambda[src];
    result.residuals[k] = (a * psi - lambda[src] * psi).norm() / lambda[src];
    result.vectors.col(k) = psi;
  }
  if (!(result.values[0] > 0.0)) {
    throw NumericalError("smallest_eigenpairs: nonpositive eigenvalue; matrix is not positive definite");
  }
  for (Eigen::Index k = 0; k < nev; ++k) {
    if (!(result.residuals[k] <= target(result.values[k]))) {
      std::ostringstream os;
      os << "smallest_eigenpairs: eigenpair " << k << " residual " << result.residuals[k] << " exceeds "
         << target(result.values[k]);
      throw NumericalError(os.str());
    }
  }
  return result;
}

} // namespace eigenwave
