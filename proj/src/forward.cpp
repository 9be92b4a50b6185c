#include "eigenwave/forward.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eigenwave/parallel.hpp"

namespace eigenwave {

void FrequencyDataset::validate() const {
  if (frequencies.size() != traces.size()) {
    throw std::invalid_argument("FrequencyDataset: one trace block per frequency required");
  }
  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    if (!(frequencies[f] > 0.0) || (f > 0 && !(frequencies[f] > frequencies[f - 1]))) {
      throw std::invalid_argument("FrequencyDataset: frequencies must be positive and strictly increasing");
    }
    if (static_cast<std::size_t>(traces[f].rows()) != acquisition.receiver_count() ||
        static_cast<std::size_t>(traces[f].cols()) != acquisition.source_count()) {
      throw std::invalid_argument("FrequencyDataset: trace block shape does not match the acquisition");
    }
  }
}

std::size_t FrequencyDataset::frequency_index(double hz) const {
  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    if (frequencies[f] == hz) {
      return f;
    }
  }
  std::ostringstream os;
  os << "FrequencyDataset: no data at " << hz << " Hz";
  throw std::out_of_range(os.str());
}

Eigen::MatrixXcd source_loads(const HelmholtzOperator& op, const Acquisition& acquisition) {
  const auto n = static_cast<Eigen::Index>(op.grid().size());
  Eigen::MatrixXcd loads(n, static_cast<Eigen::Index>(acquisition.source_count()));
  for (std::size_t s = 0; s < acquisition.source_count(); ++s) {
    const Source& src = acquisition.sources()[s];
    Eigen::VectorXcd f = point_source_rhs(op.grid(), src.x, src.z, src.amplitude);
    op.enforce_homogeneous_boundary(f);
    loads.col(static_cast<Eigen::Index>(s)) = f;
  }
  return loads;
}

namespace {

Eigen::MatrixXcd solve_columns(const HelmholtzSolver& solver, const Eigen::MatrixXcd& rhs, bool adjoint, int threads) {
  Eigen::MatrixXcd out(rhs.rows(), rhs.cols());
  parallel_chunks(static_cast<std::size_t>(rhs.cols()), threads, [&](std::size_t begin, std::size_t end) {
    const auto b = static_cast<Eigen::Index>(begin);
    const auto w = static_cast<Eigen::Index>(end - begin);
    const Eigen::MatrixXcd block = rhs.middleCols(b, w);
    out.middleCols(b, w) = adjoint ? solver.solve_adjoint(block) : solver.solve(block);
  });
  return out;
}

Eigen::MatrixXcd sample_all(const ReceiverSampler& sampler, const Eigen::MatrixXcd& fields) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(sampler.receiver_count()), fields.cols());
  for (Eigen::Index s = 0; s < fields.cols(); ++s) {
    out.col(s) = sampler.sample(fields.col(s));
  }
  return out;
}

void check_frequencies(const FrequencyDataset& data, std::span<const std::size_t> idx) {
  data.validate();
  for (std::size_t f : idx) {
    if (f >= data.frequencies.size()) {
      throw std::out_of_range("misfit: frequency index out of range");
    }
  }
}

} // namespace

Eigen::MatrixXcd simulate(const Model& model, const Acquisition& acquisition, double frequency_hz, int threads) {
  acquisition.check_inside(model.grid());
  const HelmholtzSolver solver(HelmholtzOperator::assemble(model, angular_frequency(frequency_hz)));
  const Eigen::MatrixXcd fields = solve_columns(solver, source_loads(solver.op(), acquisition), false, threads);
  return sample_all(ReceiverSampler(model.grid(), acquisition.receivers()), fields);
}

double misfit(const Model& model, const FrequencyDataset& data, std::span<const std::size_t> frequency_indices,
              int threads) {
  check_frequencies(data, frequency_indices);
  double total = 0.0;
  for (std::size_t f : frequency_indices) {
    const Eigen::MatrixXcd sim = simulate(model, data.acquisition, data.frequencies[f], threads);
    total += 0.5 * (sim - data.traces[f]).squaredNorm();
  }
  return total;
}

MisfitGradient misfit_and_gradient(const Model& model, const FrequencyDataset& data,
                                   std::span<const std::size_t> frequency_indices, int threads) {
  check_frequencies(data, frequency_indices);
  data.acquisition.check_inside(model.grid());
  const ReceiverSampler sampler(model.grid(), data.acquisition.receivers());
  const auto n = static_cast<Eigen::Index>(model.grid().size());

  MisfitGradient out{0.0, Eigen::VectorXd::Zero(n)};
  for (std::size_t f : frequency_indices) {
    const HelmholtzSolver solver(HelmholtzOperator::assemble(model, angular_frequency(data.frequencies[f])));
    const Eigen::MatrixXcd u = solve_columns(solver, source_loads(solver.op(), data.acquisition), false, threads);
    const Eigen::MatrixXcd residual = sample_all(sampler, u) - data.traces[f];
    out.misfit += 0.5 * residual.squaredNorm();

    Eigen::MatrixXcd adjoint_rhs(n, residual.cols());
    for (Eigen::Index s = 0; s < residual.cols(); ++s) {
      adjoint_rhs.col(s) = sampler.spread(residual.col(s));
    }
    const Eigen::MatrixXcd q = solve_columns(solver, adjoint_rhs, true, threads);

    // Sum over sources in a fixed order, then apply dA/dm.
    Eigen::VectorXcd correlation = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index s = 0; s < u.cols(); ++s) {
      correlation += q.col(s).conjugate().cwiseProduct(u.col(s));
    }
    out.gradient -= solver.op().diagonal_sensitivity().cwiseProduct(correlation).real();
  }
  return out;
}

ScalarField gradient_nodal(const Model& model, const FrequencyDataset& data,
                           std::span<const std::size_t> frequency_indices, int threads) {
  return ScalarField(model.grid(), misfit_and_gradient(model, data, frequency_indices, threads).gradient);
}

} // namespace eigenwave
