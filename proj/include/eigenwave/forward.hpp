#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eigenwave/acquisition.hpp"
#include "eigenwave/helmholtz.hpp"
#include "eigenwave/model.hpp"

namespace eigenwave {

/// Receiver traces for every (frequency, source) pair.
struct FrequencyDataset {
  Acquisition acquisition;
  std::vector<double> frequencies;      ///< Hz, strictly increasing
  std::vector<Eigen::MatrixXcd> traces; ///< per frequency: receivers x sources
  std::optional<double> snr_db;         ///< set once data noise was added

  /// Throws std::invalid_argument on inconsistent shapes or frequencies.
  void validate() const;
  /// Index of an exactly matching frequency; throws std::out_of_range otherwise.
  std::size_t frequency_index(double hz) const;
};

inline double angular_frequency(double hz) { return 2.0 * 3.14159265358979323846 * hz; }

/// Loads for all sources, boundary rows zeroed: grid nodes x sources.
Eigen::MatrixXcd source_loads(const HelmholtzOperator& op, const Acquisition& acquisition);

/// Forward map at one frequency: receivers x sources.
Eigen::MatrixXcd simulate(const Model& model, const Acquisition& acquisition, double frequency_hz, int threads = 1);

/// 1/2 sum over frequencies and sources of ||F(m) - d||^2.
double misfit(const Model& model, const FrequencyDataset& data, std::span<const std::size_t> frequency_indices,
              int threads = 1);

struct MisfitGradient {
  double misfit = 0.0;
  Eigen::VectorXd gradient; ///< dJ/dm at every node
};

/// Misfit and its adjoint-state gradient with respect to squared slowness.
/// Per frequency and source: A u = f, A^H q = R^T (R u - d), and
/// dJ/dm_j = -Re(conj(q_j) dA_jj/dm_j u_j), which includes the absorbing-row term.
MisfitGradient misfit_and_gradient(const Model& model, const FrequencyDataset& data,
                                   std::span<const std::size_t> frequency_indices, int threads = 1);

ScalarField gradient_nodal(const Model& model, const FrequencyDataset& data,
                           std::span<const std::size_t> frequency_indices, int threads = 1);

} // namespace eigenwave
