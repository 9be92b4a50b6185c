#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eigenwave/basis.hpp"
#include "eigenwave/forward.hpp"
#include "eigenwave/nlcg.hpp"

namespace eigenwave {

/// d J / d alpha_l = <psi_l, g> for l < n_active.
Eigen::VectorXd gradient_alpha(const ScalarField& g_nodal, const EigenBasis& basis, int n_active);

/// One optimization block: a single frequency and an active basis size.
struct InversionBlock {
  double frequency = 0.0;
  int n_active = 0;
};

struct InversionConfig {
  /// Strictly increasing. With one frequency and several N values, every N
  /// gets its own block at that frequency; with one N, it is reused for all
  /// frequencies; otherwise the lists pair up one to one.
  std::vector<double> frequencies;
  std::vector<int> n_schedule;
  int n_iter = 30;
  DiffusionSpec spec{EtaKind::Eta3, 0.05};
  bool refresh_basis = false;
  bool nodal_mode = false;
  LineSearchOptions line_search;
  LanczosOptions eigensolver;
  int threads = 1;

  std::vector<InversionBlock> blocks() const;
  void validate() const;
};

struct IterationRecord {
  int block = 0;
  int iteration = 0;
  double frequency = 0.0;
  int n_active = 0;
  double misfit_before = 0.0;
  double misfit = 0.0;
  double step = 0.0;
  double slope = 0.0;
  int backtracks = 0;
  std::size_t clamped = 0;
  bool accepted = false;
  bool steepest_descent = false;
};

struct InversionHistory {
  std::vector<IterationRecord> records;
  /// Squared slowness at the end of each block.
  std::vector<ScalarField> snapshots;
  double armijo_c1 = 0.0;

  /// Columns: block,iter,misfit,step,N, then frequency,misfit_before,slope,
  /// c1,backtracks,clamped,accepted,steepest. Reals use 17 significant digits.
  void write_csv(const std::filesystem::path& path) const;
};

struct InversionResult {
  Model model;
  InversionHistory history;
  std::shared_ptr<const EigenBasis> basis; ///< last basis used (null in nodal mode)
  std::optional<std::string> failure;      ///< set when a stage aborted the run
};

/// Frequency and basis-size continuation: builds B(m_start, eta, N_max) once
/// (or per block when refresh_basis is set), projects the start model on N_1
/// coefficients and runs n_iter NLCG iterations per block on the coefficients
/// (or on nodal values in nodal mode). Stage failures end the run early with
/// the history kept up to the last completed iteration.
InversionResult run_inversion(const InversionConfig& config, const FrequencyDataset& data, const Model& start);

} // namespace eigenwave
