#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eigenwave/forward.hpp"
#include "eigenwave/model.hpp"

namespace eigenwave {

/// Elliptic high-velocity body.
struct Dome {
  double cx = 0.0;
  double cz = 0.0;
  double rx = 0.0;
  double rz = 0.0;
  double speed = 4500.0;
};

/// Background speed linear in depth plus elliptic domes that overwrite it.
struct SaltModelSpec {
  double width = 0.0; ///< m
  double depth = 0.0; ///< m
  double c_top = 1500.0;
  double c_bottom = 3000.0;
  std::vector<Dome> domes;
  SpeedBounds bounds{1000.0, 6000.0};
};

/// Three-dome salt layout scaled to a width x depth domain.
SaltModelSpec three_dome_salt(double width, double depth);

/// The grid must span [x0, x0 + width] x [z0, z0 + depth]; domes must lie
/// inside. Throws std::invalid_argument otherwise.
Model make_salt_model(const SaltModelSpec& spec, const Grid2D& grid);

struct Layer {
  double z_top = 0.0; ///< depth below z0 where the layer starts
  double speed = 1500.0;
};

/// Piecewise-constant layers; the first layer must start at depth 0.
Model make_layered_model(const std::vector<Layer>& layers, const Grid2D& grid, SpeedBounds bounds);

/// Speed linear in depth from c_top to c_bottom.
Model make_linear_profile(const Grid2D& grid, double c_top, double c_bottom, SpeedBounds bounds);

/// Noise-free receiver data for every frequency and source.
FrequencyDataset generate_data(const Model& truth, const Acquisition& acquisition, std::vector<double> frequencies,
                               int threads = 1);

/// Multiplies every nodal speed by an independent U[1 - p/100, 1 + p/100] factor.
Model add_model_noise(const Model& model, double percent, std::uint64_t seed);

/// Adds circular complex Gaussian noise to every (frequency, source) trace with
/// per-sample variance E 10^(-snr/10) / n, E being the trace energy.
FrequencyDataset add_data_noise(const FrequencyDataset& data, double snr_db, std::uint64_t seed);

// Archive: acquisition.txt, dataset_manifest.txt, traces_fNNNN.bin
// (receiver-fastest, source-major little-endian real/imag pairs).
void write_dataset_archive(const std::filesystem::path& dir, const FrequencyDataset& data);
FrequencyDataset read_dataset_archive(const std::filesystem::path& dir);

} // namespace eigenwave
