#include "eigenwave/synthetics.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eigenwave {

SaltModelSpec three_dome_salt(double width, double depth) {
  SaltModelSpec spec;
  spec.width = width;
  spec.depth = depth;
  spec.c_top = 1500.0;
  spec.c_bottom = 3200.0;
  spec.domes = {
      {0.22 * width, 0.45 * depth, 0.10 * width, 0.16 * depth, 4500.0},
      {0.52 * width, 0.62 * depth, 0.13 * width, 0.20 * depth, 4500.0},
      {0.80 * width, 0.40 * depth, 0.08 * width, 0.14 * depth, 4500.0},
  };
  return spec;
}

namespace {

void check_extent(const Grid2D& grid, double width, double depth) {
  const double tol_x = 1e-6 * grid.hx();
  const double tol_z = 1e-6 * grid.hz();
  if (std::abs(grid.x_max() - grid.x0() - width) > tol_x || std::abs(grid.z_max() - grid.z0() - depth) > tol_z) {
    throw std::invalid_argument("make_salt_model: grid extent does not match the model domain");
  }
}

} // namespace

Model make_salt_model(const SaltModelSpec& spec, const Grid2D& grid) {
  check_extent(grid, spec.width, spec.depth);
  for (const Dome& d : spec.domes) {
    if (!(d.rx > 0.0) || !(d.rz > 0.0) || d.cx - d.rx < 0.0 || d.cx + d.rx > spec.width || d.cz - d.rz < 0.0 ||
        d.cz + d.rz > spec.depth) {
      std::ostringstream os;
      os << "make_salt_model: dome centred at (" << d.cx << ", " << d.cz << ") leaves the domain";
      throw std::invalid_argument(os.str());
    }
    if (d.speed < spec.bounds.c_min || d.speed > spec.bounds.c_max) {
      throw std::invalid_argument("make_salt_model: dome speed outside the admissible bounds");
    }
  }
  ScalarField speed(grid);
  for (int iz = 0; iz < grid.nz(); ++iz) {
    const double z = grid.z(iz) - grid.z0();
    const double background = spec.c_top + (spec.c_bottom - spec.c_top) * z / spec.depth;
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const double x = grid.x(ix) - grid.x0();
      double c = background;
      for (const Dome& d : spec.domes) {
        const double u = (x - d.cx) / d.rx;
        const double v = (z - d.cz) / d.rz;
        if (u * u + v * v <= 1.0) {
          c = d.speed;
        }
      }
      speed(ix, iz) = c;
    }
  }
  return speed_to_slowness(speed, spec.bounds);
}

Model make_layered_model(const std::vector<Layer>& layers, const Grid2D& grid, SpeedBounds bounds) {
  if (layers.empty() || layers.front().z_top != 0.0) {
    throw std::invalid_argument("make_layered_model: first layer must start at depth 0");
  }
  for (std::size_t k = 1; k < layers.size(); ++k) {
    if (!(layers[k].z_top > layers[k - 1].z_top)) {
      throw std::invalid_argument("make_layered_model: layer tops must increase");
    }
  }
  ScalarField speed(grid);
  for (int iz = 0; iz < grid.nz(); ++iz) {
    const double z = grid.z(iz) - grid.z0();
    double c = layers.front().speed;
    for (const Layer& l : layers) {
      if (z >= l.z_top) {
        c = l.speed;
      }
    }
    for (int ix = 0; ix < grid.nx(); ++ix) {
      speed(ix, iz) = c;
    }
  }
  return speed_to_slowness(speed, bounds);
}

Model make_linear_profile(const Grid2D& grid, double c_top, double c_bottom, SpeedBounds bounds) {
  ScalarField speed(grid);
  const double depth = grid.z_max() - grid.z0();
  for (int iz = 0; iz < grid.nz(); ++iz) {
    const double c = c_top + (c_bottom - c_top) * (grid.z(iz) - grid.z0()) / depth;
    for (int ix = 0; ix < grid.nx(); ++ix) {
      speed(ix, iz) = c;
    }
  }
  return speed_to_slowness(speed, bounds);
}

FrequencyDataset generate_data(const Model& truth, const Acquisition& acquisition, std::vector<double> frequencies,
                               int threads) {
  FrequencyDataset data;
  data.acquisition = acquisition;
  data.frequencies = std::move(frequencies);
  for (double f : data.frequencies) {
    data.traces.push_back(simulate(truth, acquisition, f, threads));
  }
  data.validate();
  return data;
}

Model add_model_noise(const Model& model, double percent, std::uint64_t seed) {
  if (!(percent >= 0.0 && percent < 100.0)) {
    throw std::invalid_argument("add_model_noise: percent must lie in [0, 100)");
  }
  if (percent == 0.0) {
    return model;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(1.0 - percent / 100.0, 1.0 + percent / 100.0);
  ScalarField speed = model.speed();
  for (double& c : speed.values()) {
    c *= factor(rng);
  }
  return speed_to_slowness(speed, model.bounds());
}

FrequencyDataset add_data_noise(const FrequencyDataset& data, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("add_data_noise: SNR must be finite");
  }
  data.validate();
  FrequencyDataset out = data;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (auto& block : out.traces) {
    for (Eigen::Index s = 0; s < block.cols(); ++s) {
      auto trace = block.col(s);
      const auto n = trace.size();
      if (n == 0) {
        throw std::invalid_argument("add_data_noise: empty trace");
      }
      const double energy = trace.squaredNorm();
      const double variance = energy * std::pow(10.0, -snr_db / 10.0) / static_cast<double>(n);
      const double sigma = std::sqrt(0.5 * variance);
      for (Eigen::Index r = 0; r < n; ++r) {
        const double re = normal(rng);
        const double im = normal(rng);
        trace[r] += Complex(sigma * re, sigma * im);
      }
    }
  }
  out.snr_db = snr_db;
  return out;
}

} // namespace eigenwave
