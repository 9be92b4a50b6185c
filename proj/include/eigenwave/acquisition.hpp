#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "eigenwave/grid.hpp"
#include "eigenwave/helmholtz.hpp"

namespace eigenwave {

struct Source {
  double x = 0.0;
  double z = 0.0;
  Complex amplitude{1.0, 0.0};
};

struct Receiver {
  double x = 0.0;
  double z = 0.0;
};

/// Line acquisition: all sources share one depth, all receivers share one depth.
class Acquisition {
public:
  Acquisition() = default;
  Acquisition(std::vector<Source> sources, std::vector<Receiver> receivers);

  /// `count` evenly spaced positions from x_first to x_last at a fixed depth.
  static Acquisition line(double source_depth, double source_x_first, double source_x_last, int source_count,
                          double receiver_depth, double receiver_x_first, double receiver_x_last,
                          int receiver_count, Complex amplitude = {1.0, 0.0});

  const std::vector<Source>& sources() const { return sources_; }
  const std::vector<Receiver>& receivers() const { return receivers_; }
  std::size_t source_count() const { return sources_.size(); }
  std::size_t receiver_count() const { return receivers_.size(); }

  /// Throws std::out_of_range if any device lies outside the grid.
  void check_inside(const Grid2D& grid) const;

  friend bool operator==(const Acquisition& a, const Acquisition& b);

private:
  std::vector<Source> sources_;
  std::vector<Receiver> receivers_;
};

/// Delta load amplitude / (hx hz) on the node nearest to (x, z).
Eigen::VectorXcd point_source_rhs(const Grid2D& grid, double x, double z, Complex amplitude);

/// Bilinear receiver sampling operator R and its adjoint.
class ReceiverSampler {
public:
  ReceiverSampler(const Grid2D& grid, const std::vector<Receiver>& receivers);

  std::size_t receiver_count() const { return stencils_.size(); }

  /// R u, one value per receiver.
  Eigen::VectorXcd sample(const Eigen::VectorXcd& nodal) const;
  /// R^H r spread back onto the grid (weights are real, so R^H = R^T).
  Eigen::VectorXcd spread(const Eigen::VectorXcd& receiver_values) const;

private:
  struct Stencil {
    std::array<std::size_t, 4> node{};
    std::array<double, 4> weight{};
  };
  Grid2D grid_;
  std::vector<Stencil> stencils_;
};

Eigen::VectorXcd sample_receivers(const ComplexField& u, const Acquisition& acquisition);

} // namespace eigenwave
