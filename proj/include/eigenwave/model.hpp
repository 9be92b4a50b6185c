#pragma once

#include <cstddef>

#include "eigenwave/field.hpp"

namespace eigenwave {

struct SpeedBounds {
  double c_min = 100.0;   // m/s
  double c_max = 20000.0; // m/s
};

/// Squared slowness m = c^-2 (s^2/m^2) with admissible wave-speed bounds.
class Model {
public:
  Model() = default;
  /// Throws std::invalid_argument for nonpositive entries or inverted bounds.
  Model(ScalarField squared_slowness, SpeedBounds bounds);

  const ScalarField& field() const { return m_; }
  const Grid2D& grid() const { return m_.grid(); }
  const Eigen::VectorXd& values() const { return m_.values(); }
  SpeedBounds bounds() const { return bounds_; }

  /// Squared-slowness limits implied by the speed bounds.
  double m_min() const { return 1.0 / (bounds_.c_max * bounds_.c_max); }
  double m_max() const { return 1.0 / (bounds_.c_min * bounds_.c_min); }

  ScalarField speed() const;

private:
  ScalarField m_;
  SpeedBounds bounds_;
};

Model speed_to_slowness(const ScalarField& speed, SpeedBounds bounds = {});
ScalarField slowness_to_speed(const ScalarField& squared_slowness);

struct ClampResult {
  Eigen::VectorXd values;
  /// 1 where the value was kept, 0 where it was clamped.
  Eigen::VectorXd mask;
  std::size_t clamped = 0;
};

/// Clamps squared-slowness values into [1/c_max^2, 1/c_min^2].
ClampResult clamp_to_bounds(const Eigen::VectorXd& squared_slowness, SpeedBounds bounds);

} // namespace eigenwave
