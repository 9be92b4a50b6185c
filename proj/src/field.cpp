#include "eigenwave/field.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "eigenwave/model.hpp"

namespace eigenwave {

ScalarField::ScalarField(const Grid2D& grid, double fill)
    : grid_(grid), values_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), fill)) {}

ScalarField::ScalarField(const Grid2D& grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("ScalarField: non-finite value");
  }
}

double relative_error(const ScalarField& reference, const ScalarField& estimate) {
  require_same_grid(reference.grid(), estimate.grid(), "relative_error");
  const double ref_norm = reference.values().norm();
  if (ref_norm == 0.0) {
    throw std::invalid_argument("relative_error: reference field has zero norm");
  }
  return 100.0 * (reference.values() - estimate.values()).norm() / ref_norm;
}

Model::Model(ScalarField squared_slowness, SpeedBounds bounds) : m_(std::move(squared_slowness)), bounds_(bounds) {
  if (!(bounds_.c_min > 0.0) || !(bounds_.c_max > bounds_.c_min)) {
    throw std::invalid_argument("Model: speed bounds must satisfy 0 < c_min < c_max");
  }
  if (m_.values().size() == 0 || !(m_.values().minCoeff() > 0.0)) {
    throw std::invalid_argument("Model: squared slowness must be strictly positive");
  }
}

ScalarField Model::speed() const { return slowness_to_speed(m_); }

Model speed_to_slowness(const ScalarField& speed, SpeedBounds bounds) {
  if (!(speed.values().minCoeff() > 0.0)) {
    throw std::invalid_argument("speed_to_slowness: speed must be strictly positive");
  }
  Eigen::VectorXd m = speed.values().array().square().inverse();
  return Model(ScalarField(speed.grid(), std::move(m)), bounds);
}

ScalarField slowness_to_speed(const ScalarField& squared_slowness) {
  if (!(squared_slowness.values().minCoeff() > 0.0)) {
    throw std::invalid_argument("slowness_to_speed: squared slowness must be strictly positive");
  }
  Eigen::VectorXd c = squared_slowness.values().array().sqrt().inverse();
  return ScalarField(squared_slowness.grid(), std::move(c));
}

ClampResult clamp_to_bounds(const Eigen::VectorXd& squared_slowness, SpeedBounds bounds) {
  const double lo = 1.0 / (bounds.c_max * bounds.c_max);
  const double hi = 1.0 / (bounds.c_min * bounds.c_min);
  ClampResult out{squared_slowness, Eigen::VectorXd::Ones(squared_slowness.size()), 0};
  for (Eigen::Index i = 0; i < out.values.size(); ++i) {
    double& v = out.values[i];
    if (v < lo || v > hi) {
      v = v < lo ? lo : hi;
      out.mask[i] = 0.0;
      ++out.clamped;
    }
  }
  return out;
}

} // namespace eigenwave
