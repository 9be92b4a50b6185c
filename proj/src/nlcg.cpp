#include "eigenwave/nlcg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigenwave/errors.hpp"

namespace eigenwave {

void LineSearchOptions::validate() const {
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) {
    throw std::invalid_argument("line search: armijo_c1 must lie in (0, 1)");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("line search: shrink must lie in (0, 1)");
  }
  if (max_backtracks < 0) {
    throw std::invalid_argument("line search: max_backtracks must be nonnegative");
  }
  if (!(initial_step_fraction > 0.0)) {
    throw std::invalid_argument("line search: initial_step_fraction must be positive");
  }
}

NlcgState NlcgState::start(const Objective& objective, Eigen::VectorXd x0) {
  NlcgState state;
  auto [value, gradient] = objective.value_and_gradient(x0);
  state.x = std::move(x0);
  state.value = value;
  state.gradient = std::move(gradient);
  return state;
}

StepReport nlcg_step(NlcgState& state, const Objective& objective, const LineSearchOptions& options) {
  StepReport report;
  report.value_before = state.value;
  report.value_after = state.value;

  const Eigen::VectorXd& g = state.gradient;
  Eigen::VectorXd s = -g;
  report.steepest_descent = true;
  if (!state.restart && state.prev_gradient.size() == g.size() && state.direction.size() == g.size()) {
    const double denom = state.prev_gradient.squaredNorm();
    const double beta = denom > 0.0 ? std::max(0.0, g.dot(g - state.prev_gradient) / denom) : 0.0;
    Eigen::VectorXd candidate = -g + beta * state.direction;
    if (g.dot(candidate) < 0.0) {
      s = std::move(candidate);
      report.beta = beta;
      report.steepest_descent = beta == 0.0;
    }
  }
  report.slope = g.dot(s);
  const double s_norm = s.norm();
  if (!(report.slope < 0.0) || s_norm == 0.0) {
    // Stationary point: nothing to do.
    report.accepted = false;
    state.restart = true;
    ++state.consecutive_failures;
    return report;
  }

  const double reference = objective.step_reference ? objective.step_reference(state.x) : state.x.norm();
  double mu = options.initial_step_fraction * (reference > 0.0 ? reference : 1.0) / s_norm;
  Eigen::VectorXd trial;
  double accepted_value = state.value;
  for (int bt = 0; bt <= options.max_backtracks; ++bt) {
    trial = state.x + mu * s;
    double value = std::numeric_limits<double>::infinity();
    try {
      value = objective.value(trial);
    } catch (const NumericalError&) {
    }
    report.step = mu;
    report.backtracks = bt;
    if (std::isfinite(value) && value <= state.value + options.armijo_c1 * mu * report.slope) {
      report.accepted = true;
      accepted_value = value;
      break;
    }
    mu *= options.shrink;
  }

  if (!report.accepted) {
    state.restart = true;
    ++state.consecutive_failures;
    return report;
  }

  auto [value, gradient] = objective.value_and_gradient(trial);
  (void)value;
  report.value_after = accepted_value;
  state.prev_gradient = state.gradient;
  state.direction = std::move(s);
  state.x = std::move(trial);
  state.value = accepted_value;
  state.gradient = std::move(gradient);
  state.restart = false;
  state.consecutive_failures = 0;
  return report;
}

} // namespace eigenwave
