#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

namespace eigenwave {

struct LineSearchOptions {
  double armijo_c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 20;
  /// First trial step moves the variables by this fraction of the reference norm.
  double initial_step_fraction = 0.05;

  void validate() const;
};

/// Objective seen by the optimizer. `value` may throw eigenwave::NumericalError
/// for unusable trial points; the line search treats those as rejected.
struct Objective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)> value_and_gradient;
  /// Norm that sets the scale of the first trial step; defaults to ||x||.
  std::function<double(const Eigen::VectorXd&)> step_reference;
};

struct NlcgState {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd direction;      ///< previous search direction
  Eigen::VectorXd prev_gradient;
  bool restart = true;            ///< next direction is steepest descent
  int consecutive_failures = 0;

  static NlcgState start(const Objective& objective, Eigen::VectorXd x0);
};

struct StepReport {
  double value_before = 0.0;
  double value_after = 0.0;
  double step = 0.0;          ///< accepted mu, or the last rejected trial
  double slope = 0.0;         ///< <g, s>
  double beta = 0.0;          ///< Polak-Ribiere+ coefficient used
  int backtracks = 0;
  bool accepted = false;
  bool steepest_descent = false;
};

/// One Polak-Ribiere+ step with Armijo backtracking. An accepted step
/// satisfies value_after <= value_before + c1 * step * slope evaluated in
/// exactly that order. A failed line search leaves x unchanged, bumps
/// consecutive_failures and forces the next direction to steepest descent.
StepReport nlcg_step(NlcgState& state, const Objective& objective, const LineSearchOptions& options);

} // namespace eigenwave
