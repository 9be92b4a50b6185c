#include "eigenwave/inversion.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "eigenwave/errors.hpp"

namespace eigenwave {

Eigen::VectorXd gradient_alpha(const ScalarField& g_nodal, const EigenBasis& basis, int n_active) {
  require_same_grid(g_nodal.grid(), basis.grid(), "gradient_alpha");
  if (n_active < 0 || n_active > basis.size()) {
    throw std::invalid_argument("gradient_alpha: n_active exceeds basis size");
  }
  return basis.eigenvectors.leftCols(n_active).transpose() * g_nodal.values();
}

std::vector<InversionBlock> InversionConfig::blocks() const {
  std::vector<InversionBlock> out;
  if (nodal_mode) {
    for (double f : frequencies) {
      out.push_back({f, 0});
    }
    return out;
  }
  if (frequencies.size() == n_schedule.size()) {
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
      out.push_back({frequencies[k], n_schedule[k]});
    }
  } else if (frequencies.size() == 1) {
    for (int n : n_schedule) {
      out.push_back({frequencies.front(), n});
    }
  } else if (n_schedule.size() == 1) {
    for (double f : frequencies) {
      out.push_back({f, n_schedule.front()});
    }
  } else {
    throw std::invalid_argument("inversion: frequency list and N schedule lengths are incompatible");
  }
  return out;
}

void InversionConfig::validate() const {
  if (frequencies.empty()) {
    throw std::invalid_argument("inversion: at least one frequency required");
  }
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    if (!(frequencies[k] > 0.0) || (k > 0 && !(frequencies[k] > frequencies[k - 1]))) {
      throw std::invalid_argument("inversion: frequencies must be positive and strictly increasing");
    }
  }
  if (n_iter < 0) {
    throw std::invalid_argument("inversion: n_iter must be nonnegative");
  }
  if (threads < 1) {
    throw std::invalid_argument("inversion: threads must be positive");
  }
  line_search.validate();
  if (!nodal_mode) {
    if (n_schedule.empty()) {
      throw std::invalid_argument("inversion: N schedule required in eigenbasis mode");
    }
    for (std::size_t k = 0; k < n_schedule.size(); ++k) {
      if (n_schedule[k] < 1 || (k > 0 && n_schedule[k] < n_schedule[k - 1])) {
        throw std::invalid_argument("inversion: N schedule must be positive and nondecreasing");
      }
    }
    spec.validate();
    (void)blocks();
  }
}

void InversionHistory::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("InversionHistory: cannot write " + path.string());
  }
  out << "block,iter,misfit,step,N,frequency,misfit_before,slope,c1,backtracks,clamped,accepted,steepest\n";
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.block << ',' << r.iteration << ',' << r.misfit << ',' << r.step << ',' << r.n_active << ','
        << r.frequency << ',' << r.misfit_before << ',' << r.slope << ',' << armijo_c1 << ',' << r.backtracks << ','
        << r.clamped << ',' << (r.accepted ? 1 : 0) << ',' << (r.steepest_descent ? 1 : 0) << '\n';
  }
}

namespace {

/// Maps optimizer variables to a clamped model and carries the chain rule back.
struct Parametrization {
  std::shared_ptr<const EigenBasis> basis; // null: nodal variables
  int n_active = 0;
  Grid2D grid;
  SpeedBounds bounds;

  Eigen::VectorXd raw_values(const Eigen::VectorXd& x) const {
    return basis ? reconstruct_values(*basis, x) : x;
  }
  ClampResult model_values(const Eigen::VectorXd& x) const { return clamp_to_bounds(raw_values(x), bounds); }
  Model model(const Eigen::VectorXd& x) const {
    return Model(ScalarField(grid, model_values(x).values), bounds);
  }
  Eigen::VectorXd pull_back(const Eigen::VectorXd& nodal_gradient) const {
    return basis ? gradient_alpha(ScalarField(grid, nodal_gradient), *basis, n_active) : nodal_gradient;
  }
};

Objective make_objective(const Parametrization& p, const FrequencyDataset& data, std::size_t frequency_index,
                         int threads) {
  Objective obj;
  const std::vector<std::size_t> freqs{frequency_index};
  obj.value = [p, &data, freqs, threads](const Eigen::VectorXd& x) {
    return misfit(p.model(x), data, freqs, threads);
  };
  obj.value_and_gradient = [p, &data, freqs, threads](const Eigen::VectorXd& x) {
    const ClampResult c = p.model_values(x);
    const Model m(ScalarField(p.grid, c.values), p.bounds);
    MisfitGradient mg = misfit_and_gradient(m, data, freqs, threads);
    // Clamped nodes do not respond to the variables.
    const Eigen::VectorXd masked = mg.gradient.cwiseProduct(c.mask);
    return std::pair<double, Eigen::VectorXd>{mg.misfit, p.pull_back(masked)};
  };
  obj.step_reference = [p](const Eigen::VectorXd& x) {
    return std::max(x.norm(), p.raw_values(x).norm());
  };
  return obj;
}

} // namespace

InversionResult run_inversion(const InversionConfig& config, const FrequencyDataset& data, const Model& start) {
  config.validate();
  data.validate();
  data.acquisition.check_inside(start.grid());
  const std::vector<InversionBlock> blocks = config.blocks();
  for (const auto& b : blocks) {
    (void)data.frequency_index(b.frequency);
  }

  InversionResult result;
  result.history.armijo_c1 = config.line_search.armijo_c1;
  Parametrization param{nullptr, 0, start.grid(), start.bounds()};
  Eigen::VectorXd x;
  int n_max = 0;

  if (config.nodal_mode) {
    x = start.values();
  } else {
    n_max = *std::max_element(config.n_schedule.begin(), config.n_schedule.end());
    param.basis = build_basis(start.field(), config.spec, n_max, config.eigensolver);
    param.n_active = blocks.front().n_active;
    x = project(start.field(), param.basis, param.n_active).alpha;
  }
  result.basis = param.basis;
  result.model = param.model(x);

  if (config.n_iter == 0) {
    return result;
  }

  try {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const InversionBlock& block = blocks[b];
      if (!config.nodal_mode && b > 0) {
        if (config.refresh_basis) {
          const ScalarField current(param.grid, param.raw_values(x));
          param.basis = build_basis(current, config.spec, n_max, config.eigensolver);
          param.n_active = block.n_active;
          x = project(current, param.basis, param.n_active).alpha;
          result.basis = param.basis;
        } else {
          // Same stored eigenvectors; the new ones enter with zero weight.
          const auto old = x.size();
          x.conservativeResize(block.n_active);
          x.tail(block.n_active - old).setZero();
          param.n_active = block.n_active;
        }
      }
      const Objective objective =
          make_objective(param, data, data.frequency_index(block.frequency), config.threads);
      NlcgState state = NlcgState::start(objective, x);
      for (int it = 1; it <= config.n_iter; ++it) {
        const StepReport step = nlcg_step(state, objective, config.line_search);
        IterationRecord rec;
        rec.block = static_cast<int>(b) + 1;
        rec.iteration = it;
        rec.frequency = block.frequency;
        rec.n_active = config.nodal_mode ? static_cast<int>(x.size()) : param.n_active;
        rec.misfit_before = step.value_before;
        rec.misfit = step.value_after;
        rec.step = step.step;
        rec.slope = step.slope;
        rec.backtracks = step.backtracks;
        rec.clamped = param.model_values(state.x).clamped;
        rec.accepted = step.accepted;
        rec.steepest_descent = step.steepest_descent;
        result.history.records.push_back(rec);
        x = state.x;
        result.model = param.model(x);
        if (state.consecutive_failures >= 2) {
          break;
        }
      }
      result.history.snapshots.push_back(result.model.field());
    }
  } catch (const std::exception& e) {
    result.failure = e.what();
  }
  return result;
}

} // namespace eigenwave
