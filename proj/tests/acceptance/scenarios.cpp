#include "scenarios.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "eigenwave/basis.hpp"
#include "eigenwave/errors.hpp"

using namespace eigenwave;

namespace acceptance {

SweepResult sweep(const ScalarField& field, const ScalarField& reference, EtaKind kind, const std::vector<int>& ns,
                  std::ostream& csv) {
  SweepResult out;
  out.ns = ns;
  out.best_error.assign(ns.size(), std::numeric_limits<double>::infinity());
  out.best_beta.assign(ns.size(), 0.0);
  const int n_max = ns.back();
  const std::vector<double> betas = DiffusionSpec{kind, 1.0}.uses_beta() ? kBetaGrid : std::vector<double>{1.0};
  for (double beta : betas) {
    std::shared_ptr<const EigenBasis> basis;
    try {
      basis = build_basis(field, {kind, beta}, n_max);
    } catch (const NumericalError&) {
      ++out.failed_betas;
    }
    for (std::size_t k = 0; k < ns.size(); ++k) {
      csv << to_string(kind) << ',' << beta << ',' << ns[k] << ',';
      if (!basis) {
        csv << "failed\n";
        continue;
      }
      const double err = relative_error(reference, reconstruct(project(field, basis, ns[k])));
      csv << err << '\n';
      if (err < out.best_error[k]) {
        out.best_error[k] = err;
        out.best_beta[k] = beta;
      }
    }
  }
  return out;
}

Model salt_raster() {
  const Grid2D g(184, 61, 100.0, 100.0);
  return make_salt_model(three_dome_salt(18300.0, 6000.0), g);
}

MiniFwi mini_fwi_scenario() {
  const Grid2D g(92, 31, 100.0, 100.0);
  SaltModelSpec spec;
  spec.width = 9100.0;
  spec.depth = 3000.0;
  spec.c_top = 1500.0;
  spec.c_bottom = 3000.0;
  spec.domes = {{4550.0, 1600.0, 1500.0, 700.0, 4500.0}};
  MiniFwi s;
  s.truth = make_salt_model(spec, g);
  s.start = make_linear_profile(g, 1500.0, 2500.0, spec.bounds);
  s.dome = spec.domes.front();
  const double background = spec.c_top + (spec.c_bottom - spec.c_top) * s.dome.cz / spec.depth;
  s.threshold = 0.5 * (s.dome.speed + background);
  const Acquisition acq = Acquisition::line(200.0, 500.0, 8600.0, 10, 200.0, 100.0, 9000.0, 90);
  s.data = add_data_noise(generate_data(s.truth, acq, {2.0}), 10.0, 2024);
  return s;
}

InversionConfig mini_fwi_config(bool nodal) {
  InversionConfig c;
  c.frequencies = {2.0};
  c.n_schedule = {10, 20, 30};
  c.n_iter = 30;
  c.spec = {EtaKind::Eta3, 50.0};
  c.nodal_mode = nodal;
  if (nodal) {
    // Same iteration budget as the three eigenbasis blocks.
    c.n_schedule.clear();
    c.n_iter = 90;
  }
  return c;
}

std::optional<std::pair<double, double>> anomaly_centroid(const Model& m, double threshold) {
  const ScalarField c = m.speed();
  const Grid2D& g = c.grid();
  double sx = 0.0;
  double sz = 0.0;
  int count = 0;
  for (int iz = 0; iz < g.nz(); ++iz) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      if (c(ix, iz) > threshold) {
        sx += ix;
        sz += iz;
        ++count;
      }
    }
  }
  if (count == 0) {
    return std::nullopt;
  }
  return std::pair{sx / count, sz / count};
}

} // namespace acceptance
