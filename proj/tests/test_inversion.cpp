#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "eigenwave/errors.hpp"
#include "eigenwave/inversion.hpp"
#include "eigenwave/synthetics.hpp"
#include "test_support.hpp"

using namespace eigenwave;

namespace {

const std::vector<std::size_t> kFirst{0};

struct Scenario {
  Grid2D grid;
  Model truth;
  Model start;
  FrequencyDataset data;
};

Scenario small_scenario(int sources, int receivers) {
  const Grid2D g(41, 21, 50.0, 50.0);
  SaltModelSpec spec;
  spec.width = 2000.0;
  spec.depth = 1000.0;
  spec.c_top = 1500.0;
  spec.c_bottom = 2500.0;
  spec.domes = {{1000.0, 600.0, 300.0, 200.0, 3000.0}};
  const Model truth = make_salt_model(spec, g);
  const Model start = make_linear_profile(g, 1500.0, 2500.0, spec.bounds);
  const Acquisition acq = Acquisition::line(100.0, 300.0, 1700.0, sources, 100.0, 100.0, 1900.0, receivers);
  return {g, truth, start, generate_data(truth, acq, {3.0, 4.0})};
}

Model perturbed(const Model& m, const Eigen::VectorXd& direction, double eps) {
  return Model(ScalarField(m.grid(), m.values() + eps * direction), m.bounds());
}

/// Direction with entries of size ~scale * m on every node.
Eigen::VectorXd random_direction(const Model& m, std::uint64_t seed, double scale) {
  return scale * m.values().cwiseProduct(testing::random_vector(m.values().size(), seed));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

TEST_CASE("misfit") {
  const Scenario sc = small_scenario(2, 6);
  CHECK(misfit(sc.truth, sc.data, kFirst) == 0.0);

  FrequencyDataset zero = sc.data;
  for (auto& t : zero.traces) {
    t.setZero();
  }
  const Eigen::MatrixXcd sim = simulate(sc.start, sc.data.acquisition, 3.0);
  CHECK(misfit(sc.start, zero, kFirst) == doctest::Approx(0.5 * sim.squaredNorm()).epsilon(1e-14));

  const std::vector<std::size_t> both{0, 1};
  const std::vector<std::size_t> second{1};
  CHECK(misfit(sc.start, sc.data, both) ==
        doctest::Approx(misfit(sc.start, sc.data, kFirst) + misfit(sc.start, sc.data, second)).epsilon(1e-14));
  CHECK_THROWS_AS(misfit(sc.start, sc.data, std::vector<std::size_t>{2}), std::out_of_range);

  const MisfitGradient mg = misfit_and_gradient(sc.start, sc.data, both);
  CHECK(mg.misfit == doctest::Approx(misfit(sc.start, sc.data, both)).epsilon(1e-14));
}

TEST_CASE("adjoint gradient matches central differences on nodal values") {
  const Scenario sc = small_scenario(1, 5);
  const MisfitGradient mg = misfit_and_gradient(sc.start, sc.data, kFirst);
  CHECK(mg.gradient.allFinite());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::VectorXd dir = random_direction(sc.start, seed, 1.0);
    const double eps = 1e-4;
    const double fd = (misfit(perturbed(sc.start, dir, eps), sc.data, kFirst) -
                       misfit(perturbed(sc.start, dir, -eps), sc.data, kFirst)) /
                      (2.0 * eps);
    const double adj = mg.gradient.dot(dir);
    CAPTURE(seed);
    CHECK(std::abs(adj - fd) <= 1e-5 * std::abs(fd));
  }
}

TEST_CASE("gradient on the absorbing rows alone") {
  const Scenario sc = small_scenario(1, 5);
  const MisfitGradient mg = misfit_and_gradient(sc.start, sc.data, kFirst);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(sc.start.values().size());
  for (int iz = 1; iz < sc.grid.nz(); ++iz) {
    for (int ix = 0; ix < sc.grid.nx(); ++ix) {
      if (sc.grid.on_boundary(ix, iz)) {
        dir[static_cast<Eigen::Index>(sc.grid.index(ix, iz))] = sc.start.values()[0];
      }
    }
  }
  const double eps = 1e-3;
  const double fd = (misfit(perturbed(sc.start, dir, eps), sc.data, kFirst) -
                     misfit(perturbed(sc.start, dir, -eps), sc.data, kFirst)) /
                    (2.0 * eps);
  CHECK(fd != 0.0);
  CHECK(std::abs(mg.gradient.dot(dir) - fd) <= 1e-5 * std::abs(fd));
  for (int ix = 0; ix < sc.grid.nx(); ++ix) {
    CHECK(mg.gradient[static_cast<Eigen::Index>(sc.grid.index(ix, 0))] == 0.0);
  }
}

TEST_CASE("coefficient-space gradient matches central differences") {
  const Scenario sc = small_scenario(1, 5);
  const int n = 10;
  const auto basis = build_basis(sc.start.field(), {EtaKind::Eta3, 0.05}, n);
  const Eigen::VectorXd alpha0 = 0.1 * sc.start.values().norm() / std::sqrt(double(n)) *
                                 testing::random_vector(n, 99) / 10.0;
  auto model_of = [&](const Eigen::VectorXd& a) {
    return Model(ScalarField(sc.grid, reconstruct_values(*basis, a)), sc.start.bounds());
  };
  const ScalarField g = gradient_nodal(model_of(alpha0), sc.data, kFirst);
  const Eigen::VectorXd ga = gradient_alpha(g, *basis, n);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::VectorXd dir = testing::random_vector(n, 500 + seed);
    const double eps = 1e-5 * sc.start.values().norm() / dir.norm();
    const double fd =
        (misfit(model_of(alpha0 + eps * dir), sc.data, kFirst) - misfit(model_of(alpha0 - eps * dir), sc.data, kFirst)) /
        (2.0 * eps);
    CAPTURE(seed);
    CHECK(std::abs(ga.dot(dir) - fd) <= 1e-5 * std::abs(fd));
  }
}

TEST_CASE("gradient is additive over sources") {
  const Scenario sc = small_scenario(2, 6);
  const auto& acq = sc.data.acquisition;
  auto single = [&](std::size_t s) {
    FrequencyDataset d;
    d.acquisition = Acquisition({acq.sources()[s]}, acq.receivers());
    d.frequencies = {3.0};
    d.traces = {sc.data.traces[0].col(static_cast<Eigen::Index>(s))};
    return misfit_and_gradient(sc.start, d, kFirst);
  };
  const MisfitGradient both = misfit_and_gradient(sc.start, sc.data, kFirst);
  const MisfitGradient a = single(0);
  const MisfitGradient b = single(1);
  CHECK(both.misfit == doctest::Approx(a.misfit + b.misfit).epsilon(1e-13));
  CHECK((both.gradient - a.gradient - b.gradient).norm() <= 1e-12 * both.gradient.norm());
}

TEST_CASE("gradient_alpha") {
  const Grid2D g(15, 11, 10.0, 10.0);
  const auto basis = build_basis(testing::random_field(g, 3, 1.0, 2.0), {EtaKind::Eta1, 0.1}, 6);
  const Eigen::VectorXd e = gradient_alpha(basis->psi(2), *basis, 6);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
  expected[2] = 1.0;
  CHECK((e - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gradient_alpha(basis->psi(2), *basis, 2).norm() < 1e-12);
  CHECK(gradient_alpha(basis->psi(2), *basis, 0).size() == 0);
  CHECK_THROWS_AS(gradient_alpha(basis->psi(2), *basis, 7), std::invalid_argument);
}

TEST_CASE("nonlinear conjugate gradients on a quadratic") {
  const int n = 10;
  const Eigen::MatrixXd q = testing::random_vector(n * n, 77).reshaped(n, n);
  const Eigen::MatrixXd a = q * q.transpose() + 2.0 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
  const Eigen::VectorXd x_star = a.ldlt().solve(b);
  Objective obj;
  obj.value = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) - b.dot(x); };
  obj.value_and_gradient = [&](const Eigen::VectorXd& x) {
    return std::pair<double, Eigen::VectorXd>{0.5 * x.dot(a * x) - b.dot(x), a * x - b};
  };
  const LineSearchOptions ls;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(n);
  NlcgState state = NlcgState::start(obj, x0);

  const Eigen::VectorXd g0 = state.gradient;
  const StepReport first = nlcg_step(state, obj, ls);
  REQUIRE(first.accepted);
  CHECK(first.steepest_descent);
  CHECK(first.slope == doctest::Approx(-g0.squaredNorm()));
  CHECK((state.x - (x0 - first.step * g0)).norm() < 1e-14);

  int accepted = 1;
  for (int it = 0; it < 400 && state.consecutive_failures < 2; ++it) {
    const StepReport r = nlcg_step(state, obj, ls);
    if (r.accepted) {
      ++accepted;
      CHECK(r.value_after <= r.value_before + ls.armijo_c1 * r.step * r.slope);
      CHECK(r.slope < 0.0);
    } else {
      CHECK(r.value_after == r.value_before);
    }
  }
  MESSAGE(accepted << " accepted steps, distance " << (state.x - x_star).norm());
  CHECK((state.x - x_star).norm() < 1e-6 * x_star.norm());
}

TEST_CASE("line search rejects unusable trial points") {
  Objective obj;
  obj.value = [](const Eigen::VectorXd&) -> double { throw NumericalError("unusable"); };
  obj.value_and_gradient = [](const Eigen::VectorXd& x) {
    return std::pair<double, Eigen::VectorXd>{x.squaredNorm(), 2.0 * x};
  };
  NlcgState state = NlcgState::start(obj, Eigen::VectorXd::Ones(3));
  const StepReport r = nlcg_step(state, obj, {});
  CHECK_FALSE(r.accepted);
  CHECK(r.backtracks == 20);
  CHECK(state.consecutive_failures == 1);
  CHECK(state.restart);
  CHECK(state.x == Eigen::VectorXd::Ones(3));
}

TEST_CASE("inversion configuration") {
  InversionConfig c;
  c.frequencies = {3.0};
  c.n_schedule = {10, 20, 30};
  CHECK(c.blocks().size() == 3);
  CHECK(c.blocks()[2].n_active == 30);
  c.frequencies = {2.0, 3.0};
  c.n_schedule = {10};
  CHECK(c.blocks().size() == 2);
  CHECK(c.blocks()[1].frequency == 3.0);
  c.n_schedule = {10, 20, 30};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n_schedule = {20, 10};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.n_schedule = {10, 20};
  CHECK_NOTHROW(c.validate());
  c.frequencies = {3.0, 2.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("zero iterations return the projected start model") {
  const Scenario sc = small_scenario(1, 5);
  InversionConfig c;
  c.frequencies = {3.0};
  c.n_schedule = {8};
  c.n_iter = 0;
  const InversionResult r = run_inversion(c, sc.data, sc.start);
  REQUIRE(r.basis);
  const ScalarField expected = reconstruct(project(sc.start.field(), r.basis, 8));
  CHECK((r.model.values() - expected.values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.history.records.empty());
  CHECK_FALSE(r.failure);
}

TEST_CASE("a start model that explains the data stays put") {
  const Scenario sc = small_scenario(1, 5);
  InversionConfig c;
  c.frequencies = {3.0};
  c.n_schedule = {6};
  c.n_iter = 5;
  c.n_iter = 0;
  const Model start = sc.start;
  const Model projected = run_inversion(c, sc.data, start).model;
  const FrequencyDataset data = generate_data(projected, sc.data.acquisition, {3.0});
  c.n_iter = 5;
  const InversionResult r = run_inversion(c, data, start);
  CHECK_FALSE(r.failure);
  for (const auto& rec : r.history.records) {
    CHECK(rec.misfit <= 1e-20);
  }
  CHECK(r.model.values() == projected.values());
}

TEST_CASE("end-to-end inversion reduces the misfit and is reproducible") {
  const Scenario sc = small_scenario(2, 12);
  InversionConfig c;
  c.frequencies = {3.0};
  c.n_schedule = {5, 10};
  c.n_iter = 8;
  const InversionResult r = run_inversion(c, sc.data, sc.start);
  REQUIRE_FALSE(r.failure);
  REQUIRE(r.history.records.size() == 16);
  CHECK(r.history.snapshots.size() == 2);
  const double initial = r.history.records.front().misfit_before;
  const double final_misfit = r.history.records.back().misfit;
  MESSAGE("misfit " << initial << " -> " << final_misfit);
  CHECK(final_misfit < 0.5 * initial);
  for (const auto& rec : r.history.records) {
    if (rec.accepted) {
      CHECK(rec.misfit <= rec.misfit_before + r.history.armijo_c1 * rec.step * rec.slope);
    }
  }
  CHECK(r.history.records[8].n_active == 10);
  CHECK(r.history.records[8].block == 2);

  const auto dir = testing::scratch_dir("inversion_history");
  r.history.write_csv(dir / "a.csv");
  run_inversion(c, sc.data, sc.start).history.write_csv(dir / "b.csv");
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a.rfind("block,iter,misfit,step,N,", 0) == 0);
}

TEST_CASE("nodal and refreshed-basis modes run") {
  const Scenario sc = small_scenario(2, 12);
  InversionConfig c;
  c.frequencies = {3.0, 4.0};
  c.n_schedule = {8};
  c.n_iter = 4;
  c.refresh_basis = true;
  const InversionResult refreshed = run_inversion(c, sc.data, sc.start);
  CHECK_FALSE(refreshed.failure);
  CHECK(refreshed.history.records.back().misfit < refreshed.history.records.front().misfit_before);
  CHECK(refreshed.basis->source_model_hash != field_hash(sc.start.field()));

  c.nodal_mode = true;
  const InversionResult nodal = run_inversion(c, sc.data, sc.start);
  CHECK_FALSE(nodal.failure);
  CHECK_FALSE(nodal.basis);
  CHECK(nodal.history.records.front().n_active == static_cast<int>(sc.grid.size()));
  CHECK(nodal.history.records.back().misfit < nodal.history.records.front().misfit_before);
}
