#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "eigenwave/diffusion.hpp"
#include "eigenwave/errors.hpp"
#include "test_support.hpp"

using namespace eigenwave;

namespace {

constexpr std::array kAllKinds{EtaKind::Eta1, EtaKind::Eta2, EtaKind::Eta3, EtaKind::Eta4, EtaKind::Eta5,
                               EtaKind::Eta6, EtaKind::Eta7, EtaKind::Eta8, EtaKind::Eta9};

/// Dense full-grid operator; boundary rows are identity.
Eigen::MatrixXd dense_diffusion(const ScalarField& eta) {
  const Grid2D& g = eta.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int iz = 0; iz < g.nz(); ++iz) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const auto r = static_cast<Eigen::Index>(g.index(ix, iz));
      if (g.on_boundary(ix, iz)) {
        a(r, r) = 1.0;
        continue;
      }
      const double e = eta(ix, iz);
      const double we = 0.5 * (e + eta(ix + 1, iz)) / (g.hx() * g.hx());
      const double ww = 0.5 * (e + eta(ix - 1, iz)) / (g.hx() * g.hx());
      const double wn = 0.5 * (e + eta(ix, iz - 1)) / (g.hz() * g.hz());
      const double ws = 0.5 * (e + eta(ix, iz + 1)) / (g.hz() * g.hz());
      a(r, r) = we + ww + wn + ws;
      a(r, static_cast<Eigen::Index>(g.index(ix + 1, iz))) = -we;
      a(r, static_cast<Eigen::Index>(g.index(ix - 1, iz))) = -ww;
      a(r, static_cast<Eigen::Index>(g.index(ix, iz - 1))) = -wn;
      a(r, static_cast<Eigen::Index>(g.index(ix, iz + 1))) = -ws;
    }
  }
  return a;
}

GradientNorms norms_from(const Grid2D& g, double n1) {
  GradientNorms norms;
  norms.magnitude = ScalarField(g, n1);
  norms.ngrad1 = ScalarField(g, n1);
  norms.ngrad2 = ScalarField(g, n1 * n1);
  norms.gamma1 = 1.0;
  norms.gamma2 = 1.0;
  return norms;
}

double eta_at(EtaKind kind, double beta, double n1) {
  const Grid2D g(3, 3, 1.0, 1.0);
  return eval_eta({kind, beta}, norms_from(g, n1)).values()[0];
}

} // namespace

TEST_CASE("eta kinds parse and print") {
  CHECK(parse_eta_kind("eta3") == EtaKind::Eta3);
  CHECK(parse_eta_kind("ETA9") == EtaKind::Eta9);
  CHECK(parse_eta_kind("5") == EtaKind::Eta5);
  CHECK(to_string(EtaKind::Eta6) == "eta6");
  CHECK_THROWS_AS(parse_eta_kind("eta10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_eta_kind("tv"), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionSpec({EtaKind::Eta1, 0.0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(DiffusionSpec({EtaKind::Eta8, 0.0}).validate());
}

TEST_CASE("gradient norms") {
  SUBCASE("constant field") {
    const Grid2D g(6, 5, 10.0, 10.0);
    const GradientNorms n = gradient_norms(ScalarField(g, 3.0));
    CHECK(n.constant_model);
    CHECK(n.gamma1 == 0.0);
    CHECK(n.ngrad1.values().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("linear field has constant gradient") {
    const Grid2D g(8, 6, 2.0, 5.0);
    ScalarField m(g);
    for (int iz = 0; iz < g.nz(); ++iz) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        m(ix, iz) = 3.0 * g.x(ix) - 4.0 * g.z(iz);
      }
    }
    const GradientNorms n = gradient_norms(m);
    CHECK(n.gamma1 == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(n.gamma2 == doctest::Approx(25.0).epsilon(1e-12));
    CHECK((n.magnitude.values().array() - 5.0).abs().maxCoeff() < 1e-12);
    CHECK((n.ngrad1.values().array() - 1.0).abs().maxCoeff() < 1e-12);
  }

  SUBCASE("normalization and argmax") {
    const Grid2D g(8, 8, 1.0, 1.0);
    const GradientNorms n = gradient_norms(testing::random_field(g, 3));
    Eigen::Index arg = 0;
    n.magnitude.values().maxCoeff(&arg);
    CHECK(n.ngrad1.values()[arg] == 1.0);
    CHECK(n.ngrad2.values()[arg] == 1.0);
    CHECK(n.ngrad1.values().minCoeff() >= 0.0);
    CHECK(n.ngrad1.values().maxCoeff() == 1.0);
    const Eigen::VectorXd sq = n.ngrad1.values().array().square();
    CHECK((sq - n.ngrad2.values()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("eta closed forms") {
  CHECK(eta_at(EtaKind::Eta9, 1.0, 0.7) == 1.0);
  CHECK(eta_at(EtaKind::Eta1, 2.0, 0.0) == 1.0);
  CHECK(eta_at(EtaKind::Eta1, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(eta_at(EtaKind::Eta2, 0.5, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(eta_at(EtaKind::Eta3, 0.25, 0.0) == doctest::Approx(2.0 / 0.25));
  CHECK(eta_at(EtaKind::Eta3, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(eta_at(EtaKind::Eta4, 2.0, 0.5) == doctest::Approx(std::tanh(0.25) / 1.0));
  CHECK(eta_at(EtaKind::Eta4, 2.0, 0.0) == 1.0);
  CHECK(eta_at(EtaKind::Eta5, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(eta_at(EtaKind::Eta5, 1.0, std::sqrt(3.0)) == doctest::Approx(0.5));
  CHECK(eta_at(EtaKind::Eta6, 1.0, 1.0) == doctest::Approx(0.25));
  CHECK(eta_at(EtaKind::Eta7, 2.0, std::sqrt(2.0)) == doctest::Approx(0.5 / std::exp(1.0)));
  CHECK(eta_at(EtaKind::Eta8, 1.0, 0.25) == doctest::Approx(4.0));
  CHECK(eta_at(EtaKind::Eta8, 1.0, 0.0) == 1.0);
  CHECK(eta_at(EtaKind::Eta8, 1.0, 1e-13) == 1.0);
}

TEST_CASE("eta is positive and finite for all kinds and beta limits") {
  const Grid2D g(12, 10, 10.0, 10.0);
  const GradientNorms n = gradient_norms(testing::random_field(g, 17, 1e-7, 5e-7));
  for (EtaKind kind : kAllKinds) {
    for (double beta : {1e-7, 1e-3, 1.0, 1e3, 1e6}) {
      const ScalarField eta = eval_eta({kind, beta}, n);
      CAPTURE(to_string(kind));
      CAPTURE(beta);
      CHECK(eta.values().allFinite());
      CHECK(eta.values().minCoeff() > 0.0);
      CHECK(eta.values().minCoeff() >= kEtaRelativeFloor * eta.values().maxCoeff() * (1.0 - 1e-15));
    }
  }
  // exp(-n2 / beta) underflows for every node: only the ratios survive.
  const ScalarField tiny = eval_eta({EtaKind::Eta2, 1e-7}, n);
  Eigen::Index arg = 0;
  n.ngrad2.values().minCoeff(&arg);
  CHECK(tiny.values()[arg] == 1.0);
  const double ratio = std::exp(-(n.ngrad2.values()[0] - n.ngrad2.values()[arg]) / 1e-7);
  CHECK(tiny.values()[0] == doctest::Approx(std::max(ratio, kEtaRelativeFloor)));
  const GradientNorms flat = gradient_norms(ScalarField(g, 1e-7));
  for (EtaKind kind : kAllKinds) {
    CHECK(eval_eta({kind, 0.1}, flat).values().allFinite());
  }
}

TEST_CASE("diffusion assembly") {
  SUBCASE("unit coefficient gives the 5-point Laplacian") {
    const Grid2D g(6, 5, 2.0, 3.0);
    const DiffusionOperator op = assemble_diffusion(ScalarField(g, 1.0));
    CHECK(op.interior.rows() == 4 * 3);
    CHECK(op.boundary_nodes.size() == g.size() - 12);
    CHECK(op.interior.coeff(5, 5) == doctest::Approx(2.0 / 4.0 + 2.0 / 9.0));
    CHECK(op.interior.coeff(5, 6) == doctest::Approx(-1.0 / 4.0));
    CHECK(op.interior.coeff(5, 1) == doctest::Approx(-1.0 / 9.0));
  }

  SUBCASE("symmetry with a random coefficient") {
    const Grid2D g(9, 9, 1.0, 1.5);
    const DiffusionOperator op = assemble_diffusion(testing::random_field(g, 9, 0.1, 3.0));
    const Eigen::MatrixXd a(op.interior);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().minCoeff() > 0.0);
  }

  SUBCASE("matches a dense full-grid reference") {
    const Grid2D g(7, 7, 1.0, 2.0);
    const ScalarField eta = testing::random_field(g, 21, 0.5, 2.0);
    const DiffusionOperator op = assemble_diffusion(eta);
    const Eigen::MatrixXd dense = dense_diffusion(eta);
    for (std::size_t r = 0; r < op.interior_nodes.size(); ++r) {
      const auto gr = static_cast<Eigen::Index>(op.interior_nodes[r]);
      for (std::size_t c = 0; c < op.interior_nodes.size(); ++c) {
        const auto gc = static_cast<Eigen::Index>(op.interior_nodes[c]);
        CHECK(op.interior.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
              doctest::Approx(dense(gr, gc)).epsilon(1e-14));
      }
      for (std::size_t c = 0; c < op.boundary_nodes.size(); ++c) {
        const auto gc = static_cast<Eigen::Index>(op.boundary_nodes[c]);
        CHECK(op.coupling.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
              doctest::Approx(dense(gr, gc)).epsilon(1e-14));
      }
    }
  }

  CHECK_THROWS_AS(assemble_diffusion(ScalarField(Grid2D(4, 4, 1.0, 1.0), 0.0)), std::invalid_argument);
}

TEST_CASE("lift") {
  SUBCASE("constant boundary data gives a constant lift") {
    const Grid2D g(10, 8, 5.0, 5.0);
    ScalarField m = testing::random_field(g, 2);
    for (int iz = 0; iz < g.nz(); ++iz) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        if (g.on_boundary(ix, iz)) {
          m(ix, iz) = 4e-7;
        }
      }
    }
    const ScalarField m0 = lift_m0(m, testing::random_field(g, 8, 0.2, 2.0));
    CHECK((m0.values().array() - 4e-7).abs().maxCoeff() < 1e-18);
  }

  SUBCASE("discrete harmonic function is reproduced with unit coefficient") {
    const Grid2D g(12, 12, 1.0, 1.0);
    ScalarField exact(g);
    for (int iz = 0; iz < g.nz(); ++iz) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        exact(ix, iz) = g.x(ix) * g.x(ix) - g.z(iz) * g.z(iz);
      }
    }
    ScalarField m = exact;
    for (int iz = 1; iz < g.nz() - 1; ++iz) {
      for (int ix = 1; ix < g.nx() - 1; ++ix) {
        m(ix, iz) = 0.0;
      }
    }
    const ScalarField m0 = lift_m0(m, ScalarField(g, 1.0));
    CHECK((m0.values() - exact.values()).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("matches a dense solve with random coefficient") {
    const Grid2D g(15, 15, 1.0, 1.0);
    const ScalarField eta = testing::random_field(g, 31, 0.05, 5.0);
    const ScalarField m = testing::random_field(g, 32, 1.0, 2.0);
    const Eigen::MatrixXd a = dense_diffusion(eta);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    for (int iz = 0; iz < g.nz(); ++iz) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        if (g.on_boundary(ix, iz)) {
          rhs[static_cast<Eigen::Index>(g.index(ix, iz))] = m(ix, iz);
        }
      }
    }
    const Eigen::VectorXd expected = a.fullPivLu().solve(rhs);
    const ScalarField m0 = lift_m0(m, eta);
    CHECK((m0.values() - expected).norm() <= 1e-8 * expected.norm());
  }

  CHECK_THROWS_AS(lift_m0(ScalarField(Grid2D(5, 5, 1.0, 1.0)), ScalarField(Grid2D(5, 6, 1.0, 1.0), 1.0)),
                  GridMismatch);
}
