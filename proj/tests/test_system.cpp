#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "magflow/chars.hpp"
#include "magflow/families.hpp"
#include "magflow/sampling.hpp"
#include "magflow/system.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace magflow;

namespace {

Jet random_jet(Rng& rng, const FieldPoint& p) {
  Eigen::VectorXd dx(p.components()), dy(p.components());
  for (int i = 0; i < dx.size(); ++i) {
    dx[i] = rng.uniform(-1, 1);
    dy[i] = rng.uniform(-1, 1);
  }
  return Jet(p, std::move(dx), std::move(dy));
}

Jet constant_jet(const FieldPoint& p) {
  return Jet(p, Eigen::VectorXd::Zero(p.components()), Eigen::VectorXd::Zero(p.components()));
}

}  // namespace

TEST_CASE("Q_k vanishes on constant fields") {
  Rng rng(31);
  for (int n : {1, 2, 3}) {
    const Jet jet = constant_jet(support::random_hyperbolic(rng, n));
    for (int k = 0; k <= n; ++k) CHECK(std::abs(q_residual(jet, k)) == 0.0);
  }
}

TEST_CASE("Q_1 on the y-dependent degree-1 family is -i u0'/2") {
  N1Family fam;
  for (double y : {0.0, 0.13, 0.41, 0.77}) {
    const Jet jet = fam.jet(0.0, y);
    const double u0p = jet.dy[1];
    const Complex q1 = q_residual(jet, 1);
    CHECK(std::abs(q1 - Complex(0.0, -0.5 * u0p)) <= 1e-15 * (1.0 + std::abs(u0p)));
  }
}

TEST_CASE("Q_k matches the Fourier-coefficient quadrature oracle") {
  Rng rng(32);
  for (int n : {1, 2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Jet jet = random_jet(rng, support::random_hyperbolic(rng, n));
      for (int k = 0; k <= n; ++k) {
        const Complex got = q_residual(jet, k);
        const Complex want = oracle::q_coefficient_quadrature(jet, k);
        CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
      }
    }
  }
}

TEST_CASE("omega: trivial, family and squared-family values") {
  Rng rng(33);
  const Jet flat = constant_jet(support::random_hyperbolic(rng, 2));
  const OmegaResult r0 = omega(flat);
  CHECK(r0.omega == 0.0);
  CHECK(r0.consistency == 0.0);

  N1Family fam;
  N2SquaredFamily fam2{fam};
  for (double y : {0.05, 0.33, 0.6, 0.92}) {
    const Jet j1 = fam.jet(0.0, y);
    const OmegaResult r1 = omega(j1);
    CHECK(r1.omega == doctest::Approx(fam.omega(y)).epsilon(1e-13));
    CHECK(std::abs(r1.consistency) <= 1e-14);

    const Jet j2 = fam2.jet(0.0, y);
    const OmegaResult r2 = omega(j2);
    CHECK(r2.omega == doctest::Approx(fam.omega(y)).epsilon(1e-12));
    CHECK(std::abs(r2.consistency) <= 1e-13);
  }
}

TEST_CASE("quotient and divergence forms of omega agree on every jet") {
  Rng rng(34);
  for (int n : {1, 2, 3, 4}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Jet jet = random_jet(rng, support::random_hyperbolic(rng, n));
      const OmegaResult r = omega(jet);
      CHECK(std::abs(r.omega - r.omega_div) <= 1e-12 * (1.0 + std::abs(r.omega)));
    }
  }
}

TEST_CASE("system residual vanishes on constants and on the squared family") {
  Rng rng(35);
  const Jet flat = constant_jet(support::random_hyperbolic(rng, 2));
  CHECK(system_residual(flat).norm() == 0.0);

  N2SquaredFamily fam2{};
  for (double y : {0.07, 0.29, 0.55, 0.83}) {
    const Eigen::VectorXd r = system_residual(fam2.jet(0.0, y));
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("degree-1 system is Lambda_x = 0, (u_0)_x = 0 up to scalings") {
  Rng rng(36);
  const FieldPoint p = support::random_hyperbolic(rng, 1);
  const Jet jet = random_jet(rng, p);
  const Eigen::VectorXd r = system_residual(jet);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(jet.lambda_x()).epsilon(1e-13));
  CHECK(r[1] == doctest::Approx(0.5 * jet.dx[1]).epsilon(1e-13));
}

TEST_CASE("N=2 components reproduce the conservation-form equations") {
  Rng rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldPoint p = support::random_hyperbolic(rng, 2);
    const Jet jet = random_jet(rng, p);
    const Eigen::VectorXd r = system_residual(jet);

    const double lam = p.lambda, sq = std::sqrt(lam);
    const double u1 = p.u[1], v1 = p.v[1];
    const double lx = jet.lambda_x(), ly = jet.lambda_y();
    const double u0x = jet.dx[1], u0y = jet.dy[1];
    const double u1x = jet.dx[2], u1y = jet.dy[2];
    const double v1x = jet.dx[3], v1y = jet.dy[3];

    // (sqrt(L) u1)_x - (sqrt(L) v1)_y by the product rule
    const double row_a = sq * u1x + u1 * lx / (2 * sq) - sq * v1y - v1 * ly / (2 * sq);
    // (u1/sqrt(L))_x + (v1/sqrt(L))_y
    const double row_b =
        u1x / sq - u1 * lx / (2 * lam * sq) + v1y / sq - v1 * ly / (2 * lam * sq);

    const double scale = 1.0 + std::abs(row_a) + std::abs(row_b);
    CHECK(std::abs(r[0] - row_a) <= 1e-12 * scale);
    CHECK(std::abs(2.0 * r[3] - row_b) <= 1e-12 * scale);

    // the two u_0 rows, in f,g variables, match the Eq(6) components after
    // adding the multiple of the trace row that the display absorbs
    const double f = u1 / sq, g = v1 / sq;
    const double fx = u1x / sq - 0.5 * u1 * lx / (lam * sq);
    const double fy = u1y / sq - 0.5 * u1 * ly / (lam * sq);
    const double gx = v1x / sq - 0.5 * v1 * lx / (lam * sq);
    const double gy = v1y / sq - 0.5 * v1 * ly / (lam * sq);
    const double row_c = u0x + 2 * lx - 0.5 * g * (fy - gx);
    const double row_d = -u0y + 2 * ly + 0.5 * f * (fy - gx);
    CHECK(std::abs((r[1] + f * r[3]) - row_c) <= 1e-12 * (1 + std::abs(row_c)));
    CHECK(std::abs((r[2] + g * r[3]) - row_d) <= 1e-12 * (1 + std::abs(row_d)));
  }
}

TEST_CASE("the k = N member of the coupled equations is identically zero") {
  Rng rng(38);
  for (int n : {2, 3, 4}) {
    const Jet jet = random_jet(rng, support::random_hyperbolic(rng, n));
    const Complex qn = q_residual(jet, n);
    const Complex e = static_cast<double>(n) * qn * lambda_pow_half(jet.point.lambda, n) -
                      static_cast<double>(n) * qn * jet.a(n);
    CHECK(std::abs(e) <= 1e-14 * (1.0 + std::abs(qn)));
  }
}

TEST_CASE("matrices reproduce the residual exactly (linearity)") {
  Rng rng(39);
  for (int n : {1, 2, 3}) {
    for (int trial = 0; trial < 34; ++trial) {
      const FieldPoint p = support::random_hyperbolic(rng, n);
      const SystemMatrices m = build_matrices(p);
      const Jet jet = random_jet(rng, p);
      const Eigen::VectorXd direct = system_residual(jet);
      const Eigen::VectorXd viaAB = m.A * jet.dx + m.B * jet.dy;
      CHECK((direct - viaAB).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("N=2 transformed matrices match the closed-form display entrywise") {
  Rng rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldPoint p = support::random_hyperbolic(rng, 2);
    const double lam = p.lambda, sq = std::sqrt(lam);
    const double f = p.u[1] / sq, g = p.v[1] / sq;

    Eigen::Matrix4d a_ref, b_ref;
    a_ref << 0, 0, 1, 0,  //
        f, 0, lam, 0,     //
        2, 1, 0, 0.5 * g, //
        0, 0, 0, -0.5 * f;
    b_ref << 0, 0, 0, 1,   //
        -g, 0, 0, -lam,    //
        0, 0, -0.5 * g, 0, //
        2, -1, 0.5 * f, 0;

    const SystemMatrices got = n2_transformed_matrices(p);
    CHECK((got.A - a_ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + lam));
    CHECK((got.B - b_ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + lam));
  }
}

TEST_CASE("generalized eigenvalues of (A,B) are the characteristic slopes") {
  Rng rng(41);
  SampleOptions opts;
  opts.min_cos = 2e-3;
  for (int n : {1, 2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const FieldPoint p = sample_hyperbolic_point(rng, n, opts);
      const CharData cd = char_data(p);
      const SystemMatrices m = build_matrices(p);

      Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(m.B, m.A);
      REQUIRE(ges.info() == Eigen::Success);
      std::vector<double> eig;
      for (int i = 0; i < ges.alphas().size(); ++i) {
        const Complex lam = ges.alphas()[i] / ges.betas()[i];
        CHECK(std::abs(lam.imag()) <= 1e-6 * (1.0 + std::abs(lam)));
        eig.push_back(lam.real());
      }
      std::vector<double> speeds(cd.speeds.data(), cd.speeds.data() + cd.speeds.size());
      std::sort(eig.begin(), eig.end());
      std::sort(speeds.begin(), speeds.end());
      REQUIRE(eig.size() == speeds.size());
      for (size_t i = 0; i < eig.size(); ++i)
        CHECK(std::abs(eig[i] - speeds[i]) <= 1e-6 * (1.0 + std::abs(speeds[i])));
    }
  }
}

TEST_CASE("geodesic matrix: closed form at n = 2 and the borderline case") {
  Eigen::Vector3d a(0.4, 0.7, 1.0);  // a_0, a_1, a_2 = 1
  const GeodesicMatrixResult r = geodesic_matrix(a);
  Eigen::Matrix2d want;
  want << 0, 0.7, 0.7, 2 - 2 * 0.4;
  CHECK((r.matrix - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.classification == EigenClassification::Hyperbolic);

  Eigen::Vector3d b(1.0, 0.0, 1.0);  // both eigenvalues zero
  CHECK(geodesic_matrix(b).classification == EigenClassification::Borderline);
}

TEST_CASE("geodesic matrix eigenvalues satisfy the characteristic equation") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(5);  // n = 4
    for (int i = 0; i < 4; ++i) a[i] = rng.uniform(-1, 1);
    a[4] = 1.0;
    const GeodesicMatrixResult r = geodesic_matrix(a);
    for (int i = 0; i < r.eigenvalues.size(); ++i) {
      const Eigen::MatrixXcd shifted =
          r.matrix.cast<Complex>() - r.eigenvalues[i] * Eigen::MatrixXcd::Identity(4, 4);
      CHECK(std::abs(shifted.determinant()) <= 1e-10 * std::pow(1.0 + r.matrix.norm(), 4));
    }
  }
}
