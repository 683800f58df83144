#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "magflow/semiham.hpp"
#include "test_support.hpp"

using namespace magflow;

namespace {

DiagonalModel synthetic(int n, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f) {
  DiagonalModel m;
  m.n = n;
  m.speeds = std::move(f);
  return m;
}

// speeds lambda_k = r_k: Gamma vanishes identically
DiagonalModel identity_model(int n) {
  return synthetic(n, [](const Eigen::VectorXd& r) { return r; });
}

// lambda_k = r_k + c * sum(r): semi-Hamiltonian with nonzero Gamma
DiagonalModel shifted_sum_model(int n, double c) {
  return synthetic(n, [c](const Eigen::VectorXd& r) {
    return Eigen::VectorXd(r.array() + c * r.sum());
  });
}

// lambda = (r2 r3, r1, 2 r1): breaks the symmetry d_j Gamma^k_{ki} = d_i Gamma^k_{kj}
DiagonalModel broken_model() {
  return synthetic(3, [](const Eigen::VectorXd& r) {
    return Eigen::Vector3d(r[1] * r[2], r[0], 2.0 * r[0]);
  });
}

}  // namespace

TEST_CASE("chart inversion: fixed point and quadratic convergence") {
  Rng rng(81);
  for (int trial = 0; trial < 5; ++trial) {
    const FieldPoint p = support::random_chart_point(rng);
    const DiagonalChart chart(p);

    const FieldPoint back = chart.mu_from_r(chart.base_r());
    CHECK((back.as_vector() - p.as_vector()).cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::VectorXd r = chart.base_r();
    for (int k = 0; k < r.size(); ++k) r[k] += rng.uniform(-1e-3, 1e-3);
    const FieldPoint moved = chart.mu_from_r(r);
    const CharData cd = char_data(moved);
    CHECK((cd.invariants - r).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("chart inversion diverges for unreachable targets") {
  Rng rng(82);
  const FieldPoint p = support::random_chart_point(rng);
  const DiagonalChart chart(p);
  Eigen::VectorXd r = chart.base_r();
  r[1] = r[0];  // adjacent extrema forced to share a value
  CHECK_THROWS_AS((void)chart.mu_from_r(r), NumericalError);
}

TEST_CASE("speeds at the chart center match the characteristic data") {
  Rng rng(83);
  const FieldPoint p = support::random_chart_point(rng);
  const DiagonalChart chart(p);
  const Eigen::VectorXd lam = chart.lambda_of_r(chart.base_r());
  CHECK((lam - chart.base_speeds()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("flat degree-2 point has vertical speeds and is rejected") {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2), v = Eigen::VectorXd::Zero(2);
  u[0] = 0.2;
  CHECK_THROWS_AS(DiagonalChart(FieldPoint(2, 1.0, u, v)), NearVerticalCritical);
}

TEST_CASE("speed derivatives are Richardson-consistent across the chart") {
  Rng rng(84);
  const FieldPoint p = support::random_chart_point(rng);
  const DiagonalChart chart(p);
  const DiagonalModel m = chart.model();
  const double h = 0.1 * chart.radius();

  for (int i = 0; i < m.n; ++i) {
    Eigen::VectorXd rp = chart.base_r(), rm = chart.base_r();
    rp[i] += h;
    rm[i] -= h;
    const Eigen::VectorXd d1 = (m.speeds(rp) - m.speeds(rm)) / (2 * h);
    rp[i] = chart.base_r()[i] + 0.5 * h;
    rm[i] = chart.base_r()[i] - 0.5 * h;
    const Eigen::VectorXd d2 = (m.speeds(rp) - m.speeds(rm)) / h;
    CHECK((d1 - d2).cwiseAbs().maxCoeff() <= 1e-2 * (1.0 + d1.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("gamma: zero for constant and decoupled speeds") {
  const DiagonalModel constant =
      synthetic(3, [](const Eigen::VectorXd&) { return Eigen::Vector3d(1.0, 2.0, 3.0); });
  const Eigen::Vector3d r(0.1, 0.5, 0.9);
  CHECK(std::abs(gamma_coeff(constant, r, 1, 0, 1e-4)) <= 1e-12);
  CHECK(std::abs(gamma_coeff(identity_model(3), r, 1, 0, 1e-4)) <= 1e-12);
}

TEST_CASE("gamma on real charts is stable under step halving") {
  Rng rng(85);
  const FieldPoint p = support::random_chart_point(rng);
  const DiagonalChart chart(p);
  const DiagonalModel m = chart.model();
  const double h = 0.2 * chart.radius();
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      if (i == k) continue;
      const double g1 = gamma_coeff(m, chart.base_r(), i, k, h);
      const double g2 = gamma_coeff(m, chart.base_r(), i, k, 0.5 * h);
      CHECK(std::abs(g1 - g2) <= 1e-2 * (1.0 + std::abs(g2)));
    }
}

TEST_CASE("semiham residual vanishes for synthetic diagonal systems") {
  const Eigen::Vector3d r(0.2, 0.9, 1.7);
  for (const DiagonalModel& m : {identity_model(3), shifted_sum_model(3, 0.3)}) {
    const SemihamResidual res = semiham_residual(m, r, 0, 1, 2, 1e-3, 1e-2);
    CHECK(res.value <= res.floor);
    CHECK(res.value <= 1e-8);
  }
}

TEST_CASE("semiham residual on real charts stays under the noise floor") {
  Rng rng(86);
  for (int trial = 0; trial < 3; ++trial) {
    const FieldPoint p = support::random_chart_point(rng);
    const DiagonalChart chart(p);
    const DiagonalModel m = chart.model();
    const double h1 = 0.1 * chart.radius(), h2 = 0.2 * chart.radius();
    double chart_scale = 0.0, max_floor = 0.0;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          if (i == k || j == k) continue;
          const SemihamResidual res = semiham_residual(m, chart.base_r(), i, j, k, h1, h2);
          CHECK(res.value <= res.floor);
          chart_scale = std::max(chart_scale, res.scale);
          max_floor = std::max(max_floor, res.floor);
        }
    CHECK(max_floor <= 1e-4 * chart_scale);
  }
}

TEST_CASE("broken speeds exceed their noise floor by orders (negative control)") {
  const Eigen::Vector3d r(1.0, 0.3, 0.4);
  const SemihamResidual res = semiham_residual(broken_model(), r, 1, 2, 0, 1e-4, 1e-3);
  CHECK(res.value >= 100.0 * res.floor);
  // closed form: d3 Gamma^1_{12} = r1/(r1 - r2 r3)^2, d2 Gamma^1_{13} = 2 r1/(2 r1 - r2 r3)^2
  const double want = std::abs(1.0 / (0.88 * 0.88) - 2.0 / (1.88 * 1.88));
  CHECK(res.value == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("lame coefficients: identity speeds give H = 1 on any path") {
  const DiagonalModel m = identity_model(3);
  std::vector<Eigen::VectorXd> path;
  path.push_back(Eigen::Vector3d(0.1, 0.5, 0.9));
  path.push_back(Eigen::Vector3d(0.2, 0.5, 0.9));
  path.push_back(Eigen::Vector3d(0.2, 0.7, 0.9));
  CHECK(lame_integrate(m, path, 2, 1e-4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lame two-path agreement on real charts (compatibility)") {
  Rng rng(87);
  const FieldPoint p = support::random_chart_point(rng);
  const DiagonalChart chart(p);
  const DiagonalModel m = chart.model();
  const double d = 0.35 * chart.radius();
  const double h = 0.05 * chart.radius();

  const Eigen::VectorXd r0 = chart.base_r();
  // move in coordinates 1 and 2, integrate H_0 along the two staircases
  Eigen::VectorXd ra = r0, rb = r0, r1 = r0;
  ra[1] += d;
  rb[2] += d;
  r1[1] += d;
  r1[2] += d;
  const double ha = lame_integrate(m, {r0, ra, r1}, 0, h);
  const double hb = lame_integrate(m, {r0, rb, r1}, 0, h);
  CHECK(std::abs(ha - hb) <= 1e-3 * std::abs(hb));
}

TEST_CASE("lame two-path disagreement for broken speeds (negative control)") {
  const DiagonalModel m = broken_model();
  const Eigen::Vector3d r0(1.0, 0.3, 0.4);
  const double d = 0.35;
  Eigen::VectorXd ra = r0, rb = r0, r1 = r0;
  ra[1] += d;
  rb[2] += d;
  r1[1] += d;
  r1[2] += d;
  const double ha = lame_integrate(m, {r0, ra, r1}, 0, 1e-4);
  const double hb = lame_integrate(m, {r0, rb, r1}, 0, 1e-4);
  CHECK(std::abs(ha - hb) >= 1e-2 * std::abs(hb));
}

TEST_CASE("the N=2 gradient-pair pattern holds with the shared density") {
  Rng rng(88);
  std::vector<FieldPoint> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(support::random_hyperbolic(rng, 2));
  const PtPatternReport rep = pt_pattern_check(pts);
  CHECK(rep.max_residual_eq10 <= 1e-10);
  CHECK(rep.max_residual_eq11 <= 1e-10);
  CHECK(rep.shared_identity <= 1e-12);
  CHECK(rep.control_residual >= 1e-3);
  CHECK(rep.pass);
  CHECK(rep.conclusion == "Egorov structure present (N=2)");
}
