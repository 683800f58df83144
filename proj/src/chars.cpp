#include "magflow/chars.hpp"

#include <Eigen/LU>

#include <cmath>

namespace magflow {

CharData char_data(const FieldPoint& point, double tol_vertical) {
  const TrigPoly f = trig_poly(point);
  if (classify(f) != Hyperbolicity::StrictlyHyperbolic)
    throw NotHyperbolic("char_data requires a strictly hyperbolic point");
  const CriticalSet cs = critical_points(f);

  CharData cd;
  cd.N = point.N;
  cd.angles = cs.angles;
  cd.points = cs.points;
  cd.kinds = cs.kinds;
  const int m = cs.size();
  cd.invariants.resize(m);
  cd.speeds.setZero(m);
  cd.speed_valid.assign(m, false);
  for (int k = 0; k < m; ++k) {
    cd.invariants[k] = eval(f, cs.angles[k]);
    if (std::abs(std::cos(cs.angles[k])) > tol_vertical) {
      cd.speeds[k] = std::tan(cs.angles[k]);
      cd.speed_valid[k] = true;
    }
  }
  const double vscale = std::max(1.0, coeff_scale(f));
  for (int i = 0; i < m && !cd.value_collision; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(cd.invariants[i] - cd.invariants[j]) <= 1e-9 * vscale) {
        cd.value_collision = true;
        break;
      }
  return cd;
}

Eigen::VectorXd tracked_invariants(const FieldPoint& point, const Eigen::VectorXd& seed_angles) {
  const TrigPoly f = trig_poly(point);
  Eigen::VectorXd r(seed_angles.size());
  for (int k = 0; k < seed_angles.size(); ++k)
    r[k] = eval(f, refine_critical_angle(f, seed_angles[k]));
  return r;
}

Eigen::MatrixXd invariant_gradients(const FieldPoint& point) {
  const CharData cd = char_data(point);
  const int n = point.N, m = 2 * n;
  Eigen::MatrixXd g(m, m);
  const double dan = 0.5 * n * lambda_pow_half(point.lambda, n - 2);  // d a_N / d Lambda
  for (int k = 0; k < m; ++k) {
    const double phi = cd.angles[k];
    g(k, 0) = dan * 2.0 * std::cos(n * phi);
    g(k, 1) = 1.0;  // d/du_0
    for (int j = 1; j < n; ++j) {
      g(k, 2 * j) = 2.0 * std::cos(j * phi);
      g(k, 2 * j + 1) = -2.0 * std::sin(j * phi);
    }
  }
  return g;
}

Eigen::MatrixXd invariant_gradients_fd(const FieldPoint& point, double h) {
  const CharData cd = char_data(point);
  const int m = 2 * point.N;
  const Eigen::VectorXd base = point.as_vector();
  Eigen::MatrixXd g(m, m);
  for (int s = 0; s < m; ++s) {
    const double step = h * (1.0 + std::abs(base[s]));
    Eigen::VectorXd up = base, dn = base;
    up[s] += step;
    dn[s] -= step;
    const Eigen::VectorXd rp = tracked_invariants(FieldPoint::from_vector(point.N, up), cd.angles);
    const Eigen::VectorXd rm = tracked_invariants(FieldPoint::from_vector(point.N, dn), cd.angles);
    g.col(s) = (rp - rm) / (2.0 * step);
  }
  return g;
}

JacobianIdentity jacobian_complex(const FieldPoint& point) {
  const CharData cd = char_data(point);
  const int n = point.N, m = 2 * n;

  JacobianIdentity out;
  out.m.resize(m, m);
  for (int k = 0; k < m; ++k) {
    const Complex x = cd.points[k];
    out.m(k, 0) = std::pow(x, n) + std::pow(x, -n);
    for (int s = 1; s < m; ++s) out.m(k, s) = std::pow(x, n - s);
  }
  out.det_m = out.m.determinant();

  Eigen::MatrixXcd vand(m, m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j) vand(k, j) = std::pow(cd.points[k], m - 1 - j);
  const Complex v = vand.determinant();
  out.rhs = (n % 2 == 1 ? 2.0 : -2.0) * v;  // (-1)^{N+1} * 2 V

  double prod = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < i; ++j) prod *= std::abs(cd.points[i] - cd.points[j]);
  out.modulus_rhs = 2.0 * prod;
  return out;
}

namespace {

// Critical values of the point with component w = Lambda^{N/2} substituted,
// branch-tracked from the given seeds; shared by jacobian_real.
Eigen::VectorXd invariants_in_sqrt_vars(int n, const Eigen::VectorXd& rho,
                                        const Eigen::VectorXd& seeds) {
  const double w = rho[0];
  if (!(w > 0)) throw StepTooLarge("Lambda^{N/2} stepped out of the positive cone");
  Eigen::VectorXd comps(2 * n);
  comps[0] = std::pow(w, 2.0 / n);
  comps[1] = rho[1];
  for (int k = 1; k < n; ++k) {
    comps[2 * k] = rho[1 + k];
    comps[2 * k + 1] = rho[n + k];
  }
  const FieldPoint p = FieldPoint::from_vector(n, comps);
  if (classify(trig_poly(p)) != Hyperbolicity::StrictlyHyperbolic)
    throw StepTooLarge("finite-difference stencil left the hyperbolic region");
  return tracked_invariants(p, seeds);
}

}  // namespace

double jacobian_real(const FieldPoint& point, double h) {
  const CharData cd = char_data(point);
  const int n = point.N, m = 2 * n;

  // rho = (Lambda^{N/2}, u_0, u_1..u_{N-1}, v_1..v_{N-1})
  Eigen::VectorXd rho(m);
  rho[0] = lambda_pow_half(point.lambda, n);
  rho[1] = point.u[0];
  for (int k = 1; k < n; ++k) {
    rho[1 + k] = point.u[k];
    rho[n + k] = point.v[k];
  }

  Eigen::MatrixXd jac(m, m);
  for (int s = 0; s < m; ++s) {
    const double step = h * (1.0 + std::abs(rho[s]));
    Eigen::VectorXd up = rho, dn = rho;
    up[s] += step;
    dn[s] -= step;
    jac.col(s) = (invariants_in_sqrt_vars(n, up, cd.angles) -
                  invariants_in_sqrt_vars(n, dn, cd.angles)) /
                 (2.0 * step);
  }
  return jac.determinant();
}

double advection_check(const Jet& jet) {
  const FieldPoint& point = jet.point;
  const CharData cd = char_data(point);
  for (size_t k = 0; k < cd.speed_valid.size(); ++k)
    if (!cd.speed_valid[k])
      throw NearVerticalCritical("advection_check requires all characteristic speeds valid");

  const Eigen::MatrixXd grads = invariant_gradients_fd(point);
  const Eigen::MatrixXd kernel = solution_kernel(build_matrices(point));
  const int m = 2 * point.N;

  double worst = 0.0;
  for (int b = 0; b < kernel.cols(); ++b) {
    const Eigen::VectorXd xi = kernel.col(b).head(m);
    const Eigen::VectorXd eta = kernel.col(b).tail(m);
    for (int k = 0; k < m; ++k) {
      const double adv = grads.row(k).dot(xi) + cd.speeds[k] * grads.row(k).dot(eta);
      worst = std::max(worst, std::abs(adv));
    }
  }
  return worst;
}

}  // namespace magflow
