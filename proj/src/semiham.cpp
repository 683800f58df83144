#include "magflow/semiham.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace magflow {

DiagonalChart::DiagonalChart(const FieldPoint& base, double tol_vertical)
    : base_(base), tol_vertical_(tol_vertical) {
  const CharData cd = char_data(base, tol_vertical);
  for (size_t k = 0; k < cd.speed_valid.size(); ++k)
    if (!cd.speed_valid[k])
      throw NearVerticalCritical("chart rejected: vertical characteristic speed at base point");
  base_angles_ = cd.angles;
  base_r_ = cd.invariants;
  base_speeds_ = cd.speeds;
  kinds_ = cd.kinds;

  const int m = 2 * base.N;
  double speed_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      speed_gap = std::min(speed_gap, std::abs(base_speeds_[i] - base_speeds_[j]));
  double value_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    value_gap = std::min(value_gap, std::abs(base_r_[i] - base_r_[(i + 1) % m]));
  if (!(speed_gap > 0)) throw SpeedCollision("chart rejected: coinciding characteristic speeds");
  radius_ = 0.1 * std::min(speed_gap, value_gap);
}

DiagonalChart::Inverted DiagonalChart::invert(const Eigen::VectorXd& r, bool fixed_count) const {
  const int n = base_.N, m = 2 * n;
  if (r.size() != m) throw ValidationError("chart expects 2N Riemann coordinates");

  Eigen::VectorXd comps = base_.as_vector();
  Eigen::VectorXd angles = base_angles_;
  const double rtol = 5e-14 * (1.0 + r.cwiseAbs().maxCoeff());
  const double rtol_accept = 1e-10 * (1.0 + r.cwiseAbs().maxCoeff());
  const int max_iters = fixed_count ? 8 : 60;
  double best = std::numeric_limits<double>::infinity();
  double rnorm = best;
  int performed = 0;

  for (int it = 0; it < max_iters; ++it) {
    if (!(comps[0] > 0)) throw NewtonDivergence("chart Newton left the Lambda > 0 cone");
    const FieldPoint p = FieldPoint::from_vector(n, comps);
    const TrigPoly f = trig_poly(p);

    Eigen::VectorXd cur(m);
    Eigen::MatrixXd jac(m, m);
    const double dan = 0.5 * n * lambda_pow_half(p.lambda, n - 2);
    for (int k = 0; k < m; ++k) {
      double phi = angles[k];
      if (fixed_count) {
        // fixed three-step angle refinement, smooth in the inputs
        for (int s = 0; s < 3; ++s) {
          const double dg = eval_d2phi(f, phi);
          if (dg == 0.0) throw NewtonDivergence("chart Newton lost a critical branch");
          phi -= eval_dphi(f, phi) / dg;
        }
      } else {
        try {
          phi = refine_critical_angle(f, phi);
        } catch (const RootFindingFailure&) {
          throw NewtonDivergence("chart Newton lost a critical branch");
        }
      }
      const double d2 = eval_d2phi(f, phi);
      if ((kinds_[k] == CriticalKind::Maximum && d2 >= 0) ||
          (kinds_[k] == CriticalKind::Minimum && d2 <= 0))
        throw NewtonDivergence("chart Newton lost hyperbolicity");
      angles[k] = phi;
      cur[k] = eval(f, phi);
      jac(k, 0) = dan * 2.0 * std::cos(n * phi);
      jac(k, 1) = 1.0;
      for (int j = 1; j < n; ++j) {
        jac(k, 2 * j) = 2.0 * std::cos(j * phi);
        jac(k, 2 * j + 1) = -2.0 * std::sin(j * phi);
      }
    }

    const Eigen::VectorXd res = r - cur;
    rnorm = res.cwiseAbs().maxCoeff();
    performed = it + 1;
    if (!fixed_count) {
      const bool stalled = rnorm > 0.7 * best && rnorm <= rtol_accept;
      best = std::min(best, rnorm);
      if (rnorm <= rtol || stalled) break;
      if (it + 1 == max_iters) throw NewtonDivergence("chart Newton exceeded 60 iterations");
    } else if (it + 1 == max_iters) {
      break;  // keep the returned angles aligned with the evaluated point
    }
    const Eigen::VectorXd step = jac.partialPivLu().solve(res);
    if (!step.allFinite() || step.cwiseAbs().maxCoeff() > 10.0 * (1.0 + comps.cwiseAbs().maxCoeff()))
      throw NewtonDivergence("chart Newton step diverged");
    comps += step;
  }
  if (fixed_count && !(rnorm <= rtol_accept))
    throw NewtonDivergence("chart Newton did not reach tolerance in the fixed iteration budget");

  // Branch ordering must survive the walk (indices keep their identity).
  for (int k = 0; k < m; ++k) {
    const double next = angles[(k + 1) % m] + (k + 1 == m ? 2.0 * std::numbers::pi : 0.0);
    if (next <= angles[k]) throw BranchCrossing("critical branches reordered inside chart");
  }
  return {FieldPoint::from_vector(n, comps), angles, performed};
}

FieldPoint DiagonalChart::mu_from_r(const Eigen::VectorXd& r, int* iterations) const {
  const Inverted inv = invert(r, /*fixed_count=*/false);
  if (iterations != nullptr) *iterations = inv.iterations;
  return inv.point;
}

Eigen::VectorXd DiagonalChart::lambda_of_r(const Eigen::VectorXd& r) const {
  const Inverted inv = invert(r, /*fixed_count=*/true);
  Eigen::VectorXd speeds(inv.angles.size());
  for (int k = 0; k < inv.angles.size(); ++k) {
    if (std::abs(std::cos(inv.angles[k])) <= tol_vertical_)
      throw NearVerticalCritical("characteristic speed became vertical inside chart");
    speeds[k] = std::tan(inv.angles[k]);
  }
  return speeds;
}

DiagonalModel DiagonalChart::model() const {
  DiagonalModel m;
  m.n = 2 * base_.N;
  m.speeds = [this](const Eigen::VectorXd& r) { return lambda_of_r(r); };
  return m;
}

double gamma_coeff(const DiagonalModel& model, const Eigen::VectorXd& r, int i, int k, double h) {
  if (i == k) throw ValidationError("gamma_coeff requires i != k");
  const Eigen::VectorXd lam = model.speeds(r);
  const double gap = lam[i] - lam[k];
  if (std::abs(gap) <= 1e-9 * (1.0 + lam.cwiseAbs().maxCoeff()))
    throw SpeedCollision("speed gap too small for Gamma^k_{ki}");

  // 4th-order five-point stencil: an O(h^2) bias here would survive the
  // outer Richardson pass of semiham_residual unseen.
  auto at = [&](double shift) {
    Eigen::VectorXd rs = r;
    rs[i] += shift;
    return model.speeds(rs)[k];
  };
  const double hh = 0.5 * h;
  const double dlam = (-at(2 * hh) + 8.0 * at(hh) - 8.0 * at(-hh) + at(-2 * hh)) / (12.0 * hh);
  return dlam / gap;
}

SemihamResidual semiham_residual(const DiagonalModel& model, const Eigen::VectorXd& r, int i,
                                 int j, int k, double h_inner, double h_outer) {
  if (i == j || j == k || i == k)
    throw ValidationError("semiham_residual requires pairwise distinct indices");

  auto dgamma = [&](int kk, int ii, int jj, double h) {
    Eigen::VectorXd rp = r, rm = r;
    rp[jj] += h;
    rm[jj] -= h;
    return (gamma_coeff(model, rp, ii, kk, h_inner) - gamma_coeff(model, rm, ii, kk, h_inner)) /
           (2.0 * h);
  };

  // Three outer steps: the symmetry defect is Richardson-extrapolated from
  // the finer pair, and the coarser pair calibrates what the differences can
  // resolve.  A genuine defect is step-independent and survives; pure
  // truncation extrapolates away.
  double d[3], a_fine = 0, b_fine = 0;
  for (int lev = 0; lev < 3; ++lev) {
    const double h = h_outer / (1 << lev);
    const double a = dgamma(k, i, j, h);
    const double b = dgamma(k, j, i, h);
    d[lev] = a - b;
    if (lev == 2) {
      a_fine = a;
      b_fine = b;
    }
  }

  SemihamResidual out;
  out.value = std::abs((4.0 * d[2] - d[1]) / 3.0);
  out.scale = std::max(std::abs(a_fine), std::abs(b_fine)) + 1e-300;

  // Rounding model of the nested differences: speed noise delta amplified by
  // the inner step, the speed gap, and the outer step.
  const Eigen::VectorXd lam = model.speeds(r);
  const double gap = std::min(std::abs(lam[i] - lam[k]), std::abs(lam[j] - lam[k]));
  const double delta = 2e-16 * (1.0 + lam.cwiseAbs().maxCoeff()) * (1.0 + r.cwiseAbs().maxCoeff());
  const double noise = 8.0 * delta / (h_inner * std::max(gap, 1e-12) * h_outer);

  out.floor = (4.0 / 3.0) * std::abs(d[1] - d[2]) + noise;
  return out;
}

double lame_integrate(const DiagonalModel& model, const std::vector<Eigen::VectorXd>& waypoints,
                      int i, double h_gamma, int subdivisions) {
  if (waypoints.size() < 2) throw ValidationError("lame_integrate needs at least two waypoints");
  if (subdivisions < 2 || subdivisions % 2 != 0)
    throw ValidationError("lame_integrate needs an even number of subdivisions");

  auto integrand = [&](const Eigen::VectorXd& r, const Eigen::VectorXd& dir) {
    double s = 0.0;
    for (int k = 0; k < model.n; ++k) {
      if (k == i || dir[k] == 0.0) continue;
      s += gamma_coeff(model, r, k, i, h_gamma) * dir[k];  // d_k ln H_i = Gamma^i_{ik}
    }
    return s;
  };

  double log_h = 0.0;
  for (size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
    const Eigen::VectorXd& r0 = waypoints[leg];
    const Eigen::VectorXd dir = waypoints[leg + 1] - r0;
    // Composite Simpson on the segment.
    const int s = subdivisions;
    double acc = 0.0;
    for (int q = 0; q <= s; ++q) {
      const double t = static_cast<double>(q) / s;
      const double w = (q == 0 || q == s) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      acc += w * integrand(r0 + t * dir, dir);
    }
    log_h += acc / (3.0 * s);
  }
  return std::exp(log_h);
}

PtPatternReport pt_pattern_check(const std::vector<FieldPoint>& points) {
  const std::vector<DensityPair> laws = n2_laws();
  const DensityPair& eq10 = laws[2];
  const DensityPair& eq11 = laws[3];

  DensityPair control = eq10;  // eq10 with its density nudged off the law
  control.name = "eq10+0.1L";
  auto base_p = eq10.P;
  auto base_gp = eq10.grad_P;
  control.P = [base_p](const FieldPoint& p) { return base_p(p) + 0.1 * p.lambda; };
  control.grad_P = [base_gp](const FieldPoint& p) {
    Eigen::VectorXd g = base_gp(p);
    g[0] += 0.1;
    return g;
  };

  PtPatternReport rep;
  rep.control_residual = std::numeric_limits<double>::infinity();
  for (const FieldPoint& p : points) {
    if (p.N != 2) throw ValidationError("pt_pattern_check requires N = 2 points");
    rep.max_residual_eq10 = std::max(rep.max_residual_eq10, validity_check(p, eq10));
    rep.max_residual_eq11 = std::max(rep.max_residual_eq11, validity_check(p, eq11));
    // Shared density: the y-flux of the first law is the x-flux of the
    // second, both equal to -f g / 2.
    const double fg = (p.u[1] / std::sqrt(p.lambda)) * (p.v[1] / std::sqrt(p.lambda));
    const double scale = 1.0 + std::abs(fg);
    rep.shared_identity = std::max(
        {rep.shared_identity, std::abs(eq10.Q(p) - eq11.P(p)) / scale,
         std::abs(eq10.Q(p) + 0.5 * fg) / scale, std::abs(eq11.P(p) + 0.5 * fg) / scale});
    rep.control_residual = std::min(rep.control_residual, validity_check(p, control));
  }
  rep.pass = rep.max_residual_eq10 <= 1e-10 && rep.max_residual_eq11 <= 1e-10 &&
             rep.shared_identity <= 1e-12 && rep.control_residual >= 1e-3;
  rep.conclusion = rep.pass ? "Egorov structure present (N=2)"
                            : "Egorov pattern check FAILED";
  return rep;
}

}  // namespace magflow
