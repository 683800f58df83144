#include "magflow/claws.hpp"

#include <cmath>
#include <numbers>

namespace magflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Eigen::VectorXd fd_gradient(const std::function<double(const FieldPoint&)>& f,
                            const FieldPoint& point, double h) {
  const Eigen::VectorXd base = point.as_vector();
  Eigen::VectorXd g(base.size());
  for (int s = 0; s < base.size(); ++s) {
    const double step = h * (1.0 + std::abs(base[s]));
    Eigen::VectorXd up = base, dn = base;
    up[s] += step;
    dn[s] -= step;
    g[s] = (f(FieldPoint::from_vector(point.N, up)) - f(FieldPoint::from_vector(point.N, dn))) /
           (2.0 * step);
  }
  return g;
}

Eigen::VectorXd fd_gradient_richardson(const std::function<double(const FieldPoint&)>& f,
                                       const FieldPoint& point, double h) {
  const Eigen::VectorXd coarse = fd_gradient(f, point, h);
  const Eigen::VectorXd fine = fd_gradient(f, point, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double validity_check(const FieldPoint& point, const DensityPair& law, GradientMode mode,
                      KernelMethod method) {
  const Eigen::MatrixXd kernel = solution_kernel(build_matrices(point), method);
  Eigen::VectorXd gp, gq;
  if (mode == GradientMode::Analytic && law.has_analytic_gradients()) {
    gp = law.grad_P(point);
    gq = law.grad_Q(point);
  } else {
    gp = fd_gradient_richardson(law.P, point);
    gq = fd_gradient_richardson(law.Q, point);
  }
  Eigen::VectorXd g(gp.size() + gq.size());
  g << gp, gq;
  return (kernel.transpose() * g).norm();
}

std::vector<DensityPair> explicit_laws(int n) {
  if (n < 1) throw ValidationError("explicit_laws requires N >= 1");
  std::vector<DensityPair> laws;

  DensityPair l1;
  l1.name = "L1";
  l1.P = [n](const FieldPoint& p) { return p.u[n - 1] * lambda_pow_half(p.lambda, 1 - n); };
  l1.Q = [n](const FieldPoint& p) { return p.v[n - 1] * lambda_pow_half(p.lambda, 1 - n); };
  l1.grad_P = [n](const FieldPoint& p) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    g[0] = p.u[n - 1] * 0.5 * (1 - n) * lambda_pow_half(p.lambda, -1 - n);
    g[n == 1 ? 1 : 2 * (n - 1)] = lambda_pow_half(p.lambda, 1 - n);
    return g;
  };
  l1.grad_Q = [n](const FieldPoint& p) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    g[0] = p.v[n - 1] * 0.5 * (1 - n) * lambda_pow_half(p.lambda, -1 - n);
    if (n > 1) g[2 * (n - 1) + 1] = lambda_pow_half(p.lambda, 1 - n);
    return g;
  };
  laws.push_back(std::move(l1));

  DensityPair l2;
  l2.name = "L2";
  if (n == 1) {
    // a_1 = sqrt(L), so the densities collapse to (Lambda, 0).
    l2.P = [](const FieldPoint& p) { return p.lambda; };
    l2.Q = [](const FieldPoint&) { return 0.0; };
    l2.grad_P = [](const FieldPoint&) { return Eigen::Vector2d(1.0, 0.0); };
    l2.grad_Q = [](const FieldPoint&) { return Eigen::Vector2d(0.0, 0.0); };
  } else {
    l2.P = [](const FieldPoint& p) { return std::sqrt(p.lambda) * p.u[1]; };
    l2.Q = [](const FieldPoint& p) { return -std::sqrt(p.lambda) * p.v[1]; };
    l2.grad_P = [n](const FieldPoint& p) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
      g[0] = p.u[1] / (2.0 * std::sqrt(p.lambda));
      g[2] = std::sqrt(p.lambda);
      return g;
    };
    l2.grad_Q = [n](const FieldPoint& p) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
      g[0] = -p.v[1] / (2.0 * std::sqrt(p.lambda));
      g[3] = -std::sqrt(p.lambda);
      return g;
    };
  }
  laws.push_back(std::move(l2));
  return laws;
}

namespace {

// k = 1 Laurent coefficient of F^m together with its derivative with respect
// to every field component, propagated through the coefficient convolution.
void power_coeff1(const FieldPoint& p, int m, Complex& a1m,
                  Eigen::VectorXcd& da1m) {
  const int n = p.N;
  const int nvars = 2 * n;

  std::vector<Complex> base(2 * n + 1);
  for (int k = -n; k <= n; ++k) base[k + n] = coeff_a(p, k);

  // d base / d U_s as Laurent vectors
  std::vector<std::vector<Complex>> dbase(nvars, std::vector<Complex>(2 * n + 1));
  const double dan = 0.5 * n * lambda_pow_half(p.lambda, n - 2);
  dbase[0][2 * n] = Complex(dan, 0.0);
  dbase[0][0] = Complex(dan, 0.0);
  dbase[1][n] = Complex(1.0, 0.0);
  for (int j = 1; j < n; ++j) {
    dbase[2 * j][n + j] = Complex(1.0, 0.0);
    dbase[2 * j][n - j] = Complex(1.0, 0.0);
    dbase[2 * j + 1][n + j] = Complex(0.0, 1.0);
    dbase[2 * j + 1][n - j] = Complex(0.0, -1.0);
  }

  auto conv = [](const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> out(a.size() + b.size() - 1, Complex(0.0, 0.0));
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] == Complex(0.0, 0.0)) continue;
      for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  };

  std::vector<Complex> acc = base;
  std::vector<std::vector<Complex>> dacc = dbase;
  for (int pw = 1; pw < m; ++pw) {
    for (int s = 0; s < nvars; ++s) {
      auto t1 = conv(dacc[s], base);
      auto t2 = conv(acc, dbase[s]);
      for (size_t i = 0; i < t1.size(); ++i) t1[i] += t2[i];
      dacc[s] = std::move(t1);
    }
    acc = conv(acc, base);
  }

  const int center = m * n;  // index of the k = 0 coefficient
  a1m = acc[center + 1];
  da1m.resize(nvars);
  for (int s = 0; s < nvars; ++s) da1m[s] = dacc[s][center + 1];
}

}  // namespace

DensityPair power_law(int m) {
  if (m < 1) throw ValidationError("power_law requires m >= 1");
  DensityPair law;
  law.name = "F^" + std::to_string(m);
  law.P = [m](const FieldPoint& p) {
    Complex a1m;
    Eigen::VectorXcd d;
    power_coeff1(p, m, a1m, d);
    return std::sqrt(p.lambda) * a1m.real();
  };
  law.Q = [m](const FieldPoint& p) {
    Complex a1m;
    Eigen::VectorXcd d;
    power_coeff1(p, m, a1m, d);
    return -std::sqrt(p.lambda) * a1m.imag();
  };
  law.grad_P = [m](const FieldPoint& p) {
    Complex a1m;
    Eigen::VectorXcd d;
    power_coeff1(p, m, a1m, d);
    const double sq = std::sqrt(p.lambda);
    Eigen::VectorXd g(2 * p.N);
    for (int s = 0; s < g.size(); ++s) g[s] = sq * d[s].real();
    g[0] += a1m.real() / (2.0 * sq);
    return g;
  };
  law.grad_Q = [m](const FieldPoint& p) {
    Complex a1m;
    Eigen::VectorXcd d;
    power_coeff1(p, m, a1m, d);
    const double sq = std::sqrt(p.lambda);
    Eigen::VectorXd g(2 * p.N);
    for (int s = 0; s < g.size(); ++s) g[s] = -sq * d[s].imag();
    g[0] -= a1m.imag() / (2.0 * sq);
    return g;
  };
  return law;
}

namespace {

struct FG {
  double f, g, df_dL, dg_dL, df_du1, dg_dv1;
};

FG fg_vars(const FieldPoint& p) {
  const double sq = std::sqrt(p.lambda);
  FG v;
  v.f = p.u[1] / sq;
  v.g = p.v[1] / sq;
  v.df_dL = -0.5 * p.u[1] / (p.lambda * sq);
  v.dg_dL = -0.5 * p.v[1] / (p.lambda * sq);
  v.df_du1 = 1.0 / sq;
  v.dg_dv1 = 1.0 / sq;
  return v;
}

}  // namespace

std::vector<DensityPair> n2_laws() {
  std::vector<DensityPair> laws(4);

  laws[0].name = "f,g";
  laws[0].P = [](const FieldPoint& p) { return fg_vars(p).f; };
  laws[0].Q = [](const FieldPoint& p) { return fg_vars(p).g; };
  laws[0].grad_P = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(v.df_dL, 0.0, v.df_du1, 0.0);
  };
  laws[0].grad_Q = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(v.dg_dL, 0.0, 0.0, v.dg_dv1);
  };

  laws[1].name = "fL,-gL";
  laws[1].P = [](const FieldPoint& p) { return fg_vars(p).f * p.lambda; };
  laws[1].Q = [](const FieldPoint& p) { return -fg_vars(p).g * p.lambda; };
  laws[1].grad_P = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(v.f + p.lambda * v.df_dL, 0.0, p.lambda * v.df_du1, 0.0);
  };
  laws[1].grad_Q = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(-v.g - p.lambda * v.dg_dL, 0.0, 0.0, -p.lambda * v.dg_dv1);
  };

  laws[2].name = "eq10";
  laws[2].P = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return p.u[0] + 2.0 * p.lambda + 0.25 * (v.g * v.g - v.f * v.f);
  };
  laws[2].Q = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return -0.5 * v.f * v.g;
  };
  laws[2].grad_P = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(2.0 + 0.5 * (v.g * v.dg_dL - v.f * v.df_dL), 1.0,
                           -0.5 * v.f * v.df_du1, 0.5 * v.g * v.dg_dv1);
  };
  laws[2].grad_Q = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(-0.5 * (v.df_dL * v.g + v.f * v.dg_dL), 0.0, -0.5 * v.g * v.df_du1,
                           -0.5 * v.f * v.dg_dv1);
  };

  laws[3].name = "eq11";
  laws[3].P = laws[2].Q;
  laws[3].grad_P = laws[2].grad_Q;
  laws[3].Q = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return -p.u[0] + 2.0 * p.lambda - 0.25 * (v.g * v.g - v.f * v.f);
  };
  laws[3].grad_Q = [](const FieldPoint& p) {
    const FG v = fg_vars(p);
    return Eigen::Vector4d(2.0 - 0.5 * (v.g * v.dg_dL - v.f * v.df_dL), -1.0,
                           0.5 * v.f * v.df_du1, -0.5 * v.g * v.dg_dv1);
  };
  return laws;
}

DensityPair fake_law() {
  DensityPair law;
  law.name = "fake:L,0";
  law.P = [](const FieldPoint& p) { return p.lambda; };
  law.Q = [](const FieldPoint&) { return 0.0; };
  law.grad_P = [](const FieldPoint& p) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * p.N);
    g[0] = 1.0;
    return g;
  };
  law.grad_Q = [](const FieldPoint& p) { return Eigen::VectorXd::Zero(2 * p.N); };
  return law;
}

Eigen::VectorXd invariance_residual(const Eigen::VectorXd& f, const FieldGrid& grid,
                                    const Eigen::VectorXd& omega_field) {
  const long sites = static_cast<long>(grid.NX) * grid.NY;
  if (f.size() != sites || omega_field.size() != sites)
    throw GridMismatch("invariance_residual: field sizes do not match the grid");
  Eigen::VectorXd sin_part(sites), cos_part(sites);
  for (long s = 0; s < sites; ++s) {
    const double sq = std::sqrt(grid.data(s, 0));
    sin_part[s] = sq * std::sin(f[s]);
    cos_part[s] = sq * std::cos(f[s]);
  }
  return grid_deriv_x(sin_part, grid.NX, grid.NY, grid.Lx) -
         grid_deriv_y(cos_part, grid.NX, grid.NY, grid.Ly) +
         (omega_field.array() * grid.data.col(0).array()).matrix();
}

SurfaceLaw surface_law(const Eigen::VectorXd& f, const FieldGrid& grid) {
  const long sites = static_cast<long>(grid.NX) * grid.NY;
  if (f.size() != sites) throw GridMismatch("surface_law: field size does not match the grid");
  const int n = grid.N;
  SurfaceLaw law;
  law.P.resize(sites);
  law.Q.resize(sites);
  for (long s = 0; s < sites; ++s) {
    const FieldPoint p = FieldPoint::from_vector(n, grid.data.row(s).transpose());
    const double sq = std::sqrt(p.lambda);
    const double lp = lambda_pow_half(p.lambda, 1 - n) / (2.0 * n);
    law.P[s] = sq * std::sin(f[s]) + p.v[n - 1] * lp;
    law.Q[s] = -sq * std::cos(f[s]) - p.u[n - 1] * lp;
  }
  return law;
}

Eigen::VectorXd grid_divergence(const SurfaceLaw& law, const FieldGrid& grid) {
  return grid_deriv_x(law.P, grid.NX, grid.NY, grid.Lx) +
         grid_deriv_y(law.Q, grid.NX, grid.NY, grid.Ly);
}

Eigen::VectorXd grid_omega_from_divergence(const FieldGrid& grid) {
  const long sites = static_cast<long>(grid.NX) * grid.NY;
  const int n = grid.N;
  Eigen::VectorXd vflux(sites), uflux(sites);
  for (long s = 0; s < sites; ++s) {
    const FieldPoint p = FieldPoint::from_vector(n, grid.data.row(s).transpose());
    const double lp = lambda_pow_half(p.lambda, 1 - n) / (2.0 * n);
    vflux[s] = p.v[n - 1] * lp;
    uflux[s] = p.u[n - 1] * lp;
  }
  const Eigen::VectorXd div = grid_deriv_x(vflux, grid.NX, grid.NY, grid.Lx) -
                              grid_deriv_y(uflux, grid.NX, grid.NY, grid.Ly);
  return (div.array() / grid.data.col(0).array()).matrix();
}

namespace {

// One Newton solve of eval(F, phi) = target from a seed angle, with a
// bisection fallback on the bracketing arc when provided.
double solve_level_angle(const TrigPoly& f, double target, double seed, bool have_arc = false,
                         double arc_lo = 0.0, double arc_hi = 0.0) {
  const double scale = std::max(1.0, coeff_scale(f));
  double phi = seed;
  for (int it = 0; it < 80; ++it) {
    const double g = eval(f, phi) - target;
    if (std::abs(g) <= 2e-15 * scale) return phi;
    const double dg = eval_dphi(f, phi);
    if (dg == 0.0) break;
    const double step = g / dg;
    phi -= step;
    if (std::abs(step) > 1.0) break;
  }
  if (std::abs(eval(f, phi) - target) <= 1e-12 * scale) return phi;

  if (have_arc) {
    double lo = arc_lo, hi = arc_hi;
    double glo = eval(f, lo) - target;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gmid = eval(f, mid) - target;
      if (std::abs(gmid) <= 1e-13 * scale) return mid;
      if ((glo > 0) == (gmid > 0)) {
        lo = mid;
        glo = gmid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  throw NewtonFailure("level-point solve did not converge from seed");
}

}  // namespace

LevelPoints level_points(const FieldPoint& point, double eps) {
  const CharData cd = char_data(point);
  const TrigPoly f = trig_poly(point);
  const int m = 2 * point.N;

  double min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k)
    min_gap = std::min(min_gap, std::abs(cd.invariants[k] - cd.invariants[(k + 1) % m]));
  if (!(eps > 0)) throw ValidationError("level_points requires eps > 0");
  if (eps >= 0.25 * min_gap)
    throw EpsilonTooLarge("eps must stay below a quarter of the smallest critical-value gap (" +
                          std::to_string(0.25 * min_gap) + ")");

  LevelPoints lp;
  lp.eps = eps;
  lp.angles.resize(m);
  lp.zs.resize(m);
  lp.targets.resize(m);
  lp.signs.resize(m);
  for (int k = 0; k < m; ++k) {
    const double s = cd.kinds[k] == CriticalKind::Maximum ? -1.0 : 1.0;
    const double target = cd.invariants[k] + s * eps;
    const double curv = std::abs(eval_d2phi(f, cd.angles[k]));
    const double guess = cd.angles[k] + std::sqrt(2.0 * eps / std::max(curv, 1e-12));
    const double next = cd.angles[(k + 1) % m] + (k + 1 == m ? kTwoPi : 0.0);
    const double phi = solve_level_angle(f, target, std::min(guess, 0.5 * (cd.angles[k] + next)),
                                         true, cd.angles[k] + 1e-9, next - 1e-9);
    lp.angles[k] = phi;
    lp.zs[k] = std::polar(1.0, phi);
    lp.targets[k] = target;
    lp.signs[k] = s;
  }
  return lp;
}

std::vector<DensityPair> g_densities(const FieldPoint& point, double eps) {
  const LevelPoints lp = level_points(point, eps);
  const int n = point.N;
  std::vector<DensityPair> laws(2 * n);

  for (int k = 0; k < 2 * n; ++k) {
    const double target = lp.targets[k];
    const double seed = lp.angles[k];
    auto solve = [target, seed](const FieldPoint& p) {
      return solve_level_angle(trig_poly(p), target, seed);
    };
    auto bracket = [n](const FieldPoint& p, double phi) {
      const double sq = std::sqrt(p.lambda);
      const double lp2 = lambda_pow_half(p.lambda, 1 - n) / (2.0 * n);
      return Complex(sq * std::cos(phi) + p.u[n - 1] * lp2, sq * std::sin(phi) + p.v[n - 1] * lp2);
    };
    // d phi / d U_s from the frozen level value: F_phi dphi + dF/dU_s = 0.
    auto dphi_dvars = [](const FieldPoint& p, double phi) {
      const TrigPoly f = trig_poly(p);
      const double fphi = eval_dphi(f, phi);
      Eigen::VectorXd d(2 * p.N);
      const double dan = 0.5 * p.N * lambda_pow_half(p.lambda, p.N - 2);
      d[0] = dan * 2.0 * std::cos(p.N * phi);
      d[1] = 1.0;
      for (int j = 1; j < p.N; ++j) {
        d[2 * j] = 2.0 * std::cos(j * phi);
        d[2 * j + 1] = -2.0 * std::sin(j * phi);
      }
      return Eigen::VectorXd(-d / fphi);
    };

    laws[k].name = "G" + std::to_string(k + 1);
    laws[k].P = [solve, bracket](const FieldPoint& p) { return bracket(p, solve(p)).imag(); };
    laws[k].Q = [solve, bracket](const FieldPoint& p) { return -bracket(p, solve(p)).real(); };
    laws[k].grad_P = [n, solve, dphi_dvars](const FieldPoint& p) {
      const double phi = solve(p);
      const double sq = std::sqrt(p.lambda);
      const Eigen::VectorXd dphi = dphi_dvars(p, phi);
      // d/dU Im[sqrt(L) e^{i phi} + a_{N-1} L'/(2N)]
      Eigen::VectorXd g = sq * std::cos(phi) * dphi;
      g[0] += std::sin(phi) / (2.0 * sq) +
              p.v[n - 1] * 0.25 * (1 - n) * lambda_pow_half(p.lambda, -1 - n) / n;
      if (n > 1)
        g[2 * (n - 1) + 1] += lambda_pow_half(p.lambda, 1 - n) / (2.0 * n);
      return g;
    };
    laws[k].grad_Q = [n, solve, dphi_dvars](const FieldPoint& p) {
      const double phi = solve(p);
      const double sq = std::sqrt(p.lambda);
      const Eigen::VectorXd dphi = dphi_dvars(p, phi);
      Eigen::VectorXd g = sq * std::sin(phi) * dphi;
      g[0] -= std::cos(phi) / (2.0 * sq) +
              p.u[n - 1] * 0.25 * (1 - n) * lambda_pow_half(p.lambda, -1 - n) / n;
      g[n == 1 ? 1 : 2 * (n - 1)] -= lambda_pow_half(p.lambda, 1 - n) / (2.0 * n);
      return g;
    };
  }
  return laws;
}

GIndependence g_independence(const FieldPoint& point, double eps, double vertical_tol) {
  const CharData cd = char_data(point);
  const int n = point.N, m = 2 * n;
  for (int k = 0; k < m; ++k) {
    const double d1 = std::abs(wrap_angle(cd.angles[k] - 0.5 * std::numbers::pi));
    const double d2 = std::abs(wrap_angle(cd.angles[k] + 0.5 * std::numbers::pi));
    const double dist = std::min({d1, kTwoPi - d1, d2, kTwoPi - d2});
    if (dist <= vertical_tol)
      throw NearVerticalCritical("a critical point lies within tol of +-i");
  }

  const LevelPoints lp = level_points(point, eps);
  const std::vector<DensityPair> gs = g_densities(point, eps);

  GIndependence out;
  // FD Jacobian of the G values in the field components.
  const Eigen::VectorXd base = point.as_vector();
  Eigen::MatrixXd jac(m, m);
  for (int s = 0; s < m; ++s) {
    const double step = 1e-6 * (1.0 + std::abs(base[s]));
    Eigen::VectorXd up = base, dn = base;
    up[s] += step;
    dn[s] -= step;
    const FieldPoint pu = FieldPoint::from_vector(n, up), pd = FieldPoint::from_vector(n, dn);
    for (int k = 0; k < m; ++k) jac(k, s) = (gs[k].P(pu) - gs[k].P(pd)) / (2.0 * step);
  }
  out.det_fd = jac.determinant();

  // Bracket matrix: dF/dmu_l(z_k) plus the explicit-derivative correction
  // weighted by F'(z_k); its determinant tends to det_m as eps -> 0.
  const double lam = point.lambda;
  const double sq = std::sqrt(lam);
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd bracket(m, m);
  for (int k = 0; k < m; ++k) {
    const Complex z = lp.zs[k];
    Complex fprime(0.0, 0.0);  // dF/dz
    for (int kk = -n; kk <= n; ++kk)
      if (kk != 0) fprime += static_cast<double>(kk) * coeff_a(point, kk) * std::pow(z, kk - 1);
    const Complex ck = -(2.0 * i / sq) / (1.0 + 1.0 / (z * z));

    for (int l = 0; l < m; ++l) {
      Complex dfdmu = l == 0 ? std::pow(z, n) + std::pow(z, -n) : std::pow(z, n - l);
      Complex r(0.0, 0.0);
      if (l == 0) {
        r = (1.0 / (2.0 * i)) *
            ((1.0 / n) * lambda_pow_half(lam, 1 - n) * (z - 1.0 / z) +
             i * (2.0 * point.v[n - 1]) * (1.0 - n) / (2.0 * n * n) *
                 lambda_pow_half(lam, 1 - 2 * n));
      }
      if (l == 1) r += (1.0 / (2.0 * i)) * lambda_pow_half(lam, 1 - n) / (2.0 * n);
      if (l == 2 * n - 1) r -= (1.0 / (2.0 * i)) * lambda_pow_half(lam, 1 - n) / (2.0 * n);
      bracket(k, l) = dfdmu + ck * r * fprime;
    }
  }
  out.det_bracket = bracket.determinant();
  out.det_m = jacobian_complex(point).det_m;
  return out;
}

}  // namespace magflow
