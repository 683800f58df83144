#include "magflow/trigpoly.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace magflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0) w += kTwoPi;
  return w;
}

TrigPoly::TrigPoly(int n, Eigen::VectorXcd a) : degree(n), coeffs(std::move(a)) {
  if (degree < 1) throw ValidationError("TrigPoly degree must be >= 1");
  if (coeffs.size() != degree + 1)
    throw ValidationError("TrigPoly needs exactly N+1 coefficients a_0..a_N");
  if (std::abs(coeffs[0].imag()) > 1e-12 * (1.0 + std::abs(coeffs[0])))
    throw ValidationError("TrigPoly a_0 must be real");
  coeffs[0] = Complex(coeffs[0].real(), 0.0);
}

Complex TrigPoly::coeff(int k) const {
  int a = std::abs(k);
  if (a > degree) return {0.0, 0.0};
  return k >= 0 ? coeffs[a] : std::conj(coeffs[a]);
}

double eval(const TrigPoly& f, double phi) {
  // Hermitian pairs summed together keep the value exactly real.
  double s = f.coeffs[0].real();
  for (int k = 1; k <= f.degree; ++k)
    s += 2.0 * (f.coeffs[k] * std::polar(1.0, k * phi)).real();
  return s;
}

double eval_dphi(const TrigPoly& f, double phi) {
  double s = 0.0;
  for (int k = 1; k <= f.degree; ++k)
    s += -2.0 * k * (f.coeffs[k] * std::polar(1.0, k * phi)).imag();
  return s;
}

double eval_d2phi(const TrigPoly& f, double phi) {
  double s = 0.0;
  for (int k = 1; k <= f.degree; ++k)
    s += -2.0 * k * k * (f.coeffs[k] * std::polar(1.0, k * phi)).real();
  return s;
}

double coeff_scale(const TrigPoly& f) {
  double s = std::abs(f.coeffs[0]);
  for (int k = 1; k <= f.degree; ++k) s += 2.0 * std::abs(f.coeffs[k]);
  return s;
}

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXcd& c) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) throw ValidationError("polynomial_roots needs degree >= 1");
  if (std::abs(c[deg]) == 0.0) throw ValidationError("polynomial_roots: zero leading coefficient");

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[i] / c[deg];

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw RootFindingFailure("companion eigenvalue iteration did not converge");
  Eigen::VectorXcd roots = es.eigenvalues();

  // One Newton polish per root; skipped near multiple roots where P' vanishes.
  auto horner = [&c, deg](Complex z, Complex& p, Complex& dp) {
    p = c[deg];
    dp = 0.0;
    for (int j = deg - 1; j >= 0; --j) {
      dp = dp * z + p;
      p = p * z + c[j];
    }
  };
  const double lead = std::abs(c[deg]);
  for (int i = 0; i < deg; ++i) {
    Complex p, dp;
    horner(roots[i], p, dp);
    if (std::abs(dp) > 1e-8 * lead) roots[i] -= p / dp;
  }
  return roots;
}

CriticalSet critical_points(const TrigPoly& f, double tol_root) {
  const int n = f.degree;
  if (std::abs(f.coeffs[n]) == 0.0)
    throw ValidationError("critical_points requires a_N != 0");

  // z^N * z F'(z) = sum_{k != 0} k a_k z^{k+N}, degree 2N, constant -N a_N.
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * n + 1);
  for (int k = -n; k <= n; ++k) {
    if (k == 0) continue;
    c[k + n] = static_cast<double>(k) * f.coeff(k);
  }
  Eigen::VectorXcd roots = polynomial_roots(c);

  double dscale = 0.0;  // natural magnitude of F_phi and F_phiphi
  for (int k = 1; k <= n; ++k) dscale += 2.0 * k * k * std::abs(f.coeffs[k]);
  dscale = std::max(1.0, dscale);

  std::vector<double> angles;
  for (int i = 0; i < roots.size(); ++i) {
    const double off = std::abs(std::abs(roots[i]) - 1.0);
    if (off > 1e-3) continue;  // genuine off-circle root (inversive pair)
    double phi = wrap_angle(std::arg(roots[i]));
    // A few damped Newton steps on the angle tighten the projection; they
    // stall harmlessly where F_phiphi vanishes.
    for (int it = 0; it < 4; ++it) {
      const double g = eval_dphi(f, phi);
      const double dg = eval_d2phi(f, phi);
      if (dg == 0.0 || std::abs(g / dg) > 1e-2) break;
      phi -= g / dg;
    }
    const double resid = std::abs(eval_dphi(f, wrap_angle(phi)));
    if (off <= kCircleTol) {
      // eigenvalue noise moves simple circle roots slightly off
      if (resid > tol_root * dscale)
        throw RootFindingFailure("critical point residual |F_phi| too large after polish");
    } else if (resid > tol_root * dscale) {
      continue;  // not a critical point once projected; drop
    }
    // Multiple roots scatter their eigenvalue cluster by more than
    // kCircleTol; the residual test above readmits those members.
    angles.push_back(wrap_angle(phi));
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
               angles.end());
  if (angles.size() >= 2 && angles.back() - angles.front() >= 2.0 * std::numbers::pi - 1e-9)
    angles.pop_back();  // wrap-around duplicate

  CriticalSet cs;
  cs.degree = n;
  const int m = static_cast<int>(angles.size());
  cs.angles.resize(m);
  cs.points.resize(m);
  cs.kinds.resize(m);
  for (int i = 0; i < m; ++i) {
    const double phi = angles[i];
    cs.angles[i] = phi;
    cs.points[i] = std::polar(1.0, phi);
    const double d2 = eval_d2phi(f, phi);
    if (std::abs(d2) <= tol_root * dscale)
      cs.kinds[i] = CriticalKind::Degenerate;
    else
      cs.kinds[i] = d2 < 0 ? CriticalKind::Maximum : CriticalKind::Minimum;
  }
  return cs;
}

Complex vieta_product(const CriticalSet& cs) {
  if (cs.size() != 2 * cs.degree)
    throw WrongCount("vieta_product expects exactly 2N critical points, got " +
                     std::to_string(cs.size()));
  Complex p(1.0, 0.0);
  for (int i = 0; i < cs.points.size(); ++i) p *= cs.points[i];
  return p;
}

Hyperbolicity classify(const TrigPoly& f, double tol_root, double tol_sep) {
  const CriticalSet cs = critical_points(f, tol_root);
  if (cs.size() != 2 * f.degree) return Hyperbolicity::Degenerate;
  for (const auto kind : cs.kinds)
    if (kind == CriticalKind::Degenerate) return Hyperbolicity::Degenerate;
  for (int i = 0; i < cs.size(); ++i) {
    const double next = cs.angles[(i + 1) % cs.size()] + (i + 1 == cs.size() ? kTwoPi : 0.0);
    if (next - cs.angles[i] <= tol_sep) return Hyperbolicity::Degenerate;
  }
  return Hyperbolicity::StrictlyHyperbolic;
}

TrigPoly power(const TrigPoly& f, int m) {
  if (m < 1) throw ValidationError("power requires m >= 1");
  const int n = f.degree;

  // Work on full Laurent vectors indexed j = k + offset.
  std::vector<Complex> acc(2 * n + 1);
  std::vector<Complex> base(2 * n + 1);
  for (int k = -n; k <= n; ++k) base[k + n] = acc[k + n] = f.coeff(k);

  int deg = n;
  for (int p = 1; p < m; ++p) {
    std::vector<Complex> next(2 * (deg + n) + 1, Complex(0.0, 0.0));
    for (int i = -deg; i <= deg; ++i) {
      if (acc[i + deg] == Complex(0.0, 0.0)) continue;
      for (int j = -n; j <= n; ++j) next[i + j + deg + n] += acc[i + deg] * base[j + n];
    }
    acc = std::move(next);
    deg += n;
  }

  // Symmetrize against roundoff so the Hermitian invariant holds exactly.
  Eigen::VectorXcd out(deg + 1);
  out[0] = Complex(acc[deg].real(), 0.0);
  for (int k = 1; k <= deg; ++k)
    out[k] = 0.5 * (acc[deg + k] + std::conj(acc[deg - k]));
  return TrigPoly(deg, std::move(out));
}

double refine_critical_angle(const TrigPoly& f, double phi_seed, double tol) {
  double dscale = 0.0;
  for (int k = 1; k <= f.degree; ++k) dscale += 2.0 * k * k * std::abs(f.coeffs[k]);
  dscale = std::max(1.0, dscale);

  double phi = phi_seed;
  for (int it = 0; it < 40; ++it) {
    const double g = eval_dphi(f, phi);
    if (std::abs(g) <= 1e-2 * tol * dscale) return wrap_angle(phi);
    const double dg = eval_d2phi(f, phi);
    if (dg == 0.0) break;
    const double step = g / dg;
    phi -= step;
    if (std::abs(step) > 0.5) break;  // left the basin of the seeded branch
  }
  if (std::abs(eval_dphi(f, phi)) <= tol * dscale) return wrap_angle(phi);
  throw RootFindingFailure("critical-angle refinement did not converge from seed");
}

}  // namespace magflow
