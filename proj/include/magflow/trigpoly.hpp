#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "magflow/errors.hpp"

namespace magflow {

using Complex = std::complex<double>;

inline constexpr double kTolRoot = 1e-9;    // root residual / degeneracy tolerance
inline constexpr double kTolSep = 1e-6;     // minimal angle separation (radians)
inline constexpr double kCircleTol = 1e-6;  // accept roots with ||z|-1| below this

/// Real trigonometric polynomial on the fibre circle,
///   F(phi) = sum_{k=-N..N} a_k e^{i k phi},  a_{-k} = conj(a_k),
/// stored through a_0..a_N only.  a_0 must be real so that F is real.
struct TrigPoly {
  int degree;               // N >= 1
  Eigen::VectorXcd coeffs;  // a_0..a_N, size N+1

  TrigPoly(int n, Eigen::VectorXcd a);

  /// Full Laurent coefficient a_k for any integer k (0 beyond +-N).
  Complex coeff(int k) const;
};

enum class CriticalKind { Maximum, Minimum, Degenerate };

/// Critical points of F on the unit circle, sorted by angle in [0, 2pi).
struct CriticalSet {
  int degree = 0;           // degree of the generating polynomial
  Eigen::VectorXd angles;   // phi_1 < ... < phi_m
  Eigen::VectorXcd points;  // x_k = e^{i phi_k}, renormalized to |x_k| = 1
  std::vector<CriticalKind> kinds;

  int size() const { return static_cast<int>(angles.size()); }
};

enum class Hyperbolicity { StrictlyHyperbolic, Degenerate };

double eval(const TrigPoly& f, double phi);
double eval_dphi(const TrigPoly& f, double phi);
double eval_d2phi(const TrigPoly& f, double phi);

/// sum_k 2|a_k| - the natural magnitude scale of F used in relative tests.
double coeff_scale(const TrigPoly& f);

/// Roots of a dense complex polynomial sum_j c_j z^j by companion-matrix
/// eigenvalues followed by one Newton polish per root.  Leading coefficient
/// must be nonzero.
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXcd& c);

/// All critical points of F on the unit circle.  They are the unit-modulus
/// roots of P(z) = sum_{k != 0} k a_k z^{k+N} (degree 2N); roots within
/// kCircleTol of the circle are kept and renormalized.  Points where the
/// second derivative falls below tol_root (relative to coefficient scale)
/// are tagged Degenerate, never dropped.
CriticalSet critical_points(const TrigPoly& f, double tol_root = kTolRoot);

/// Product of the critical points; requires exactly 2N of them.
/// Equals -1 for every real trig polynomial with all roots on the circle,
/// since P has leading coefficient N a_N and constant term -N a_N.
Complex vieta_product(const CriticalSet& cs);

/// StrictlyHyperbolic iff F has exactly 2N distinct simple critical points
/// on the circle (pairwise angle separation above tol_sep, none degenerate).
Hyperbolicity classify(const TrigPoly& f, double tol_root = kTolRoot, double tol_sep = kTolSep);

/// Coefficients of F^m (degree m N) by iterated coefficient convolution.
TrigPoly power(const TrigPoly& f, int m);

/// One-dimensional Newton refinement of a critical angle from a nearby seed;
/// used to track a critical branch under small coefficient changes.
/// Throws RootFindingFailure when it cannot reach |F_phi| <= tol * scale.
double refine_critical_angle(const TrigPoly& f, double phi_seed, double tol = kTolRoot);

/// Wrap an angle into [0, 2pi).
double wrap_angle(double phi);

}  // namespace magflow
