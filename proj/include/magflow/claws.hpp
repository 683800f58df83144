#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "magflow/chars.hpp"

namespace magflow {

/// Candidate conservation law (P)_x + (Q)_y = 0: densities as functions of
/// the field point, optionally with closed-form gradients in the component
/// order (Lambda, u_0, u_1, v_1, ...).
struct DensityPair {
  std::string name;
  std::function<double(const FieldPoint&)> P, Q;
  std::function<Eigen::VectorXd(const FieldPoint&)> grad_P, grad_Q;

  bool has_analytic_gradients() const { return static_cast<bool>(grad_P); }
};

enum class GradientMode { Analytic, FiniteDifference };

/// Central-difference gradient in the field components, step h*(1+|U_s|).
Eigen::VectorXd fd_gradient(const std::function<double(const FieldPoint&)>& f,
                            const FieldPoint& point, double h = 1e-5);

/// Richardson-extrapolated central differences (steps h and h/2), for
/// compositions whose higher derivatives are badly scaled (e.g. through a
/// near-critical level solve).
Eigen::VectorXd fd_gradient_richardson(const std::function<double(const FieldPoint&)>& f,
                                       const FieldPoint& point, double h = 3e-5);

/// Pointwise validity of a law modulo the system: the norm of the projection
/// of (grad P, grad Q) onto the solution kernel {A xi + B eta = 0}.  Zero iff
/// the law holds on every solution jet through this point; independent of the
/// kernel basis, so Svd and Qr factorizations agree to roundoff.
double validity_check(const FieldPoint& point, const DensityPair& law,
                      GradientMode mode = GradientMode::Analytic,
                      KernelMethod method = KernelMethod::Svd);

/// The two closed-form laws every degree admits:
///   L1 = (u_{N-1} L^{(1-N)/2},  v_{N-1} L^{(1-N)/2})
///   L2 = (sqrt(L) u_1,         -sqrt(L) v_1)      (u_1 means Re a_1 = sqrt(L) at N = 1)
std::vector<DensityPair> explicit_laws(int n);

/// Law generated by the m-th power of the integral:
/// (sqrt(L) u_1^(m), -sqrt(L) v_1^(m)) with a_1^(m) the k = 1 coefficient of
/// F^m.  Gradients are propagated through the coefficient convolution.
DensityPair power_law(int m);

/// The four conservation laws of the N = 2 system in f = u_1/sqrt(L),
/// g = v_1/sqrt(L) variables: (f, g); (f L, -g L); the two quadratic laws
/// sharing the density f g / 2.
std::vector<DensityPair> n2_laws();

/// Negative control: (Lambda, 0) is not a conservation law for N >= 2.
DensityPair fake_law();

// --- invariant-surface laws on grids -------------------------------------

/// Pointwise residual of the surface-invariance condition
///   (sqrt(L) sin f)_x - (sqrt(L) cos f)_y + Omega L = 0
/// for a fibre-angle field f sampled on the grid, derivatives by the grid's
/// 4th-order stencils.
Eigen::VectorXd invariance_residual(const Eigen::VectorXd& f, const FieldGrid& grid,
                                    const Eigen::VectorXd& omega_field);

struct SurfaceLaw {
  Eigen::VectorXd P, Q;  // density samples on the grid
};

/// Density pair of the conservation law carried by an invariant surface
/// phi = f(x, y):
///   ( sqrt(L) sin f + v_{N-1} L^{(1-N)/2} / (2N),
///    -sqrt(L) cos f - u_{N-1} L^{(1-N)/2} / (2N) ).
SurfaceLaw surface_law(const Eigen::VectorXd& f, const FieldGrid& grid);

/// Grid divergence (P)_x + (Q)_y with the same stencils.
Eigen::VectorXd grid_divergence(const SurfaceLaw& law, const FieldGrid& grid);

/// Magnetic field samples from the divergence form of the top-coefficient
/// identity, with the fluxes differentiated as composites (the form that
/// makes the surface-law divergence an exact algebraic identity on grids).
Eigen::VectorXd grid_omega_from_divergence(const FieldGrid& grid);

// --- level points and the G_k laws ----------------------------------------

/// Near-critical level points: one z_k per critical point, solving
/// F(z_k) = r_k + s_k eps on the unit circle, s_k = -1 at maxima and +1 at
/// minima so the target is a regular value.  z_k sits on the
/// counterclockwise side of x_k.  Targets are frozen at construction; the
/// implicit functions z_k(mu) keep these fixed level values.
struct LevelPoints {
  double eps = 0.0;
  Eigen::VectorXd angles;   // angle of z_k
  Eigen::VectorXcd zs;
  Eigen::VectorXd targets;  // c_k = r_k + s_k eps at the base point
  Eigen::VectorXd signs;    // s_k
};

/// Requires eps below a quarter of the smallest adjacent critical-value gap.
LevelPoints level_points(const FieldPoint& point, double eps);

/// The 2N functionally independent laws built from the level points:
///   G_k = Im[sqrt(L) z_k + a_{N-1} L^{(1-N)/2} / (2N)]
/// paired with -Re[...] of the same bracket.  Each pair re-solves z_k(mu)
/// from the frozen level target, seeded at the base solution; closed-form
/// gradients go through the implicit function theorem.
std::vector<DensityPair> g_densities(const FieldPoint& point, double eps);

struct GIndependence {
  double det_fd;        // det d(G_1..G_2N)/d(field components), central FD
  Complex det_bracket;  // bracket-matrix determinant; tends to det_m as eps -> 0
  Complex det_m;        // chars determinant at the same point
};

/// Functional independence of the G_k at finite eps, plus the bracket matrix
/// whose determinant converges to the critical-point Jacobian determinant.
/// Rejects points with a critical point within vertical_tol of +-i.
GIndependence g_independence(const FieldPoint& point, double eps, double vertical_tol = 1e-2);

}  // namespace magflow
