#pragma once

#include <Eigen/Dense>

#include <vector>

#include "magflow/system.hpp"

namespace magflow {

/// Riemann data at a strictly hyperbolic point: critical angles of F on the
/// fibre circle, the invariants r_k = F(x_k) and the characteristic speeds
/// lambda_k = tan(phi_k).  Speeds are flagged invalid near vertical
/// characteristics (|cos phi_k| small) instead of overflowing.
/// The complex field-variable ordering used by the Jacobian identity is
/// (mu_1..mu_{2N}) = (Lambda^{N/2}, a_{N-1}, ..., a_0, ..., a_{1-N}).
struct CharData {
  int N = 0;
  Eigen::VectorXd angles;      // sorted ascending in [0, 2pi)
  Eigen::VectorXcd points;     // x_k = e^{i phi_k}
  Eigen::VectorXd invariants;  // r_k
  Eigen::VectorXd speeds;      // tan phi_k where valid, 0 otherwise
  std::vector<bool> speed_valid;
  std::vector<CriticalKind> kinds;
  bool value_collision = false;  // some r_k coincide (allowed, flagged)
};

CharData char_data(const FieldPoint& point, double tol_vertical = 1e-9);

/// Branch-consistent critical values at a point near a reference
/// configuration: each angle is refined from the given seed, preserving the
/// index assignment (no re-sorting).  Used by finite-difference gradients.
Eigen::VectorXd tracked_invariants(const FieldPoint& point, const Eigen::VectorXd& seed_angles);

/// Analytic gradient d r_k / d U_s in the component order
/// (Lambda, u_0, u_1, v_1, ...): since F_phi(x_k) = 0, it equals
/// dF/dU_s evaluated at x_k.
Eigen::MatrixXd invariant_gradients(const FieldPoint& point);

/// Central-difference version of the same matrix (step h*(1+|U_s|)).
Eigen::MatrixXd invariant_gradients_fd(const FieldPoint& point, double h = 1e-5);

struct JacobianIdentity {
  Eigen::MatrixXcd m;   // M_{ks} = dF/dmu_s (x_k)
  Complex det_m;
  Complex rhs;          // (-1)^{N+1} * 2 * V, V the decreasing-power Vandermonde
  double modulus_rhs;   // 2 * prod_{i>j} |x_i - x_j|, ordering-free form
};

/// The closed-form determinant identity behind the regularity of the
/// change of variables mu <-> r.
JacobianIdentity jacobian_complex(const FieldPoint& point);

/// det of the finite-difference Jacobian of r with respect to the real
/// variables (Lambda^{N/2}, u_0, u_1..u_{N-1}, v_1..v_{N-1}); nonzero in the
/// hyperbolic region.  |det| = |det_m| * 2^{N-1}.
double jacobian_real(const FieldPoint& point, double h = 1e-5);

/// Max over a solution-kernel basis and over k of
/// |grad r_k . xi + lambda_k grad r_k . eta| with finite-difference
/// gradients: Riemann invariants advect with speed lambda_k, so this
/// vanishes on solution jets.
double advection_check(const Jet& jet);

}  // namespace magflow
