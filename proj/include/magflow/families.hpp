#pragma once

#include "magflow/fields.hpp"

namespace magflow {

/// Exact integrable configuration of degree 1:
///   Lambda = exp(a sin(2 pi y / Ly)),  u_0 = b cos(2 pi y / Ly),
/// with magnetic field Omega = -u_0'(y) / (2 Lambda).  The fibre integral
/// F = 2 sqrt(Lambda) cos(phi) + u_0 is conserved along the flow, and the
/// degree-1 system is satisfied identically (fields depend on y only).
struct N1Family {
  double log_amp = 0.3;
  double u0_amp = 0.2;
  double Lx = 1.0, Ly = 1.0;

  FourierFieldSpec spec() const;
  Jet jet(double x, double y) const;  // exact closed-form jet
  double omega(double y) const;
};

/// Degree-2 configuration obtained by squaring the degree-1 integral:
///   a_2 = Lambda, u_1 = 2 sqrt(Lambda) u_0, v_1 = 0, a_0 = u_0^2 + 2 Lambda,
/// same Lambda and Omega.  F^2 is conserved, so the degree-2 system holds
/// exactly; jets come out of the chain rule, not finite differences.
struct N2SquaredFamily {
  N1Family base;

  Jet jet(double x, double y) const;
  double omega(double y) const { return base.omega(y); }
};

}  // namespace magflow
