#pragma once

#include <functional>
#include <string>
#include <vector>

#include "magflow/system.hpp"

namespace magflow {

/// Point on the unit-energy level: torus position plus fibre angle.  The
/// parameterization p = sqrt(Lambda) (cos phi, sin phi) keeps H = 1/2
/// identically, so energy cannot drift.
struct FlowState {
  double x = 0.0, y = 0.0, phi = 0.0;
};

/// How the magnetic field is supplied to the integrator.
struct OmegaMode {
  enum class Kind { Derive, Constant, ScaledDerive };
  Kind kind = Kind::Derive;
  double value = 1.0;  // the constant, or the scale factor

  static OmegaMode derive() { return {Kind::Derive, 1.0}; }
  static OmegaMode constant(double w) { return {Kind::Constant, w}; }
  static OmegaMode scaled(double f) { return {Kind::ScaledDerive, f}; }
};

/// Field data the integrator needs: jets anywhere on the torus and the
/// magnetic field at a jet.
struct FlowField {
  double Lx = 1.0, Ly = 1.0;
  std::function<Jet(double, double)> jet_at;
  std::function<double(const Jet&)> omega_at;
};

FlowField make_flow(const FourierFieldSpec& spec, OmegaMode mode);
/// Bilinear interpolation of grid values, with derivative fields precomputed
/// by 4th-order stencils and interpolated separately so the rhs stays
/// continuous.  Throws BlowUp when interpolated Lambda is not positive.
FlowField make_flow(const FieldGrid& grid, OmegaMode mode);
FlowField make_flow(std::function<Jet(double, double)> jets, OmegaMode mode, double lx, double ly);

/// (dx/dt, dy/dt, dphi/dt) of the magnetic flow on the energy level.
Eigen::Vector3d flow_rhs(const FlowState& state, const FlowField& field);

struct Trajectory {
  double dt = 0.0;
  std::string method = "rk4";
  std::vector<double> t, x, y, phi, F;  // positions wrapped to the torus

  int samples() const { return static_cast<int>(t.size()); }
};

/// Classical fixed-step RK4.  Positions integrate unwrapped and are reduced
/// mod the periods only in the recorded samples; F is recorded at every
/// sample through the fibre polynomial at the current point.
Trajectory integrate(const FlowState& start, const FlowField& field, double total_time, double dt);

struct DriftResult {
  double max_drift = 0.0;
  Eigen::VectorXd series;  // F(t) - F(0)
};

DriftResult drift(const Trajectory& traj);

/// CSV export: header t,x,y,phi,F with 17-significant-digit decimals.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace magflow
