#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "magflow/trigpoly.hpp"

namespace magflow {

/// Field values at one torus point: the conformal factor Lambda of
/// ds^2 = Lambda (dx^2 + dy^2) together with the free coefficients of the
/// fibre polynomial, a_k = u_k + i v_k for k < N (v_0 = 0).  The top
/// coefficient a_N = Lambda^{N/2} is derived, not stored, so the point
/// carries exactly 2N real components.
struct FieldPoint {
  int N = 0;
  double lambda = 1.0;
  Eigen::VectorXd u;  // u_0..u_{N-1}
  Eigen::VectorXd v;  // v_0..v_{N-1}, v_0 fixed at 0

  FieldPoint() = default;
  FieldPoint(int n, double lam, Eigen::VectorXd u_, Eigen::VectorXd v_);

  int components() const { return 2 * N; }

  /// Packs (Lambda, u_0, u_1, v_1, ..., u_{N-1}, v_{N-1}).
  Eigen::VectorXd as_vector() const;
  static FieldPoint from_vector(int n, const Eigen::VectorXd& c);
};

/// Lambda^{p/2} with integer p; exact products for even p, one sqrt otherwise.
double lambda_pow_half(double lambda, int p);

/// Fourier coefficient a_k of the fibre polynomial at this point
/// (conjugate symmetry for k < 0, Lambda^{N/2} at |k| = N, zero beyond).
Complex coeff_a(const FieldPoint& p, int k);

/// The fibre polynomial F built from a field point; a_N = Lambda^{N/2} > 0.
TrigPoly trig_poly(const FieldPoint& p);

/// Field values with their first spatial derivatives, components ordered as
/// in FieldPoint::as_vector().
struct Jet {
  FieldPoint point;
  Eigen::VectorXd dx, dy;

  Jet() = default;
  Jet(FieldPoint p, Eigen::VectorXd dx_, Eigen::VectorXd dy_);

  double lambda_x() const { return dx[0]; }
  double lambda_y() const { return dy[0]; }

  Complex a(int k) const { return coeff_a(point, k); }
  /// (a_k)_x or (a_k)_y, including the chain rule through a_N = Lambda^{N/2}.
  Complex da(int k, int axis) const;  // axis 0 = x, 1 = y
};

struct FourierMode {
  int m = 0, n = 0;
  Complex c;
};

/// Analytic test fields on the torus: every unknown is a finite Fourier sum
/// with Hermitian symmetry, and Lambda is specified through its logarithm so
/// positivity is unconditional.
struct FourierFieldSpec {
  int N = 0;
  double Lx = 1.0, Ly = 1.0;
  std::vector<FourierMode> log_lambda;
  std::vector<std::vector<FourierMode>> u_modes;  // u_0..u_{N-1}
  std::vector<std::vector<FourierMode>> v_modes;  // v_0 (must stay empty)..v_{N-1}

  explicit FourierFieldSpec(int n = 1, double lx = 1.0, double ly = 1.0);
  void validate() const;  // Hermitian closure, sane periods
};

/// Values and exact analytic first derivatives of every unknown at (x, y).
Jet eval_jet(const FourierFieldSpec& spec, double x, double y);

/// Uniform periodic samples of the field variables, y-outer / x-inner.
struct FieldGrid {
  int N = 0, NX = 0, NY = 0;
  double Lx = 1.0, Ly = 1.0;
  Eigen::MatrixXd data;  // (NY*NX) x 2N, row j*NX + i

  int site(int i, int j) const { return j * NX + i; }
  FieldPoint at(int i, int j) const;
  void validate() const;
};

FieldGrid sample_grid(const FourierFieldSpec& spec, int nx, int ny);

/// Derivatives by 4th-order central differences with periodic wraparound.
Jet grid_jet(const FieldGrid& grid, int i, int j);

/// 4th-order periodic derivative of a whole scalar sample field (row j*NX+i).
Eigen::VectorXd grid_deriv_x(const Eigen::VectorXd& field, int nx, int ny, double lx);
Eigen::VectorXd grid_deriv_y(const Eigen::VectorXd& field, int nx, int ny, double ly);

// MAGFLOW-GRID v1 / MAGFLOW-SPEC v1 text formats.  Decimal serialization uses
// 17 significant digits so save/load round-trips are bit-identical.
void save_grid(const FieldGrid& grid, const std::string& path);
FieldGrid load_grid(const std::string& path);
void save_spec(const FourierFieldSpec& spec, const std::string& path);
FourierFieldSpec load_spec(const std::string& path);

}  // namespace magflow
