#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "magflow/claws.hpp"

namespace magflow {

/// A diagonal hyperbolic system (r_i)_x + lambda_i(r) (r_i)_y = 0 presented
/// through its speed map.  Charts over field points provide one; synthetic
/// models (for controls) wrap plain closures.
struct DiagonalModel {
  int n = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> speeds;
};

/// Local chart r <-> mu around a strictly hyperbolic base point with all
/// characteristic speeds valid.  Inversion is Newton iteration on the
/// critical values with the closed-form envelope Jacobian; critical branches
/// are tracked from the base angles so speed indexing stays consistent.
class DiagonalChart {
 public:
  explicit DiagonalChart(const FieldPoint& base, double tol_vertical = 1e-9);

  const FieldPoint& base_point() const { return base_; }
  const Eigen::VectorXd& base_r() const { return base_r_; }
  const Eigen::VectorXd& base_speeds() const { return base_speeds_; }

  /// Chart radius in r: a tenth of the smallest speed gap, capped by a tenth
  /// of the smallest adjacent critical-value gap.
  double radius() const { return radius_; }

  /// Adaptive Newton inversion; optionally reports the iteration count.
  FieldPoint mu_from_r(const Eigen::VectorXd& r, int* iterations = nullptr) const;

  /// Speeds for nested differencing.  Evaluated with a fixed operation count
  /// (no early exits), so the result depends smoothly on r at rounding level;
  /// adaptive stopping would leak iteration-count jumps into the
  /// higher-order differences built on top of this.
  Eigen::VectorXd lambda_of_r(const Eigen::VectorXd& r) const;
  DiagonalModel model() const;

 private:
  struct Inverted {
    FieldPoint point;
    Eigen::VectorXd angles;
    int iterations = 0;
  };
  Inverted invert(const Eigen::VectorXd& r, bool fixed_count) const;

  FieldPoint base_;
  Eigen::VectorXd base_angles_, base_r_, base_speeds_;
  std::vector<CriticalKind> kinds_;
  double radius_ = 0.0;
  double tol_vertical_;
};

/// Gamma^k_{ki} = (d lambda_k / d r_i) / (lambda_i - lambda_k) by central
/// differences with step h.  Requires i != k and separated speeds.
double gamma_coeff(const DiagonalModel& model, const Eigen::VectorXd& r, int i, int k, double h);

struct SemihamResidual {
  double value;  // |d_j Gamma^k_{ki} - d_i Gamma^k_{kj}| at the finer step
  double floor;  // Richardson noise floor the value must stay under
  double scale;  // magnitude of the Gamma-derivatives themselves
};

/// The symmetry residual whose vanishing (for all pairwise-distinct i, j, k)
/// is the semi-Hamiltonian property.  Computed at outer steps h and h/2; the
/// floor combines the Richardson pair with a rounding model of the nested
/// differences.
SemihamResidual semiham_residual(const DiagonalModel& model, const Eigen::VectorXd& r, int i,
                                 int j, int k, double h_inner, double h_outer);

/// Lame coefficient H_i along a polyline in r-space from the over-determined
/// system d_k ln H_i = Gamma^i_{ik}, gauge H_i = 1 at the start and
/// d_i ln H_i = 0.  Composite Simpson per leg.  Path-independence of the
/// result is equivalent to the symmetry above.
double lame_integrate(const DiagonalModel& model, const std::vector<Eigen::VectorXd>& waypoints,
                      int i, double h_gamma, int subdivisions = 8);

struct PtPatternReport {
  double max_residual_eq10 = 0;   // validity residual of the first quadratic law
  double max_residual_eq11 = 0;   // and of the second
  double shared_identity = 0;     // |y-flux of eq10 - x-flux of eq11| (same density)
  double control_residual = 0;    // perturbed law must fail validity
  bool pass = false;
  std::string conclusion;
};

/// Checks that the two quadratic N = 2 laws form the gradient-pair pattern
/// (F_x + G_y = 0, F_y + H_x = 0) with the shared density f g / 2, which
/// makes the diagonal metric an Egorov (potential) metric.
PtPatternReport pt_pattern_check(const std::vector<FieldPoint>& points);

}  // namespace magflow
