#include "magflow/system.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace magflow {

Complex q_residual(const Jet& jet, int k) {
  if (k < 0 || k > jet.point.N + 1)
    throw ValidationError("q_residual defined for 0 <= k <= N+1");
  const Complex am = jet.a(k - 1), ap = jet.a(k + 1);
  const Complex dxm = jet.da(k - 1, 0), dxp = jet.da(k + 1, 0);
  const Complex dym = jet.da(k - 1, 1), dyp = jet.da(k + 1, 1);
  const double lam = jet.point.lambda;
  const Complex i(0.0, 1.0);

  Complex q = 0.5 * (dxm + dxp);
  q += (dym - dyp) / (2.0 * i);
  q += (jet.lambda_y() / (2.0 * lam)) * 0.5 * i *
       (static_cast<double>(k - 1) * am + static_cast<double>(k + 1) * ap);
  q -= (jet.lambda_x() / (2.0 * lam)) * 0.5 *
       (static_cast<double>(k - 1) * am - static_cast<double>(k + 1) * ap);
  return q;
}

OmegaResult omega(const Jet& jet) {
  const int n = jet.point.N;
  const double lam = jet.point.lambda;
  if (!(lam > 0)) throw ValidationError("omega requires Lambda > 0");
  const Complex qn = q_residual(jet, n);

  OmegaResult r;
  r.omega = qn.imag() / (n * std::sqrt(lam) * lambda_pow_half(lam, n));
  r.consistency = qn.real() * lambda_pow_half(lam, 1 - n);

  // Divergence form: ((v_{N-1} L')_x - (u_{N-1} L')_y) / (2 N Lambda),
  // L' = Lambda^{(1-N)/2}, expanded by the product rule from the jet.
  const double lp = lambda_pow_half(lam, 1 - n);
  const double dlp = 0.5 * (1 - n) * lambda_pow_half(lam, -1 - n);
  const Complex anm1 = jet.a(n - 1);
  const Complex danm1_x = jet.da(n - 1, 0), danm1_y = jet.da(n - 1, 1);
  const double div = (danm1_x.imag() * lp + anm1.imag() * dlp * jet.lambda_x()) -
                     (danm1_y.real() * lp + anm1.real() * dlp * jet.lambda_y());
  r.omega_div = div / (2.0 * n * lam);
  return r;
}

Eigen::VectorXd system_residual(const Jet& jet) {
  const int n = jet.point.N;
  const double lam = jet.point.lambda;
  if (!(lam > 0)) throw ValidationError("system_residual requires Lambda > 0");

  Eigen::VectorXd r(2 * n);
  r[0] = std::sqrt(lam) * q_residual(jet, 0).real();
  const Complex qn = q_residual(jet, n);
  const double lam_mn2 = lambda_pow_half(lam, -n);
  for (int k = 1; k <= n - 1; ++k) {
    const Complex e = static_cast<double>(n) * q_residual(jet, k) -
                      static_cast<double>(k) * qn * jet.a(k) * lam_mn2;
    r[2 * k - 1] = e.real();
    r[2 * k] = e.imag();
  }
  r[2 * n - 1] = qn.real() * lambda_pow_half(lam, 1 - n);
  return r;
}

SystemMatrices build_matrices(const FieldPoint& point) {
  const int m = point.components();
  SystemMatrices out;
  out.A.resize(m, m);
  out.B.resize(m, m);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
  for (int s = 0; s < m; ++s) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(m, s);
    out.A.col(s) = system_residual(Jet(point, e, zero));
    out.B.col(s) = system_residual(Jet(point, zero, e));
  }
  return out;
}

SystemMatrices n2_transformed_matrices(const FieldPoint& point) {
  if (point.N != 2) throw ValidationError("n2_transformed_matrices requires N = 2");
  const double lam = point.lambda;
  const double sq = std::sqrt(lam);
  const double f = point.u[1] / sq;
  const double g = point.v[1] / sq;

  const SystemMatrices ub = build_matrices(point);

  // U = (Lambda, u_0, u_1, v_1) as a function of V = (Lambda, u_0, f, g).
  Eigen::Matrix4d jac;
  jac << 1, 0, 0, 0,  //
      0, 1, 0, 0,     //
      f / (2 * sq), 0, sq, 0,  //
      g / (2 * sq), 0, 0, sq;

  // Row recombination into the conservation display order.
  Eigen::Matrix4d rows;
  rows << 0, 0, 0, 2,  //
      1, 0, 0, 0,      //
      0, 1, 0, f,      //
      0, 0, 1, g;

  SystemMatrices out;
  out.A = rows * ub.A * jac;
  out.B = rows * ub.B * jac;
  return out;
}

Eigen::MatrixXd solution_kernel(const SystemMatrices& mats, KernelMethod method) {
  const int m = static_cast<int>(mats.A.rows());
  Eigen::MatrixXd ab(m, 2 * m);
  ab << mats.A, mats.B;

  Eigen::MatrixXd basis;
  int rank = 0;
  if (method == KernelMethod::Svd) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ab, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-12 * std::max(1.0, sv[0]);
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > tol) ++rank;
    basis = svd.matrixV().rightCols(2 * m - rank);
  } else {
    // Null space from a full QR of [A B]^T: trailing columns of Q.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ab.transpose());
    rank = static_cast<int>(qr.rank());
    Eigen::MatrixXd q = qr.householderQ();
    basis = q.rightCols(2 * m - rank);
  }
  if (rank != m)
    throw KernelDimensionUnexpected("solution kernel has dimension " + std::to_string(2 * m - rank) +
                                    ", expected " + std::to_string(m));
  return basis;
}

GeodesicMatrixResult geodesic_matrix(const Eigen::VectorXd& a) {
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 2) throw ValidationError("geodesic_matrix needs coefficients a_0..a_n with n >= 2");

  GeodesicMatrixResult out;
  out.matrix = Eigen::MatrixXd::Zero(n, n);
  for (int r = 1; r < n; ++r) out.matrix(r, r - 1) = a[n - 1];
  for (int r = 0; r < n; ++r) {
    double e = (r + 1.0) * a[r + 1];
    if (r >= 1) e -= (n - r + 1.0) * a[r - 1];
    out.matrix(r, n - 1) = e;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(out.matrix);
  if (es.info() != Eigen::Success)
    throw RootFindingFailure("eigenvalue iteration failed for geodesic matrix");
  out.eigenvalues = es.eigenvalues();

  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(out.eigenvalues[i]));
  const double tol = 1e-8 * std::max(1.0, scale);

  bool complex_pair = false;
  for (int i = 0; i < n; ++i)
    if (std::abs(out.eigenvalues[i].imag()) > tol) complex_pair = true;

  bool repeated = false;
  for (int i = 0; i < n && !complex_pair; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(out.eigenvalues[i] - out.eigenvalues[j]) <= tol) repeated = true;

  out.classification = complex_pair  ? EigenClassification::Elliptic
                       : repeated    ? EigenClassification::Borderline
                                     : EigenClassification::Hyperbolic;
  return out;
}

}  // namespace magflow
