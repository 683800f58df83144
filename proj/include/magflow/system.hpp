#pragma once

#include <Eigen/Dense>

#include "magflow/fields.hpp"

namespace magflow {

/// The quasi-linear system A(U) U_x + B(U) U_y = 0 on the 2N field
/// components U = (Lambda, u_0, u_1, v_1, ...).  Entries depend on the point
/// only; the system is exactly linear in the derivatives.
struct SystemMatrices {
  Eigen::MatrixXd A, B;
};

/// The combination Q_k of coefficient derivatives whose vanishing pattern
/// encodes conservation of F: on solutions Q_k = i k Omega sqrt(Lambda) a_k.
/// Valid for 0 <= k <= N (a_s = 0 beyond N).
Complex q_residual(const Jet& jet, int k);

struct OmegaResult {
  double omega;        // Im Q_N / (N sqrt(Lambda) Lambda^{N/2})
  double consistency;  // Re Q_N * Lambda^{(1-N)/2}; vanishes on solutions
  double omega_div;    // divergence form ((v_{N-1} L')_x - (u_{N-1} L')_y)/(2 N Lambda)
};

/// Magnetic field recovered from the top coefficient equation.  The
/// quotient and divergence forms agree identically for every jet.
OmegaResult omega(const Jet& jet);

/// The 2N quasi-linear equations, ordered
///   [ (sqrt(L) u_1)_x - (sqrt(L) v_1)_y ;
///     Re, Im of N Q_k - k Q_N a_k L^{-N/2} for k = 1..N-1 ;
///     Re Q_N * L^{(1-N)/2} ].
/// Each component carries a fixed positive scaling only, so the zero set is
/// unchanged.
Eigen::VectorXd system_residual(const Jet& jet);

/// A, B assembled column by column from unit-derivative jets, so that
/// A dx + B dy reproduces system_residual exactly.
SystemMatrices build_matrices(const FieldPoint& point);

/// N = 2 system rewritten in the variables (Lambda, u_0, f, g) with
/// f = u_1/sqrt(L), g = v_1/sqrt(L), rows recombined into its conservation
/// display form.  Row order: f_x + g_y; (f L)_x - (g L)_y; the two u_0 rows.
SystemMatrices n2_transformed_matrices(const FieldPoint& point);

enum class KernelMethod { Svd, Qr };

/// Orthonormal basis (columns, 4N x 2N) of {(xi, eta) : A xi + B eta = 0},
/// the space of solution jets at this point.  Throws
/// KernelDimensionUnexpected when the rank of [A B] is not 2N.
Eigen::MatrixXd solution_kernel(const SystemMatrices& mats, KernelMethod method = KernelMethod::Svd);

enum class EigenClassification { Hyperbolic, Elliptic, Borderline };

struct GeodesicMatrixResult {
  Eigen::MatrixXd matrix;
  Eigen::VectorXcd eigenvalues;
  EigenClassification classification;
};

/// The n x n coefficient matrix of the purely geodesic problem in
/// semi-geodesic coordinates, for coefficients a_0..a_n with a_n = 1:
/// subdiagonal a_{n-1}, last column i*a_i - (n-i+2)*a_{i-2}.
/// Classified by its eigenvalue structure.
GeodesicMatrixResult geodesic_matrix(const Eigen::VectorXd& a);

}  // namespace magflow
