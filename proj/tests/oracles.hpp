#pragma once

// Test-side oracles, kept independent of the library code paths they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "magflow/fields.hpp"
#include "magflow/trigpoly.hpp"

namespace oracle {

// Direct extended-precision summation of sum a_k e^{i k phi} over the full
// index range, no Hermitian pairing.
inline long double eval_extended(const magflow::TrigPoly& f, double phi) {
  using CL = std::complex<long double>;
  CL s(0.0L, 0.0L);
  for (int k = -f.degree; k <= f.degree; ++k) {
    const magflow::Complex a = f.coeff(k);
    const CL ak(static_cast<long double>(a.real()), static_cast<long double>(a.imag()));
    const long double arg = static_cast<long double>(k) * static_cast<long double>(phi);
    s += ak * CL(std::cos(arg), std::sin(arg));
  }
  return s.real();
}

inline double central_fd(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// All critical angles by dense sampling of F_phi followed by bisection.
inline std::vector<double> critical_angles_sampled(const magflow::TrigPoly& f,
                                                   int grid = 100000) {
  std::vector<double> roots;
  const double step = 2.0 * std::numbers::pi / grid;
  double prev = magflow::eval_dphi(f, 0.0);
  for (int i = 1; i <= grid; ++i) {
    const double phi = i * step;
    const double cur = magflow::eval_dphi(f, phi);
    if (prev == 0.0) roots.push_back((i - 1) * step);
    if ((prev < 0 && cur > 0) || (prev > 0 && cur < 0)) {
      double lo = (i - 1) * step, hi = phi, glo = prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = magflow::eval_dphi(f, mid);
        if ((glo > 0) == (gm > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  return roots;
}

// Fourier-coefficient quadrature oracle for the conservation identity: the
// k-th coefficient of
//   G(phi) = F_x cos(phi) + F_y sin(phi)
//          + F_phi (L_y cos(phi) - L_x sin(phi)) / (2 L)
// computed by the (exact for trig polynomials) trapezoid rule.
inline magflow::Complex q_coefficient_quadrature(const magflow::Jet& jet, int k, int samples = 256) {
  using magflow::Complex;
  const int n = jet.point.N;
  const magflow::TrigPoly f = magflow::trig_poly(jet.point);
  const double lam = jet.point.lambda;

  auto deriv_field = [&](int axis, double phi) {
    double s = jet.da(0, axis).real();
    for (int kk = 1; kk <= n; ++kk)
      s += 2.0 * (jet.da(kk, axis) * std::polar(1.0, kk * phi)).real();
    return s;
  };

  Complex acc(0.0, 0.0);
  for (int j = 0; j < samples; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / samples;
    const double g = deriv_field(0, phi) * std::cos(phi) + deriv_field(1, phi) * std::sin(phi) +
                     magflow::eval_dphi(f, phi) *
                         (jet.lambda_y() * std::cos(phi) - jet.lambda_x() * std::sin(phi)) /
                         (2.0 * lam);
    acc += g * std::polar(1.0, -k * phi);
  }
  return acc / static_cast<double>(samples);
}

}  // namespace oracle
