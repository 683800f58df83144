#include "magflow/families.hpp"

#include <cmath>
#include <numbers>

namespace magflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FourierFieldSpec N1Family::spec() const {
  FourierFieldSpec s(1, Lx, Ly);
  // a sin(2 pi y / Ly) = -i a/2 e^{i 2 pi y/Ly} + i a/2 e^{-i 2 pi y/Ly}
  s.log_lambda = {{0, 1, Complex(0.0, -0.5 * log_amp)}, {0, -1, Complex(0.0, 0.5 * log_amp)}};
  // b cos(2 pi y / Ly) = b/2 e^{i 2 pi y/Ly} + b/2 e^{-i 2 pi y/Ly}
  s.u_modes[0] = {{0, 1, Complex(0.5 * u0_amp, 0.0)}, {0, -1, Complex(0.5 * u0_amp, 0.0)}};
  return s;
}

Jet N1Family::jet(double /*x*/, double y) const {
  const double w = kTwoPi / Ly;
  const double lambda = std::exp(log_amp * std::sin(w * y));
  const double lambda_y = lambda * log_amp * w * std::cos(w * y);
  const double u0 = u0_amp * std::cos(w * y);
  const double u0_y = -u0_amp * w * std::sin(w * y);

  Eigen::VectorXd c(2), dx = Eigen::VectorXd::Zero(2), dy(2);
  c << lambda, u0;
  dy << lambda_y, u0_y;
  return Jet(FieldPoint::from_vector(1, c), std::move(dx), std::move(dy));
}

double N1Family::omega(double y) const {
  const double w = kTwoPi / Ly;
  const double lambda = std::exp(log_amp * std::sin(w * y));
  const double u0_y = -u0_amp * w * std::sin(w * y);
  return -u0_y / (2.0 * lambda);
}

Jet N2SquaredFamily::jet(double x, double y) const {
  const Jet j1 = base.jet(x, y);
  const double lambda = j1.point.lambda, ly = j1.lambda_y();
  const double u0 = j1.point.u[0], u0y = j1.dy[1];
  const double sq = std::sqrt(lambda);

  Eigen::VectorXd c(4), dx = Eigen::VectorXd::Zero(4), dy(4);
  c << lambda, u0 * u0 + 2.0 * lambda, 2.0 * sq * u0, 0.0;
  dy << ly,                              //
      2.0 * u0 * u0y + 2.0 * ly,         //
      ly * u0 / sq + 2.0 * sq * u0y,     //
      0.0;
  return Jet(FieldPoint::from_vector(2, c), std::move(dx), std::move(dy));
}

}  // namespace magflow
