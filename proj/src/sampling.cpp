#include "magflow/sampling.hpp"

#include <cmath>
#include <numbers>

#include "magflow/chars.hpp"

namespace magflow {

namespace {

bool margins_ok(const FieldPoint& p, const SampleOptions& opts) {
  const TrigPoly f = trig_poly(p);
  if (classify(f) != Hyperbolicity::StrictlyHyperbolic) return false;
  const CriticalSet cs = critical_points(f);
  const int m = cs.size();

  for (int i = 0; i < m; ++i) {
    const double next = cs.angles[(i + 1) % m] + (i + 1 == m ? 2.0 * std::numbers::pi : 0.0);
    if (next - cs.angles[i] < opts.min_angle_gap) return false;
  }
  if (opts.min_cos > 0.0)
    for (int i = 0; i < m; ++i)
      if (std::abs(std::cos(cs.angles[i])) < opts.min_cos) return false;
  if (opts.min_value_gap > 0.0) {
    for (int i = 0; i < m; ++i) {
      const double a = eval(f, cs.angles[i]);
      const double b = eval(f, cs.angles[(i + 1) % m]);
      if (std::abs(a - b) < opts.min_value_gap) return false;
    }
  }
  if (opts.min_speed_gap > 0.0) {
    for (int i = 0; i < m; ++i) {
      if (std::abs(std::cos(cs.angles[i])) < 1e-6) return false;
      for (int j = i + 1; j < m; ++j)
        if (std::abs(std::tan(cs.angles[i]) - std::tan(cs.angles[j])) < opts.min_speed_gap)
          return false;
    }
  }
  return true;
}

}  // namespace

FieldPoint sample_hyperbolic_point(Rng& rng, int n, const SampleOptions& opts) {
  for (int attempt = 0; attempt < opts.max_tries; ++attempt) {
    const double lambda = std::exp(rng.uniform(-0.6, 0.6));
    const double an = lambda_pow_half(lambda, n);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
    u[0] = rng.uniform(-0.5, 0.5);

    if (opts.asymmetric && n == 2) {
      // Substantial a_1 moves the pair of critical angles off +-pi/2 while
      // keeping four simple circle roots.
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      u[1] = sign * rng.uniform(0.3, 0.65) * 4.0 * an;
      v[1] = rng.uniform(-0.25, 0.25) * an;
    } else {
      for (int k = 1; k < n; ++k) {
        const double amp = 0.45 * an / (k * k * std::max(1, n - 1));
        u[k] = rng.uniform(-amp, amp);
        v[k] = rng.uniform(-amp, amp);
      }
    }

    FieldPoint p(n, lambda, std::move(u), std::move(v));
    try {
      if (margins_ok(p, opts)) return p;
    } catch (const NumericalError&) {
      // root solver hiccup on a bad draw; try again
    }
  }
  throw NumericalError("sample_hyperbolic_point exhausted max_tries");
}

}  // namespace magflow
