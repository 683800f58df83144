#pragma once

#include "magflow/families.hpp"
#include "magflow/sampling.hpp"

namespace support {

using magflow::FieldPoint;
using magflow::Rng;

inline FieldPoint random_hyperbolic(Rng& rng, int n) {
  return magflow::sample_hyperbolic_point(rng, n);
}

// A well-separated N=2 point suitable for speed-sensitive diagnostics.
inline FieldPoint random_chart_point(Rng& rng) {
  magflow::SampleOptions opts;
  opts.asymmetric = true;
  opts.min_angle_gap = 0.2;
  opts.min_cos = 0.15;
  opts.min_value_gap = 0.05;
  opts.min_speed_gap = 0.1;
  return magflow::sample_hyperbolic_point(rng, 2, opts);
}

}  // namespace support
