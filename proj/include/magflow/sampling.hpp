#pragma once

#include <cstdint>
#include <random>

#include "magflow/fields.hpp"

namespace magflow {

/// Seeded generator with a fixed bits-to-double mapping, so identical seeds
/// reproduce identical samples on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int a, int b) {  // inclusive bounds
    return a + static_cast<int>(uniform() * (b - a + 1));
  }

 private:
  std::mt19937_64 gen_;
};

struct SampleOptions {
  double min_angle_gap = 0.05;   // radians between consecutive critical angles
  double min_value_gap = 0.0;    // between adjacent critical values
  double min_cos = 0.0;          // all |cos phi_k| >= this (no near-vertical speeds)
  double min_speed_gap = 0.0;    // pairwise characteristic speed separation
  bool asymmetric = false;       // N=2 only: push critical angles away from +-i
  int max_tries = 50000;
};

/// Rejection-samples a strictly hyperbolic field point with the requested
/// margins.  Throws NumericalError when max_tries is exhausted.
FieldPoint sample_hyperbolic_point(Rng& rng, int n, const SampleOptions& opts = {});

}  // namespace magflow
