#pragma once

#include <vector>

#include "dynsc/vec3.hpp"

namespace dynsc {

// Centered moving average, boundary-truncated. window must be odd.
std::vector<double> moving_average(const std::vector<double>& xs, int window);
std::vector<Vec3> moving_average(const std::vector<Vec3>& xs, int window);

struct DerivedDynamics {
  std::vector<Vec3> velocity;      // smoothed
  std::vector<Vec3> acceleration;  // smoothed
};

// Backward differences (v_0 = v_1, a_0 = a_1) followed by the centered
// window-5 moving average on both fields.
DerivedDynamics derive_dynamics(const std::vector<Vec3>& positions, double dt,
                                int window = 5);

}  // namespace dynsc
