#pragma once

// Shared builders for the unit tests.

#include <cmath>
#include <functional>

#include "chanvese/grid.hpp"

namespace chanvese::testing {

/// Field with f(x, y) sampled at x = col * h, y = row * h.
inline ScalarField sample(int width, int height, double h,
                          const std::function<double(double, double)>& f) {
  ScalarField out(width, height, h);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) out(i, j) = f(j * h, i * h);
  }
  return out;
}

/// Signed distance to a circle, positive inside.
inline LevelSetField circle_sdf(int width, int height, double cx, double cy, double r) {
  return LevelSetField(sample(width, height, 1.0, [=](double x, double y) {
    return r - std::hypot(x - cx, y - cy);
  }));
}

}  // namespace chanvese::testing
