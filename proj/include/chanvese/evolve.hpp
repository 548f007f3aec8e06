#pragma once

// One semi-implicit time step of the gradient-descent PDE for the level-set
// energy, and a diagnostic curvature operator.
//
// The step treats the curvature term implicitly in the centre value only:
//
//   phi' [1 + (dt/h) d mu m (C1+C2+C3+C4)]
//     = phi + (dt/h) d mu m (C1 phi_E + C2 phi_W + C3 phi_N + C4 phi_S)
//       - dt d (nu + lambda1 (u0-c1)^2 - lambda2 (u0-c2)^2)
//
// with d = delta_eps(phi), m = p L^(p-1), and E/W/N/S the +x/-x/+y/-y
// neighbours. All neighbours come from the previous iterate (one Jacobi sweep).

#include <cmath>
#include <string>

#include "chanvese/grid.hpp"
#include "chanvese/params.hpp"
#include "chanvese/region.hpp"
#include "chanvese/regularize.hpp"

namespace chanvese {

/// Per-pixel coupling weights of the step. `forward_x` multiplies the +x
/// neighbour, `backward_x` the -x neighbour, and likewise for y.
struct CoefficientStencil {
  double forward_x = 0.0;   // C1
  double backward_x = 0.0;  // C2
  double forward_y = 0.0;   // C3
  double backward_y = 0.0;  // C4

  double sum() const noexcept { return forward_x + backward_x + forward_y + backward_y; }
};

/// C1..C4 at (row, col). Each is 1 / sqrt(normal^2 + tangential^2 + eta^2):
/// the one-sided difference across the cell face and the central difference
/// along it, evaluated on the face's own column or row. C2's tangential term
/// is (phi(x-1,y+1) - phi(x-1,y-1)) / 2, mirroring C4's.
inline CoefficientStencil stencil_coefficients(const LevelSetField& phi, int row, int col,
                                               double eta) noexcept {
  // p(dx, dy): phi at x + dx, y + dy
  auto p = [&](int dx, int dy) { return phi.clamped(row + dy, col + dx); };
  const double e2 = eta * eta;
  const double c = p(0, 0);

  auto inv_root = [e2](double a, double b) { return 1.0 / std::sqrt(a * a + b * b + e2); };

  CoefficientStencil s;
  s.forward_x = inv_root(p(1, 0) - c, (p(0, 1) - p(0, -1)) / 2.0);
  s.backward_x = inv_root(c - p(-1, 0), (p(-1, 1) - p(-1, -1)) / 2.0);
  s.forward_y = inv_root((p(1, 0) - p(-1, 0)) / 2.0, p(0, 1) - c);
  s.backward_y = inv_root((p(1, -1) - p(-1, -1)) / 2.0, c - p(0, -1));
  return s;
}

/// p * length^(p-1), with 0^0 taken as 1.
inline double length_factor(double length, int p) {
  if (p == 1) return 1.0;
  return static_cast<double>(p) * std::pow(length, p - 1);
}

inline LevelSetField evolve_step(const LevelSetField& phi_n, const ScalarField& u0,
                                 const Params& params, const RegionStats& stats) {
  require_same_shape(u0, phi_n.field(), "evolve_step");
  const double h = phi_n.spacing();
  const double dt = params.time_step();
  const double m = length_factor(stats.length, params.p);
  const double curvature_weight = (dt / h) * params.mu * m;

  ScalarField next(phi_n.width(), phi_n.height(), h);
  for (int i = 0; i < phi_n.height(); ++i) {
    for (int j = 0; j < phi_n.width(); ++j) {
      const double v = phi_n(i, j);
      const double d = delta_eps(v, params.eps);
      const CoefficientStencil s = stencil_coefficients(phi_n, i, j, params.eta);
      const double r1 = u0(i, j) - stats.c1;
      const double r2 = u0(i, j) - stats.c2;
      const double force = params.nu + params.lambda1 * r1 * r1 - params.lambda2 * r2 * r2;
      const double a = curvature_weight * d;
      const double neighbours = s.forward_x * phi_n.clamped(i, j + 1) +
                                s.backward_x * phi_n.clamped(i, j - 1) +
                                s.forward_y * phi_n.clamped(i + 1, j) +
                                s.backward_y * phi_n.clamped(i - 1, j);
      const double out = (v + a * neighbours - dt * d * force) / (1.0 + a * s.sum());
      if (!std::isfinite(out)) {
        throw NumericalError("evolve_step produced a non-finite value at row " +
                                 std::to_string(i) + ", col " + std::to_string(j),
                             i, j);
      }
      next(i, j) = out;
    }
  }
  return LevelSetField(std::move(next));
}

/// kappa = (phi_xx phi_y^2 - 2 phi_xy phi_x phi_y + phi_yy phi_x^2) / (phi_x^2 + phi_y^2)^(3/2)
/// with central differences and eta^2 added to the base of the denominator.
/// For a signed distance that is positive inside a circle the value at
/// distance d from the centre is -1/d. Diagnostics only.
inline double curvature(const LevelSetField& phi, int row, int col, double eta) noexcept {
  auto p = [&](int dx, int dy) { return phi.clamped(row + dy, col + dx); };
  const double h = phi.spacing();
  const double c = p(0, 0);
  const double fx = (p(1, 0) - p(-1, 0)) / (2.0 * h);
  const double fy = (p(0, 1) - p(0, -1)) / (2.0 * h);
  const double fxx = (p(1, 0) - 2.0 * c + p(-1, 0)) / (h * h);
  const double fyy = (p(0, 1) - 2.0 * c + p(0, -1)) / (h * h);
  const double fxy = (p(1, 1) - p(1, -1) - p(-1, 1) + p(-1, -1)) / (4.0 * h * h);
  const double num = fxx * fy * fy - 2.0 * fxy * fx * fy + fyy * fx * fx;
  const double base = fx * fx + fy * fy + eta * eta;
  return num / (base * std::sqrt(base));
}

}  // namespace chanvese
