#pragma once

// Region statistics and the level-set energy, all as discrete sums over the
// grid. The outside weight is 1 - H_eps(phi), evaluated as H_eps(-phi) so it
// keeps full precision where H_eps(phi) is close to 1.

#include <cmath>
#include <cstddef>

#include "chanvese/grid.hpp"
#include "chanvese/params.hpp"
#include "chanvese/regularize.hpp"

namespace chanvese {

/// Per-pixel weight sum below which a phase counts as empty.
inline constexpr double kDegenerateWeightPerPixel = 1e-6;

struct RegionAverages {
  double c1 = 0.0;
  double c2 = 0.0;
  bool inside_degenerate = false;   ///< c1 fell back to the global mean
  bool outside_degenerate = false;  ///< c2 fell back to the global mean
};

struct RegionStats {
  double c1 = 0.0;
  double c2 = 0.0;
  double length = 0.0;
  double area_inside = 0.0;
  double area_outside = 0.0;
  bool inside_degenerate = false;
  bool outside_degenerate = false;
};

inline RegionAverages region_averages(const ScalarField& u0, const LevelSetField& phi,
                                      double eps) {
  require_same_shape(u0, phi.field(), "region_averages");
  detail::require_positive_eps(eps);

  // Row partials combined in row order keep the reduction order fixed.
  double in_num = 0.0, in_den = 0.0, out_num = 0.0, out_den = 0.0, total = 0.0;
  for (int i = 0; i < u0.height(); ++i) {
    double rin_num = 0.0, rin_den = 0.0, rout_num = 0.0, rout_den = 0.0, rtotal = 0.0;
    for (int j = 0; j < u0.width(); ++j) {
      const double u = u0(i, j);
      const double w_in = heaviside_eps(phi(i, j), eps);
      const double w_out = heaviside_eps(-phi(i, j), eps);
      rin_num += u * w_in;
      rin_den += w_in;
      rout_num += u * w_out;
      rout_den += w_out;
      rtotal += u;
    }
    in_num += rin_num;
    in_den += rin_den;
    out_num += rout_num;
    out_den += rout_den;
    total += rtotal;
  }

  const double n = static_cast<double>(u0.size());
  const double floor = kDegenerateWeightPerPixel * n;
  const double global_mean = total / n;

  RegionAverages r;
  r.inside_degenerate = in_den < floor;
  r.outside_degenerate = out_den < floor;
  r.c1 = r.inside_degenerate ? global_mean : in_num / in_den;
  r.c2 = r.outside_degenerate ? global_mean : out_num / out_den;
  return r;
}

/// L(phi) = sum delta_eps(phi) |grad phi| h^2, gradient by central differences.
inline double curve_length(const LevelSetField& phi, double eps) {
  detail::require_positive_eps(eps);
  const ScalarField& f = phi.field();
  const double h2 = f.spacing() * f.spacing();
  double sum = 0.0;
  for (int i = 0; i < f.height(); ++i) {
    double row = 0.0;
    for (int j = 0; j < f.width(); ++j) {
      row += delta_eps(f(i, j), eps) * gradient_norm(f, i, j);
    }
    sum += row;
  }
  return sum * h2;
}

/// A = sum H_eps(phi) h^2.
inline double region_area(const LevelSetField& phi, double eps) {
  detail::require_positive_eps(eps);
  const double h2 = phi.spacing() * phi.spacing();
  double sum = 0.0;
  for (int i = 0; i < phi.height(); ++i) {
    double row = 0.0;
    for (int j = 0; j < phi.width(); ++j) row += heaviside_eps(phi(i, j), eps);
    sum += row;
  }
  return sum * h2;
}

inline RegionStats region_stats(const ScalarField& u0, const LevelSetField& phi, double eps) {
  const RegionAverages avg = region_averages(u0, phi, eps);
  RegionStats s;
  s.c1 = avg.c1;
  s.c2 = avg.c2;
  s.inside_degenerate = avg.inside_degenerate;
  s.outside_degenerate = avg.outside_degenerate;
  s.length = curve_length(phi, eps);
  s.area_inside = region_area(phi, eps);
  s.area_outside = region_area(phi.negated(), eps);
  return s;
}

/// F = mu L^p + nu A + lambda1 sum (u0-c1)^2 H h^2 + lambda2 sum (u0-c2)^2 (1-H) h^2,
/// with c1, c2, L and A taken from `stats`.
inline double total_energy(const ScalarField& u0, const LevelSetField& phi, const Params& params,
                           const RegionStats& stats) {
  require_same_shape(u0, phi.field(), "total_energy");
  const double h2 = phi.spacing() * phi.spacing();
  double inside = 0.0, outside = 0.0;
  for (int i = 0; i < u0.height(); ++i) {
    double rin = 0.0, rout = 0.0;
    for (int j = 0; j < u0.width(); ++j) {
      const double r1 = u0(i, j) - stats.c1;
      const double r2 = u0(i, j) - stats.c2;
      rin += r1 * r1 * heaviside_eps(phi(i, j), params.eps);
      rout += r2 * r2 * heaviside_eps(-phi(i, j), params.eps);
    }
    inside += rin;
    outside += rout;
  }
  const double length_term = params.p == 1 ? stats.length : std::pow(stats.length, params.p);
  return params.mu * length_term + params.nu * stats.area_inside +
         params.lambda1 * inside * h2 + params.lambda2 * outside * h2;
}

}  // namespace chanvese
