#pragma once

// The outer segmentation loop: initialize phi, then repeat
//   region averages -> semi-implicit step -> reinitialization -> stop test
// until the summed near-interface change drops to dt h^2 or the iteration
// budget runs out.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "chanvese/evolve.hpp"
#include "chanvese/grid.hpp"
#include "chanvese/params.hpp"
#include "chanvese/region.hpp"
#include "chanvese/reinit.hpp"

namespace chanvese {

/// Circle in pixel coordinates; x is the column, y the row.
struct CircleInit {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 1.0;
};

/// Axis-aligned rectangle with opposite corners (x0, y0) and (x1, y1).
struct RectangleInit {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

struct CheckerboardInit {
  double period = 10.0;
};

using InitSpec = std::variant<CircleInit, RectangleInit, CheckerboardInit>;

/// Centred circle of radius min(width, height) / 3.
inline InitSpec default_init(int width, int height) {
  return CircleInit{(width - 1) / 2.0, (height - 1) / 2.0, std::min(width, height) / 3.0};
}

namespace detail {

inline void validate_init(const CircleInit& c, int width, int height) {
  if (!(c.radius > 0.0)) throw ParameterError("circle init: radius must be > 0");
  if (c.cx < 0.0 || c.cx > width - 1 || c.cy < 0.0 || c.cy > height - 1) {
    throw ParameterError("circle init: centre lies outside the grid");
  }
}

inline void validate_init(const RectangleInit& r, int, int) {
  if (!(std::abs(r.x1 - r.x0) > 0.0) || !(std::abs(r.y1 - r.y0) > 0.0)) {
    throw ParameterError("rectangle init: rectangle is degenerate");
  }
}

inline void validate_init(const CheckerboardInit& c, int, int) {
  if (!(c.period >= 2.0)) throw ParameterError("checkerboard init: period must be >= 2");
}

inline double init_value(const CircleInit& c, double x, double y) {
  return c.radius - std::hypot(x - c.cx, y - c.cy);
}

inline double init_value(const RectangleInit& r, double x, double y) {
  const double xl = std::min(r.x0, r.x1), xh = std::max(r.x0, r.x1);
  const double yl = std::min(r.y0, r.y1), yh = std::max(r.y0, r.y1);
  const double dx = std::max({xl - x, 0.0, x - xh});
  const double dy = std::max({yl - y, 0.0, y - yh});
  if (dx > 0.0 || dy > 0.0) return -std::hypot(dx, dy);
  return std::min({x - xl, xh - x, y - yl, yh - y});
}

inline double init_value(const CheckerboardInit& c, double x, double y) {
  return std::sin(std::numbers::pi * x / c.period) * std::sin(std::numbers::pi * y / c.period);
}

}  // namespace detail

/// Initial level set. Circle and rectangle are exact signed distances
/// (positive inside), scaled by h; the checkerboard is
/// sin(pi x / period) sin(pi y / period).
inline LevelSetField init_phi(int width, int height, double h, const InitSpec& spec) {
  ScalarField out(width, height, h);
  std::visit(
      [&](const auto& s) {
        detail::validate_init(s, width, height);
        const bool distance = !std::is_same_v<std::decay_t<decltype(s)>, CheckerboardInit>;
        for (int i = 0; i < height; ++i) {
          for (int j = 0; j < width; ++j) {
            const double v = detail::init_value(s, j, i);
            out(i, j) = distance ? v * h : v;
          }
        }
      },
      spec);
  return LevelSetField(std::move(out));
}

struct StopCheck {
  double q = 0.0;          ///< sum of |phi' - phi| over pixels with |phi| < h
  int m = 0;               ///< number of such pixels
  double threshold = 0.0;  ///< dt h^2
  bool converged = false;
};

inline StopCheck has_converged(const LevelSetField& phi_n, const LevelSetField& phi_next,
                               const Params& params) {
  require_same_shape(phi_n.field(), phi_next.field(), "has_converged");
  const double h = params.h;
  StopCheck s;
  s.threshold = params.time_step() * h * h;
  double sum = 0.0;
  auto a = phi_n.values();
  auto b = phi_next.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k]) < h) {
      sum += std::abs(b[k] - a[k]);
      ++s.m;
    }
  }
  if (s.m == 0) {
    s.q = 0.0;
    s.converged = true;
    return s;
  }
  s.q = sum;
  s.converged = s.q <= s.threshold;
  return s;
}

/// Foreground is phi >= 0.
inline Mask mask_of(const LevelSetField& phi) {
  Mask out(phi.width(), phi.height(), phi.spacing());
  auto src = phi.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] >= 0.0 ? 1 : 0;
  return out;
}

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Pixels whose inside/outside label (zero counts as inside) differs from the
/// right or lower neighbour's.
inline std::vector<Pixel> extract_contour(const LevelSetField& phi) {
  std::vector<Pixel> out;
  auto inside = [&](int i, int j) { return phi(i, j) >= 0.0; };
  for (int i = 0; i < phi.height(); ++i) {
    for (int j = 0; j < phi.width(); ++j) {
      const bool here = inside(i, j);
      const bool right = j + 1 < phi.width() && inside(i, j + 1) != here;
      const bool down = i + 1 < phi.height() && inside(i + 1, j) != here;
      if (right || down) out.push_back({i, j});
    }
  }
  return out;
}

struct TraceRecord {
  int iter = 0;  ///< 1-based iteration count
  double c1 = 0.0;
  double c2 = 0.0;
  double length = 0.0;
  double area_inside = 0.0;
  double energy = 0.0;
  double q = 0.0;
  int m = 0;
};

struct SegmentationResult {
  LevelSetField phi;
  Mask mask;
  std::vector<Pixel> contour;
  int iterations_used = 0;
  bool converged = false;
  /// State after each iteration; record k describes phi after step k + 1.
  std::vector<TraceRecord> trace;
  RegionStats initial_stats;
  double initial_energy = 0.0;
};

/// Runs the loop from an explicit initial level set.
inline SegmentationResult segment(const ScalarField& u0, const Params& params,
                                  LevelSetField phi) {
  params.validate();
  require_same_shape(u0, phi.field(), "segment");
  if (u0.spacing() != params.h || phi.spacing() != params.h) {
    throw ParameterError("segment: grid spacing differs from params.h");
  }

  SegmentationResult result;
  RegionStats stats = region_stats(u0, phi, params.eps);
  result.initial_stats = stats;
  result.initial_energy = total_energy(u0, phi, params, stats);
  result.trace.reserve(static_cast<std::size_t>(params.max_iters));

  const double dtau = params.reinit_time_step();
  for (int n = 0; n < params.max_iters; ++n) {
    LevelSetField next;
    try {
      next = evolve_step(phi, u0, params, stats);
      if (params.reinit_steps > 0 && (n + 1) % params.reinit_every == 0) {
        next = reinitialize(next, params.reinit_steps, dtau,
                            params.reinit_subcell_fix ? ReinitScheme::subcell_fix
                                                      : ReinitScheme::upwind);
      }
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (iteration " + std::to_string(n) + ")",
                           e.row(), e.col(), n);
    }
    const StopCheck stop = has_converged(phi, next, params);
    phi = std::move(next);
    stats = region_stats(u0, phi, params.eps);
    result.trace.push_back({n + 1, stats.c1, stats.c2, stats.length, stats.area_inside,
                            total_energy(u0, phi, params, stats), stop.q, stop.m});
    result.iterations_used = n + 1;
    if (stop.converged) {
      result.converged = true;
      break;
    }
  }

  result.mask = mask_of(phi);
  result.contour = extract_contour(phi);
  result.phi = std::move(phi);
  return result;
}

inline SegmentationResult segment(const ScalarField& u0, const Params& params,
                                  const InitSpec& spec) {
  return segment(u0, params, init_phi(u0.width(), u0.height(), params.h, spec));
}

}  // namespace chanvese
