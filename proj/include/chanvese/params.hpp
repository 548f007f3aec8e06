#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "chanvese/errors.hpp"

namespace chanvese {

/// Model and scheme constants. Defaults: nu = 0, lambda1 = lambda2 = 1,
/// p = 1, eps = h = 1; mu = 0.2 suits intensities normalized to [0, 1].
struct Params {
  double mu = 0.2;       ///< length penalty
  double nu = 0.0;       ///< area penalty
  double lambda1 = 1.0;  ///< inside fidelity weight
  double lambda2 = 1.0;  ///< outside fidelity weight
  int p = 1;             ///< exponent on Length(C)
  double eps = 1.0;      ///< Heaviside/delta regularization width
  /// Time step; unset means 0.5 h^2 / mu capped at 5 (0.5 when mu = 0).
  std::optional<double> dt;
  /// Reinitialization pseudo-time step; unset means 0.5 h.
  std::optional<double> dtau;
  double h = 1.0;
  int max_iters = 500;
  int reinit_every = 1;
  int reinit_steps = 10;
  /// Pin interface-adjacent pixels to their subcell distance estimate during
  /// reinitialization; false runs the plain upwind scheme everywhere.
  bool reinit_subcell_fix = true;
  double eta = 1e-8;  ///< added in quadrature under every gradient-norm root

  double time_step() const {
    if (dt) return *dt;
    if (mu > 0.0) return std::min(0.5 * h * h / mu, 5.0);
    return 0.5;
  }

  double reinit_time_step() const { return dtau.value_or(0.5 * h); }

  /// Throws ParameterError naming the first violated constraint.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw ParameterError(std::string("invalid parameter: ") + what);
    };
    require(std::isfinite(mu) && mu >= 0.0, "mu must be >= 0");
    require(std::isfinite(nu) && nu >= 0.0, "nu must be >= 0");
    require(std::isfinite(lambda1) && lambda1 > 0.0, "lambda1 must be > 0");
    require(std::isfinite(lambda2) && lambda2 > 0.0, "lambda2 must be > 0");
    require(p >= 1, "p must be >= 1");
    require(std::isfinite(eps) && eps > 0.0, "eps must be > 0");
    require(std::isfinite(h) && h > 0.0, "h must be > 0");
    require(!dt || (std::isfinite(*dt) && *dt > 0.0), "dt must be > 0");
    require(!dtau || (std::isfinite(*dtau) && *dtau > 0.0), "dtau must be > 0");
    require(reinit_time_step() <= 0.5 * h, "dtau must not exceed 0.5*h");
    require(max_iters >= 1, "max_iters must be >= 1");
    require(reinit_every >= 1, "reinit_every must be >= 1");
    require(reinit_steps >= 0, "reinit_steps must be >= 0");
    require(std::isfinite(eta) && eta > 0.0, "eta must be > 0");
  }
};

}  // namespace chanvese
