#pragma once

#include "hbarsim/ensemble.hpp"
#include "hbarsim/noise.hpp"

namespace hbarsim {

// Minimum-uncertainty Gaussian wave packet in momentum space: peak momentum
// p_bar, profile width delta, so Var p = delta^2/2 and Var x = hbar^2 /
// (2 delta^2) at t = 0.
struct GaussianPacket {
  double p_bar = 0.0;  // kg m/s
  double delta = 1.0;  // kg m/s
  double mass = 1.0;   // kg
  double hbar = 1.0;   // J s

  void validate() const;

  double momentum_variance() const { return 0.5 * delta * delta; }

  // Quantum moments at effective elapsed time s. The noise enters the state
  // only through the integral W(t), so a path's quantum evolution is the
  // free one evaluated at s = t + W(t); no per-path PDE solve is needed.
  double mean_position(double s) const { return p_bar / mass * s; }
  double position_variance(double s) const {
    return hbar * hbar / (2.0 * delta * delta) +
           (delta * delta) / (2.0 * mass * mass) * (s * s);
  }
};

// Ballistic displacement (p_bar/m) t; the noise does not shift it.
double mean_displacement(const GaussianPacket& packet, double t);

// Growth of the noise-averaged squared position uncertainty,
//   (delta^2 / 2m^2) t^2  +  ((p_bar^2 + delta^2/2) / m^2) tau t.
double spread_growth(const GaussianPacket& packet, const NoiseParams& params,
                     double t);

// D = (p_bar^2 + delta^2/2) / (2 m^2) * tau; the linear-in-t spread term is
// 2 D t.
double diffusion_coefficient(const GaussianPacket& packet,
                             const NoiseParams& params);

// Monte-Carlo cross-check of spread_growth on sampled paths (per-path quantum
// mean and variance combined by the law of total variance). Evaluated at
// t = config.t_end.
VarianceDecomposition mc_spread_decomposition(const GaussianPacket& packet,
                                              const NoiseParams& params,
                                              const EnsembleConfig& config);

EnsembleEstimate mc_spread(const GaussianPacket& packet,
                           const NoiseParams& params,
                           const EnsembleConfig& config);

}  // namespace hbarsim
