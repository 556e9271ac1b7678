#pragma once

#include "hbarsim/constants.hpp"
#include "hbarsim/ensemble.hpp"
#include "hbarsim/noise.hpp"

namespace hbarsim {

enum class AngularFrequencyConvention { omega_is_2pi_nu, omega_is_nu };

struct InterferometerSpec {
  double arm_length = 1000.0;       // m
  double light_frequency = 1e14;    // Hz
  double bandwidth = 1.0;           // Hz
  double power = 10.0;              // W
  AngularFrequencyConvention convention =
      AngularFrequencyConvention::omega_is_2pi_nu;

  void validate() const;
  double angular_frequency() const;
};

// Massless packet: quadratic spreading is absent, the noise random-walks the
// arrival to leading order in sqrt(1+eps), Var x = c^2 tau t / 4.
double photon_spread(const NoiseParams& params, double t, double c);

// Var[dt] over a baseline L: tau L / (4c).
double travel_time_variance(const NoiseParams& params, double arm_length,
                            double c);

// Normalized central-fringe intensity (1/2)(1 + exp(-omega^2 tau L / 4c)):
// 1 at tau = 0, 1/2 when coherence is gone.
double interference_intensity(double omega, const NoiseParams& params,
                              double arm_length, double c);

// Intensity at fringe phase `phase`: (1/2)(1 + cos(phase) exp(-omega^2 tau L
// / 4c)). phase = 0 recovers the central fringe.
double fringe_intensity(double omega, const NoiseParams& params,
                        double arm_length, double c, double phase);

// Fringe contrast (I_max - I_min)/(I_max + I_min) = exp(-omega^2 tau L / 4c).
double visibility(double omega, const NoiseParams& params, double arm_length,
                  double c);

// Monte-Carlo oracle for the central fringe: each sample draws the two slits'
// time shifts from one two-cell path over 2L/c (two independent Brownian
// increments of variance tau L / 4c each) and averages
// (1/2)(1 + cos(omega (dt1 - dt2))). Treating the shifts as uncorrelated is a
// modeling choice: the two geometric paths overlap, but each slit's shift is
// taken as an independent realization of the noise. n_paths and master_seed
// come from config; the path geometry is fixed by (L, c).
EnsembleEstimate mc_interference(double omega, const NoiseParams& params,
                                 double arm_length, double c,
                                 const EnsembleConfig& config);

// (Delta c)^2 / c^2 = c tau / (4 L).
double effective_speed_variance(const NoiseParams& params, double arm_length,
                                double c);

// Largest tau whose intensity deficit stays below the shot-noise floor:
// omega^2 (tau/4)(L/c) = sqrt(h nu dnu / I), plus the implied energy scale
// hbar / tau in GeV.
TauBound shot_noise_bound(const InterferometerSpec& spec,
                          const PhysicalConstants& constants);

// Arrival-time sampling modes. leading_order keeps sqrt(1+eps) ~ 1 + eps/2
// (arrival = L/c + W/2, the closed forms above). exact_sqrt sums
// sqrt(1+eps) dt per cell (eps clamped at -1) and quantifies the order
// sigma^2 drift the leading-order treatment drops at the simulated
// granularity.
enum class TravelSampling { leading_order, exact_sqrt };

VarianceDecomposition mc_travel_time(const NoiseParams& params,
                                     double arm_length, double c,
                                     const EnsembleConfig& config,
                                     TravelSampling sampling);

}  // namespace hbarsim
