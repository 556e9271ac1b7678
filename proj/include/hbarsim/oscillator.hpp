#pragma once

#include <complex>
#include <limits>

#include "hbarsim/constants.hpp"
#include "hbarsim/ensemble.hpp"
#include "hbarsim/noise.hpp"

namespace hbarsim {

// Closed-form family for the noise-averaged second moments. The 2-omega
// oscillatory terms damp as exp(-2 omega^2 tau t) under the strict Gaussian
// average of cos(2 omega (t + W)) -- that is `exact`, and it is what path
// sampling reproduces. `half_rate` damps them as exp(-omega^2 tau t), half
// the exact rate; figure1 emits that variant. First moments are identical in
// both modes.
enum class MomentMode { exact, half_rate };

struct CoherentStateSpec {
  double lambda = 1.0;  // real coherent amplitude
  double omega = 1.0;   // 1/s
  double mass = 1.0;    // kg (1 for field quadratures)
  double hbar = 1.0;    // J s
  MomentMode mode = MomentMode::exact;

  void validate() const;

  // shared by the closed forms and the per-path sampler
  double x_amplitude() const { return std::sqrt(2.0 * hbar / (mass * omega)); }
  double p_amplitude() const { return std::sqrt(2.0 * hbar * mass * omega); }
  double x2_scale() const { return hbar / (mass * omega); }
  double p2_scale() const { return mass * hbar * omega; }
};

struct CavitySpec {
  double quality_factor = 1.0;  // Q = omega * t_c
  double omega = 1.0;           // 1/s
  double decay_time = 1.0;      // t_c, s

  static CavitySpec from_q(double quality_factor, double omega);
  void validate() const;
};

// Noise-averaged ladder expectation lambda e^{-i omega t} e^{-omega^2 tau
// t/2}: the Wick resummation of the Dyson series, matching
// damping_factor(omega, params, t).
std::complex<double> mean_ladder(const CoherentStateSpec& spec,
                                 const NoiseParams& params, double t);

struct CoherentMoments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
};

CoherentMoments coherent_moments(const CoherentStateSpec& spec,
                                 const NoiseParams& params, double t);

// Stable closed forms for the variances (algebraically mean_x2 - mean_x^2
// etc., written so that tau = 0 gives the coherent-state values exactly).
double position_variance(const CoherentStateSpec& spec,
                         const NoiseParams& params, double t);
double momentum_variance(const CoherentStateSpec& spec,
                         const NoiseParams& params, double t);

// Delta x * Delta p. half_rate mode: (hbar/2)[1 + 2 lambda^2 (1 -
// e^{-omega^2 tau t})]; exact mode: sqrt(Var x * Var p) of the exact-mode
// moments.
double uncertainty_product(const CoherentStateSpec& spec,
                           const NoiseParams& params, double t);

// Cavity dissipation enters as the adiabatic substitution lambda ->
// lambda e^{-t/t_c} in the excess over hbar/2; valid for t_c >> tau.
double cavity_uncertainty_product(const CoherentStateSpec& spec,
                                  const CavitySpec& cavity,
                                  const NoiseParams& params, double t);

bool cavity_adiabatic(const CavitySpec& cavity, const NoiseParams& params);

// Time of the unique interior maximum of the cavity uncertainty product,
//   t* = t_c ln(1 + Q omega tau / 2) / (Q omega tau),
// from the stationarity condition e^{omega^2 tau t*} = 1 + Q omega tau / 2.
// tau = 0 has no interior maximum: returns the sentinel (infinity).
double peak_time(const CavitySpec& cavity, const NoiseParams& params);

inline constexpr double peak_time_sentinel =
    std::numeric_limits<double>::infinity();

// Excess shape f(x) = x (2/(2+x))^{(2+x)/x}, strictly increasing, sup = 2.
double peak_excess_shape(double q_omega_tau);

// Product at the peak, (hbar/2)[1 + lambda^2 f(Q omega tau)]; equals
// cavity_uncertainty_product(peak_time) in half_rate mode.
double peak_product(const CoherentStateSpec& spec, const CavitySpec& cavity,
                    const NoiseParams& params);

// Inverts lambda^2 f(Q omega tau) = dhbar_over_hbar for tau (log-space
// bisection over x in [1e-30, 1e3], relative tolerance 1e-10) and converts
// to the energy scale hbar/tau in GeV.
TauBound cavity_bound(const CavitySpec& cavity, double lambda,
                      double dhbar_over_hbar, const PhysicalConstants& constants);

struct OscillatorMcMoments {
  EnsembleEstimate mean_x;
  EnsembleEstimate mean_p;
  EnsembleEstimate mean_x2;
  EnsembleEstimate mean_p2;
  EnsembleEstimate occupation;  // <a† a> = lambda^2 on every path
};

// Per-path moments from the phase map a -> a e^{-i omega (t + W)} (modulus
// preserving, energy untouched), noise-averaged over the path ensemble.
// t must equal config.t_end.
OscillatorMcMoments mc_oscillator(const CoherentStateSpec& spec,
                                  const NoiseParams& params,
                                  const EnsembleConfig& config, double t);

}  // namespace hbarsim
