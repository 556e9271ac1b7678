#include "hbarsim/photon.hpp"

#include <cmath>

namespace hbarsim {

void InterferometerSpec::validate() const {
  if (!(arm_length > 0.0))
    throw NonPositiveLength("interferometer: arm length must be > 0");
  if (!(light_frequency > 0.0))
    throw ValidationError("interferometer: light frequency must be > 0");
  if (!(bandwidth > 0.0))
    throw ValidationError("interferometer: bandwidth must be > 0");
  if (!(power > 0.0)) throw ValidationError("interferometer: power must be > 0");
}

double InterferometerSpec::angular_frequency() const {
  return convention == AngularFrequencyConvention::omega_is_2pi_nu
             ? 2.0 * M_PI * light_frequency
             : light_frequency;
}

namespace {

void check_geometry(const NoiseParams& params, double arm_length, double c) {
  params.validate();
  if (!(arm_length > 0.0))
    throw NonPositiveLength("arm length must be > 0");
  if (!(c > 0.0)) throw ValidationError("speed of light must be > 0");
}

double decoherence_exponent(double omega, const NoiseParams& params,
                            double arm_length, double c) {
  return omega * omega * params.tau * arm_length / (4.0 * c);
}

}  // namespace

double photon_spread(const NoiseParams& params, double t, double c) {
  params.validate();
  if (!(t >= 0.0)) throw NegativeTime("photon_spread: t must be >= 0");
  if (!(c > 0.0)) throw ValidationError("photon_spread: c must be > 0");
  return c * c * params.tau * t / 4.0;
}

double travel_time_variance(const NoiseParams& params, double arm_length,
                            double c) {
  check_geometry(params, arm_length, c);
  return params.tau * arm_length / (4.0 * c);
}

double fringe_intensity(double omega, const NoiseParams& params,
                        double arm_length, double c, double phase) {
  check_geometry(params, arm_length, c);
  if (!(omega > 0.0)) throw ValidationError("fringe_intensity: omega must be > 0");
  const double damping =
      std::exp(-decoherence_exponent(omega, params, arm_length, c));
  return 0.5 * (1.0 + std::cos(phase) * damping);
}

double interference_intensity(double omega, const NoiseParams& params,
                              double arm_length, double c) {
  check_geometry(params, arm_length, c);
  if (!(omega > 0.0))
    throw ValidationError("interference_intensity: omega must be > 0");
  return 0.5 *
         (1.0 + std::exp(-decoherence_exponent(omega, params, arm_length, c)));
}

double visibility(double omega, const NoiseParams& params, double arm_length,
                  double c) {
  check_geometry(params, arm_length, c);
  if (!(omega > 0.0)) throw ValidationError("visibility: omega must be > 0");
  return std::exp(-decoherence_exponent(omega, params, arm_length, c));
}

EnsembleEstimate mc_interference(double omega, const NoiseParams& params,
                                 double arm_length, double c,
                                 const EnsembleConfig& config) {
  check_geometry(params, arm_length, c);
  if (!(omega > 0.0)) throw ValidationError("mc_interference: omega must be > 0");

  // One path, two cells of width L/c: cell increments are the two slits'
  // independent W integrals, dt_i = W_i / 2.
  EnsembleConfig pair_config = config;
  pair_config.n_steps = 2;
  pair_config.t_end = 2.0 * arm_length / c;

  const auto central_fringe = [omega](const NoisePath& path) {
    const double dt1 = 0.5 * (path.w[1] - path.w[0]);
    const double dt2 = 0.5 * (path.w[2] - path.w[1]);
    return 0.5 * (1.0 + std::cos(omega * (dt1 - dt2)));
  };
  return estimate(pair_config, params, central_fringe, "central_fringe_intensity");
}

double effective_speed_variance(const NoiseParams& params, double arm_length,
                                double c) {
  check_geometry(params, arm_length, c);
  return c * params.tau / (4.0 * arm_length);
}

TauBound shot_noise_bound(const InterferometerSpec& spec,
                          const PhysicalConstants& constants) {
  spec.validate();
  constants.validate();
  const double omega = spec.angular_frequency();
  const double shot_noise = std::sqrt(
      constants.h * spec.light_frequency * spec.bandwidth / spec.power);
  TauBound bound;
  bound.tau_max =
      4.0 * constants.c * shot_noise / (omega * omega * spec.arm_length);
  bound.lambda_gev = constants.hbar / bound.tau_max / constants.electronvolt / 1e9;
  return bound;
}

VarianceDecomposition mc_travel_time(const NoiseParams& params,
                                     double arm_length, double c,
                                     const EnsembleConfig& config,
                                     TravelSampling sampling) {
  check_geometry(params, arm_length, c);
  EnsembleConfig travel_config = config;
  travel_config.t_end = arm_length / c;

  PathObservable arrival;
  if (sampling == TravelSampling::leading_order) {
    arrival = [](const NoisePath& path) {
      return path.times.back() + 0.5 * path.w_end();
    };
  } else {
    arrival = [](const NoisePath& path) {
      double total = 0.0;
      for (std::size_t i = 0; i < path.eps.size(); ++i) {
        const double eps = std::max(path.eps[i], -1.0);
        total += std::sqrt(1.0 + eps) * (path.times[i + 1] - path.times[i]);
      }
      return total;
    };
  }
  const auto zero = [](const NoisePath&) { return 0.0; };
  return estimate_variance_decomposed(travel_config, params, arrival, zero);
}

}  // namespace hbarsim
