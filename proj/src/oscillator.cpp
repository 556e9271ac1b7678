#include "hbarsim/oscillator.hpp"

#include <cmath>

namespace hbarsim {

void CoherentStateSpec::validate() const {
  if (!(omega > 0.0)) throw ValidationError("coherent state: omega must be > 0");
  if (!(mass > 0.0)) throw ValidationError("coherent state: mass must be > 0");
  if (!(hbar > 0.0)) throw ValidationError("coherent state: hbar must be > 0");
  if (!std::isfinite(lambda))
    throw ValidationError("coherent state: lambda must be finite");
}

CavitySpec CavitySpec::from_q(double quality_factor, double omega) {
  CavitySpec cavity;
  cavity.quality_factor = quality_factor;
  cavity.omega = omega;
  cavity.decay_time = quality_factor / omega;
  return cavity;
}

void CavitySpec::validate() const {
  if (!(quality_factor > 0.0)) throw ValidationError("cavity: Q must be > 0");
  if (!(omega > 0.0)) throw ValidationError("cavity: omega must be > 0");
  const double expected = quality_factor / omega;
  if (std::abs(decay_time - expected) > 1e-12 * expected)
    throw ValidationError("cavity: decay time inconsistent with Q/omega");
}

namespace {

void check_time(double t, const char* what) {
  if (!(t >= 0.0)) throw NegativeTime(std::string(what) + ": t must be >= 0");
}

// 1 - e^{-u} without cancellation; zero exactly at u = 0.
double one_minus_exp(double u) { return -std::expm1(-u); }

}  // namespace

std::complex<double> mean_ladder(const CoherentStateSpec& spec,
                                 const NoiseParams& params, double t) {
  spec.validate();
  params.validate();
  check_time(t, "mean_ladder");
  const double damping = std::exp(-0.5 * spec.omega * spec.omega * params.tau * t);
  return spec.lambda * damping *
         std::complex<double>(std::cos(spec.omega * t), -std::sin(spec.omega * t));
}

CoherentMoments coherent_moments(const CoherentStateSpec& spec,
                                 const NoiseParams& params, double t) {
  spec.validate();
  params.validate();
  check_time(t, "coherent_moments");
  const double u = spec.omega * spec.omega * params.tau * t;
  const double first_damping = std::exp(-0.5 * u);
  const double second_damping =
      spec.mode == MomentMode::exact ? std::exp(-2.0 * u) : std::exp(-u);
  const double ll = spec.lambda * spec.lambda;
  const double cos2 = std::cos(2.0 * spec.omega * t);

  CoherentMoments m;
  m.mean_x = spec.x_amplitude() * spec.lambda * std::cos(spec.omega * t) *
             first_damping;
  m.mean_p = -spec.p_amplitude() * spec.lambda * std::sin(spec.omega * t) *
             first_damping;
  m.mean_x2 = spec.x2_scale() * (0.5 + ll * (1.0 + cos2 * second_damping));
  m.mean_p2 = spec.p2_scale() * (0.5 + ll * (1.0 - cos2 * second_damping));
  return m;
}

namespace {

// Var x / x2_scale and Var p / p2_scale. With A = 1 - e^{-u} these are
//   exact:     0.5 + lambda^2 A (1 -+ cos(2 omega t) e^{-u})
//   half_rate: 0.5 + lambda^2 A
// (the half-rate mode's cos terms cancel between mean_x2 and mean_x^2).
// Written through A so tau = 0 collapses to 0.5 exactly.
double variance_factor(const CoherentStateSpec& spec, const NoiseParams& params,
                       double t, double cos_sign) {
  const double u = spec.omega * spec.omega * params.tau * t;
  const double excess = one_minus_exp(u);
  const double ll = spec.lambda * spec.lambda;
  if (spec.mode == MomentMode::half_rate) return 0.5 + ll * excess;
  const double cos2 = std::cos(2.0 * spec.omega * t);
  return 0.5 + ll * excess * (1.0 + cos_sign * cos2 * std::exp(-u));
}

}  // namespace

double position_variance(const CoherentStateSpec& spec,
                         const NoiseParams& params, double t) {
  spec.validate();
  params.validate();
  check_time(t, "position_variance");
  return spec.x2_scale() * variance_factor(spec, params, t, -1.0);
}

double momentum_variance(const CoherentStateSpec& spec,
                         const NoiseParams& params, double t) {
  spec.validate();
  params.validate();
  check_time(t, "momentum_variance");
  return spec.p2_scale() * variance_factor(spec, params, t, +1.0);
}

double uncertainty_product(const CoherentStateSpec& spec,
                           const NoiseParams& params, double t) {
  spec.validate();
  params.validate();
  check_time(t, "uncertainty_product");
  if (spec.mode == MomentMode::half_rate) {
    const double u = spec.omega * spec.omega * params.tau * t;
    return 0.5 * spec.hbar *
           (1.0 + 2.0 * spec.lambda * spec.lambda * one_minus_exp(u));
  }
  return spec.hbar * std::sqrt(variance_factor(spec, params, t, -1.0) *
                               variance_factor(spec, params, t, +1.0));
}

bool cavity_adiabatic(const CavitySpec& cavity, const NoiseParams& params) {
  return cavity.decay_time > 100.0 * params.tau;
}

double cavity_uncertainty_product(const CoherentStateSpec& spec,
                                  const CavitySpec& cavity,
                                  const NoiseParams& params, double t) {
  spec.validate();
  cavity.validate();
  params.validate();
  check_time(t, "cavity_uncertainty_product");
  const double leak = std::exp(-2.0 * t / cavity.decay_time);
  if (spec.mode == MomentMode::half_rate) {
    const double u = spec.omega * spec.omega * params.tau * t;
    return 0.5 * spec.hbar *
           (1.0 + 2.0 * spec.lambda * spec.lambda * leak * one_minus_exp(u));
  }
  const double excess = uncertainty_product(spec, params, t) - 0.5 * spec.hbar;
  return 0.5 * spec.hbar + leak * excess;
}

double peak_time(const CavitySpec& cavity, const NoiseParams& params) {
  cavity.validate();
  params.validate();
  const double x = cavity.quality_factor * cavity.omega * params.tau;
  if (x == 0.0) return peak_time_sentinel;
  return cavity.decay_time * std::log1p(0.5 * x) / x;
}

double peak_excess_shape(double q_omega_tau) {
  const double x = q_omega_tau;
  if (!(x > 0.0)) throw ValidationError("peak_excess_shape: x must be > 0");
  return x * std::exp(-((2.0 + x) / x) * std::log1p(0.5 * x));
}

double peak_product(const CoherentStateSpec& spec, const CavitySpec& cavity,
                    const NoiseParams& params) {
  spec.validate();
  cavity.validate();
  params.validate();
  const double x = cavity.quality_factor * cavity.omega * params.tau;
  if (x == 0.0) return 0.5 * spec.hbar;
  return 0.5 * spec.hbar *
         (1.0 + spec.lambda * spec.lambda * peak_excess_shape(x));
}

TauBound cavity_bound(const CavitySpec& cavity, double lambda,
                      double dhbar_over_hbar,
                      const PhysicalConstants& constants) {
  cavity.validate();
  constants.validate();
  if (!(lambda > 0.0)) throw ValidationError("cavity_bound: lambda must be > 0");
  if (!(dhbar_over_hbar > 0.0))
    throw InvalidMeasurementError(
        "cavity_bound: measurement precision must be > 0");

  const double target = dhbar_over_hbar / (lambda * lambda);
  double log_lo = std::log(1e-30);
  double log_hi = std::log(1e3);
  if (target >= peak_excess_shape(std::exp(log_hi)))
    throw UnattainablePrecision(
        "cavity_bound: peak excess never reaches the requested precision; no "
        "tau is excluded");
  if (target <= peak_excess_shape(std::exp(log_lo)))
    throw BracketFailure("cavity_bound: root below bracket");

  // f is strictly increasing, so plain bisection in log x converges to the
  // unique root.
  while (log_hi - log_lo > 1e-10) {
    const double mid = 0.5 * (log_lo + log_hi);
    (peak_excess_shape(std::exp(mid)) < target ? log_lo : log_hi) = mid;
  }
  const double x_root = std::exp(0.5 * (log_lo + log_hi));

  TauBound bound;
  bound.tau_max = x_root / (cavity.quality_factor * cavity.omega);
  bound.lambda_gev =
      constants.hbar / bound.tau_max / constants.electronvolt / 1e9;
  return bound;
}

OscillatorMcMoments mc_oscillator(const CoherentStateSpec& spec,
                                  const NoiseParams& params,
                                  const EnsembleConfig& config, double t) {
  spec.validate();
  check_time(t, "mc_oscillator");
  const double scale = std::max(std::abs(t), std::abs(config.t_end));
  if (std::abs(t - config.t_end) > 1e-12 * scale)
    throw ValidationError("mc_oscillator: t must equal config.t_end");

  const double lambda = spec.lambda;
  const double ll = lambda * lambda;
  const double omega = spec.omega;
  const double x_amp = spec.x_amplitude();
  const double p_amp = spec.p_amplitude();
  const double x2_scale = spec.x2_scale();
  const double p2_scale = spec.p2_scale();

  const PathObservable observables[] = {
      [=](const NoisePath& path) {
        return x_amp * lambda * std::cos(omega * (t + path.w_end()));
      },
      [=](const NoisePath& path) {
        return -p_amp * lambda * std::sin(omega * (t + path.w_end()));
      },
      [=](const NoisePath& path) {
        return x2_scale *
               (0.5 + ll * (1.0 + std::cos(2.0 * omega * (t + path.w_end()))));
      },
      [=](const NoisePath& path) {
        return p2_scale *
               (0.5 + ll * (1.0 - std::cos(2.0 * omega * (t + path.w_end()))));
      },
      [=](const NoisePath&) { return ll; },
  };
  const std::string names[] = {"mean_x", "mean_p", "mean_x2", "mean_p2",
                               "occupation"};
  auto estimates = estimate_many(config, params, observables, names);

  OscillatorMcMoments result;
  result.mean_x = std::move(estimates[0]);
  result.mean_p = std::move(estimates[1]);
  result.mean_x2 = std::move(estimates[2]);
  result.mean_p2 = std::move(estimates[3]);
  result.occupation = std::move(estimates[4]);
  return result;
}

}  // namespace hbarsim
