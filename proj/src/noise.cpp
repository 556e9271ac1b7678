#include "hbarsim/noise.hpp"

#include <cmath>
#include <string>

namespace hbarsim {

void NoiseParams::validate() const {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw ValidationError("noise strength tau must be finite and >= 0");
  if (delta_t && !(*delta_t > 0.0))
    throw ValidationError("correlation time delta_t must be > 0");
  if (sigma && !(*sigma >= 0.0))
    throw ValidationError("per-interval sigma must be >= 0");
  if (delta_t && sigma) {
    const double expected = (*sigma) * (*sigma) * (*delta_t);
    const double scale = std::max(std::abs(tau), std::abs(expected));
    if (std::abs(tau - expected) > 1e-12 * scale)
      throw ValidationError("tau inconsistent with sigma^2 * delta_t");
  }
}

void sample_path(const NoiseParams& params, double t_end, std::int64_t n_steps,
                 const RandomStream& stream, NoisePath& out) {
  params.validate();
  if (!(t_end > 0.0))
    throw NonPositiveHorizon("sample_path: t_end must be > 0");
  if (n_steps < 1)
    throw ValidationError("sample_path: n_steps must be >= 1");
  const double dt = t_end / static_cast<double>(n_steps);
  if (params.delta_t && dt < *params.delta_t)
    throw StepBelowCorrelationTime(
        "sample_path: grid step " + std::to_string(dt) +
        " is below the correlation time; refusing to invent sub-correlation "
        "structure");

  const auto n = static_cast<std::size_t>(n_steps);
  out.times.resize(n + 1);
  out.eps.resize(n);
  out.w.resize(n + 1);

  const double cell_std = std::sqrt(params.tau / dt);
  NormalStream normals = stream.normals();

  out.times[0] = 0.0;
  out.w[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.times[i + 1] = dt * static_cast<double>(i + 1);
    out.eps[i] = cell_std * normals.next();
    // exact cell-sum rule: w increments by eps * cell width
    out.w[i + 1] = out.w[i] + out.eps[i] * (out.times[i + 1] - out.times[i]);
  }
}

NoisePath sample_path(const NoiseParams& params, double t_end,
                      std::int64_t n_steps, const RandomStream& stream) {
  NoisePath path;
  sample_path(params, t_end, n_steps, stream, path);
  return path;
}

double integrated_noise_variance(const NoiseParams& params, double t) {
  params.validate();
  if (!(t >= 0.0)) throw NegativeTime("integrated_noise_variance: t must be >= 0");
  return params.tau * t;
}

double damping_factor(double omega, const NoiseParams& params, double t,
                      std::optional<int> order) {
  params.validate();
  if (!(t >= 0.0)) throw NegativeTime("damping_factor: t must be >= 0");
  if (order && *order < 0)
    throw ValidationError("damping_factor: order must be >= 0");
  const double half_exponent = 0.5 * omega * omega * params.tau * t;
  if (!order) return std::exp(-half_exponent);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= *order; ++k) {
    term *= -half_exponent / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

double log_erfc(double x) {
  if (x < 8.0) return std::log(std::erfc(x));
  // erfc(x) = exp(-x^2) / (x sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k.
  // The series terms shrink well below 1e-18 long before the asymptotic
  // divergence kicks in for x >= 8.
  const double inv_2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term *= -(2.0 * k - 1.0) * inv_2x2;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return -x * x - std::log(x) - 0.5 * std::log(M_PI) + std::log(sum);
}

namespace {

double log_negative_fluctuation_count(double sigma, double delta_t,
                                      double total_time) {
  const double x = 1.0 / (sigma * std::sqrt(2.0));
  return std::log(total_time / (2.0 * delta_t)) + log_erfc(x);
}

}  // namespace

double negative_fluctuation_count(const NoiseParams& params,
                                  double total_time) {
  params.validate();
  if (!params.delta_t || !params.sigma)
    throw MissingCorrelationTime(
        "negative_fluctuation_count: needs delta_t and sigma, not just tau");
  if (!(total_time > 0.0))
    throw NonPositiveHorizon("negative_fluctuation_count: T must be > 0");
  if (*params.sigma == 0.0) return 0.0;
  return std::exp(
      log_negative_fluctuation_count(*params.sigma, *params.delta_t, total_time));
}

double max_sigma(double delta_t, double total_time) {
  if (!(delta_t > 0.0))
    throw ValidationError("max_sigma: delta_t must be > 0");
  if (!(total_time > 0.0))
    throw NonPositiveHorizon("max_sigma: T must be > 0");

  const auto log_count = [&](double sigma) {
    return log_negative_fluctuation_count(sigma, delta_t, total_time);
  };

  double hi = max_sigma_sentinel;
  if (log_count(hi) < 0.0) return max_sigma_sentinel;  // vacuous bound

  double lo = 0.5 * hi;
  while (log_count(lo) >= 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300)
      throw BracketFailure("max_sigma: failed to bracket the unit count");
  }

  // count is strictly increasing in sigma, so the root is unique
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (log_count(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hbarsim
