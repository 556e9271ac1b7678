#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hbarsim/errors.hpp"
#include "hbarsim/rng.hpp"

namespace hbarsim {

// Gaussian white-noise fluctuation of the effective Planck constant,
// hbar -> hbar * (1 + eps(t)), with
//
//   E[eps(t)] = 0,   E[eps(t) eps(t')] = tau * delta(t - t'),
//
// where tau = sigma^2 * delta_t. tau (a time) is the single physical
// parameter; sigma and the correlation time delta_t matter only for the
// tail-event diagnostics below.
struct NoiseParams {
  double tau = 0.0;                  // s
  std::optional<double> delta_t;     // s
  std::optional<double> sigma;       // dimensionless

  static NoiseParams from_tau(double tau) { return NoiseParams{tau, {}, {}}; }

  static NoiseParams from_sigma(double sigma, double delta_t) {
    return NoiseParams{sigma * sigma * delta_t, delta_t, sigma};
  }

  void validate() const;
};

// One discretized realization of eps(t): piecewise constant over the grid
// cells, plus the running integral W(t) = int_0^t eps dt'. W is the only
// functional of eps that enters any observable.
struct NoisePath {
  std::vector<double> times;  // n_steps + 1 points, 0 = times[0]
  std::vector<double> eps;    // n_steps cell values
  std::vector<double> w;      // n_steps + 1, w[0] = 0

  double w_end() const { return w.back(); }
};

// Draws one path. Each cell samples the coarse-grained Gaussian with
// variance tau/dt, which reproduces Var[W(t)] = tau*t on any grid; structure
// below the correlation time is model dependent, so dt < delta_t is refused.
NoisePath sample_path(const NoiseParams& params, double t_end,
                      std::int64_t n_steps, const RandomStream& stream);

// Same, reusing the caller's storage (hot-loop form).
void sample_path(const NoiseParams& params, double t_end, std::int64_t n_steps,
                 const RandomStream& stream, NoisePath& out);

// Var[W(t)] = tau * t.
double integrated_noise_variance(const NoiseParams& params, double t);

// E[e^{-i omega W(t)}] resummed: partial sum of sum_k (-omega^2 tau t)^k /
// (2^k k!) up to `order`, or the full exponential e^{-omega^2 tau t / 2} when
// order is absent.
double damping_factor(double omega, const NoiseParams& params, double t,
                      std::optional<int> order = std::nullopt);

// Expected number of eps < -1 draws (imaginary representation factor) over a
// period T: (T / (2 delta_t)) * erfc(1 / sqrt(2 sigma^2)). Needs delta_t and
// sigma, not just tau. Evaluated in log domain so the deep tail does not
// underflow.
double negative_fluctuation_count(const NoiseParams& params, double total_time);

// Largest sigma for which the expected count of eps < -1 events over
// total_time stays at one, by bisection to relative tolerance 1e-6. When
// even sigma = 1 cannot produce one event the bound is vacuous and the
// sentinel (1.0) is returned.
double max_sigma(double delta_t, double total_time);

inline constexpr double max_sigma_sentinel = 1.0;

// log(erfc(x)) without premature underflow (asymptotic branch for large x).
double log_erfc(double x);

}  // namespace hbarsim
