#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hbarsim/free_particle.hpp"

using namespace hbarsim;

namespace {

// natural units throughout: hbar = 1, m = 1
const GaussianPacket reference{1.0, 0.1, 1.0, 1.0};

EnsembleConfig mc_config(double t, std::int64_t n_paths, std::uint64_t seed) {
  EnsembleConfig config;
  config.n_paths = n_paths;
  config.master_seed = seed;
  config.n_steps = 32;
  config.t_end = t;
  return config;
}

}  // namespace

TEST_CASE("packet validation") {
  CHECK_THROWS_AS((GaussianPacket{1.0, 0.0, 1.0, 1.0}.validate()),
                  ValidationError);
  CHECK_THROWS_AS((GaussianPacket{1.0, 0.1, 0.0, 1.0}.validate()),
                  ValidationError);
  CHECK_NOTHROW(reference.validate());
  // minimum-uncertainty invariants
  CHECK(reference.momentum_variance() == 0.5 * 0.1 * 0.1);
  CHECK(reference.position_variance(0.0) * reference.momentum_variance() ==
        doctest::Approx(0.25).epsilon(1e-14));  // hbar^2/4
}

TEST_CASE("mean displacement is ballistic") {
  CHECK(mean_displacement(GaussianPacket{0.0, 0.1, 1.0, 1.0}, 7.0) == 0.0);
  CHECK(mean_displacement(reference, 10.0) == 10.0);
  CHECK_THROWS_AS(mean_displacement(reference, -1.0), NegativeTime);
}

TEST_CASE("spread growth closed form") {
  // pure quantum spreading at tau = 0
  CHECK(spread_growth(reference, NoiseParams::from_tau(0.0), 10.0) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // the worked value: 0.5 + 1.005 * 0.01 * 10
  CHECK(spread_growth(reference, NoiseParams::from_tau(0.01), 10.0) ==
        doctest::Approx(0.6005).epsilon(1e-13));

  CHECK_THROWS_AS(spread_growth(reference, NoiseParams::from_tau(0.01), -1.0),
                  NegativeTime);
}

TEST_CASE("excess spread is linear in tau") {
  const double quantum = spread_growth(reference, NoiseParams::from_tau(0.0), 10.0);
  const double excess1 =
      spread_growth(reference, NoiseParams::from_tau(0.01), 10.0) - quantum;
  const double excess2 =
      spread_growth(reference, NoiseParams::from_tau(0.02), 10.0) - quantum;
  CHECK(excess2 == doctest::Approx(2.0 * excess1).epsilon(1e-12));
}

TEST_CASE("spread growth is monotone in t and tau") {
  double previous = -1.0;
  for (const double t : {0.0, 1.0, 5.0, 20.0, 100.0}) {
    const double value = spread_growth(reference, NoiseParams::from_tau(0.01), t);
    CHECK(value > previous);
    previous = value;
  }
  previous = -1.0;
  for (const double tau : {0.0, 1e-4, 1e-3, 1e-2, 1e-1}) {
    const double value = spread_growth(reference, NoiseParams::from_tau(tau), 10.0);
    CHECK(value > previous);
    previous = value;
  }
}

TEST_CASE("diffusion coefficient") {
  CHECK(diffusion_coefficient(reference, NoiseParams::from_tau(0.0)) == 0.0);
  CHECK(diffusion_coefficient(reference, NoiseParams::from_tau(0.01)) ==
        doctest::Approx(0.005025).epsilon(1e-14));

  // the linear-in-t spread term is exactly 2 D t
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const double quantum = spread_growth(reference, NoiseParams::from_tau(0.0), 10.0);
  const double excess = spread_growth(reference, params, 10.0) - quantum;
  CHECK(excess == doctest::Approx(2.0 * diffusion_coefficient(reference, params) *
                                  10.0)
                      .epsilon(1e-12));
}

TEST_CASE("mean free path reading of D for narrow packets") {
  // for delta << p_bar, 2 D m / p_bar = (p_bar/m) tau up to delta^2/(2 p^2)
  const GaussianPacket narrow{2.0, 0.01, 1.0, 1.0};
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const double mean_free_path = narrow.p_bar / narrow.mass * params.tau;
  const double from_d = 2.0 * diffusion_coefficient(narrow, params) *
                        narrow.mass / narrow.p_bar;
  const double relative = std::abs(from_d - mean_free_path) / mean_free_path;
  const double bound = narrow.delta * narrow.delta /
                       (2.0 * narrow.p_bar * narrow.p_bar);
  CHECK(relative <= bound * (1.0 + 1e-12));
}

TEST_CASE("mc spread at tau = 0 equals the closed form exactly") {
  const NoiseParams quiet = NoiseParams::from_tau(0.0);
  const auto estimate = mc_spread(reference, quiet, mc_config(10.0, 2000, 5));
  CHECK(estimate.mean == spread_growth(reference, quiet, 10.0));
  CHECK(estimate.std_error == 0.0);
}

TEST_CASE("mc spread reproduces the worked value") {
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const auto estimate =
      mc_spread(reference, params, mc_config(10.0, 100000, 2030));
  CHECK(std::abs(estimate.mean - 0.6005) < 3.0 * estimate.std_error);
  CHECK(estimate.std_error > 0.0);
  CHECK(estimate.std_error < 0.01);
}

TEST_CASE("mc spread matches the closed form on the tau-time grid") {
  for (const double tau : {0.0, 1e-3, 1e-2}) {
    for (const double t : {1.0, 10.0, 100.0}) {
      const NoiseParams params = NoiseParams::from_tau(tau);
      const auto estimate =
          mc_spread(reference, params, mc_config(t, 20000, 4242));
      const double closed = spread_growth(reference, params, t);
      if (tau == 0.0) {
        CHECK(estimate.mean == closed);
      } else {
        CHECK(std::abs(estimate.mean - closed) < 3.0 * estimate.std_error);
      }
    }
  }
}

TEST_CASE("least-squares slope at narrow delta recovers 2D") {
  // delta -> 0: growth(t) ~ 2 D t; weighted fit of MC estimates vs t
  const GaussianPacket narrow{1.0, 1e-3, 1.0, 1.0};
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const double expected_slope = 2.0 * diffusion_coefficient(narrow, params);

  std::vector<double> ts{2.0, 4.0, 6.0, 8.0, 10.0};
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto estimate = mc_spread(
        narrow, params, mc_config(ts[i], 40000, 808 + static_cast<int>(i)));
    const double weight = 1.0 / (estimate.std_error * estimate.std_error);
    sw += weight;
    swx += weight * ts[i];
    swy += weight * estimate.mean;
    swxx += weight * ts[i] * ts[i];
    swxy += weight * ts[i] * estimate.mean;
  }
  const double det = sw * swxx - swx * swx;
  const double slope = (sw * swxy - swx * swy) / det;
  const double slope_se = std::sqrt(sw / det);
  CHECK(std::abs(slope - expected_slope) < 3.0 * slope_se);
}

TEST_CASE("z-scores are calibrated across seeds") {
  // estimate minus closed form over its std error behaves standard normal
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const double closed = spread_growth(reference, params, 10.0);
  int within_three = 0;
  const int n_runs = 100;
  for (int seed = 0; seed < n_runs; ++seed) {
    const auto estimate = mc_spread(reference, params,
                                    mc_config(10.0, 2000, 9000 + seed));
    const double z = (estimate.mean - closed) / estimate.std_error;
    if (std::abs(z) < 3.0) ++within_three;
  }
  CHECK(within_three >= 99);
}
