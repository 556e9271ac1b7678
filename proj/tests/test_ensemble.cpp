#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "hbarsim/ensemble.hpp"

using namespace hbarsim;

namespace {

EnsembleConfig config_for(std::int64_t n_paths, std::uint64_t seed,
                          std::int64_t n_steps = 16, double t_end = 10.0) {
  EnsembleConfig config;
  config.n_paths = n_paths;
  config.master_seed = seed;
  config.n_steps = n_steps;
  config.t_end = t_end;
  return config;
}

const PathObservable w_end = [](const NoisePath& path) { return path.w_end(); };

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_for(0, 1).validate(), ValidationError);
  CHECK_THROWS_AS(config_for(1, 1, 0).validate(), ValidationError);
  CHECK_THROWS_AS(config_for(1, 1, 1, 0.0).validate(), NonPositiveHorizon);
  CHECK_NOTHROW(config_for(1, 1).validate());
}

TEST_CASE("constant observable: exact mean, zero std error") {
  const auto result = estimate(config_for(10000, 3), NoiseParams::from_tau(0.01),
                               [](const NoisePath&) { return 1.0; }, "one");
  CHECK(result.mean == 1.0);
  CHECK(result.std_error == 0.0);
  CHECK(result.n_paths == 10000);
  CHECK(result.observable_name == "one");
}

TEST_CASE("W(t_end) has zero mean and brownian variance") {
  const double tau = 0.01;
  const double t_end = 10.0;
  const auto config = config_for(100000, 11, 16, t_end);
  const auto result = estimate(config, NoiseParams::from_tau(tau), w_end);
  CHECK(std::abs(result.mean) < 3.0 * result.std_error);
  // std_error = sample_std / sqrt(n): sample variance via the round trip
  const double sample_var =
      result.std_error * result.std_error * static_cast<double>(config.n_paths);
  CHECK(sample_var ==
        doctest::Approx(tau * t_end).epsilon(3.0 * std::sqrt(2.0 / 100000)));
}

TEST_CASE("identical seeds give identical estimates bit-exactly") {
  const auto config = config_for(20000, 555);
  const NoiseParams params = NoiseParams::from_tau(0.02);
  const auto a = estimate(config, params, w_end);
  const auto b = estimate(config, params, w_end);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);

  auto other = config;
  other.master_seed = 556;
  const auto c = estimate(other, params, w_end);
  CHECK(a.mean != c.mean);
}

TEST_CASE("serial and parallel execution agree bit-exactly") {
  auto config = config_for(50000, 99, 8, 5.0);
  const NoiseParams params = NoiseParams::from_tau(0.05);
  const PathObservable cosine = [](const NoisePath& path) {
    return std::cos(path.w_end()) + path.w[1];
  };

  config.execution = Execution::serial;
  const auto serial = estimate(config, params, cosine);
  config.execution = Execution::parallel;
  const auto parallel = estimate(config, params, cosine);
  CHECK(serial.mean == parallel.mean);
  CHECK(serial.std_error == parallel.std_error);

  config.execution = Execution::serial;
  const auto dec_serial = estimate_variance_decomposed(config, params, w_end,
                                                       cosine);
  config.execution = Execution::parallel;
  const auto dec_parallel = estimate_variance_decomposed(config, params, w_end,
                                                         cosine);
  CHECK(dec_serial.total_variance == dec_parallel.total_variance);
  CHECK(dec_serial.total_std_error == dec_parallel.total_std_error);
  CHECK(dec_serial.between_variance == dec_parallel.between_variance);
  CHECK(dec_serial.within_mean == dec_parallel.within_mean);
}

TEST_CASE("std error shrinks like 1/sqrt(n)") {
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const auto small = estimate(config_for(20000, 7), params, w_end);
  const auto large = estimate(config_for(80000, 7), params, w_end);
  const double ratio = small.std_error / large.std_error;
  CHECK(ratio > 1.6);  // quadrupling n halves the error within 20%
  CHECK(ratio < 2.4);
}

TEST_CASE("estimate_many equals separate estimates bit-exactly") {
  const auto config = config_for(10000, 31);
  const NoiseParams params = NoiseParams::from_tau(0.03);
  const PathObservable sin_w = [](const NoisePath& path) {
    return std::sin(path.w_end());
  };
  const PathObservable obs[] = {w_end, sin_w};
  const std::string names[] = {"w", "sin_w"};
  const auto joint = estimate_many(config, params, obs, names);
  const auto lone_w = estimate(config, params, w_end);
  const auto lone_sin = estimate(config, params, sin_w);
  CHECK(joint[0].mean == lone_w.mean);
  CHECK(joint[0].std_error == lone_w.std_error);
  CHECK(joint[1].mean == lone_sin.mean);
  CHECK(joint[1].std_error == lone_sin.std_error);
}

TEST_CASE("variance decomposition: constant inputs are exact") {
  const auto config = config_for(5000, 17);
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const double v0 = 0.37;
  const double m0 = 4.2;
  const auto result = estimate_variance_decomposed(
      config, params, [m0](const NoisePath&) { return m0; },
      [v0](const NoisePath&) { return v0; });
  CHECK(result.mean == m0);
  CHECK(result.within_mean == v0);
  CHECK(result.between_variance == 0.0);
  CHECK(result.total_variance == v0);
  CHECK(result.mean_std_error == 0.0);
  CHECK(result.total_std_error == 0.0);
}

TEST_CASE("variance decomposition recovers brownian variance") {
  const double tau = 0.01;
  const double t_end = 10.0;
  const auto config = config_for(100000, 23, 16, t_end);
  const auto result = estimate_variance_decomposed(
      config, NoiseParams::from_tau(tau), w_end,
      [](const NoisePath&) { return 0.0; });
  CHECK(result.within_mean == 0.0);
  CHECK(std::abs(result.total_variance - tau * t_end) <
        3.0 * result.total_std_error);
  // jackknife SE of a gaussian sample variance ~ s^2 sqrt(2/n)
  const double gaussian_se = tau * t_end * std::sqrt(2.0 / 100000);
  CHECK(result.total_std_error == doctest::Approx(gaussian_se).epsilon(0.3));
}

TEST_CASE("law of total variance holds exactly on the sample") {
  const auto config = config_for(30000, 41);
  const NoiseParams params = NoiseParams::from_tau(0.02);
  const auto result = estimate_variance_decomposed(
      config, params, w_end,
      [](const NoisePath& path) { return 0.1 + path.w[1] * path.w[1]; });
  CHECK(result.total_variance == result.within_mean + result.between_variance);
  CHECK(result.between_variance > 0.0);
  CHECK(result.within_mean > 0.0);
}

TEST_CASE("engine is callable from concurrent caller threads") {
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const auto config_a = config_for(20000, 1001);
  const auto config_b = config_for(30000, 2002, 8, 4.0);

  const auto expected_a = estimate(config_a, params, w_end);
  const auto expected_b = estimate(config_b, params, w_end);

  EnsembleEstimate got_a, got_b;
  std::thread worker_a(
      [&] { got_a = estimate(config_a, params, w_end); });
  std::thread worker_b(
      [&] { got_b = estimate(config_b, params, w_end); });
  worker_a.join();
  worker_b.join();

  CHECK(got_a.mean == expected_a.mean);
  CHECK(got_a.std_error == expected_a.std_error);
  CHECK(got_b.mean == expected_b.mean);
  CHECK(got_b.std_error == expected_b.std_error);
}

TEST_CASE("path generation errors propagate out of the parallel region") {
  auto config = config_for(100, 1);
  const NoiseParams micro = NoiseParams::from_sigma(0.1, 1.0);
  config.t_end = 1.0;  // dt = 1/16 < delta_t
  CHECK_THROWS_AS(estimate(config, micro, w_end), StepBelowCorrelationTime);
}
