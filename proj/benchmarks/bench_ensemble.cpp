// Compares the serial reference loop against the OpenMP path evaluation and
// verifies they produce bit-identical estimates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hbarsim/ensemble.hpp"
#include "hbarsim/free_particle.hpp"
#include "hbarsim/oscillator.hpp"

using namespace hbarsim;

namespace {

struct Case {
  std::string name;
  std::int64_t n_paths;
  std::int64_t n_steps;
  PathObservable observable;
};

double time_run(const EnsembleConfig& config, const NoiseParams& params,
                const PathObservable& observable, EnsembleEstimate& out) {
  double best = 1e300;
  for (int repeat = 0; repeat < 3; ++repeat) {
    const auto start = std::chrono::steady_clock::now();
    out = estimate(config, params, observable);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

}  // namespace

int main() {
  const NoiseParams params = NoiseParams::from_tau(0.01);
  const GaussianPacket packet{1.0, 0.1, 1.0, 1.0};
  const double t_end = 10.0;

  const std::vector<Case> cases = {
      {"free packet quantum variance", 200000, 64,
       [&packet, t_end](const NoisePath& path) {
         return packet.position_variance(t_end + path.w_end());
       }},
      {"oscillator cos(2w(t+W))", 200000, 64,
       [t_end](const NoisePath& path) {
         return std::cos(2.0 * (t_end + path.w_end()));
       }},
      {"path sampling only, long paths", 20000, 4096,
       [](const NoisePath& path) { return path.w_end(); }},
  };

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("threads available: %d\n\n", threads);
  std::printf("%-34s %12s %12s %9s %11s\n", "case", "serial [s]",
              "parallel [s]", "speedup", "Mpaths/s");

  bool all_equal = true;
  for (const auto& bench : cases) {
    EnsembleConfig config;
    config.n_paths = bench.n_paths;
    config.n_steps = bench.n_steps;
    config.t_end = t_end;
    config.master_seed = 1;

    EnsembleEstimate serial_result, parallel_result;
    config.execution = Execution::serial;
    const double serial_time =
        time_run(config, params, bench.observable, serial_result);
    config.execution = Execution::parallel;
    const double parallel_time =
        time_run(config, params, bench.observable, parallel_result);

    const bool equal = serial_result.mean == parallel_result.mean &&
                       serial_result.std_error == parallel_result.std_error;
    all_equal = all_equal && equal;

    std::printf("%-34s %12.4f %12.4f %8.2fx %11.2f\n", bench.name.c_str(),
                serial_time, parallel_time, serial_time / parallel_time,
                static_cast<double>(bench.n_paths) / parallel_time / 1e6);
    if (!equal) std::printf("  MISMATCH between serial and parallel results\n");
  }

  std::printf("\nserial/parallel estimates bit-identical: %s\n",
              all_equal ? "yes" : "NO");
  return all_equal ? 0 : 1;
}
