#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hbarsim/noise.hpp"

namespace hbarsim {

// Path evaluation backend. `parallel` distributes paths over OpenMP threads;
// `serial` is the reference loop. Both feed the same fixed-order reduction,
// so the results are bit-identical (the determinism contract the tests and
// the benchmark both exercise).
enum class Execution { serial, parallel };

struct EnsembleConfig {
  std::int64_t n_paths = 1;
  std::uint64_t master_seed = 0;
  std::int64_t n_steps = 1;
  double t_end = 1.0;
  Execution execution = Execution::parallel;

  void validate() const;
};

struct EnsembleEstimate {
  double mean = 0.0;
  double std_error = 0.0;   // sample std / sqrt(n_paths)
  std::int64_t n_paths = 0;
  std::string observable_name;
};

// Noise average of an observable with analytic per-path quantum mean and
// variance: law of total variance over the path set,
//   total = E[per_path_var] + Var[per_path_mean],
// with jackknife standard errors on the variance terms.
struct VarianceDecomposition {
  double mean = 0.0;
  double mean_std_error = 0.0;
  double within_mean = 0.0;        // E[per-path variance]
  double within_std_error = 0.0;   // jackknife
  double between_variance = 0.0;   // Var[per-path mean] (n-1 denominator)
  double between_std_error = 0.0;  // jackknife
  double total_variance = 0.0;     // within_mean + between_variance
  double total_std_error = 0.0;    // jackknife
  std::int64_t n_paths = 0;
};

using PathObservable = std::function<double(const NoisePath&)>;

// Monte-Carlo mean of a pure per-path observable. Paths are generated from
// substreams keyed on (master_seed, path index) and may be evaluated
// concurrently; the reduction always runs in path-index order.
EnsembleEstimate estimate(const EnsembleConfig& config,
                          const NoiseParams& params,
                          const PathObservable& observable,
                          std::string observable_name = {});

// Several observables on the same path set, one generation pass.
std::vector<EnsembleEstimate> estimate_many(
    const EnsembleConfig& config, const NoiseParams& params,
    std::span<const PathObservable> observables,
    std::span<const std::string> observable_names);

VarianceDecomposition estimate_variance_decomposed(
    const EnsembleConfig& config, const NoiseParams& params,
    const PathObservable& per_path_mean, const PathObservable& per_path_var);

namespace detail {

// Shifted two-pass mean: exact when all values coincide (the tau = 0 limit),
// accurate otherwise.
double reduce_mean(std::span<const double> values);
double sample_variance(std::span<const double> values, double mean);

}  // namespace detail

}  // namespace hbarsim
