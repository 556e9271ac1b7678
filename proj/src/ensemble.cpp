#include "hbarsim/ensemble.hpp"

#include <cmath>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hbarsim {

void EnsembleConfig::validate() const {
  if (n_paths < 1) throw ValidationError("ensemble: n_paths must be >= 1");
  if (n_steps < 1) throw ValidationError("ensemble: n_steps must be >= 1");
  if (!(t_end > 0.0)) throw NonPositiveHorizon("ensemble: t_end must be > 0");
}

namespace {

// Evaluates every observable on every path, storing into out[k][i]. Parallel
// over paths; values depend only on (master_seed, path index), never on the
// schedule.
void evaluate_paths(const EnsembleConfig& config, const NoiseParams& params,
                    std::span<const PathObservable> observables,
                    std::span<std::vector<double>> out) {
  config.validate();
  params.validate();
  // Trip preconditions once up front instead of inside the parallel region.
  { NoisePath probe; sample_path(params, config.t_end, config.n_steps,
                                 RandomStream{config.master_seed, 0}, probe); }

  const std::int64_t n = config.n_paths;
  for (auto& column : out) column.resize(static_cast<std::size_t>(n));

  std::exception_ptr failure = nullptr;
  const bool parallel = config.execution == Execution::parallel;

#ifdef _OPENMP
#pragma omp parallel if (parallel)
#endif
  {
    NoisePath buffer;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        sample_path(params, config.t_end, config.n_steps,
                    RandomStream{config.master_seed,
                                 static_cast<std::uint64_t>(i)},
                    buffer);
        for (std::size_t k = 0; k < observables.size(); ++k)
          out[k][static_cast<std::size_t>(i)] = observables[k](buffer);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical(hbarsim_ensemble_failure)
#endif
        if (!failure) failure = std::current_exception();
      }
    }
  }
  (void)parallel;
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

namespace detail {

double reduce_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double ref = values.front();
  double acc = 0.0;
  for (const double v : values) acc += v - ref;
  return ref + acc / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values, double mean) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (const double v : values) {
    const double d = v - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(n - 1);
}

}  // namespace detail

std::vector<EnsembleEstimate> estimate_many(
    const EnsembleConfig& config, const NoiseParams& params,
    std::span<const PathObservable> observables,
    std::span<const std::string> observable_names) {
  std::vector<std::vector<double>> values(observables.size());
  evaluate_paths(config, params, observables, values);

  std::vector<EnsembleEstimate> results(observables.size());
  for (std::size_t k = 0; k < observables.size(); ++k) {
    EnsembleEstimate& r = results[k];
    r.n_paths = config.n_paths;
    if (k < observable_names.size()) r.observable_name = observable_names[k];
    r.mean = detail::reduce_mean(values[k]);
    const double var = detail::sample_variance(values[k], r.mean);
    r.std_error = std::sqrt(var / static_cast<double>(config.n_paths));
  }
  return results;
}

EnsembleEstimate estimate(const EnsembleConfig& config,
                          const NoiseParams& params,
                          const PathObservable& observable,
                          std::string observable_name) {
  const PathObservable obs[] = {observable};
  const std::string names[] = {std::move(observable_name)};
  return estimate_many(config, params, obs, names)[0];
}

VarianceDecomposition estimate_variance_decomposed(
    const EnsembleConfig& config, const NoiseParams& params,
    const PathObservable& per_path_mean, const PathObservable& per_path_var) {
  const PathObservable obs[] = {per_path_mean, per_path_var};
  std::vector<std::vector<double>> values(2);
  evaluate_paths(config, params, obs, values);
  const std::vector<double>& m = values[0];
  const std::vector<double>& v = values[1];
  const std::size_t n = m.size();
  const double dn = static_cast<double>(n);

  VarianceDecomposition r;
  r.n_paths = config.n_paths;
  r.mean = detail::reduce_mean(m);
  r.mean_std_error = std::sqrt(detail::sample_variance(m, r.mean) / dn);
  r.within_mean = detail::reduce_mean(v);

  // centered sums keep the between-path variance stable when |mean| >> std
  double sum_d = 0.0;
  double sum_d2 = 0.0;
  for (const double mi : m) {
    const double d = mi - r.mean;
    sum_d += d;
    sum_d2 += d * d;
  }
  r.between_variance = n >= 2 ? sum_d2 / (dn - 1.0) : 0.0;
  r.total_variance = r.within_mean + r.between_variance;

  if (n >= 3) {
    // Leave-one-out values of each term, O(n) from the running sums.
    std::vector<double> within_loo(n), between_loo(n), total_loo(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = m[i] - r.mean;
      within_loo[i] = r.within_mean + (r.within_mean - v[i]) / (dn - 1.0);
      const double rest = sum_d - d;
      between_loo[i] =
          (sum_d2 - d * d - rest * rest / (dn - 1.0)) / (dn - 2.0);
      total_loo[i] = within_loo[i] + between_loo[i];
    }
    const auto jackknife = [dn](std::span<const double> loo) {
      const double center = detail::reduce_mean(loo);
      double acc = 0.0;
      for (const double x : loo) {
        const double d = x - center;
        acc += d * d;
      }
      return std::sqrt((dn - 1.0) / dn * acc);
    };
    r.within_std_error = jackknife(within_loo);
    r.between_std_error = jackknife(between_loo);
    r.total_std_error = jackknife(total_loo);
  }
  return r;
}

}  // namespace hbarsim
