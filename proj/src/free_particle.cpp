#include "hbarsim/free_particle.hpp"

namespace hbarsim {

void GaussianPacket::validate() const {
  if (!(delta > 0.0)) throw ValidationError("packet: delta must be > 0");
  if (!(mass > 0.0)) throw ValidationError("packet: mass must be > 0");
  if (!(hbar > 0.0)) throw ValidationError("packet: hbar must be > 0");
}

double mean_displacement(const GaussianPacket& packet, double t) {
  packet.validate();
  if (!(t >= 0.0)) throw NegativeTime("mean_displacement: t must be >= 0");
  return packet.mean_position(t);
}

double spread_growth(const GaussianPacket& packet, const NoiseParams& params,
                     double t) {
  packet.validate();
  params.validate();
  if (!(t >= 0.0)) throw NegativeTime("spread_growth: t must be >= 0");
  const double noise_coeff =
      (packet.p_bar * packet.p_bar + 0.5 * packet.delta * packet.delta) /
      (packet.mass * packet.mass);
  return packet.position_variance(t) - packet.position_variance(0.0) +
         noise_coeff * (params.tau * t);
}

double diffusion_coefficient(const GaussianPacket& packet,
                             const NoiseParams& params) {
  packet.validate();
  params.validate();
  return (packet.p_bar * packet.p_bar + 0.5 * packet.delta * packet.delta) /
         (2.0 * packet.mass * packet.mass) * params.tau;
}

VarianceDecomposition mc_spread_decomposition(const GaussianPacket& packet,
                                              const NoiseParams& params,
                                              const EnsembleConfig& config) {
  packet.validate();
  const double t = config.t_end;
  const auto quantum_mean = [&packet, t](const NoisePath& path) {
    return packet.mean_position(t + path.w_end());
  };
  const auto quantum_var = [&packet, t](const NoisePath& path) {
    return packet.position_variance(t + path.w_end());
  };
  return estimate_variance_decomposed(config, params, quantum_mean,
                                      quantum_var);
}

EnsembleEstimate mc_spread(const GaussianPacket& packet,
                           const NoiseParams& params,
                           const EnsembleConfig& config) {
  const VarianceDecomposition d = mc_spread_decomposition(packet, params, config);
  EnsembleEstimate e;
  e.mean = d.total_variance - packet.position_variance(0.0);
  e.std_error = d.total_std_error;
  e.n_paths = d.n_paths;
  e.observable_name = "spread_growth";
  return e;
}

}  // namespace hbarsim
