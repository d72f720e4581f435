#include "ppdiag/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppdiag/errors.hpp"

namespace ppdiag {

namespace {

void require_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ValidationError("simulation horizon must be finite and > 0");
}

[[noreturn]] void throw_explosion(const char* what) {
  throw NumericError(std::string(what) + ": accepted events exceeded " +
                     std::to_string(kExplosionThreshold) + " (supercritical regime?)");
}

}  // namespace

BlockAlphaSpec::BlockAlphaSpec(Partition partition, double within, double between)
    : blocks(std::move(partition)), within_alpha(within), between_alpha(between) {
  if (!(within_alpha > 0.0) || !(between_alpha > 0.0))
    throw ValidationError("block excitation values must be > 0");
}

NetworkMmhpParams::NetworkMmhpParams(double rate0, double baseline1, double decay,
                                     GeneratorMatrix generator)
    : lambda0(rate0), lambda1(baseline1), beta(decay), q(generator) {
  // Reuse the full parameter validation with a placeholder jump.
  (void)MmhpParams(lambda0, lambda1, 1.0, beta, q);
}

EventSequence simulate_poisson(double lambda, double horizon, RandomSource& rng) {
  if (!(lambda > 0.0)) throw ValidationError("Poisson simulation requires lambda > 0");
  require_horizon(horizon);
  std::vector<double> times;
  double t = rng.exponential(lambda);
  while (t <= horizon) {
    times.push_back(t);
    if (times.size() > kExplosionThreshold) throw_explosion("poisson sampler");
    t += rng.exponential(lambda);
  }
  return EventSequence(std::move(times), horizon);
}

LatentPath simulate_ctmc(const GeneratorMatrix& q, double horizon, RandomSource& rng) {
  require_horizon(horizon);
  int state = rng.bernoulli(q.stationary1()) ? 1 : 0;
  std::vector<double> transitions;
  std::vector<int> states{state};
  double t = 0.0;
  while (true) {
    const double exit_rate = state == 0 ? q.q01 : q.q10;
    if (exit_rate <= 0.0) break;  // absorbing; holds to the horizon
    t += rng.exponential(exit_rate);
    if (t >= horizon) break;
    state = 1 - state;
    transitions.push_back(t);
    states.push_back(state);
  }
  return LatentPath(std::move(transitions), std::move(states), horizon);
}

EventSequence simulate_hawkes(const HawkesParams& params, double horizon, RandomSource& rng) {
  require_horizon(horizon);
  std::vector<double> times;
  double excitation = 0.0;   // sum of kernel decays at last accepted event (inclusive)
  double last_event = 0.0;
  double bound = params.lambda1;
  double t = 0.0;
  while (true) {
    t += rng.exponential(bound);
    if (t > horizon) break;
    const double current =
        params.lambda1 + params.alpha * excitation * std::exp(-params.beta * (t - last_event));
    if (rng.uniform01() < current / bound) {
      times.push_back(t);
      if (times.size() > kExplosionThreshold) throw_explosion("hawkes thinning");
      excitation = excitation * std::exp(-params.beta * (t - last_event)) + 1.0;
      last_event = t;
      bound = params.lambda1 + params.alpha * excitation;
    }
  }
  return EventSequence(std::move(times), horizon);
}

namespace {

// State-dependent thinning along a fixed trajectory. Shared by the
// self-exciting and constant-rate modulated samplers (alpha = 0 for the
// latter, where every candidate in state 0/1 is accepted at rate lambda).
EventSequence thin_along_path(double lambda0, double lambda1, double alpha, double beta,
                              const LatentPath& path, double horizon, RandomSource& rng,
                              const char* label) {
  std::vector<double> times;
  double excitation = 0.0;  // kernel sum at the last accepted event (inclusive)
  double last_event = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const auto seg = path.segment(k);
    double u = seg.start;
    while (true) {
      const double decayed =
          alpha > 0.0 ? excitation * std::exp(-beta * (u - last_event)) : 0.0;
      const double bound = seg.state == 0 ? lambda0 : lambda1 + alpha * decayed;
      u += rng.exponential(bound);
      if (u >= seg.end || u > horizon) break;
      const double current =
          seg.state == 0
              ? lambda0
              : lambda1 + alpha * excitation * std::exp(-beta * (u - last_event));
      if (rng.uniform01() < current / bound) {
        times.push_back(u);
        if (times.size() > kExplosionThreshold) throw_explosion(label);
        excitation = alpha > 0.0
                         ? excitation * std::exp(-beta * (u - last_event)) + 1.0
                         : excitation + 1.0;
        last_event = u;
      }
    }
  }
  return EventSequence(std::move(times), horizon);
}

}  // namespace

std::pair<EventSequence, LatentPath> simulate_mmhp(const MmhpParams& params, double horizon,
                                                   RandomSource& rng) {
  require_horizon(horizon);
  LatentPath path = simulate_ctmc(params.q, horizon, rng);
  EventSequence seq = thin_along_path(params.lambda0, params.lambda1, params.alpha, params.beta,
                                      path, horizon, rng, "mmhp thinning");
  return {std::move(seq), std::move(path)};
}

std::pair<EventSequence, LatentPath> simulate_mmpp(const MmppParams& params, double horizon,
                                                   RandomSource& rng) {
  require_horizon(horizon);
  LatentPath path = simulate_ctmc(params.q, horizon, rng);
  EventSequence seq = thin_along_path(params.lambda0, params.lambda1, 0.0, 1.0, path, horizon,
                                      rng, "mmpp sampler");
  return {std::move(seq), std::move(path)};
}

NetworkSimulation simulate_network(const NetworkMmhpParams& params,
                                   const BlockAlphaSpec& alpha_spec, int node_count,
                                   double horizon, const RandomSource& rng) {
  if (node_count < 2) throw ValidationError("network simulation needs at least 2 nodes");
  if (alpha_spec.blocks.node_count() != node_count)
    throw ValidationError("block partition does not cover the requested node set");
  require_horizon(horizon);

  std::map<PairIndex, LatentPath> paths;
  std::vector<NetworkEvent> merged;
  for (const auto& pair : all_ordered_pairs(node_count)) {
    RandomSource pair_rng = rng.split((static_cast<std::uint64_t>(pair.sender) << 32) |
                                      static_cast<std::uint64_t>(pair.receiver));
    auto [seq, path] =
        simulate_mmhp(params.with_alpha(alpha_spec.alpha_for(pair)), horizon, pair_rng);
    for (double t : seq.times()) merged.push_back({t, pair.sender, pair.receiver});
    paths.emplace(pair, std::move(path));
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const NetworkEvent& a, const NetworkEvent& b) { return a.time < b.time; });
  return {NetworkEventLog(node_count, std::move(merged), horizon), std::move(paths)};
}

}  // namespace ppdiag
