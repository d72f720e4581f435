#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ppdiag/events.hpp"
#include "ppdiag/models.hpp"
#include "ppdiag/random.hpp"

namespace ppdiag {

// Block-structured excitation matrix: alpha for a directed pair depends only
// on whether sender and receiver share a partition class.
struct BlockAlphaSpec {
  Partition blocks;
  double within_alpha;
  double between_alpha;

  BlockAlphaSpec(Partition partition, double within, double between);

  double alpha_for(const PairIndex& pair) const {
    return blocks.class_of(pair.sender) == blocks.class_of(pair.receiver) ? within_alpha
                                                                          : between_alpha;
  }
};

// Hard cap on accepted events per sampled stream; supercritical parameter
// proposals must fail loudly instead of hanging.
inline constexpr std::size_t kExplosionThreshold = 10'000'000;

EventSequence simulate_poisson(double lambda, double horizon, RandomSource& rng);

// Gillespie sampling of the two-state chain, started from its stationary law.
LatentPath simulate_ctmc(const GeneratorMatrix& q, double horizon, RandomSource& rng);

// Thinning with a piecewise bound equal to the intensity immediately after
// the last accepted event (between events the exponential-kernel intensity
// only decays, so the bound dominates).
EventSequence simulate_hawkes(const HawkesParams& params, double horizon, RandomSource& rng);

// Chain first, then state-dependent thinning; the excitation history is the
// full accepted-event list regardless of the state each event arrived in.
// The bound refreshes at every accepted event and at every state transition.
// Returns the stream together with the ground-truth trajectory.
std::pair<EventSequence, LatentPath> simulate_mmhp(const MmhpParams& params, double horizon,
                                                   RandomSource& rng);

// Exact piecewise-Poisson sampling along a simulated chain.
std::pair<EventSequence, LatentPath> simulate_mmpp(const MmppParams& params, double horizon,
                                                   RandomSource& rng);

// Parameters shared by every directed pair of a simulated network; the
// pair's excitation jump comes from the block spec.
struct NetworkMmhpParams {
  double lambda0;
  double lambda1;
  double beta;
  GeneratorMatrix q;

  NetworkMmhpParams(double rate0, double baseline1, double decay, GeneratorMatrix generator);

  MmhpParams with_alpha(double alpha) const {
    return MmhpParams(lambda0, lambda1, alpha, beta, q);
  }
};

struct NetworkSimulation {
  NetworkEventLog log;
  std::map<PairIndex, LatentPath> latent_paths;
};

// Independent two-state self-exciting stream per ordered pair, merged into a
// time-sorted log. Pair (i, j) draws from rng.split(i * 2^32 + j), so the
// result is identical regardless of pair iteration order.
NetworkSimulation simulate_network(const NetworkMmhpParams& params,
                                   const BlockAlphaSpec& alpha_spec, int node_count,
                                   double horizon, const RandomSource& rng);

}  // namespace ppdiag
