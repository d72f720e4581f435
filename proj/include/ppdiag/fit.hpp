#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppdiag/events.hpp"
#include "ppdiag/models.hpp"
#include "ppdiag/random.hpp"

namespace ppdiag {

struct FitOptions {
  int max_iterations = 2000;
  double relative_tolerance = 1e-6;
  int multistart_count = 10;
  RandomSource rng{171717};  // start-point perturbations and restart seeds
  int threads = 1;           // per-pair loops only; never changes results
  int min_pair_events = 8;   // heterogeneous network fits below this fall back

  FitOptions() = default;
};

struct FitResult {
  ModelSpec model;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  int start_index = 0;
  bool degenerate = false;  // boundary fit (e.g. empty-sequence rate 0)
  std::optional<LatentPath> decoded_path;  // cached for modulated winners
};

// Closed form lambda = M / T. An empty sequence yields the boundary rate 0
// with the degenerate flag set.
FitResult fit_poisson(const EventSequence& seq);

// Direct likelihood maximization over (log lambda1, log alpha, log beta),
// multistarted around the moment start lambda1 = 0.5 M/T, alpha = beta = 1.
// Needs at least 3 events.
FitResult fit_hawkes(const EventSequence& seq, const FitOptions& opts);

// Forward-filter likelihood maximization over (log lambda0, eta, log q01,
// log q10) with lambda1 = lambda0 + exp(eta), so the active state stays
// strictly faster. Needs at least 5 events.
FitResult fit_mmpp(const EventSequence& seq, const FitOptions& opts);

// Six-parameter fit with the same offset transform for the active baseline;
// the winner's decoded trajectory is cached in the result. Needs at least 8
// events.
FitResult fit_mmhp(const EventSequence& seq, const FitOptions& opts);

struct NetworkModelKind {
  enum class Variant { kHomogeneous, kBlock, kHeterogeneous };

  Variant variant;
  std::optional<Partition> blocks;  // required for the block variant

  static NetworkModelKind homogeneous() { return {Variant::kHomogeneous, std::nullopt}; }
  static NetworkModelKind block(Partition partition) {
    return {Variant::kBlock, std::move(partition)};
  }
  static NetworkModelKind heterogeneous() { return {Variant::kHeterogeneous, std::nullopt}; }

  std::string name() const;
};

struct NetworkFitResult {
  NetworkModelKind kind;
  std::map<PairIndex, ModelSpec> per_pair_models;  // every ordered pair
  double shared_loglik = 0.0;                      // summed network log-likelihood
  bool converged = false;
  std::vector<PairIndex> fallback_pairs;           // heterogeneous pairs under min_pair_events
  std::vector<std::string> warnings;
  // Block variant: fitted excitation per ordered class cell, [sender][receiver].
  std::vector<std::vector<double>> block_alphas;
};

// Shared-parameter fits across all ordered pairs:
//  - homogeneous: one parameter set for every pair;
//  - block: shared rates/decay/generator, one excitation value per ordered
//    class cell of the partition;
//  - heterogeneous: independent per-pair fits where events suffice, flagged
//    homogeneous fallback elsewhere.
NetworkFitResult fit_network(const NetworkEventLog& log, const NetworkModelKind& kind,
                             const FitOptions& opts);

// Network log-likelihood of an existing fit (sum of per-pair likelihoods).
double network_loglik(const NetworkFitResult& fit, const NetworkEventLog& log, int threads = 1);

}  // namespace ppdiag
