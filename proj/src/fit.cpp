#include "ppdiag/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "ppdiag/errors.hpp"
#include "ppdiag/optimize.hpp"
#include "ppdiag/parallel.hpp"

namespace ppdiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogBound = 30.0;       // soft box for transformed parameters
constexpr double kStartSigma = 0.75;     // log-space perturbation scale
constexpr double kTinyAlpha = 1e-6;      // degenerate excitation for nested starts

bool in_box(const std::vector<double>& theta) {
  for (double v : theta)
    if (!(std::abs(v) <= kLogBound)) return false;
  return true;
}

struct StartSet {
  std::vector<std::vector<double>> starts;
};

StartSet perturbed_starts(std::vector<std::vector<double>> fixed, const std::vector<double>& base,
                          int total, RandomSource& rng) {
  StartSet set;
  set.starts = std::move(fixed);
  while (static_cast<int>(set.starts.size()) < total) {
    std::vector<double> x = base;
    for (double& v : x) v += rng.normal(0.0, kStartSigma);
    set.starts.push_back(std::move(x));
  }
  return set;
}

struct MultistartOutcome {
  std::vector<double> x;
  double loglik = -kInf;
  bool converged = false;
  int iterations = 0;
  int start_index = 0;
};

MultistartOutcome run_multistart(const std::function<double(const std::vector<double>&)>& negloglik,
                                 const StartSet& set, const FitOptions& opts) {
  SimplexOptions simplex;
  simplex.max_iterations = opts.max_iterations;
  simplex.relative_tolerance = opts.relative_tolerance;

  MultistartOutcome winner;
  MultistartOutcome best_any;  // for diagnostics when nothing converges
  bool have_any = false;
  for (std::size_t s = 0; s < set.starts.size(); ++s) {
    const SimplexResult r = nelder_mead(negloglik, set.starts[s], simplex);
    const double ll = -r.fval;
    if (!have_any || ll > best_any.loglik) {
      best_any = {r.x, ll, r.converged, r.iterations, static_cast<int>(s)};
      have_any = true;
    }
    if (r.converged && std::isfinite(ll) && (!winner.converged || ll > winner.loglik))
      winner = {r.x, ll, r.converged, r.iterations, static_cast<int>(s)};
  }
  if (!winner.converged)
    throw NumericError("fit did not converge from any of " + std::to_string(set.starts.size()) +
                       " starts (best objective " + std::to_string(-best_any.loglik) + ")");
  return winner;
}

double lower_quartile(std::vector<double> values) {
  if (values.empty()) return 1.0;
  std::sort(values.begin(), values.end());
  return values[values.size() / 4];
}

std::vector<double> gaps_of(const EventSequence& seq) {
  std::vector<double> gaps;
  const auto& t = seq.times();
  for (std::size_t i = 1; i < t.size(); ++i) gaps.push_back(t[i] - t[i - 1]);
  return gaps;
}

double safe_log(double v) { return std::log(std::max(v, 1e-12)); }

}  // namespace

FitResult fit_poisson(const EventSequence& seq) {
  FitResult result{PoissonParams(0.0)};
  const double m = static_cast<double>(seq.size());
  if (seq.empty()) {
    result.degenerate = true;
    result.converged = true;
    result.loglik = 0.0;
    return result;
  }
  const PoissonParams mle(m / seq.horizon());
  result.model = mle;
  result.loglik = loglik_poisson(mle, seq);
  result.converged = true;
  return result;
}

FitResult fit_hawkes(const EventSequence& seq, const FitOptions& opts) {
  if (seq.size() < 3)
    throw ValidationError("hawkes fit is under-identified with fewer than 3 events");
  const double rate = static_cast<double>(seq.size()) / seq.horizon();

  auto to_params = [](const std::vector<double>& x) {
    return HawkesParams(std::exp(x[0]), std::exp(x[1]), std::exp(x[2]));
  };
  auto negloglik = [&](const std::vector<double>& x) {
    if (!in_box(x)) return kInf;
    try {
      return -loglik_hawkes(to_params(x), seq);
    } catch (const NumericError&) {
      return kInf;
    }
  };

  const std::vector<double> base{safe_log(0.5 * rate), 0.0, 0.0};
  std::vector<std::vector<double>> fixed{base};
  if (opts.multistart_count >= 2)
    fixed.push_back({safe_log(rate), std::log(kTinyAlpha), 0.0});  // no-excitation corner
  RandomSource rng = opts.rng;
  const StartSet starts = perturbed_starts(std::move(fixed), base, opts.multistart_count, rng);

  const MultistartOutcome w = run_multistart(negloglik, starts, opts);
  FitResult result{to_params(w.x)};
  result.loglik = w.loglik;
  result.converged = w.converged;
  result.iterations = w.iterations;
  result.start_index = w.start_index;
  return result;
}

FitResult fit_mmpp(const EventSequence& seq, const FitOptions& opts) {
  if (seq.size() < 5)
    throw ValidationError("switching-Poisson fit is under-identified with fewer than 5 events");
  const double rate = static_cast<double>(seq.size()) / seq.horizon();
  const double switch_rate = 2.0 / seq.horizon();

  auto to_params = [](const std::vector<double>& x) {
    const double lambda0 = std::exp(x[0]);
    return MmppParams(lambda0, lambda0 + std::exp(x[1]),
                      GeneratorMatrix(std::exp(x[2]), std::exp(x[3])));
  };
  auto negloglik = [&](const std::vector<double>& x) {
    if (!in_box(x)) return kInf;
    try {
      return -loglik_mmpp(to_params(x), seq);
    } catch (const NumericError&) {
      return kInf;
    }
  };

  const std::vector<double> base{safe_log(0.5 * rate), safe_log(1.5 * rate),
                                 safe_log(switch_rate), safe_log(switch_rate)};
  std::vector<std::vector<double>> fixed{base};
  if (opts.multistart_count >= 2)
    fixed.push_back({safe_log(rate), safe_log(kTinyAlpha * rate), safe_log(switch_rate),
                     safe_log(switch_rate)});  // near-equal rates corner
  RandomSource rng = opts.rng;
  const StartSet starts = perturbed_starts(std::move(fixed), base, opts.multistart_count, rng);

  const MultistartOutcome w = run_multistart(negloglik, starts, opts);
  const MmppParams params = to_params(w.x);
  FitResult result{params};
  result.loglik = w.loglik;
  result.converged = w.converged;
  result.iterations = w.iterations;
  result.start_index = w.start_index;
  result.decoded_path = decode_latent_path(params, seq);
  return result;
}

namespace {

std::vector<double> mmhp_base_start(double rate, double quartile_gap, double horizon) {
  const double beta0 = 1.0 / std::max(quartile_gap, 1e-6);
  return {safe_log(0.5 * rate), safe_log(0.5 * rate), safe_log(0.5 * beta0), safe_log(beta0),
          safe_log(2.0 / horizon), safe_log(2.0 / horizon)};
}

MmhpParams mmhp_from_theta(const std::vector<double>& x) {
  const double lambda0 = std::exp(x[0]);
  return MmhpParams(lambda0, lambda0 + std::exp(x[1]), std::exp(x[2]), std::exp(x[3]),
                    GeneratorMatrix(std::exp(x[4]), std::exp(x[5])));
}

}  // namespace

FitResult fit_mmhp(const EventSequence& seq, const FitOptions& opts) {
  if (seq.size() < 8)
    throw ValidationError("two-state self-exciting fit is under-identified with fewer than 8 events");
  const double rate = static_cast<double>(seq.size()) / seq.horizon();

  auto negloglik = [&](const std::vector<double>& x) {
    if (!in_box(x)) return kInf;
    try {
      return -loglik_mmhp(mmhp_from_theta(x), seq);
    } catch (const NumericError&) {
      return kInf;
    }
  };

  const std::vector<double> base = mmhp_base_start(rate, lower_quartile(gaps_of(seq)), seq.horizon());
  std::vector<std::vector<double>> fixed{base};
  if (opts.multistart_count >= 2) {
    // Warm start at the simpler switching-Poisson optimum with negligible
    // excitation, so the fit never loses to the nested model.
    try {
      FitOptions warm_opts = opts;
      warm_opts.multistart_count = std::min(3, std::max(1, opts.multistart_count));
      warm_opts.rng = opts.rng.split(0x77AA);
      const FitResult mmpp = fit_mmpp(seq, warm_opts);
      const auto& p = std::get<MmppParams>(mmpp.model);
      fixed.push_back({std::log(p.lambda0), safe_log(p.lambda1 - p.lambda0),
                       std::log(kTinyAlpha), 0.0, std::log(p.q.q01), std::log(p.q.q10)});
    } catch (const NumericError&) {
      // fall through to random starts
    } catch (const ValidationError&) {
    }
  }
  RandomSource rng = opts.rng;
  const StartSet starts = perturbed_starts(std::move(fixed), base, opts.multistart_count, rng);

  const MultistartOutcome w = run_multistart(negloglik, starts, opts);
  const MmhpParams params = mmhp_from_theta(w.x);
  FitResult result{params};
  result.loglik = w.loglik;
  result.converged = w.converged;
  result.iterations = w.iterations;
  result.start_index = w.start_index;
  result.decoded_path = decode_latent_path(params, seq);
  return result;
}

std::string NetworkModelKind::name() const {
  switch (variant) {
    case Variant::kHomogeneous: return "homogeneous";
    case Variant::kBlock: return "block";
    case Variant::kHeterogeneous: return "heterogeneous";
  }
  return "unknown";
}

namespace {

struct PairData {
  std::vector<PairIndex> pairs;
  std::vector<EventSequence> sequences;
  double pooled_rate = 0.0;      // events per pair per unit time
  double pooled_quartile = 1.0;  // lower-quartile within-pair gap
};

PairData collect_pairs(const NetworkEventLog& log) {
  PairData data;
  data.pairs = all_ordered_pairs(log.node_count());
  data.sequences.reserve(data.pairs.size());
  std::vector<double> pooled_gaps;
  for (const auto& pair : data.pairs) {
    EventSequence seq = project_pair(log, pair);
    auto gaps = gaps_of(seq);
    pooled_gaps.insert(pooled_gaps.end(), gaps.begin(), gaps.end());
    data.sequences.push_back(std::move(seq));
  }
  data.pooled_rate = static_cast<double>(log.size()) /
                     (static_cast<double>(data.pairs.size()) * log.horizon());
  data.pooled_quartile = lower_quartile(std::move(pooled_gaps));
  return data;
}

// Summed per-pair log-likelihood with a caller-supplied pair -> params map;
// deterministic reduction order independent of the thread count.
template <typename ParamsForPair>
double summed_loglik(const PairData& data, int threads, ParamsForPair&& params_for_pair) {
  std::vector<double> contributions(data.pairs.size());
  std::atomic<bool> failed{false};
  parallel_for(data.pairs.size(), threads, [&](std::size_t i) {
    try {
      contributions[i] = loglik_mmhp(params_for_pair(i), data.sequences[i]);
    } catch (const NumericError&) {
      failed.store(true, std::memory_order_relaxed);
      contributions[i] = -kInf;
    }
  });
  if (failed.load(std::memory_order_relaxed)) return -kInf;
  double total = 0.0;
  for (double c : contributions) total += c;
  return total;
}

MultistartOutcome fit_homogeneous_theta(const PairData& data, double horizon,
                                        const FitOptions& opts) {
  auto negloglik = [&](const std::vector<double>& x) {
    if (!in_box(x)) return kInf;
    MmhpParams params = mmhp_from_theta(x);
    const double ll = summed_loglik(data, opts.threads, [&](std::size_t) { return params; });
    return -ll;
  };
  const std::vector<double> base = mmhp_base_start(data.pooled_rate, data.pooled_quartile, horizon);
  RandomSource rng = opts.rng;
  const StartSet starts = perturbed_starts({base}, base, opts.multistart_count, rng);
  return run_multistart(negloglik, starts, opts);
}

NetworkFitResult fit_homogeneous(const NetworkEventLog& log, const PairData& data,
                                 const FitOptions& opts) {
  const MultistartOutcome w = fit_homogeneous_theta(data, log.horizon(), opts);
  const MmhpParams params = mmhp_from_theta(w.x);
  NetworkFitResult result{NetworkModelKind::homogeneous()};
  for (const auto& pair : data.pairs) result.per_pair_models.emplace(pair, params);
  result.shared_loglik = w.loglik;
  result.converged = w.converged;
  return result;
}

NetworkFitResult fit_block(const NetworkEventLog& log, const PairData& data,
                           const Partition& blocks, const FitOptions& opts) {
  if (blocks.node_count() != log.node_count())
    throw ValidationError("block partition does not match the log's node count");
  const int class_count = blocks.class_count();
  const int alpha_cells = class_count * class_count;

  // Cell index of each ordered pair, precomputed once.
  std::vector<int> cell_of_pair(data.pairs.size());
  for (std::size_t i = 0; i < data.pairs.size(); ++i)
    cell_of_pair[i] = blocks.class_of(data.pairs[i].sender) * class_count +
                      blocks.class_of(data.pairs[i].receiver);

  // theta = (log lambda0, eta, log beta, log q01, log q10, log alpha_cell...)
  auto shared_of = [](const std::vector<double>& x) {
    const double lambda0 = std::exp(x[0]);
    return MmhpParams(lambda0, lambda0 + std::exp(x[1]), 1.0, std::exp(x[2]),
                      GeneratorMatrix(std::exp(x[3]), std::exp(x[4])));
  };
  auto negloglik = [&](const std::vector<double>& x) {
    if (!in_box(x)) return kInf;
    const MmhpParams shared = shared_of(x);
    std::vector<MmhpParams> by_cell;
    by_cell.reserve(alpha_cells);
    for (int c = 0; c < alpha_cells; ++c)
      by_cell.push_back(MmhpParams(shared.lambda0, shared.lambda1, std::exp(x[5 + c]),
                                   shared.beta, shared.q));
    const double ll = summed_loglik(data, opts.threads,
                                    [&](std::size_t i) { return by_cell[cell_of_pair[i]]; });
    return -ll;
  };

  // Seed from a reduced homogeneous fit; every cell starts at its excitation.
  FitOptions lite = opts;
  lite.multistart_count = 1;
  lite.max_iterations = std::min(opts.max_iterations, 800);
  lite.relative_tolerance = std::max(opts.relative_tolerance, 1e-5);
  const MultistartOutcome hom = fit_homogeneous_theta(data, log.horizon(), lite);
  std::vector<double> base{hom.x[0], hom.x[1], hom.x[3], hom.x[4], hom.x[5]};
  for (int c = 0; c < alpha_cells; ++c) base.push_back(hom.x[2]);

  RandomSource rng = opts.rng;
  const StartSet starts = perturbed_starts({base}, base, opts.multistart_count, rng);
  const MultistartOutcome w = run_multistart(negloglik, starts, opts);

  const MmhpParams shared = shared_of(w.x);
  NetworkFitResult result{NetworkModelKind::block(blocks)};
  result.block_alphas.assign(class_count, std::vector<double>(class_count));
  for (int r = 0; r < class_count; ++r)
    for (int c = 0; c < class_count; ++c)
      result.block_alphas[r][c] = std::exp(w.x[5 + r * class_count + c]);
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    const int cell = cell_of_pair[i];
    result.per_pair_models.emplace(
        data.pairs[i], MmhpParams(shared.lambda0, shared.lambda1,
                                  result.block_alphas[cell / class_count][cell % class_count],
                                  shared.beta, shared.q));
  }
  result.shared_loglik = w.loglik;
  result.converged = w.converged;
  return result;
}

NetworkFitResult fit_heterogeneous(const NetworkEventLog& log, const PairData& data,
                                   const FitOptions& opts) {
  NetworkFitResult result{NetworkModelKind::heterogeneous()};

  struct PairFit {
    std::optional<MmhpParams> model;
    bool converged = true;
    std::string warning;
  };
  std::vector<PairFit> fits(data.pairs.size());
  parallel_for(data.pairs.size(), opts.threads, [&](std::size_t i) {
    const auto& seq = data.sequences[i];
    if (static_cast<int>(seq.size()) < opts.min_pair_events) return;  // fallback later
    FitOptions pair_opts = opts;
    pair_opts.rng = opts.rng.split((static_cast<std::uint64_t>(data.pairs[i].sender) << 32) |
                                   static_cast<std::uint64_t>(data.pairs[i].receiver));
    try {
      fits[i].model = std::get<MmhpParams>(fit_mmhp(seq, pair_opts).model);
    } catch (const NumericError& e) {
      fits[i].converged = false;
      fits[i].warning = e.what();
    }
  });

  // Pairs with too few events and pairs whose own fit failed inherit the
  // homogeneous estimate; both are flagged.
  std::optional<MmhpParams> fallback;
  for (const auto& pf : fits)
    if (!pf.model.has_value()) {
      fallback = mmhp_from_theta(fit_homogeneous_theta(data, log.horizon(), opts).x);
      break;
    }

  bool all_converged = true;
  for (std::size_t i = 0; i < data.pairs.size(); ++i) {
    auto& pf = fits[i];
    if (!pf.model.has_value()) {
      pf.model = *fallback;
      result.fallback_pairs.push_back(data.pairs[i]);
    }
    result.per_pair_models.emplace(data.pairs[i], *pf.model);
    if (!pf.warning.empty())
      result.warnings.push_back("pair (" + std::to_string(data.pairs[i].sender) + "," +
                                std::to_string(data.pairs[i].receiver) + "): " + pf.warning);
    all_converged = all_converged && pf.converged;
  }
  result.converged = all_converged;
  result.shared_loglik = summed_loglik(data, opts.threads, [&](std::size_t i) {
    return std::get<MmhpParams>(result.per_pair_models.at(data.pairs[i]));
  });
  return result;
}

}  // namespace

NetworkFitResult fit_network(const NetworkEventLog& log, const NetworkModelKind& kind,
                             const FitOptions& opts) {
  const PairData data = collect_pairs(log);
  switch (kind.variant) {
    case NetworkModelKind::Variant::kHomogeneous:
      return fit_homogeneous(log, data, opts);
    case NetworkModelKind::Variant::kBlock:
      if (!kind.blocks.has_value())
        throw ValidationError("block network fit requires a partition");
      return fit_block(log, data, *kind.blocks, opts);
    case NetworkModelKind::Variant::kHeterogeneous:
      return fit_heterogeneous(log, data, opts);
  }
  throw ValidationError("unknown network model kind");
}

double network_loglik(const NetworkFitResult& fit, const NetworkEventLog& log, int threads) {
  const auto pairs = all_ordered_pairs(log.node_count());
  std::vector<double> contributions(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const auto it = fit.per_pair_models.find(pairs[i]);
    contributions[i] =
        it == fit.per_pair_models.end() ? 0.0 : model_loglik(it->second, project_pair(log, pairs[i]));
  });
  return std::accumulate(contributions.begin(), contributions.end(), 0.0);
}

}  // namespace ppdiag
