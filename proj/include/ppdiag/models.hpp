#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ppdiag/events.hpp"
#include "ppdiag/mat2.hpp"

namespace ppdiag {

// Constant-rate model. lambda = 0 is a degenerate boundary that only arises
// as the closed-form MLE of an empty sequence; everywhere else rates are
// strictly positive.
struct PoissonParams {
  double lambda;
  explicit PoissonParams(double lambda_rate);
};

// Self-exciting model with exponential kernel alpha * exp(-beta * t).
// alpha = 0 is accepted as the degenerate no-excitation limit; the
// branching ratio alpha/beta is reported by callers, never enforced here.
struct HawkesParams {
  double lambda1;  // baseline rate
  double alpha;    // jump size at each event
  double beta;     // kernel decay rate

  HawkesParams(double baseline, double jump, double decay);

  double branching_ratio() const { return alpha / beta; }
};

// Infinitesimal generator of the two-state chain, stored as the two
// off-diagonal rates. At least one rate must be positive so the stationary
// law exists.
struct GeneratorMatrix {
  double q01;  // rate of leaving state 0
  double q10;  // rate of leaving state 1

  GeneratorMatrix(double rate01, double rate10);

  double stationary0() const { return q10 / (q01 + q10); }
  double stationary1() const { return q01 / (q01 + q10); }
  Mat2 as_matrix() const { return {-q01, q01, q10, -q10}; }
};

// Two-state switching Poisson model. Convention: state 1 is the active state,
// lambda1 >= lambda0 (fitting keeps the inequality strict by construction;
// equality is the degenerate single-rate limit).
struct MmppParams {
  double lambda0;
  double lambda1;
  GeneratorMatrix q;

  MmppParams(double rate0, double rate1, GeneratorMatrix generator);
};

// Two-state model switching between a quiet constant rate (state 0) and a
// self-exciting regime (state 1) whose excitation sums over all past events
// of the sequence, whichever state they arrived in.
struct MmhpParams {
  double lambda0;
  double lambda1;
  double alpha;
  double beta;
  GeneratorMatrix q;

  MmhpParams(double rate0, double baseline1, double jump, double decay, GeneratorMatrix generator);

  HawkesParams active_params() const { return HawkesParams(lambda1, alpha, beta); }
};

// Piecewise-constant two-state trajectory on (0, T]: state states[k] holds on
// [transition_times[k-1], transition_times[k]) with transition_times[-1] = 0,
// right-continuous at transitions. Consecutive states always differ.
class LatentPath {
 public:
  LatentPath(std::vector<double> transition_times, std::vector<int> states, double horizon);

  static LatentPath constant(int state, double horizon) { return LatentPath({}, {state}, horizon); }

  const std::vector<double>& transition_times() const { return transition_times_; }
  const std::vector<int>& states() const { return states_; }
  double horizon() const { return horizon_; }

  int state_at(double t) const;

  // Segment k as [start, end) with its state; k in [0, states().size()).
  struct Segment {
    double start;
    double end;
    int state;
  };
  Segment segment(std::size_t k) const;
  std::size_t segment_count() const { return states_.size(); }

 private:
  std::vector<double> transition_times_;
  std::vector<int> states_;
  double horizon_;
};

using ModelSpec = std::variant<PoissonParams, HawkesParams, MmppParams, MmhpParams>;

bool is_markov_modulated(const ModelSpec& model);
std::string model_kind_name(const ModelSpec& model);

// ---------------------------------------------------------------------------
// Intensities and compensators
// ---------------------------------------------------------------------------

// lambda1 + alpha * sum_{t_m < t} exp(-beta (t - t_m)). The sum is strict:
// the intensity evaluated at an event excludes that event's own jump.
double hawkes_intensity(const HawkesParams& params, const EventSequence& seq, double t);

// Closed-form integral of the intensity over (0, t]: lambda1 * t +
// (alpha/beta) * sum_{t_m < t} (1 - exp(-beta (t - t_m))).
double hawkes_compensator(const HawkesParams& params, const EventSequence& seq, double t);

// Conditional intensity / compensator of any model, with a latent path
// plugged in for the modulated ones (path must be non-null there, ignored
// otherwise). Both are exact closed forms given the path.
double model_intensity(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                       double t);
double model_compensator(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                         double t);

// Pointwise intensity on a sorted grid within [0, horizon].
std::vector<double> intensity_path(const ModelSpec& model, const EventSequence& seq,
                                   const LatentPath* path, const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// Log-likelihoods
// ---------------------------------------------------------------------------

// M log(lambda) - lambda T. With lambda = 0: 0 for an empty sequence
// (0 log 0 := 0), -inf otherwise.
double loglik_poisson(const PoissonParams& params, const EventSequence& seq);

// sum_m log lambda(t_m) - compensator(T), with the intensity sum computed by
// the O(M) decay recursion A_m = exp(-beta (t_m - t_{m-1})) (1 + A_{m-1}).
double loglik_hawkes(const HawkesParams& params, const EventSequence& seq);

// Exact marginal likelihood by forward filtering: the filter row vector is
// propagated across inter-event gaps by exp((Q - diag(rates)) tau), scaled by
// the event-time rates at each arrival, started from the stationary law and
// closed with the survival propagator to T. Log-domain normalization at every
// step.
double loglik_mmpp(const MmppParams& params, const EventSequence& seq);

// Forward filter as for the switching Poisson model, except state 1 carries
// the history-driven self-exciting intensity: each inter-event gap is cut
// into substeps (at least 8, at least 4 per kernel e-folding) and propagated
// with per-substep matrix exponentials at the substep-average active rate.
// Once the excitation has decayed below 1e-12 of the baseline the remainder
// of the gap collapses to a single constant-rate propagator.
double loglik_mmhp(const MmhpParams& params, const EventSequence& seq);

// Maximum a posteriori latent trajectory via a Viterbi pass over the same
// propagators as the corresponding likelihood; transitions land on the
// filtering sub-grid.
LatentPath decode_latent_path(const MmppParams& params, const EventSequence& seq);
LatentPath decode_latent_path(const MmhpParams& params, const EventSequence& seq);
LatentPath decode_latent_path(const ModelSpec& model, const EventSequence& seq);

// Dispatch to the model-specific log-likelihood.
double model_loglik(const ModelSpec& model, const EventSequence& seq);

}  // namespace ppdiag
