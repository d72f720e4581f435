#include "ppdiag/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ppdiag/errors.hpp"

namespace ppdiag {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(name) + " must be finite and > 0");
}

void require_time_in_window(double t, double horizon) {
  if (!(t >= 0.0) || t > horizon)
    throw ValidationError("evaluation time outside [0, horizon]");
}

}  // namespace

PoissonParams::PoissonParams(double lambda_rate) : lambda(lambda_rate) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ValidationError("Poisson rate must be finite and >= 0");
}

HawkesParams::HawkesParams(double baseline, double jump, double decay)
    : lambda1(baseline), alpha(jump), beta(decay) {
  require_positive(lambda1, "Hawkes baseline");
  require_positive(beta, "Hawkes decay rate");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("Hawkes jump size must be finite and >= 0");
}

GeneratorMatrix::GeneratorMatrix(double rate01, double rate10) : q01(rate01), q10(rate10) {
  if (!(q01 >= 0.0) || !(q10 >= 0.0) || !std::isfinite(q01) || !std::isfinite(q10))
    throw ValidationError("generator rates must be finite and >= 0");
  if (!(q01 + q10 > 0.0))
    throw ValidationError("generator needs q01 + q10 > 0 for a stationary law");
}

MmppParams::MmppParams(double rate0, double rate1, GeneratorMatrix generator)
    : lambda0(rate0), lambda1(rate1), q(generator) {
  require_positive(lambda0, "state-0 rate");
  require_positive(lambda1, "state-1 rate");
  if (lambda1 < lambda0)
    throw ValidationError("switching Poisson model requires lambda1 >= lambda0 (state 1 active)");
}

MmhpParams::MmhpParams(double rate0, double baseline1, double jump, double decay,
                       GeneratorMatrix generator)
    : lambda0(rate0), lambda1(baseline1), alpha(jump), beta(decay), q(generator) {
  require_positive(lambda0, "state-0 rate");
  require_positive(lambda1, "state-1 baseline");
  require_positive(beta, "decay rate");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("jump size must be finite and >= 0");
}

LatentPath::LatentPath(std::vector<double> transition_times, std::vector<int> states,
                       double horizon)
    : transition_times_(std::move(transition_times)), states_(std::move(states)),
      horizon_(horizon) {
  require_positive(horizon_, "latent path horizon");
  if (states_.size() != transition_times_.size() + 1)
    throw ValidationError("latent path needs one state per constant segment");
  for (std::size_t k = 0; k < transition_times_.size(); ++k) {
    const double tt = transition_times_[k];
    if (!(tt > 0.0) || !(tt < horizon_) || !std::isfinite(tt))
      throw ValidationError("latent transitions must lie strictly inside (0, horizon)");
    if (k > 0 && !(tt > transition_times_[k - 1]))
      throw ValidationError("latent transitions must strictly increase");
  }
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k] != 0 && states_[k] != 1)
      throw ValidationError("latent states must be 0 or 1");
    if (k > 0 && states_[k] == states_[k - 1])
      throw ValidationError("consecutive latent segments must change state");
  }
}

int LatentPath::state_at(double t) const {
  const auto it = std::upper_bound(transition_times_.begin(), transition_times_.end(), t);
  return states_[static_cast<std::size_t>(it - transition_times_.begin())];
}

LatentPath::Segment LatentPath::segment(std::size_t k) const {
  if (k >= states_.size()) throw ValidationError("latent segment index out of range");
  const double start = k == 0 ? 0.0 : transition_times_[k - 1];
  const double end = k == transition_times_.size() ? horizon_ : transition_times_[k];
  return {start, end, states_[k]};
}

bool is_markov_modulated(const ModelSpec& model) {
  return std::holds_alternative<MmppParams>(model) || std::holds_alternative<MmhpParams>(model);
}

std::string model_kind_name(const ModelSpec& model) {
  struct Namer {
    std::string operator()(const PoissonParams&) const { return "poisson"; }
    std::string operator()(const HawkesParams&) const { return "hawkes"; }
    std::string operator()(const MmppParams&) const { return "mmpp"; }
    std::string operator()(const MmhpParams&) const { return "mmhp"; }
  };
  return std::visit(Namer{}, model);
}

// ---------------------------------------------------------------------------
// Hawkes intensity and compensator (closed forms)
// ---------------------------------------------------------------------------

double hawkes_intensity(const HawkesParams& params, const EventSequence& seq, double t) {
  require_time_in_window(t, seq.horizon());
  double excitation = 0.0;
  for (double tm : seq.times()) {
    if (!(tm < t)) break;
    excitation += std::exp(-params.beta * (t - tm));
  }
  return params.lambda1 + params.alpha * excitation;
}

double hawkes_compensator(const HawkesParams& params, const EventSequence& seq, double t) {
  require_time_in_window(t, seq.horizon());
  double kernel_mass = 0.0;
  for (double tm : seq.times()) {
    if (!(tm < t)) break;
    kernel_mass += 1.0 - std::exp(-params.beta * (t - tm));
  }
  return params.lambda1 * t + (params.alpha / params.beta) * kernel_mass;
}

// ---------------------------------------------------------------------------
// Plug-in intensity / compensator with a fixed latent trajectory
// ---------------------------------------------------------------------------

namespace {

const LatentPath& checked_path(const ModelSpec& model, const EventSequence& seq,
                               const LatentPath* path) {
  if (path == nullptr)
    throw ValidationError("latent path required for a Markov-modulated model");
  if (path->horizon() != seq.horizon())
    throw ValidationError("latent path horizon differs from the event sequence horizon");
  (void)model;
  return *path;
}

}  // namespace

double model_intensity(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                       double t) {
  require_time_in_window(t, seq.horizon());
  if (const auto* p = std::get_if<PoissonParams>(&model)) return p->lambda;
  if (const auto* h = std::get_if<HawkesParams>(&model)) return hawkes_intensity(*h, seq, t);
  if (const auto* mp = std::get_if<MmppParams>(&model)) {
    const LatentPath& z = checked_path(model, seq, path);
    return z.state_at(t) == 0 ? mp->lambda0 : mp->lambda1;
  }
  const auto& mh = std::get<MmhpParams>(model);
  const LatentPath& z = checked_path(model, seq, path);
  return z.state_at(t) == 0 ? mh.lambda0 : hawkes_intensity(mh.active_params(), seq, t);
}

double model_compensator(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                         double t) {
  require_time_in_window(t, seq.horizon());
  if (const auto* p = std::get_if<PoissonParams>(&model)) return p->lambda * t;
  if (const auto* h = std::get_if<HawkesParams>(&model)) return hawkes_compensator(*h, seq, t);
  if (const auto* mp = std::get_if<MmppParams>(&model)) {
    const LatentPath& z = checked_path(model, seq, path);
    double total = 0.0;
    for (std::size_t k = 0; k < z.segment_count(); ++k) {
      const auto seg = z.segment(k);
      const double a = seg.start;
      const double b = std::min(seg.end, t);
      if (b <= a) break;
      total += (seg.state == 0 ? mp->lambda0 : mp->lambda1) * (b - a);
    }
    return total;
  }
  const auto& mh = std::get<MmhpParams>(model);
  const LatentPath& z = checked_path(model, seq, path);
  const HawkesParams active = mh.active_params();
  double total = 0.0;
  for (std::size_t k = 0; k < z.segment_count(); ++k) {
    const auto seg = z.segment(k);
    const double a = seg.start;
    const double b = std::min(seg.end, t);
    if (b <= a) break;
    if (seg.state == 0)
      total += mh.lambda0 * (b - a);
    else
      total += hawkes_compensator(active, seq, b) - hawkes_compensator(active, seq, a);
  }
  return total;
}

std::vector<double> intensity_path(const ModelSpec& model, const EventSequence& seq,
                                   const LatentPath* path, const std::vector<double>& grid) {
  if (is_markov_modulated(model)) checked_path(model, seq, path);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_time_in_window(grid[i], seq.horizon());
    if (i > 0 && grid[i] < grid[i - 1]) throw ValidationError("intensity grid must be sorted");
  }
  std::vector<double> values;
  values.reserve(grid.size());
  for (double t : grid) values.push_back(model_intensity(model, seq, path, t));
  return values;
}

// ---------------------------------------------------------------------------
// Log-likelihoods
// ---------------------------------------------------------------------------

double loglik_poisson(const PoissonParams& params, const EventSequence& seq) {
  const double m = static_cast<double>(seq.size());
  if (params.lambda == 0.0) return seq.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  return m * std::log(params.lambda) - params.lambda * seq.horizon();
}

double loglik_hawkes(const HawkesParams& params, const EventSequence& seq) {
  const auto& times = seq.times();
  double decayed = 0.0;  // A_m: excitation just before event m, strict sum
  double log_intensities = 0.0;
  for (std::size_t m = 0; m < times.size(); ++m) {
    if (m > 0) decayed = std::exp(-params.beta * (times[m] - times[m - 1])) * (1.0 + decayed);
    const double lam = params.lambda1 + params.alpha * decayed;
    const double term = std::log(lam);
    if (!std::isfinite(term))
      throw NumericError("hawkes log-likelihood non-finite at event " + std::to_string(m));
    log_intensities += term;
  }
  return log_intensities - hawkes_compensator(params, seq, seq.horizon());
}

// ---------------------------------------------------------------------------
// Two-state filtering machinery shared by the modulated likelihoods and the
// Viterbi decoder
// ---------------------------------------------------------------------------

namespace {

// Relative excitation level below which the active intensity is treated as
// flat over the rest of an inter-event gap (the propagator for a constant
// rate composes exactly, so collapsing the resolved tail loses nothing).
constexpr double kExcitationFloor = 1e-12;

struct TwoStateModel {
  double lambda0;
  double lambda1;
  double alpha;  // 0 for the switching Poisson model
  double beta;   // ignored when alpha == 0
  GeneratorMatrix q;
};

Mat2 survival_propagator(const GeneratorMatrix& q, double rate0, double rate1, double h) {
  const Mat2 generator_minus_rates = {(-q.q01 - rate0) * h, q.q01 * h, q.q10 * h,
                                      (-q.q10 - rate1) * h};
  Mat2 p = mat_exp_2x2(generator_minus_rates);
  p.a00 = std::max(p.a00, 0.0);
  p.a01 = std::max(p.a01, 0.0);
  p.a10 = std::max(p.a10, 0.0);
  p.a11 = std::max(p.a11, 0.0);
  return p;
}

// (1 - exp(-x)) / x, stable near 0.
double one_minus_exp_over(double x) {
  if (x == 0.0) return 1.0;
  return -std::expm1(-x) / x;
}

enum class WalkMode { kLikelihood, kDecode };

// Walks the window emitting survival propagators for every sub-interval and
// the per-state event intensities at each arrival.
//
// Visitor interface:
//   void propagate(const Mat2& p, double t_end);
//   void event(double rate0, double rate1, std::size_t event_index);
template <typename Visitor>
void two_state_walk(const TwoStateModel& m, const EventSequence& seq, WalkMode mode,
                    Visitor& visit) {
  const double horizon = seq.horizon();
  const auto& times = seq.times();
  const double chain_rate = m.q.q01 + m.q.q10;

  // Excitation sum S at the start of the current gap (events at the start
  // included); the active rate over the gap is lambda1 + alpha*S*exp(-beta*u).
  double excitation = 0.0;
  double gap_start = 0.0;

  for (std::size_t mi = 0; mi <= times.size(); ++mi) {
    const double gap_end = mi < times.size() ? times[mi] : horizon;
    const double tau = gap_end - gap_start;
    if (tau > 0.0) {
      const double boost = m.alpha * excitation;  // decaying part at gap start
      // Window over which the kernel decay still matters.
      double resolved = 0.0;
      if (boost > kExcitationFloor * m.lambda1)
        resolved = std::min(tau, std::log(boost / (kExcitationFloor * m.lambda1)) / m.beta);
      if (resolved > 0.0) {
        const double step_target = std::min(tau / 8.0, 1.0 / (4.0 * m.beta));
        const int steps = static_cast<int>(std::ceil(resolved / step_target));
        const double h = resolved / steps;
        const double decay = std::exp(-m.beta * h);
        const double mean_factor = one_minus_exp_over(m.beta * h);
        double level = 1.0;  // exp(-beta * u) at the substep start
        for (int i = 0; i < steps; ++i) {
          const double mean_rate = m.lambda1 + boost * level * mean_factor;
          visit.propagate(survival_propagator(m.q, m.lambda0, mean_rate, h),
                          gap_start + (i + 1) * h);
          level *= decay;
        }
      }
      if (resolved < tau) {
        // Flat remainder: exact single propagator in likelihood mode; in
        // decode mode keep substeps at the chain's relaxation scale so the
        // decoded trajectory can switch inside long gaps.
        const double rest = tau - resolved;
        const double level_start = resolved > 0.0 ? std::exp(-m.beta * resolved) : 1.0;
        int chunks = 1;
        if (mode == WalkMode::kDecode)
          chunks = std::max(
              1, static_cast<int>(std::ceil(std::min(rest * 4.0 * chain_rate, 65536.0))));
        const double h = rest / chunks;
        double u = resolved;
        double level = level_start;
        const double chunk_decay = m.alpha > 0.0 ? std::exp(-m.beta * h) : 0.0;
        const double chunk_mean = m.alpha > 0.0 ? one_minus_exp_over(m.beta * h) : 0.0;
        for (int i = 0; i < chunks; ++i) {
          const double mean_rate = m.lambda1 + boost * level * chunk_mean;
          visit.propagate(survival_propagator(m.q, m.lambda0, mean_rate, h),
                          gap_start + std::min(u + h, tau));
          u += h;
          level *= chunk_decay;
        }
      }
    }
    if (mi < times.size()) {
      // Excitation strictly before the event: decay S over the gap.
      const double at_event =
          m.alpha > 0.0 ? excitation * std::exp(-m.beta * tau) : 0.0;
      visit.event(m.lambda0, m.lambda1 + m.alpha * at_event, mi);
      excitation = at_event + 1.0;
      gap_start = gap_end;
    }
  }
}

struct ForwardFilter {
  Vec2 f;
  double log_norm = 0.0;
  std::size_t events_seen = 0;

  void propagate(const Mat2& p, double) {
    f = f * p;
    const double s = f.sum();
    if (!std::isfinite(s) || s <= 0.0)
      throw NumericError("two-state filter degenerated after event " +
                         std::to_string(events_seen));
    if (s < 1e-250) normalize(s);
  }

  void event(double rate0, double rate1, std::size_t index) {
    f = {f.v0 * rate0, f.v1 * rate1};
    const double s = f.sum();
    if (!std::isfinite(s) || s <= 0.0)
      throw NumericError("two-state filter underflow at event " + std::to_string(index));
    normalize(s);
    events_seen = index + 1;
  }

  void normalize(double s) {
    log_norm += std::log(s);
    f.v0 /= s;
    f.v1 /= s;
  }

  double loglik() {
    const double s = f.sum();
    if (!std::isfinite(s) || s <= 0.0) throw NumericError("two-state filter final underflow");
    return log_norm + std::log(s);
  }
};

struct ViterbiPass {
  double score0;
  double score1;
  std::vector<double> boundaries;
  std::vector<std::uint8_t> back0;  // best predecessor of state 0 / state 1
  std::vector<std::uint8_t> back1;

  void propagate(const Mat2& p, double t_end) {
    const double l00 = std::log(p.a00), l01 = std::log(p.a01);
    const double l10 = std::log(p.a10), l11 = std::log(p.a11);
    const double c0_from0 = score0 + l00, c0_from1 = score1 + l10;
    const double c1_from0 = score0 + l01, c1_from1 = score1 + l11;
    back0.push_back(c0_from0 >= c0_from1 ? 0 : 1);
    back1.push_back(c1_from0 >= c1_from1 ? 0 : 1);
    score0 = std::max(c0_from0, c0_from1);
    score1 = std::max(c1_from0, c1_from1);
    boundaries.push_back(t_end);
  }

  void event(double rate0, double rate1, std::size_t index) {
    score0 += std::log(rate0);
    score1 += std::log(rate1);
    if (!std::isfinite(std::max(score0, score1)))
      throw NumericError("latent decoding degenerated at event " + std::to_string(index));
  }
};

double filtered_loglik(const TwoStateModel& m, const EventSequence& seq) {
  ForwardFilter filter;
  filter.f = {m.q.stationary0(), m.q.stationary1()};
  two_state_walk(m, seq, WalkMode::kLikelihood, filter);
  return filter.loglik();
}

LatentPath viterbi_decode(const TwoStateModel& m, const EventSequence& seq) {
  ViterbiPass pass;
  pass.score0 = std::log(m.q.stationary0());
  pass.score1 = std::log(m.q.stationary1());
  two_state_walk(m, seq, WalkMode::kDecode, pass);

  const std::size_t n = pass.boundaries.size();
  if (n == 0) return LatentPath::constant(pass.score0 >= pass.score1 ? 0 : 1, seq.horizon());

  std::vector<std::uint8_t> states(n + 1);
  states[n] = pass.score0 >= pass.score1 ? 0 : 1;
  for (std::size_t i = n; i-- > 0;)
    states[i] = states[i + 1] == 0 ? pass.back0[i] : pass.back1[i];

  // Segment i carries the state reached at boundary i; runs of equal states
  // merge, transitions land on interior sub-grid boundaries only.
  std::vector<int> path_states{states[1]};
  std::vector<double> transitions;
  for (std::size_t i = 2; i <= n; ++i) {
    if (states[i] != static_cast<std::uint8_t>(path_states.back())) {
      transitions.push_back(pass.boundaries[i - 2]);
      path_states.push_back(states[i]);
    }
  }
  return LatentPath(std::move(transitions), std::move(path_states), seq.horizon());
}

TwoStateModel as_two_state(const MmppParams& p) {
  return {p.lambda0, p.lambda1, 0.0, 1.0, p.q};
}

TwoStateModel as_two_state(const MmhpParams& p) {
  return {p.lambda0, p.lambda1, p.alpha, p.beta, p.q};
}

}  // namespace

double loglik_mmpp(const MmppParams& params, const EventSequence& seq) {
  return filtered_loglik(as_two_state(params), seq);
}

double loglik_mmhp(const MmhpParams& params, const EventSequence& seq) {
  return filtered_loglik(as_two_state(params), seq);
}

LatentPath decode_latent_path(const MmppParams& params, const EventSequence& seq) {
  return viterbi_decode(as_two_state(params), seq);
}

LatentPath decode_latent_path(const MmhpParams& params, const EventSequence& seq) {
  return viterbi_decode(as_two_state(params), seq);
}

LatentPath decode_latent_path(const ModelSpec& model, const EventSequence& seq) {
  if (const auto* mp = std::get_if<MmppParams>(&model)) return decode_latent_path(*mp, seq);
  if (const auto* mh = std::get_if<MmhpParams>(&model)) return decode_latent_path(*mh, seq);
  throw ValidationError("latent decoding applies only to Markov-modulated models");
}

double model_loglik(const ModelSpec& model, const EventSequence& seq) {
  if (const auto* p = std::get_if<PoissonParams>(&model)) return loglik_poisson(*p, seq);
  if (const auto* h = std::get_if<HawkesParams>(&model)) return loglik_hawkes(*h, seq);
  if (const auto* mp = std::get_if<MmppParams>(&model)) return loglik_mmpp(*mp, seq);
  return loglik_mmhp(std::get<MmhpParams>(model), seq);
}

}  // namespace ppdiag
