#include "ppdiag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ppdiag/errors.hpp"
#include "ppdiag/quadrature.hpp"

namespace ppdiag {

RescaledTimes rescaled_times(const ModelSpec& model, const EventSequence& seq,
                             const LatentPath* path) {
  RescaledTimes rescaled;
  rescaled.values.reserve(seq.size());
  double previous = 0.0;
  for (double tm : seq.times()) {
    const double current = model_compensator(model, seq, path, tm);
    rescaled.values.push_back(std::max(current - previous, 0.0));
    previous = current;
  }
  return rescaled;
}

double ks_statistic(const RescaledTimes& rescaled) {
  if (rescaled.values.empty())
    throw ValidationError("K-S statistic undefined for an empty sample");
  std::vector<double> sorted = rescaled.values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = -std::expm1(-sorted[i]);  // Exp(1) CDF
    const double above = (static_cast<double>(i) + 1.0) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    sup = std::max({sup, above, below});
  }
  return sup;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("K-S critical value needs n >= 1 and alpha in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

QqData qq_data(const RescaledTimes& rescaled) {
  if (rescaled.values.empty()) throw ValidationError("Q-Q data needs at least one value");
  std::vector<double> sorted = rescaled.values;
  std::sort(sorted.begin(), sorted.end());
  QqData qq;
  qq.points.reserve(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    qq.points.emplace_back(-std::log1p(-p), sorted[i]);
  }
  return qq;
}

double raw_residual(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                    double t) {
  return static_cast<double>(counting_process(seq, t)) -
         model_compensator(model, seq, path, t);
}

namespace {

// Inclusive excitation sum at time a: events at exactly a contribute 1.
double excitation_at(const EventSequence& seq, double beta, double a) {
  double total = 0.0;
  for (double tm : seq.times()) {
    if (tm > a) break;
    total += std::exp(-beta * (a - tm));
  }
  return total;
}

// Smooth continuation of the fitted intensity on a piece (a, b) free of
// events and latent transitions.
std::function<double(double)> piece_intensity(const ModelSpec& model, const EventSequence& seq,
                                              const LatentPath* path, double a) {
  if (const auto* p = std::get_if<PoissonParams>(&model)) {
    const double lambda = p->lambda;
    return [lambda](double) { return lambda; };
  }
  if (const auto* h = std::get_if<HawkesParams>(&model)) {
    const double level = h->alpha * excitation_at(seq, h->beta, a);
    const double lambda1 = h->lambda1, beta = h->beta;
    return [lambda1, beta, level, a](double s) { return lambda1 + level * std::exp(-beta * (s - a)); };
  }
  if (const auto* mp = std::get_if<MmppParams>(&model)) {
    const double lambda = path->state_at(a) == 0 ? mp->lambda0 : mp->lambda1;
    return [lambda](double) { return lambda; };
  }
  const auto& mh = std::get<MmhpParams>(model);
  if (path->state_at(a) == 0) {
    const double lambda = mh.lambda0;
    return [lambda](double) { return lambda; };
  }
  const double level = mh.alpha * excitation_at(seq, mh.beta, a);
  const double lambda1 = mh.lambda1, beta = mh.beta;
  return [lambda1, beta, level, a](double s) { return lambda1 + level * std::exp(-beta * (s - a)); };
}

}  // namespace

double pearson_residual(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                        double t) {
  if (!(t >= 0.0) || t > seq.horizon())
    throw ValidationError("Pearson residual time outside [0, horizon]");
  if (is_markov_modulated(model) && path == nullptr)
    throw ValidationError("latent path required for a Markov-modulated model");

  // Event sum, inclusive at t so the final event is never dropped at t = T.
  double event_sum = 0.0;
  std::size_t index = 0;
  for (double tm : seq.times()) {
    if (tm > t) break;
    const double lam = model_intensity(model, seq, path, tm);
    if (!(lam > 0.0))
      throw NumericError("fitted intensity vanishes at event " + std::to_string(index));
    event_sum += 1.0 / std::sqrt(lam);
    ++index;
  }

  // Integral of sqrt(intensity), split where the intensity is non-smooth.
  std::vector<double> cuts{0.0};
  for (double tm : seq.times()) {
    if (tm >= t) break;
    cuts.push_back(tm);
  }
  if (path != nullptr)
    for (double tr : path->transition_times()) {
      if (tr >= t) break;
      cuts.push_back(tr);
    }
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  constexpr double kTol = 1e-6;
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    const auto lambda_fn = piece_intensity(model, seq, path, a);
    const double piece_tol = std::max(kTol * (b - a) / std::max(t, 1e-300), 1e-14);
    integral += adaptive_simpson([&](double s) { return std::sqrt(lambda_fn(s)); }, a, b,
                                 piece_tol);
  }
  return event_sum - integral;
}

std::vector<std::pair<double, double>> lowess(const std::vector<double>& x,
                                              const std::vector<double>& y, double span) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ValidationError("lowess inputs must have equal length");
  if (n < 3) throw ValidationError("lowess needs at least 3 points");
  if (!(span > 0.0) || span > 1.0) throw ValidationError("lowess span must lie in (0, 1]");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const double range = xs.back() - xs.front();
  if (!(range > 0.0)) throw ValidationError("lowess needs non-degenerate x values");

  const std::size_t window =
      std::max<std::size_t>(2, std::min(n, static_cast<std::size_t>(std::ceil(span * n))));
  auto tricube = [](double u) {
    const double w = 1.0 - u * u * u;
    return w * w * w;
  };
  auto bisquare = [](double u) {
    const double w = 1.0 - u * u;
    return w * w;
  };

  std::vector<double> robustness(n, 1.0);
  std::vector<double> fitted(n, 0.0);
  constexpr int kRobustIterations = 3;
  for (int pass = 0; pass <= kRobustIterations; ++pass) {
    std::size_t lo = 0;
    std::size_t hi = window - 1;
    for (std::size_t i = 0; i < n; ++i) {
      // Slide the window so it holds the nearest neighbors of xs[i].
      while (hi + 1 < n && xs[hi + 1] - xs[i] < xs[i] - xs[lo]) {
        ++lo;
        ++hi;
      }
      const double h = std::max(xs[i] - xs[lo], xs[hi] - xs[i]);
      double sw = 0.0, swx = 0.0, swy = 0.0;
      std::vector<double> weights(hi - lo + 1, 0.0);
      for (std::size_t j = lo; j <= hi; ++j) {
        const double d = std::abs(xs[j] - xs[i]);
        double w = h > 0.0 ? (d <= h ? tricube(d / h) : 0.0) : 1.0;
        w *= robustness[j];
        weights[j - lo] = w;
        sw += w;
        swx += w * xs[j];
        swy += w * ys[j];
      }
      if (sw <= 0.0) {
        fitted[i] = ys[i];  // every neighbor rejected as an outlier
        continue;
      }
      const double xbar = swx / sw;
      const double ybar = swy / sw;
      double var = 0.0, cov = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) {
        const double dx = xs[j] - xbar;
        var += weights[j - lo] * dx * dx;
        cov += weights[j - lo] * dx * (ys[j] - ybar);
      }
      const double slope = var > 1e-12 * range * range ? cov / var : 0.0;
      fitted[i] = ybar + slope * (xs[i] - xbar);
    }
    if (pass == kRobustIterations) break;

    std::vector<double> abs_residuals(n);
    for (std::size_t i = 0; i < n; ++i) abs_residuals[i] = std::abs(ys[i] - fitted[i]);
    std::vector<double> sorted_abs = abs_residuals;
    std::nth_element(sorted_abs.begin(), sorted_abs.begin() + n / 2, sorted_abs.end());
    const double median = sorted_abs[n / 2];
    const double cutoff = 6.0 * median;
    if (!(cutoff > 0.0)) break;  // perfect fit, nothing to reweight
    for (std::size_t i = 0; i < n; ++i)
      robustness[i] = abs_residuals[i] < cutoff ? bisquare(abs_residuals[i] / cutoff) : 0.0;
  }

  std::vector<std::pair<double, double>> result;
  result.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.emplace_back(xs[i], fitted[i]);
  return result;
}

}  // namespace ppdiag
