#pragma once

#include <utility>
#include <vector>

#include "ppdiag/events.hpp"
#include "ppdiag/models.hpp"

namespace ppdiag {

// Compensator increments between consecutive events (starting from 0); unit
// exponential under the true model by the time rescaling theorem.
struct RescaledTimes {
  std::vector<double> values;
};

// One rescaled value per event; the values telescope to the compensator at
// the last event. The path argument is required exactly for the Markov-
// modulated models.
RescaledTimes rescaled_times(const ModelSpec& model, const EventSequence& seq,
                             const LatentPath* path);

// Exact sup-distance between the empirical distribution of the values and
// the unit exponential, evaluated at the order statistics.
double ks_statistic(const RescaledTimes& rescaled);

// Asymptotic critical value c(alpha)/sqrt(n) for the one-sample test.
double ks_critical_value(std::size_t n, double alpha);

// Order statistics paired with unit-exponential quantiles at plotting
// positions (i - 0.5) / n.
struct QqData {
  std::vector<std::pair<double, double>> points;  // (theoretical, empirical)
};

QqData qq_data(const RescaledTimes& rescaled);

// N(t) minus the fitted compensator at t.
double raw_residual(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                    double t);

// sum_{t_m <= t} 1/sqrt(lambda(t_m)) - integral_0^t sqrt(lambda(s)) ds.
// The integral runs piecewise between events and latent transitions with
// adaptive Simpson quadrature at absolute tolerance 1e-6. Fails if the
// fitted intensity vanishes at an event.
double pearson_residual(const ModelSpec& model, const EventSequence& seq, const LatentPath* path,
                        double t);

// Robust locally weighted regression: tricube weights over the span-fraction
// nearest neighbors, local linear fits, three bisquare robustness
// iterations. Returns (x, fitted) sorted by x.
std::vector<std::pair<double, double>> lowess(const std::vector<double>& x,
                                              const std::vector<double>& y, double span);

}  // namespace ppdiag
