#include "ppdiag/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppdiag/errors.hpp"

namespace ppdiag {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const SimplexOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw ValidationError("simplex optimizer needs at least one parameter");

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::vector<std::vector<double>> points(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) points[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);

  SimplexResult best;
  best.fval = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::vector<double>& x) {
    double v = objective(x);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (v < best.fval) {
      best.fval = v;
      best.x = x;
    }
    return v;
  };
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(points[i]);

  std::vector<std::size_t> order(dim + 1);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t lo = order.front();
    const std::size_t hi = order.back();
    const std::size_t second_hi = order[dim > 0 ? dim - 1 : 0];

    const double spread = std::abs(values[hi] - values[lo]);
    const double scale = std::abs(values[lo]) + std::abs(values[hi]) + 1e-12;
    if (std::isfinite(values[hi]) && spread <= options.relative_tolerance * scale) {
      best.converged = true;
      break;
    }

    // Centroid of all but the worst vertex.
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == hi) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += points[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coef) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = centroid[d] + coef * (centroid[d] - points[hi][d]);
      return x;
    };

    const auto reflected = blend(kReflect);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[lo]) {
      const auto expanded = blend(kExpand);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        points[hi] = expanded;
        values[hi] = f_expanded;
      } else {
        points[hi] = reflected;
        values[hi] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_hi]) {
      points[hi] = reflected;
      values[hi] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[hi];
    const auto contracted = blend(outside ? kReflect * kContract : -kContract);
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[hi])) {
      points[hi] = contracted;
      values[hi] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == lo) continue;
      for (std::size_t d = 0; d < dim; ++d)
        points[i][d] = points[lo][d] + kShrink * (points[i][d] - points[lo][d]);
      values[i] = eval(points[i]);
    }
  }

  best.iterations = iter;
  if (best.x.empty()) {
    best.x = start;
    best.fval = values[0];
  }
  return best;
}

}  // namespace ppdiag
