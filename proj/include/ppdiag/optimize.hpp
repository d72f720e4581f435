#pragma once

#include <functional>
#include <vector>

namespace ppdiag {

struct SimplexOptions {
  int max_iterations = 2000;
  double relative_tolerance = 1e-6;
  double initial_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double fval = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Nelder-Mead downhill simplex minimization. The objective may return +inf
// for infeasible points. Returns the best point ever evaluated, so the
// result is never worse than the start.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const SimplexOptions& options);

}  // namespace ppdiag
