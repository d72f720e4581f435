#pragma once

#include <functional>

namespace ppdiag {

// Adaptive Simpson integration of f over [a, b] to the given absolute
// tolerance. The integrand must be smooth on the open interval; split at
// kinks and jumps before calling.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 40);

}  // namespace ppdiag
