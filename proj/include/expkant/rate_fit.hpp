#pragma once

#include <span>
#include <string>
#include <vector>

namespace expkant {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  // All retained errors are below the exactness threshold; no fit was made.
  bool exact = false;
};

inline constexpr double kExactThreshold = 1e-12;

// Least squares of ln err on ln w over the largest two thirds of w values.
// Errors below kExactThreshold are dropped; if the largest-w error is below it
// (or nothing is left) the result carries the exact marker. Throws
// ValidationError for mismatched input or fewer than three usable points.
RateFit fit_rate(std::span<const double> ws, std::span<const double> errors);

// Plain least-squares line through (x, y) pairs.
RateFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace expkant
