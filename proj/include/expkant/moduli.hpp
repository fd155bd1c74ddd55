#pragma once

#include <optional>
#include <span>
#include <vector>

#include "expkant/core_model.hpp"
#include "expkant/rate_fit.hpp"

namespace expkant {

struct ModulusSearch {
  int anchors = 4001;            // uniform anchors over the window
  int offsets = 64;              // offsets per anchor in (0, delta]
  int refine_iterations = 40;    // pattern-search steps around the best pair
  std::optional<LogInterval> window;  // default: support inflated by delta, or [-8, 8]
};

// Grid estimate (a lower bound) of sup{|f(e^u) - f(e^v)| : |u - v| <= delta}.
double log_modulus(const Signal& f, double delta, const ModulusSearch& search = {});

struct ModulusCurve {
  std::vector<double> deltas;  // decreasing
  std::vector<double> values;
  std::optional<double> fitted_order;
  bool zero_modulus = false;
};

// Evaluates log_modulus along the deltas (sorted decreasing on output) and
// makes the curve monotone by a running max from small to large delta.
ModulusCurve modulus_curve(const Signal& f, std::vector<double> deltas,
                           const ModulusSearch& search = {}, bool fit = true);

struct HolderFit {
  double order = 0.0;     // clipped to (0, 1]
  double raw_slope = 0.0;
  bool zero_modulus = false;
  RateFit fit;
};

// Log-log slope of the curve; the zero-modulus marker when all values vanish.
HolderFit holder_fit(std::span<const double> deltas, std::span<const double> values);
HolderFit holder_fit(const ModulusCurve& curve);

struct SubadditivityResult {
  double lhs = 0.0;  // omega(f, lambda delta)
  double rhs = 0.0;  // (1 + lambda) omega(f, delta)
  bool passed = false;
};

SubadditivityResult subadditivity_check(const Signal& f, double delta, double lambda,
                                        const ModulusSearch& search = {});

// Geometric list delta_max * 2^-i, i = 0..count-1.
std::vector<double> geometric_deltas(double delta_max, int count);

}  // namespace expkant
