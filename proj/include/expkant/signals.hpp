#pragma once

// Built-in test signals with analytic metadata. All coordinates are in the
// log variable v = ln x.

#include <map>
#include <string>
#include <vector>

#include "expkant/core_model.hpp"

namespace expkant {

Signal constant_signal(double c);

// v on [-c, c], continued by sign(v) (c + tanh(|v| - c)); C^2, bounded by c + 1.
Signal clipped_log_signal(double c = 6.0);

// Unclipped ln x; unbounded with log-growth (0, 1).
Signal log_identity_signal();

// x^a on [e^-c, e^c], held constant outside.
Signal power_clipped_signal(double a, double c = 4.0);

// sin(ln x) times a C-infinity cutoff equal to 1 on [-c, c] and 0 beyond c + 1.
Signal sin_log_signal(double c = 6.0);

// (1 - |v|^nu)_+; log-Holder of order nu with modulus min(delta, 1)^nu.
Signal holder_bump_signal(double nu);

// height * 1_[a, b] smoothed by cubic smoothstep ramps of half-width eps
// centred at a and b. C^1 with support [a - eps, b + eps].
Signal mollified_indicator_signal(double a = 0.0, double b = 1.0,
                                  double eps = 0.5, double height = 1.0);

// height * 1_[a, b] in the log variable.
Signal indicator_signal(double a, double b, double height = 1.0);

// v -> f(v + h), i.e. x -> f(x e^h).
Signal dilate_signal(const Signal& f, double h);

// f - g.
Signal difference_signal(const Signal& f, const Signal& g);

// Piecewise-linear interpolant through (vs[i], values[i]); zero outside.
Signal grid_signal(std::vector<double> vs, std::vector<double> values);

// Builtin lookup; unknown names or parameters raise ValidationError.
Signal make_builtin_signal(const std::string& name,
                           const std::map<std::string, double>& params);

// Parameter names accepted by make_builtin_signal for the given builtin.
std::vector<std::string> builtin_signal_parameters(const std::string& name);

}  // namespace expkant
