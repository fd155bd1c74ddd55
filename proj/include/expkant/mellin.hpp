#pragma once

#include <span>
#include <string>
#include <vector>

#include "expkant/core_model.hpp"
#include "expkant/moments.hpp"
#include "expkant/operator.hpp"

namespace expkant {

struct MellinDerivative {
  double value = 0.0;
  bool declared = false;        // taken from the signal's metadata
  bool differentiable = true;   // false when the h and h/2 estimates disagree
  double discrepancy = 0.0;     // |D(h) - D(h/2)|
};

// (theta f)(x) = x f'(x), i.e. d/dv f(e^v) at v = ln x.
MellinDerivative mellin_derivative(const Signal& f, double x, double h = 1e-5);

struct VoronovskajaReport {
  double x = 0.0;
  double r = 1.0;
  std::vector<double> w_values;
  std::vector<double> lhs_values;  // w^r |K_w f(x) - f(x)|
  double theta_f = 0.0;
  double m0 = 0.0;
  double mr = 0.0;
  double upper_gap = 0.0;
  double slope_scale = 1.0;
  double rhs_bound = 0.0;
  double tail_max = 0.0;  // max over the final third of w_values
  bool passed = false;
  MomentReport moment_r;
  ConditionReport l3;
};

// Checks the slope exponent, r < alpha, (L2) at beta = r and (L3) at r with
// gamma = 1/2 first; a failure raises PreconditionError naming the condition.
VoronovskajaReport voronovskaja_experiment(const Signal& f, double x, double r,
                                           const KantorovichOperator& op,
                                           std::span<const double> w_list);

}  // namespace expkant
