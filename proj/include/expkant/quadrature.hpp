#pragma once

#include <functional>
#include <span>
#include <vector>

namespace expkant {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Cached rule with m nodes; the returned reference stays valid.
const GaussLegendreRule& gauss_legendre(int m);

struct QuadratureSpec {
  enum class Rule { gauss_legendre, midpoint };

  Rule rule = Rule::gauss_legendre;
  int nodes = 8;             // GL nodes, or midpoint panels
  double tolerance = 1e-10;  // relative change between successive doublings
  int max_nodes = 1024;
  // Use a declared antiderivative instead of quadrature when available.
  bool use_antiderivative = true;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |last - previous| of the doubling sequence
  int nodes_used = 0;
  bool converged = true;
};

// Fixed-rule pass over [a, b].
double apply_rule(const std::function<double(double)>& f, double a, double b,
                  QuadratureSpec::Rule rule, int m);

// Doubles m from spec.nodes until successive values agree to spec.tolerance.
QuadratureResult integrate_doubling(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec);

// Globally adaptive composite Gauss-Legendre on [a, b] split at the given
// breakpoints. Stops when the summed panel error estimate falls below
// max(rel_tol * |I|, abs_tol).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    std::span<const double> breakpoints = {},
                                    double rel_tol = 1e-10,
                                    double abs_tol = 1e-300,
                                    int max_panels = 200000);

// Pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace expkant
