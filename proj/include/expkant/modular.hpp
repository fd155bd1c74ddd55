#pragma once

// Modulars I^phi[f] = int phi(|f(x)|) dx / x, computed in the log variable as
// int phi(|f(e^v)|) dv.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expkant/core_model.hpp"
#include "expkant/moduli.hpp"
#include "expkant/operator.hpp"

namespace expkant {

struct ModularValue {
  double lambda = 0.0;
  double value = 0.0;
  double quadrature_error = 0.0;
  bool diverged = false;
};

struct ModularOptions {
  double rel_tol = 1e-8;
  std::optional<LogInterval> window;  // default: the signal support
};

ModularValue modular(const PhiFunction& phi, const Signal& f, double lambda,
                     const ModularOptions& options = {});

// Modular of an arbitrary log-axis function over a window.
ModularValue modular_of(const PhiFunction& phi, const std::function<double(double)>& g,
                        LogInterval window, std::span<const double> breakpoints,
                        double lambda, double rel_tol = 1e-8);

// I^phi[lambda (f - g)].
ModularValue modular_error(const PhiFunction& phi, const Signal& f, const Signal& g,
                           double lambda, const ModularOptions& options = {});

// K_w f on a log-uniform grid covering everywhere it can be nonzero.
struct OperatorSamples {
  double w = 0.0;
  std::vector<double> vs;
  std::vector<double> values;
  double truncation_bound = 0.0;
};

// Log-window outside which K_w f vanishes (compact kernels) or is neglected.
LogInterval operator_window(const KantorovichOperator& op, const Signal& f, double w);

OperatorSamples sample_operator(const KantorovichOperator& op, const Signal& f, double w,
                                int points = 4096, std::optional<LogInterval> window = {});

// int phi(lambda |P(v) - f(v)|) dv with P the piecewise-linear interpolant of
// the samples (f may be absent, i.e. zero).
double modular_of_samples(const PhiFunction& phi, const OperatorSamples& samples,
                          const Signal* f, double lambda, double rel_tol = 1e-8);

struct OperatorModularError {
  double w = 0.0;
  std::vector<double> lambdas;
  std::vector<double> values;             // I^phi[lambda (K_w f - f)] on the fine grid
  std::vector<double> quadrature_errors;  // |coarse - fine|
  double truncation_bound = 0.0;
};

// Grids of `points` and 2 * `points`; the fine one is reported.
OperatorModularError operator_modular_error(const PhiFunction& phi,
                                            const KantorovichOperator& op, const Signal& f,
                                            double w, std::span<const double> lambdas,
                                            int points = 4096);

struct HReport {
  bool passed = false;
  double worst_margin = kInf;  // min over the grid of eta(lambda u) - phi(C_lambda psi(u))
  double worst_lambda = 0.0;
  double worst_u = 0.0;
};

HReport check_H(const PhiPair& pair, const SlopeFunction& slope,
                std::span<const double> lambdas, std::span<const double> us);

struct LipschitzModularReport {
  double w = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double m0 = 0.0;
  double l1 = 0.0;
  double delta = 0.0;
  double lhs = 0.0;  // I^phi[c (K f - K g)]
  double rhs = 0.0;  // l1 / (delta m0) * I^eta[lambda (f - g)]
  double lhs_quadrature_error = 0.0;
  bool passed = false;
};

// c = C_lambda / M_0 (the largest the estimate allows).
LipschitzModularReport modular_lipschitz_check(const KantorovichOperator& op,
                                               const PhiPair& pair, const Signal& f,
                                               const Signal& g, double w, double lambda,
                                               int points = 4096);

struct SmoothnessValue {
  double value = 0.0;
  double at_shift = 0.0;  // ln t attaining the sup
};

// sup over |ln t| <= delta (t_count sampled shifts) of I^phi[lambda (f(. t) - f)].
SmoothnessValue log_smoothness(const PhiFunction& phi, const Signal& f, double lambda,
                               double delta, int t_count = 65);

struct SmoothnessCurve {
  std::vector<double> deltas;
  std::vector<double> values;
  double lambda = 1.0;
  std::optional<double> fitted_order;
  bool zero_modulus = false;
};

SmoothnessCurve smoothness_curve(const PhiFunction& phi, const Signal& f, double lambda,
                                 std::vector<double> deltas, int t_count = 65);

HolderFit lip_class_fit(const SmoothnessCurve& curve);

}  // namespace expkant
