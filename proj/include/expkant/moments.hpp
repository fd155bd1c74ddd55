#pragma once

// Log-discrete absolute moments and numerical audits of the kernel
// admissibility conditions. All sups over x are taken in the phase variable
// y = w ln x; the summand depends on x only through y.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expkant/core_model.hpp"
#include "expkant/rate_fit.hpp"

namespace expkant {

struct PhaseProbe {
  int points = 2048;           // phases per period of the scheme
  int refine_iterations = 60;  // golden-section steps around the grid max
  double window = 4096.0;      // summation half-width for decaying profiles
};

// Partial sum of L(e^{y - t_k}) |y - t_k|^beta over exclude < |y - t_k| <= window
// plus a rigorous bound on the neglected far terms |y - t_k| > window.
struct PhaseSum {
  double partial = 0.0;
  double remainder = 0.0;  // upper bound on what lies beyond the window
  bool diverged = false;   // beta too large for the profile's decay
  double upper() const { return partial + remainder; }
};

PhaseSum phase_sum(const KernelProfile& profile, const SamplingScheme& scheme,
                   double beta, double y, double exclude = -1.0,
                   double window = 4096.0);

// Bound on sum over |y - t_k| > N of C |y - t_k|^-s for gaps >= delta.
double decay_tail_bound(double constant, double s, double N, double delta);

struct MomentReport {
  double beta = 0.0;
  double value = 0.0;        // sup over the probe of the partial sums
  double upper = 0.0;        // value + far-tail bound
  double at_phase = 0.0;
  std::string probe_grid;
  bool diverged = false;
  std::vector<double> window_values;  // value at the maximising phase per window
};

MomentReport discrete_moment(const KernelProfile& profile, const SamplingScheme& scheme,
                             double beta, double w = 1.0, const PhaseProbe& probe = {});

// Range of m0(y) = sum_k L(e^{y - t_k}) over the probe, tails included.
struct PartitionRange {
  double lo = 0.0;
  double hi = 0.0;
};

PartitionRange partition_range(const KernelProfile& profile, const SamplingScheme& scheme,
                               const PhaseProbe& probe = {});

struct TailSum {
  double value = 0.0;      // partial + remainder
  double partial = 0.0;
  double remainder = 0.0;
};

// sum over |t_k - w ln x| > gamma w of L(e^{-t_k} x^w).
TailSum tail_sum(const KernelProfile& profile, const SamplingScheme& scheme, double gamma,
                 double w, double x);

struct ConditionReport {
  std::string condition;
  std::vector<double> w_values;
  std::vector<double> sup_values;
  RateFit fit;  // fit.exact marks the identically-small case
  bool passed = false;
  bool diverged = false;
  std::optional<double> declared_rate;
  std::string detail;
  // check_e3_1 only: fitted constants of value <= m3 * w^-gamma0.
  std::optional<double> gamma0;
  std::optional<double> m3;
};

struct Chi4Reports {
  ConditionReport S;
  ConditionReport T;
};

struct UGrid {
  int points = 2001;
  double max_abs = 1e6;
  double min_abs = 1e-8;  // innermost |u| for the chi4_star grid
};

Chi4Reports check_chi4(const NonlinearKernel& kernel, const SamplingScheme& scheme, int j,
                       std::span<const double> w_list, const PhaseProbe& probe = {},
                       const UGrid& grid = {});

ConditionReport check_chi4_star(const NonlinearKernel& kernel, const SamplingScheme& scheme,
                                std::span<const double> w_list,
                                const PhaseProbe& probe = {}, const UGrid& grid = {});

ConditionReport check_L3(const KernelProfile& profile, const SamplingScheme& scheme, double r,
                         double gamma, std::span<const double> w_list,
                         int phase_points = 256);

ConditionReport check_e3_1(const KernelProfile& profile, double gamma,
                           std::span<const double> w_list);

// int_{|v| > V} L(e^v) dv.
double profile_outer_mass(const KernelProfile& profile, double V);

// int_{|ln x| > M} w L(e^{-t_k} x^w) dmu(x).
double lemma41_outer_mass(const KernelProfile& profile, double t_k, double w, double M);

}  // namespace expkant
