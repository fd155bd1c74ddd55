#pragma once

// Domain types shared by every module: sampling schemes, kernel profiles,
// nonlinear response families, test signals and phi-functions.
//
// Functions on R+ are stored in the log variable: a profile L is held as
// v -> L(e^v) and a signal f as v -> f(e^v). Everything downstream (phase
// sums, Steklov means, Haar-measure modulars) works in that variable, which
// avoids repeated exp/log round trips and keeps dilations exact shifts.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace expkant {

using Index = std::int64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Sampling scheme Pi = (t_k)

class SamplingScheme {
 public:
  // t_k = offset + k * step.
  static SamplingScheme uniform(double step = 1.0, double offset = 0.0);

  // nodes = t_0 < t_1 < ... < t_n; extended periodically with period
  // t_n - t_0, i.e. t_{k + j n} = t_k + j (t_n - t_0).
  static SamplingScheme tabulated(std::vector<double> nodes);

  double node(Index k) const;
  double gap(Index k) const { return node(k + 1) - node(k); }

  double lower_gap() const noexcept { return lower_gap_; }
  double upper_gap() const noexcept { return upper_gap_; }

  bool is_uniform() const noexcept { return nodes_.empty(); }
  double step() const noexcept { return step_; }
  double offset() const noexcept { return offset_; }

  // Length of one period of the gap pattern and the number of nodes in it.
  double period() const noexcept;
  Index nodes_per_period() const noexcept;

  // Smallest k with t_k >= value / largest k with t_k <= value.
  Index first_index_at_or_above(double value) const;
  Index last_index_at_or_below(double value) const;

  std::string describe() const;

 private:
  SamplingScheme() = default;

  double step_ = 1.0;
  double offset_ = 0.0;
  std::vector<double> nodes_;  // empty for the uniform kind
  double lower_gap_ = 1.0;
  double upper_gap_ = 1.0;
};

// ---------------------------------------------------------------------------
// Kernel profile L

struct CompactSupport {
  double radius;  // L(e^v) = 0 for |v| > radius
};

struct DecayingSupport {
  double power;     // L(e^v) <= constant * |v|^-power
  double constant;
  double from;      // ... for |v| >= from
};

using ProfileSupport = std::variant<CompactSupport, DecayingSupport>;

class KernelProfile {
 public:
  using LogFunction = std::function<double(double)>;

  KernelProfile(std::string name, LogFunction at_log, ProfileSupport support,
                double sup_bound, std::vector<double> knots = {},
                LogFunction outer_mass = {});

  const std::string& name() const noexcept { return name_; }

  double operator()(double x) const;
  double at_log(double v) const { return at_log_(v); }

  const ProfileSupport& support() const noexcept { return support_; }
  bool is_compact() const noexcept {
    return std::holds_alternative<CompactSupport>(support_);
  }
  double compact_radius() const;  // kInf for decaying profiles
  const DecayingSupport* decay() const noexcept {
    return std::get_if<DecayingSupport>(&support_);
  }

  // ||L||_{1,mu} = int L(e^v) dv.
  double l1_log_norm() const noexcept { return l1_log_norm_; }
  double sup_bound() const noexcept { return sup_bound_; }

  // Log-coordinates where L(e^v) is not smooth; quadrature splits there.
  const std::vector<double>& knots() const noexcept { return knots_; }

  // int_{|v| > V} L(e^v) dv, when the profile supplies it in closed form.
  bool has_outer_mass() const noexcept { return static_cast<bool>(outer_mass_); }
  double outer_mass(double V) const { return outer_mass_(V); }

 private:
  std::string name_;
  LogFunction at_log_;
  ProfileSupport support_;
  double l1_log_norm_ = 0.0;
  double sup_bound_ = 0.0;
  std::vector<double> knots_;
  LogFunction outer_mass_;

  friend double compute_log_l1_norm(const KernelProfile&);
};

// Quadrature of L(e^v) over the whole log axis.
double compute_log_l1_norm(const KernelProfile& profile);

// Degree-n central B-spline in the log variable: L(x) = B_n(ln x),
// support radius (n + 1) / 2, sum_k B_n(v - k) = 1.
KernelProfile make_bspline_profile(int order);

// L(x) = (1 / 2pi) (sin(ln x / 2) / (ln x / 2))^2 normalised to unit
// log-L1 norm.
KernelProfile make_mellin_fejer_profile();

// tau = indicator of [1, e], i.e. v -> 1 on [0, 1].
KernelProfile make_log_indicator_profile();

// Builtins by name: "bspline" (uses order) and "mellin_fejer".
KernelProfile make_builtin_profile(std::string_view name, int order = 2);

// Central B-spline of degree n evaluated at v.
double central_bspline(int degree, double v);

// ---------------------------------------------------------------------------
// Slope function psi of the (L, psi)-Lipschitz condition.
//
// Built-ins are of the form psi(u) = scale * u^exponent; evaluate() is the
// authority, the two numbers are metadata used by the rate formulas.

struct SlopeFunction {
  std::string name;
  std::function<double(double)> evaluate;
  bool concave = true;
  std::optional<double> growth_exponent;  // q with psi(u) = O(u^q)
  double scale = 1.0;

  double operator()(double u) const { return evaluate(u); }
};

SlopeFunction power_slope(double scale, double exponent);

// ---------------------------------------------------------------------------
// Response family g_w

struct ResponseFamily {
  std::string name;
  std::function<double(double, double)> evaluate;  // (w, u) -> g_w(u)
  std::optional<double> deviation_rate;            // alpha, sup|g_w(u)-u| = O(w^-alpha)
  SlopeFunction lipschitz_slope;
  // The declared slope dominates g_w only for w >= valid_from_w and
  // |u - v| <= valid_span.
  double valid_from_w = 0.0;
  double valid_span = kInf;

  double operator()(double w, double u) const { return evaluate(w, u); }
};

// g_w(u) = u. psi(u) = u.
ResponseFamily make_identity_response();

// g_w(u) = u + w^-alpha tanh(u). psi(u) = 2u for w >= 1.
ResponseFamily make_soft_response(double alpha);

// g_w(u) = u + w^-alpha sign(u) min(|u|^r, 1). psi(u) = 2u^r for
// |u - v| <= 2 once w^-alpha <= 2^r - 1.
ResponseFamily make_soft_power_response(double alpha, double r);

// Builtins by name: "identity", "soft" (alpha), "soft_power" (alpha, r).
ResponseFamily make_response(std::string_view name, double alpha = 1.0,
                             double r = 1.0);

// ---------------------------------------------------------------------------
// Nonlinear kernel chi(x, u) = L(x) g_w(u)

struct NonlinearKernel {
  KernelProfile profile;
  ResponseFamily response;

  const SlopeFunction& slope() const noexcept { return response.lipschitz_slope; }

  // chi(e^v, u) at scale w.
  double at_log(double v, double w, double u) const {
    return profile.at_log(v) * response(w, u);
  }
  double operator()(double x, double w, double u) const {
    return profile(x) * response(w, u);
  }
};

// ---------------------------------------------------------------------------
// Signals

struct LogInterval {
  double lo;
  double hi;

  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double length() const noexcept { return hi - lo; }
};

struct HolderInfo {
  double order;     // nu in (0, 1]
  double constant;  // omega(f, delta) <= constant * delta^nu
};

struct LogGrowth {
  double a;
  double b;  // |f(e^v)| <= a + b |v|
};

struct Signal {
  std::string name;
  std::function<double(double)> at_log;  // v -> f(e^v)
  std::optional<double> sup_norm;
  std::optional<LogInterval> support;  // f = 0 outside, in log coordinates
  std::optional<HolderInfo> holder;
  std::function<double(double)> mellin_derivative_log;  // v -> (theta f)(e^v)
  std::optional<LogGrowth> log_growth;
  std::function<double(double)> log_antiderivative;  // G with G' = at_log
  std::vector<double> breakpoints;       // sorted; where at_log is not smooth
  std::vector<double> discontinuities;   // subset where it jumps

  double operator()(double x) const;
  bool bounded() const noexcept { return sup_norm.has_value(); }
  bool continuous() const noexcept { return discontinuities.empty(); }
  bool has_mellin_derivative() const noexcept {
    return static_cast<bool>(mellin_derivative_log);
  }
};

// ---------------------------------------------------------------------------
// phi-functions and condition (H)

struct PhiFunction {
  std::string name;
  std::function<double(double)> evaluate;
  bool convex = true;

  double operator()(double u) const { return evaluate(u); }
};

PhiFunction power_phi(double p);
// u^p (1 + |ln u|); not convex, so theorems that need convexity reject it.
PhiFunction power_log_phi(double p);
// e^u - 1. Off by default: modulars of K f - f tails overflow quickly.
PhiFunction exponential_phi(bool allow);

PhiFunction make_phi(std::string_view name, double p, bool allow_exponential = false);

struct PhiPair {
  PhiFunction phi;
  PhiFunction eta;
  std::function<double(double)> c_lambda;  // (0,1) -> (0,1)
};

// phi = u^p, eta = u^{p q} and C_lambda = lambda^q / s for a slope
// psi(u) = s u^q: then phi(C_lambda psi(u)) = eta(lambda u) exactly.
PhiPair matched_power_pair(double p, const SlopeFunction& slope);

}  // namespace expkant
