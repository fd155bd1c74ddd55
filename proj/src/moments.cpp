#include "expkant/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expkant/error.hpp"
#include "expkant/parallel.hpp"
#include "expkant/quadrature.hpp"

namespace expkant {

namespace {

constexpr double kFinalWindow = 2097152.0;  // 2^21 log units
constexpr double kGolden = 0.6180339887498949;

double weight(double d, double beta) {
  if (beta == 0.0) return 1.0;
  return std::pow(std::abs(d), beta);
}

// Phases covering one period of the scheme, node phases included.
std::vector<double> probe_phases(const SamplingScheme& scheme, int points) {
  if (points < 1) throw ValidationError("phase probe needs at least one point");
  const double t0 = scheme.node(0);
  const double P = scheme.period();
  std::vector<double> ys;
  ys.reserve(points + scheme.nodes_per_period());
  for (int i = 0; i < points; ++i) ys.push_back(t0 + P * i / points);
  for (Index k = 1; k < scheme.nodes_per_period(); ++k) ys.push_back(scheme.node(k));
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  return ys;
}

template <class F>
double golden_max(F&& f, double a, double b, int iterations, double& arg) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    arg = c;
    return fc;
  }
  arg = d;
  return fd;
}

bool all_below(const std::vector<double>& v, double tol) {
  return std::all_of(v.begin(), v.end(), [tol](double x) { return std::abs(x) < tol; });
}

void apply_rate_rule(ConditionReport& rep) {
  if (all_below(rep.sup_values, kExactThreshold)) {
    rep.fit = RateFit{};
    rep.fit.exact = true;
    rep.passed = true;
    rep.detail = "identically below 1e-12";
    return;
  }
  try {
    rep.fit = fit_rate(rep.w_values, rep.sup_values);
  } catch (const ValidationError& e) {
    rep.passed = false;
    rep.detail = std::string("rate fit failed: ") + e.what();
    return;
  }
  if (rep.fit.exact) {
    rep.passed = true;
    rep.detail = "exact at the largest w";
    return;
  }
  if (rep.declared_rate && std::isfinite(*rep.declared_rate)) {
    rep.passed = rep.fit.slope <= -*rep.declared_rate + 0.1;
    std::ostringstream os;
    os << "fitted rate " << rep.fit.slope << " against declared -" << *rep.declared_rate;
    rep.detail = os.str();
  } else {
    rep.passed = false;
    rep.detail = "nonzero values with no declared decay rate";
  }
}

void check_w_list(std::span<const double> w_list) {
  if (w_list.empty()) throw ValidationError("condition check needs a non-empty w list");
  for (std::size_t i = 0; i < w_list.size(); ++i) {
    if (!(w_list[i] > 0.0) || !std::isfinite(w_list[i]))
      throw ValidationError("w values must be finite and > 0");
    if (i > 0 && !(w_list[i] > w_list[i - 1]))
      throw ValidationError("w list must be strictly increasing");
  }
}

// int_a^b L(e^s) ds along the log axis; b may be +inf and a may be -inf.
double profile_mass_between(const KernelProfile& profile, double a, double b) {
  if (!(b > a)) return 0.0;
  if (profile.is_compact()) {
    const double R = profile.compact_radius();
    a = std::max(a, -R);
    b = std::min(b, R);
    if (!(b > a)) return 0.0;
    return integrate_adaptive([&](double v) { return profile.at_log(v); }, a, b,
                              profile.knots(), 1e-12, 1e-300)
        .value;
  }
  const auto* d = profile.decay();
  // Core numerically, beyond +-Vmax by the decay envelope.
  const double Vmax = 1e4;
  double total = 0.0;
  const double lo = std::max(a, -Vmax);
  const double hi = std::min(b, Vmax);
  if (hi > lo) {
    std::vector<double> cuts;
    for (double c = std::ceil(lo / 8.0) * 8.0; c < hi; c += 8.0) cuts.push_back(c);
    for (double k : profile.knots()) cuts.push_back(k);
    total += integrate_adaptive([&](double v) { return profile.at_log(v); }, lo, hi, cuts,
                                1e-10, 1e-300)
                 .value;
  }
  const double env = d->constant * std::pow(Vmax, 1.0 - d->power) / (d->power - 1.0);
  if (b > Vmax) total += env;
  if (a < -Vmax) total += env;
  return total;
}

}  // namespace

double decay_tail_bound(double constant, double s, double N, double delta) {
  if (!(s > 1.0)) return kInf;
  if (!(N > 0.0)) return kInf;
  return 2.0 * constant * (std::pow(N, -s) + std::pow(N, 1.0 - s) / ((s - 1.0) * delta));
}

PhaseSum phase_sum(const KernelProfile& profile, const SamplingScheme& scheme, double beta,
                   double y, double exclude, double window) {
  if (!(beta >= 0.0)) throw ValidationError("moment order must be >= 0");
  PhaseSum out;
  double N;
  if (profile.is_compact()) {
    N = profile.compact_radius();
  } else {
    const auto* d = profile.decay();
    N = std::max({window, exclude, d->from, 1.0});
    const double s = d->power - beta;
    if (!(s > 1.0)) out.diverged = true;
    out.remainder = decay_tail_bound(d->constant, s, N, scheme.lower_gap());
  }
  if (exclude >= N && profile.is_compact()) return out;
  const Index k0 = scheme.first_index_at_or_above(y - N);
  const Index k1 = scheme.last_index_at_or_below(y + N);
  double sum = 0.0;
  for (Index k = k0; k <= k1; ++k) {
    const double d = y - scheme.node(k);
    if (std::abs(d) <= exclude) continue;
    const double l = profile.at_log(d);
    if (l != 0.0) sum += l * weight(d, beta);
  }
  out.partial = sum;
  return out;
}

MomentReport discrete_moment(const KernelProfile& profile, const SamplingScheme& scheme,
                             double beta, double w, const PhaseProbe& probe) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("moment order must be >= 0");
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("moment needs w > 0");
  MomentReport rep;
  rep.beta = beta;
  {
    std::ostringstream os;
    os << probe.points << " phases over one period of " << scheme.describe()
       << " + golden-section refinement";
    if (!profile.is_compact()) os << ", window " << probe.window;
    rep.probe_grid = os.str();
  }
  if (const auto* d = profile.decay(); d && d->power <= beta + 1.0) {
    rep.diverged = true;
    rep.value = kInf;
    rep.upper = kInf;
    return rep;
  }

  // Probe in x, then reduce to the phase y = w ln x.
  const auto phases = probe_phases(scheme, probe.points);
  std::vector<double> vals(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    const double x = std::exp(phases[i] / w);
    const double y = w * std::log(x);
    vals[i] = phase_sum(profile, scheme, beta, y, -1.0, probe.window).partial;
  });
  const auto best = static_cast<std::size_t>(
      std::max_element(vals.begin(), vals.end()) - vals.begin());
  double best_y = phases[best];
  double best_val = vals[best];
  if (probe.refine_iterations > 0) {
    const double P = scheme.period();
    const double lo = best > 0 ? phases[best - 1] : phases[best] - P / probe.points;
    const double hi =
        best + 1 < phases.size() ? phases[best + 1] : phases[best] + P / probe.points;
    double arg = best_y;
    const double refined = golden_max(
        [&](double y) { return phase_sum(profile, scheme, beta, y, -1.0, probe.window).partial; },
        lo, hi, probe.refine_iterations, arg);
    if (refined > best_val) {
      best_val = refined;
      best_y = arg;
    }
  }
  rep.at_phase = best_y;

  if (profile.is_compact()) {
    rep.value = best_val;
    rep.upper = best_val;
    return rep;
  }
  // Geometric window growth at the maximising phase.
  for (int j = 0; j <= 6; ++j) {
    rep.window_values.push_back(
        phase_sum(profile, scheme, beta, best_y, -1.0, 64.0 * std::pow(2.0, j)).partial);
  }
  const std::size_t n = rep.window_values.size();
  if (rep.window_values[n - 2] > 0.0 &&
      rep.window_values[n - 1] / rep.window_values[n - 2] > 1.1)
    rep.diverged = true;
  const PhaseSum final_sum = phase_sum(profile, scheme, beta, best_y, -1.0, kFinalWindow);
  rep.value = std::max(best_val, final_sum.partial);
  rep.upper = rep.value + final_sum.remainder;
  if (final_sum.diverged) rep.diverged = true;
  return rep;
}

PartitionRange partition_range(const KernelProfile& profile, const SamplingScheme& scheme,
                               const PhaseProbe& probe) {
  const auto phases = probe_phases(scheme, probe.points);
  std::vector<PhaseSum> sums(phases.size());
  parallel_for(phases.size(), [&](std::size_t i) {
    sums[i] = phase_sum(profile, scheme, 0.0, phases[i], -1.0, probe.window);
  });
  PartitionRange r{kInf, -kInf};
  for (const auto& s : sums) {
    r.lo = std::min(r.lo, s.partial);
    r.hi = std::max(r.hi, s.upper());
  }
  return r;
}

TailSum tail_sum(const KernelProfile& profile, const SamplingScheme& scheme, double gamma,
                 double w, double x) {
  if (!(gamma > 0.0) || !(w > 0.0) || !(x > 0.0))
    throw ValidationError("tail sum needs gamma, w, x > 0");
  const double y = w * std::log(x);
  const double exclude = gamma * w;
  if (!std::isfinite(exclude)) return {};
  const double window = std::max(64.0 * exclude, 4096.0);
  const PhaseSum s = phase_sum(profile, scheme, 0.0, y, exclude, window);
  return {s.upper(), s.partial, s.remainder};
}

Chi4Reports check_chi4(const NonlinearKernel& kernel, const SamplingScheme& scheme, int j,
                       std::span<const double> w_list, const PhaseProbe& probe,
                       const UGrid& grid) {
  if (j < 1) throw ValidationError("chi4 needs j >= 1");
  check_w_list(w_list);
  const PartitionRange m = partition_range(kernel.profile, scheme, probe);
  const double ms[2] = {m.lo, m.hi};
  const double inner = 1.0 / j;

  std::vector<double> u_small;
  for (int i = 0; i < grid.points; ++i) u_small.push_back(inner * (-1.0 + (2.0 * i + 1.0) / grid.points));
  std::vector<double> u_large;
  const double span = std::log(grid.max_abs / inner);
  for (int i = 0; i < grid.points; ++i) {
    const double a = inner * std::exp(span * i / (grid.points - 1));
    u_large.push_back(a);
    u_large.push_back(-a);
  }

  Chi4Reports out;
  out.S.condition = "chi4_S(" + std::to_string(j) + ")";
  out.T.condition = "chi4_T(" + std::to_string(j) + ")";
  for (auto* rep : {&out.S, &out.T}) {
    rep->w_values.assign(w_list.begin(), w_list.end());
    rep->sup_values.assign(w_list.size(), 0.0);
    rep->declared_rate = kernel.response.deviation_rate;
  }
  parallel_for(w_list.size(), [&](std::size_t iw) {
    const double w = w_list[iw];
    double s = 0.0;
    for (double u : u_small)
      for (double mm : ms) s = std::max(s, std::abs(kernel.response(w, u) * mm - u));
    double t = 0.0;
    for (double u : u_large)
      for (double mm : ms) t = std::max(t, std::abs(kernel.response(w, u) * mm / u - 1.0));
    out.S.sup_values[iw] = s;
    out.T.sup_values[iw] = t;
  });
  apply_rate_rule(out.S);
  apply_rate_rule(out.T);
  return out;
}

ConditionReport check_chi4_star(const NonlinearKernel& kernel, const SamplingScheme& scheme,
                                std::span<const double> w_list, const PhaseProbe& probe,
                                const UGrid& grid) {
  check_w_list(w_list);
  const PartitionRange m = partition_range(kernel.profile, scheme, probe);
  const double ms[2] = {m.lo, m.hi};
  std::vector<double> us;
  const double span = std::log(grid.max_abs / grid.min_abs);
  for (int i = 0; i < grid.points; ++i) {
    const double a = grid.min_abs * std::exp(span * i / (grid.points - 1));
    us.push_back(a);
    us.push_back(-a);
  }
  ConditionReport rep;
  rep.condition = "chi4_star";
  rep.w_values.assign(w_list.begin(), w_list.end());
  rep.sup_values.assign(w_list.size(), 0.0);
  rep.declared_rate = kernel.response.deviation_rate;
  parallel_for(w_list.size(), [&](std::size_t iw) {
    double t = 0.0;
    for (double u : us)
      for (double mm : ms)
        t = std::max(t, std::abs(kernel.response(w_list[iw], u) * mm / u - 1.0));
    rep.sup_values[iw] = t;
  });
  apply_rate_rule(rep);
  return rep;
}

ConditionReport check_L3(const KernelProfile& profile, const SamplingScheme& scheme, double r,
                         double gamma, std::span<const double> w_list, int phase_points) {
  if (!(r > 0.0 && r <= 1.0)) throw ValidationError("L3 needs r in (0, 1]");
  if (!(gamma > 0.0)) throw ValidationError("L3 needs gamma > 0");
  check_w_list(w_list);
  ConditionReport rep;
  {
    std::ostringstream os;
    os << "L3(" << r << ")";
    rep.condition = os.str();
  }
  rep.w_values.assign(w_list.begin(), w_list.end());
  rep.sup_values.assign(w_list.size(), 0.0);
  const auto phases = probe_phases(scheme, phase_points);
  std::vector<int> diverged(w_list.size(), 0);
  parallel_for(w_list.size(), [&](std::size_t iw) {
    const double ex = gamma * w_list[iw];
    const double window = std::max(64.0 * ex, 4096.0);
    double sup = 0.0;
    for (double y : phases) {
      const PhaseSum s = phase_sum(profile, scheme, r, y, ex, window);
      if (s.diverged) diverged[iw] = 1;
      sup = std::max(sup, s.diverged ? s.partial : s.upper());
    }
    rep.sup_values[iw] = sup;
  });
  rep.diverged = std::any_of(diverged.begin(), diverged.end(), [](int d) { return d != 0; });
  if (rep.diverged) {
    rep.passed = false;
    rep.detail = "weighted tail is not summable for this order";
    return rep;
  }
  if (rep.sup_values.back() == 0.0) {
    rep.fit.exact = true;
    rep.passed = true;
    rep.detail = "exactly zero for large w";
    return rep;
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.sup_values.size(); ++i)
    if (!(rep.sup_values[i] < rep.sup_values[i - 1])) decreasing = false;
  try {
    rep.fit = fit_rate(rep.w_values, rep.sup_values);
  } catch (const ValidationError& e) {
    rep.passed = false;
    rep.detail = std::string("rate fit failed: ") + e.what();
    return rep;
  }
  rep.passed = decreasing && (rep.fit.exact || rep.fit.slope <= -0.1);
  std::ostringstream os;
  os << (decreasing ? "strictly decreasing" : "not decreasing") << ", fitted rate "
     << rep.fit.slope;
  rep.detail = os.str();
  return rep;
}

double profile_outer_mass(const KernelProfile& profile, double V) {
  V = std::abs(V);
  if (profile.is_compact()) {
    if (V >= profile.compact_radius()) return 0.0;
    return profile_mass_between(profile, -kInf, -V) + profile_mass_between(profile, V, kInf);
  }
  if (profile.has_outer_mass()) return profile.outer_mass(V);
  return profile_mass_between(profile, -kInf, -V) + profile_mass_between(profile, V, kInf);
}

ConditionReport check_e3_1(const KernelProfile& profile, double gamma,
                           std::span<const double> w_list) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("e3_1 needs gamma in (0, 1)");
  check_w_list(w_list);
  ConditionReport rep;
  {
    std::ostringstream os;
    os << "e3_1(" << gamma << ")";
    rep.condition = os.str();
  }
  rep.w_values.assign(w_list.begin(), w_list.end());
  for (double w : w_list) rep.sup_values.push_back(profile_outer_mass(profile, std::pow(w, 1.0 - gamma)));
  if (rep.sup_values.back() == 0.0) {
    rep.fit.exact = true;
    rep.passed = true;
    rep.gamma0 = kInf;
    rep.m3 = 0.0;
    rep.detail = "exactly zero once w^(1-gamma) exceeds the support radius";
    return rep;
  }
  try {
    rep.fit = fit_rate(rep.w_values, rep.sup_values);
  } catch (const ValidationError& e) {
    rep.passed = false;
    rep.detail = std::string("rate fit failed: ") + e.what();
    return rep;
  }
  const double g0 = -rep.fit.slope;
  rep.gamma0 = g0;
  double m3 = 0.0;
  for (std::size_t i = 0; i < w_list.size(); ++i)
    m3 = std::max(m3, rep.sup_values[i] * std::pow(w_list[i], g0));
  rep.m3 = m3;
  rep.passed = g0 > 0.0;
  std::ostringstream os;
  os << "gamma0 = " << g0 << ", M3 = " << m3;
  rep.detail = os.str();
  return rep;
}

double lemma41_outer_mass(const KernelProfile& profile, double t_k, double w, double M) {
  if (!(w > 0.0) || !(M >= 0.0)) throw ValidationError("outer mass needs w > 0, M >= 0");
  // v = ln x, s = w v - t_k: the integral becomes int_{|s + t_k| > w M} L(e^s) ds.
  const double a = w * M - t_k;
  const double b = -w * M - t_k;
  return profile_mass_between(profile, a, kInf) + profile_mass_between(profile, -kInf, b);
}

}  // namespace expkant
