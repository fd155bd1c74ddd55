#include "expkant/modular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "expkant/error.hpp"
#include "expkant/parallel.hpp"
#include "expkant/quadrature.hpp"
#include "expkant/signals.hpp"

namespace expkant {

namespace {

constexpr double kModularAbsTol = 1e-18;

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError("modular needs a finite lambda > 0");
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double v) {
  if (v < xs.front() || v > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), v);
  if (it == xs.end()) return ys.back();
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (v - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace

ModularValue modular_of(const PhiFunction& phi, const std::function<double(double)>& g,
                        LogInterval window, std::span<const double> breakpoints,
                        double lambda, double rel_tol) {
  check_lambda(lambda);
  ModularValue out;
  out.lambda = lambda;
  if (!(window.hi > window.lo)) return out;
  auto integrand = [&](double v) { return phi(lambda * std::abs(g(v))); };
  const QuadratureResult q = integrate_adaptive(integrand, window.lo, window.hi, breakpoints,
                                                rel_tol, kModularAbsTol);
  out.value = q.value;
  out.quadrature_error = q.error;
  if (!std::isfinite(out.value)) out.diverged = true;
  return out;
}

ModularValue modular(const PhiFunction& phi, const Signal& f, double lambda,
                     const ModularOptions& options) {
  check_lambda(lambda);
  if (f.sup_norm && *f.sup_norm == 0.0) return {lambda, 0.0, 0.0, false};
  if (options.window)
    return modular_of(phi, f.at_log, *options.window, f.breakpoints, lambda, options.rel_tol);
  if (f.support)
    return modular_of(phi, f.at_log, *f.support, f.breakpoints, lambda, options.rel_tol);

  // Unbounded support: grow symmetric windows until the increment is negligible.
  ModularValue out;
  out.lambda = lambda;
  double previous = 0.0;
  double previous_increment = kInf;
  bool converged = false;
  bool shrinking = true;
  for (int j = 0; j <= 10; ++j) {
    const double V = 8.0 * std::ldexp(1.0, j);
    const ModularValue m = modular_of(phi, f.at_log, {-V, V}, f.breakpoints, lambda,
                                      options.rel_tol);
    if (!std::isfinite(m.value)) {
      out.diverged = true;
      out.value = kInf;
      return out;
    }
    out.value = m.value;
    out.quadrature_error = m.quadrature_error;
    if (j > 0) {
      const double inc = m.value - previous;
      shrinking = inc <= 0.5 * previous_increment;
      previous_increment = inc;
      if (inc <= options.rel_tol * std::max(m.value, 1e-300)) {
        converged = true;
        out.quadrature_error += inc;
        break;
      }
    }
    previous = m.value;
  }
  if (!converged && !shrinking) out.diverged = true;
  return out;
}

ModularValue modular_error(const PhiFunction& phi, const Signal& f, const Signal& g,
                           double lambda, const ModularOptions& options) {
  return modular(phi, difference_signal(f, g), lambda, options);
}

LogInterval operator_window(const KantorovichOperator& op, const Signal& f, double w) {
  if (!(w > 0.0)) throw ValidationError("operator window needs w > 0");
  const auto& profile = op.kernel().profile;
  const double pad = profile.is_compact()
                         ? (profile.compact_radius() + op.scheme().upper_gap()) / w
                         : 64.0 / w;
  if (f.support) return {f.support->lo - pad, f.support->hi + pad};
  return {-8.0 - pad, 8.0 + pad};
}

OperatorSamples sample_operator(const KantorovichOperator& op, const Signal& f, double w,
                                int points, std::optional<LogInterval> window) {
  if (points < 2) throw ValidationError("operator sampling needs >= 2 points");
  const LogInterval win = window ? *window : operator_window(op, f, w);
  OperatorSamples s;
  s.w = w;
  s.vs.resize(points);
  for (int i = 0; i < points; ++i) s.vs[i] = win.lo + win.length() * i / (points - 1);
  const auto vals = op.evaluate_many_log(f, w, s.vs);
  s.values.resize(points);
  for (int i = 0; i < points; ++i) {
    s.values[i] = vals[i].value;
    s.truncation_bound = std::max(s.truncation_bound, vals[i].truncation_bound);
  }
  return s;
}

double modular_of_samples(const PhiFunction& phi, const OperatorSamples& samples,
                          const Signal* f, double lambda, double rel_tol) {
  check_lambda(lambda);
  std::vector<double> cuts = samples.vs;
  if (f) {
    cuts.insert(cuts.end(), f->breakpoints.begin(), f->breakpoints.end());
    std::sort(cuts.begin(), cuts.end());
  }
  LogInterval win{samples.vs.front(), samples.vs.back()};
  auto g = [&](double v) {
    const double p = interpolate(samples.vs, samples.values, v);
    return f ? p - f->at_log(v) : p;
  };
  double value = modular_of(phi, g, win, cuts, lambda, rel_tol).value;
  if (f && !f->support) {
    // Beyond the sampled window the operator is neglected; f still counts.
    value += modular(phi, *f, lambda, ModularOptions{rel_tol, LogInterval{win.hi, win.hi + 1024.0}}).value;
    value += modular(phi, *f, lambda, ModularOptions{rel_tol, LogInterval{win.lo - 1024.0, win.lo}}).value;
  }
  return value;
}

OperatorModularError operator_modular_error(const PhiFunction& phi,
                                            const KantorovichOperator& op, const Signal& f,
                                            double w, std::span<const double> lambdas,
                                            int points) {
  OperatorModularError out;
  out.w = w;
  const OperatorSamples coarse = sample_operator(op, f, w, points);
  const OperatorSamples fine = sample_operator(op, f, w, 2 * points);
  out.truncation_bound = std::max(coarse.truncation_bound, fine.truncation_bound);
  for (double lambda : lambdas) {
    const double c = modular_of_samples(phi, coarse, &f, lambda);
    const double v = modular_of_samples(phi, fine, &f, lambda);
    out.lambdas.push_back(lambda);
    out.values.push_back(v);
    out.quadrature_errors.push_back(std::abs(c - v));
  }
  return out;
}

HReport check_H(const PhiPair& pair, const SlopeFunction& slope,
                std::span<const double> lambdas, std::span<const double> us) {
  if (lambdas.empty() || us.empty()) throw ValidationError("condition H needs non-empty grids");
  HReport r;
  r.passed = true;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("condition H needs lambda in (0, 1)");
    const double c = pair.c_lambda(lambda);
    for (double u : us) {
      if (u < 0.0) throw ValidationError("condition H needs u >= 0");
      const double e = pair.eta(lambda * u);
      const double margin = e - pair.phi(c * slope(u));
      if (margin < r.worst_margin) {
        r.worst_margin = margin;
        r.worst_lambda = lambda;
        r.worst_u = u;
      }
      if (margin < -1e-12 * std::max(1.0, e)) r.passed = false;
    }
  }
  return r;
}

LipschitzModularReport modular_lipschitz_check(const KantorovichOperator& op,
                                               const PhiPair& pair, const Signal& f,
                                               const Signal& g, double w, double lambda,
                                               int points) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("modular inequality needs lambda in (0, 1)");
  if (!f.support || !g.support || !f.bounded() || !g.bounded())
    throw ValidationError("modular inequality needs bounded compactly supported signals");
  LipschitzModularReport r;
  r.w = w;
  r.lambda = lambda;
  r.m0 = op.moment_bound(0.0);
  r.l1 = op.kernel().profile.l1_log_norm();
  r.delta = op.scheme().lower_gap();
  r.c = pair.c_lambda(lambda) / r.m0;

  const LogInterval wf = operator_window(op, f, w);
  const LogInterval wg = operator_window(op, g, w);
  const LogInterval win{std::min(wf.lo, wg.lo), std::max(wf.hi, wg.hi)};
  auto lhs_on = [&](int n) {
    OperatorSamples a = sample_operator(op, f, w, n, win);
    const OperatorSamples b = sample_operator(op, g, w, n, win);
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] -= b.values[i];
    return modular_of_samples(pair.phi, a, nullptr, r.c);
  };
  const double coarse = lhs_on(points);
  r.lhs = lhs_on(2 * points);
  r.lhs_quadrature_error = std::abs(coarse - r.lhs);
  const ModularValue rhs_mod = modular_error(pair.eta, f, g, lambda);
  r.rhs = r.l1 / (r.delta * r.m0) * rhs_mod.value;
  r.passed = r.lhs <= r.rhs * (1.0 + 1e-3);
  return r;
}

SmoothnessValue log_smoothness(const PhiFunction& phi, const Signal& f, double lambda,
                               double delta, int t_count) {
  check_lambda(lambda);
  if (!(delta > 0.0)) throw ValidationError("log smoothness needs delta > 0");
  if (t_count < 2) throw ValidationError("log smoothness needs >= 2 shifts");
  std::vector<double> shifts;
  for (int i = 0; i < t_count; ++i) {
    const double h = -delta + 2.0 * delta * i / (t_count - 1);
    if (h != 0.0) shifts.push_back(h);
  }
  std::vector<double> vals(shifts.size());
  parallel_for(shifts.size(), [&](std::size_t i) {
    vals[i] = modular(phi, difference_signal(dilate_signal(f, shifts[i]), f), lambda).value;
  });
  SmoothnessValue out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (vals[i] > out.value) {
      out.value = vals[i];
      out.at_shift = shifts[i];
    }
  }
  return out;
}

SmoothnessCurve smoothness_curve(const PhiFunction& phi, const Signal& f, double lambda,
                                 std::vector<double> deltas, int t_count) {
  if (deltas.empty()) throw ValidationError("smoothness curve needs deltas");
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  SmoothnessCurve c;
  c.lambda = lambda;
  c.deltas = deltas;
  for (double d : deltas) c.values.push_back(log_smoothness(phi, f, lambda, d, t_count).value);
  for (std::size_t i = c.values.size() - 1; i-- > 0;)
    c.values[i] = std::max(c.values[i], c.values[i + 1]);
  const HolderFit h = lip_class_fit(c);
  c.zero_modulus = h.zero_modulus;
  if (!h.zero_modulus) c.fitted_order = h.order;
  return c;
}

HolderFit lip_class_fit(const SmoothnessCurve& curve) {
  return holder_fit(curve.deltas, curve.values);
}

}  // namespace expkant
