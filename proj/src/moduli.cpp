#include "expkant/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "expkant/error.hpp"
#include "expkant/parallel.hpp"

namespace expkant {

namespace {

constexpr double kZeroModulus = 1e-14;

LogInterval search_window(const Signal& f, double delta, const ModulusSearch& search) {
  if (search.window) return *search.window;
  if (f.support) return {f.support->lo - delta, f.support->hi + delta};
  return {-8.0, 8.0};
}

}  // namespace

double log_modulus(const Signal& f, double delta, const ModulusSearch& search) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("modulus needs delta > 0");
  if (search.anchors < 2 || search.offsets < 1)
    throw ValidationError("modulus search needs >= 2 anchors and >= 1 offset");
  const LogInterval win = search_window(f, delta, search);
  if (!(win.hi > win.lo)) throw ValidationError("modulus search window is empty");

  std::vector<double> anchors;
  anchors.reserve(search.anchors + 3 * f.breakpoints.size());
  for (int i = 0; i < search.anchors; ++i)
    anchors.push_back(win.lo + win.length() * i / (search.anchors - 1));
  for (double b : f.breakpoints) {
    if (b < win.lo - delta || b > win.hi + delta) continue;
    anchors.push_back(b);
    anchors.push_back(b - delta);
    anchors.push_back(b + delta);
  }

  const auto& F = f.at_log;
  auto diff = [&F](double u, double h) { return std::abs(F(u + h) - F(u)); };

  struct Best {
    double value = 0.0, u = 0.0, h = 0.0;
  };
  std::vector<Best> best(anchors.size());
  parallel_for(anchors.size(), [&](std::size_t i) {
    Best b;
    const double u = anchors[i];
    for (int j = 1; j <= search.offsets; ++j) {
      const double h = delta * j / search.offsets;
      for (double hh : {h, -h}) {
        const double d = diff(u, hh);
        if (d > b.value) b = {d, u, hh};
      }
    }
    best[i] = b;
  });
  Best top = *std::max_element(best.begin(), best.end(),
                               [](const Best& a, const Best& b) { return a.value < b.value; });

  // Pattern search in (u, h) with |h| <= delta.
  double step_u = win.length() / (search.anchors - 1);
  double step_h = delta / search.offsets;
  for (int it = 0; it < search.refine_iterations; ++it) {
    bool improved = false;
    for (double du : {-step_u, 0.0, step_u}) {
      for (double dh : {-step_h, 0.0, step_h}) {
        if (du == 0.0 && dh == 0.0) continue;
        const double u = top.u + du;
        const double h = std::clamp(top.h + dh, -delta, delta);
        const double d = diff(u, h);
        if (d > top.value) {
          top = {d, u, h};
          improved = true;
        }
      }
    }
    if (!improved) {
      step_u *= 0.5;
      step_h *= 0.5;
    }
  }
  return top.value;
}

std::vector<double> geometric_deltas(double delta_max, int count) {
  if (!(delta_max > 0.0) || count < 1) throw ValidationError("geometric deltas need delta > 0");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(delta_max * std::ldexp(1.0, -i));
  return out;
}

ModulusCurve modulus_curve(const Signal& f, std::vector<double> deltas,
                           const ModulusSearch& search, bool fit) {
  if (deltas.empty()) throw ValidationError("modulus curve needs deltas");
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  ModulusCurve c;
  c.deltas = deltas;
  for (double d : deltas) c.values.push_back(log_modulus(f, d, search));
  for (std::size_t i = c.values.size() - 1; i-- > 0;)
    c.values[i] = std::max(c.values[i], c.values[i + 1]);
  if (fit) {
    const HolderFit h = holder_fit(c);
    c.zero_modulus = h.zero_modulus;
    if (!h.zero_modulus) c.fitted_order = h.order;
  }
  return c;
}

HolderFit holder_fit(std::span<const double> deltas, std::span<const double> values) {
  if (deltas.size() != values.size()) throw ValidationError("holder fit needs matching arrays");
  HolderFit out;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (values[i] > kZeroModulus) {
      lx.push_back(std::log(deltas[i]));
      ly.push_back(std::log(values[i]));
    }
  }
  if (lx.empty()) {
    out.zero_modulus = true;
    return out;
  }
  if (lx.size() < 2) throw ValidationError("holder fit needs two nonzero modulus values");
  out.fit = fit_line(lx, ly);
  out.raw_slope = out.fit.slope;
  out.order = std::clamp(out.fit.slope, 1e-6, 1.0);
  return out;
}

HolderFit holder_fit(const ModulusCurve& curve) { return holder_fit(curve.deltas, curve.values); }

SubadditivityResult subadditivity_check(const Signal& f, double delta, double lambda,
                                        const ModulusSearch& search) {
  if (!(lambda > 0.0)) throw ValidationError("subadditivity needs lambda > 0");
  SubadditivityResult r;
  ModulusSearch s = search;
  // Same window for both estimates.
  if (!s.window) {
    const double pad = std::max(delta, lambda * delta);
    s.window = f.support ? LogInterval{f.support->lo - pad, f.support->hi + pad}
                         : LogInterval{-8.0, 8.0};
  }
  r.lhs = log_modulus(f, lambda * delta, s);
  r.rhs = (1.0 + lambda) * log_modulus(f, delta, s);
  r.passed = r.lhs <= r.rhs + 1e-6;
  return r;
}

}  // namespace expkant
