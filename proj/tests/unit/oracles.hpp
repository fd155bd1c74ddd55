#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <algorithm>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Central B-spline of degree n via the truncated-power formula.
inline double bspline(int n, double v) {
  if (std::abs(v) >= 0.5 * (n + 1)) return 0.0;  // avoids cancellation far out
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  double s = 0.0;
  for (int k = 0; k <= n + 1; ++k) {
    const double t = v + 0.5 * (n + 1) - k;
    if (t > 0.0) s += (k % 2 ? -1.0 : 1.0) * binomial(n + 1, k) * std::pow(t, n);
  }
  return std::max(0.0, s / fact);
}

inline double fejer(double v) {
  if (v == 0.0) return 1.0 / (2.0 * std::numbers::pi);
  const double s = std::sin(0.5 * v) / (0.5 * v);
  return s * s / (2.0 * std::numbers::pi);
}

inline double midpoint(const std::function<double(double)>& f, double a, double b, long n) {
  const double h = (b - a) / n;
  long double s = 0.0L;
  for (long i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return static_cast<double>(s * h);
}

// Midpoint rule on each piece of [a, b] cut at the given points.
inline double midpoint_split(const std::function<double(double)>& f, double a, double b,
                             std::vector<double> cuts, long n_per_piece) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const double sign = a <= b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = std::max(cuts[i], lo), r = std::min(cuts[i + 1], hi);
    if (r > l) s += midpoint(f, l, r, n_per_piece);
  }
  return sign * s;
}

// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// sum over k in [k0, k1] of L(y - k) * g(mean_k) with means from G (an
// antiderivative in the log variable) over [k / w, (k + 1) / w].
inline double kantorovich_sum(const std::function<double(double)>& L,
                              const std::function<double(double)>& g,
                              const std::function<double(double)>& G, double w, double v,
                              long k0, long k1) {
  const double y = w * v;
  long double s = 0.0L;
  for (long k = k0; k <= k1; ++k) {
    const double mean = w * (G((k + 1) / w) - G(k / w));
    s += L(y - k) * g(mean);
  }
  return static_cast<double>(s);
}

// Same with the means by Simpson's rule on each cell (f smooth).
inline double kantorovich_sum_simpson(const std::function<double(double)>& L,
                                      const std::function<double(double)>& g,
                                      const std::function<double(double)>& f, double w, double v,
                                      long k0, long k1) {
  const double y = w * v;
  long double s = 0.0L;
  for (long k = k0; k <= k1; ++k) s += L(y - k) * g(w * simpson(f, k / w, (k + 1) / w, 400));
  return static_cast<double>(s);
}

// Max over a dense grid of pairs (u, u + h), |h| <= delta, on [lo, hi].
inline double modulus(const std::function<double(double)>& f, double delta, double lo,
                      double hi, int n_u, int n_h) {
  double best = 0.0;
  for (int i = 0; i < n_u; ++i) {
    const double u = lo + (hi - lo) * i / (n_u - 1);
    const double fu = f(u);
    for (int j = 1; j <= n_h; ++j) {
      const double h = delta * j / n_h;
      best = std::max({best, std::abs(f(u + h) - fu), std::abs(f(u - h) - fu)});
    }
  }
  return best;
}

}  // namespace oracle
