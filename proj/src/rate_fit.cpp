#include "expkant/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "expkant/error.hpp"

namespace expkant {

RateFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("fit needs matching arrays");
  const std::size_t n = xs.size();
  if (n < 2) throw ValidationError("fit needs at least two points");
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ValidationError("fit needs distinct abscissae");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.points_used = static_cast<int>(n);
  return fit;
}

RateFit fit_rate(std::span<const double> ws, std::span<const double> errors) {
  if (ws.size() != errors.size())
    throw ValidationError("rate fit needs as many errors as w values");
  if (ws.empty()) throw ValidationError("rate fit needs data");
  std::vector<std::size_t> order(ws.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ws[a] < ws[b]; });
  for (std::size_t i : order) {
    if (!(ws[i] > 0.0) || !std::isfinite(ws[i]))
      throw ValidationError("rate fit needs finite w > 0");
    if (!std::isfinite(errors[i]) || errors[i] < 0.0)
      throw ValidationError("rate fit needs finite nonnegative errors");
  }
  RateFit fit;
  if (std::abs(errors[order.back()]) < kExactThreshold) {
    fit.exact = true;
    return fit;
  }
  // Largest two thirds of the w values.
  const std::size_t n = ws.size();
  const std::size_t keep = std::max<std::size_t>((2 * n + 2) / 3, std::min<std::size_t>(n, 3));
  std::vector<double> lx, ly;
  for (std::size_t j = n - keep; j < n; ++j) {
    const std::size_t i = order[j];
    if (errors[i] < kExactThreshold) continue;
    lx.push_back(std::log(ws[i]));
    ly.push_back(std::log(errors[i]));
  }
  if (lx.size() < 3) throw ValidationError("rate fit needs at least three usable points");
  return fit_line(lx, ly);
}

}  // namespace expkant
