#include "expkant/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>

#include "expkant/error.hpp"

namespace expkant {

namespace {

GaussLegendreRule build_rule(int m) {
  GaussLegendreRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (m == 1) ? 1.0 : m * (x * p1 - p0) / (x * x - 1.0);
    const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = wgt;
    rule.weights[m - 1 - i] = wgt;
  }
  if (m == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

struct PanelEstimate {
  double a, b, value, error;
  bool operator<(const PanelEstimate& o) const { return error < o.error; }
};

// 10-node rule against the even-split 2 x 10 rule.
PanelEstimate estimate_panel(const std::function<double(double)>& f, double a,
                             double b) {
  const double coarse = apply_rule(f, a, b, QuadratureSpec::Rule::gauss_legendre, 10);
  const double mid = 0.5 * (a + b);
  const double fine =
      apply_rule(f, a, mid, QuadratureSpec::Rule::gauss_legendre, 10) +
      apply_rule(f, mid, b, QuadratureSpec::Rule::gauss_legendre, 10);
  return {a, b, fine, std::abs(fine - coarse)};
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int m) {
  if (m < 1) throw ValidationError("Gauss-Legendre rule needs m >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(m));
  return *slot;
}

double apply_rule(const std::function<double(double)>& f, double a, double b,
                  QuadratureSpec::Rule rule, int m) {
  if (b == a) return 0.0;
  if (rule == QuadratureSpec::Rule::midpoint) {
    const double h = (b - a) / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
  }
  const auto& gl = gauss_legendre(m);
  const double half = 0.5 * (b - a);
  const double centre = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += gl.weights[i] * f(centre + half * gl.nodes[i]);
  return s * half;
}

QuadratureResult integrate_doubling(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec) {
  if (spec.nodes < 1) throw ValidationError("quadrature needs at least one node");
  QuadratureResult out;
  int m = spec.nodes;
  double previous = apply_rule(f, a, b, spec.rule, m);
  while (true) {
    const int next_m = 2 * m;
    if (next_m > spec.max_nodes) {
      out.value = previous;
      out.nodes_used = m;
      out.converged = false;
      return out;
    }
    const double next = apply_rule(f, a, b, spec.rule, next_m);
    const double change = std::abs(next - previous);
    const double scale = std::max(std::abs(next), 1.0);
    m = next_m;
    if (change <= spec.tolerance * scale) {
      out.value = next;
      out.error = change;
      out.nodes_used = m;
      return out;
    }
    previous = next;
    out.error = change;
  }
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    std::span<const double> breakpoints,
                                    double rel_tol, double abs_tol,
                                    int max_panels) {
  QuadratureResult out;
  if (!(b > a)) return out;
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<PanelEstimate> heap;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    auto p = estimate_panel(f, cuts[i], cuts[i + 1]);
    total_error += p.error;
    heap.push(p);
  }

  auto current_value = [&heap]() {
    auto copy = heap;
    std::vector<double> vals;
    vals.reserve(copy.size());
    while (!copy.empty()) {
      vals.push_back(copy.top().value);
      copy.pop();
    }
    return pairwise_sum(vals);
  };

  double value = current_value();
  int panels = static_cast<int>(heap.size());
  int since_resum = 0;
  while (!heap.empty() && total_error > std::max(rel_tol * std::abs(value), abs_tol)) {
    if (panels >= max_panels) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in floating point.
      heap.push({worst.a, worst.b, worst.value, 0.0});
      total_error -= worst.error;
      continue;
    }
    auto left = estimate_panel(f, worst.a, mid);
    auto right = estimate_panel(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    value += left.value + right.value - worst.value;
    heap.push(left);
    heap.push(right);
    ++panels;
    if (++since_resum == 512) {
      value = current_value();
      since_resum = 0;
    }
  }
  out.value = current_value();
  out.error = std::max(total_error, 0.0);
  out.nodes_used = panels * 30;
  return out;
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace expkant
