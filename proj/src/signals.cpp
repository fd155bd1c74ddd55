#include "expkant/signals.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

#include "expkant/error.hpp"

namespace expkant {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

// ln cosh t without overflow.
double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double cubic_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double cubic_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 6.0 * t * (1.0 - t);
}

// C-infinity transition, 0 for t <= 0 and 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  const double da = a / (t * t);
  const double db = -b / ((1.0 - t) * (1.0 - t));  // d/dt of b
  const double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b) {
  std::set<double> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

}  // namespace

Signal constant_signal(double c) {
  require(std::isfinite(c), "constant signal needs a finite value");
  Signal s;
  s.name = "constant(" + fmt(c) + ")";
  s.at_log = [c](double) { return c; };
  s.sup_norm = std::abs(c);
  s.holder = HolderInfo{1.0, 0.0};
  s.mellin_derivative_log = [](double) { return 0.0; };
  s.log_antiderivative = [c](double v) { return c * v; };
  if (c == 0.0) s.support = LogInterval{0.0, 0.0};
  return s;
}

Signal clipped_log_signal(double c) {
  require(std::isfinite(c) && c > 0.0, "clipped_log needs c > 0");
  Signal s;
  s.name = "clipped_log(" + fmt(c) + ")";
  s.at_log = [c](double v) {
    const double a = std::abs(v);
    if (a <= c) return v;
    return std::copysign(c + std::tanh(a - c), v);
  };
  s.sup_norm = c + 1.0;
  s.holder = HolderInfo{1.0, 1.0};
  s.mellin_derivative_log = [c](double v) {
    const double a = std::abs(v);
    if (a <= c) return 1.0;
    const double t = std::cosh(a - c);
    return 1.0 / (t * t);
  };
  s.log_growth = LogGrowth{0.0, 1.0};
  s.log_antiderivative = [c](double v) {
    const double a = std::abs(v);
    if (a <= c) return 0.5 * v * v;
    return 0.5 * c * c + c * (a - c) + log_cosh(a - c);
  };
  s.breakpoints = {-c, c};
  return s;
}

Signal log_identity_signal() {
  Signal s;
  s.name = "log_identity";
  s.at_log = [](double v) { return v; };
  s.holder = HolderInfo{1.0, 1.0};
  s.mellin_derivative_log = [](double) { return 1.0; };
  s.log_growth = LogGrowth{0.0, 1.0};
  s.log_antiderivative = [](double v) { return 0.5 * v * v; };
  return s;
}

Signal power_clipped_signal(double a, double c) {
  require(std::isfinite(a) && a != 0.0, "power signal needs a finite exponent a != 0");
  require(std::isfinite(c) && c > 0.0, "power signal needs c > 0");
  Signal s;
  s.name = "power(" + fmt(a) + "," + fmt(c) + ")";
  s.at_log = [a, c](double v) { return std::exp(a * std::clamp(v, -c, c)); };
  s.sup_norm = std::exp(std::abs(a) * c);
  s.holder = HolderInfo{1.0, std::abs(a) * std::exp(std::abs(a) * c)};
  s.mellin_derivative_log = [a, c](double v) {
    if (v < -c || v > c) return 0.0;
    return a * std::exp(a * v);
  };
  s.log_antiderivative = [a, c](double v) {
    if (v < -c) return std::exp(-a * c) * (v + c) + std::exp(-a * c) / a;
    if (v > c) return std::exp(a * c) / a + std::exp(a * c) * (v - c);
    return std::exp(a * v) / a;
  };
  s.breakpoints = {-c, c};
  return s;
}

Signal sin_log_signal(double c) {
  require(std::isfinite(c) && c > 0.0, "sin_log needs c > 0");
  Signal s;
  s.name = "sin_log(" + fmt(c) + ")";
  s.at_log = [c](double v) { return std::sin(v) * smooth_step(c + 1.0 - std::abs(v)); };
  s.sup_norm = 1.0;
  s.support = LogInterval{-c - 1.0, c + 1.0};
  s.holder = HolderInfo{1.0, 3.0};
  s.mellin_derivative_log = [c](double v) {
    const double t = c + 1.0 - std::abs(v);
    const double cut = smooth_step(t);
    const double dcut = -std::copysign(1.0, v) * smooth_step_derivative(t);
    return std::cos(v) * cut + std::sin(v) * dcut;
  };
  s.breakpoints = {-c - 1.0, -c, c, c + 1.0};
  return s;
}

Signal holder_bump_signal(double nu) {
  require(nu > 0.0 && nu <= 1.0, "holder_bump needs nu in (0, 1]");
  Signal s;
  s.name = "holder_bump(" + fmt(nu) + ")";
  s.at_log = [nu](double v) {
    const double a = std::abs(v);
    if (a >= 1.0) return 0.0;
    return 1.0 - (nu == 1.0 ? a : std::pow(a, nu));
  };
  s.sup_norm = 1.0;
  s.support = LogInterval{-1.0, 1.0};
  s.holder = HolderInfo{nu, 1.0};
  s.log_antiderivative = [nu](double v) {
    const double a = std::min(std::abs(v), 1.0);
    const double g = a - std::pow(a, nu + 1.0) / (nu + 1.0);
    return std::copysign(g, v);
  };
  s.breakpoints = {-1.0, 0.0, 1.0};
  return s;
}

Signal mollified_indicator_signal(double a, double b, double eps, double height) {
  require(std::isfinite(a) && std::isfinite(b) && b > a,
          "mollified_indicator needs a < b");
  require(std::isfinite(eps) && eps > 0.0 && eps <= 0.5 * (b - a) * (1.0 + 1e-12),
          "mollified_indicator needs 0 < eps <= (b - a) / 2");
  require(std::isfinite(height), "mollified_indicator needs a finite height");
  Signal s;
  s.name = "mollified_indicator(" + fmt(a) + "," + fmt(b) + "," + fmt(eps) + "," +
           fmt(height) + ")";
  const double w = 2.0 * eps;
  s.at_log = [=](double v) {
    return height * cubic_step((v - a + eps) / w) * cubic_step((b + eps - v) / w);
  };
  s.sup_norm = std::abs(height);
  s.support = LogInterval{a - eps, b + eps};
  s.holder = HolderInfo{1.0, 1.5 * std::abs(height) / w};
  s.mellin_derivative_log = [=](double v) {
    const double l = (v - a + eps) / w;
    const double r = (b + eps - v) / w;
    return height * (cubic_step_derivative(l) * cubic_step(r) -
                     cubic_step(l) * cubic_step_derivative(r)) /
           w;
  };
  // Ramps are cubic between these points, so Gauss rules split there are exact.
  s.breakpoints = merged({a - eps, a + eps}, {b - eps, b + eps});
  return s;
}

Signal indicator_signal(double a, double b, double height) {
  require(std::isfinite(a) && std::isfinite(b) && b > a, "indicator needs a < b");
  require(std::isfinite(height), "indicator needs a finite height");
  Signal s;
  s.name = "indicator(" + fmt(a) + "," + fmt(b) + "," + fmt(height) + ")";
  s.at_log = [=](double v) { return (v >= a && v <= b) ? height : 0.0; };
  s.sup_norm = std::abs(height);
  s.support = LogInterval{a, b};
  s.log_antiderivative = [=](double v) { return height * (std::clamp(v, a, b) - a); };
  s.breakpoints = {a, b};
  s.discontinuities = {a, b};
  return s;
}

Signal dilate_signal(const Signal& f, double h) {
  require(std::isfinite(h), "dilation needs a finite shift");
  Signal s = f;
  s.name = f.name + "@" + fmt(h);
  s.at_log = [g = f.at_log, h](double v) { return g(v + h); };
  if (f.support) s.support = LogInterval{f.support->lo - h, f.support->hi - h};
  if (f.mellin_derivative_log)
    s.mellin_derivative_log = [g = f.mellin_derivative_log, h](double v) { return g(v + h); };
  if (f.log_antiderivative)
    s.log_antiderivative = [g = f.log_antiderivative, h](double v) { return g(v + h); };
  if (f.log_growth) {
    // |f(v + h)| <= a + b|h| + b|v|
    s.log_growth = LogGrowth{f.log_growth->a + f.log_growth->b * std::abs(h),
                             f.log_growth->b};
  }
  for (auto& p : s.breakpoints) p -= h;
  for (auto& p : s.discontinuities) p -= h;
  return s;
}

Signal difference_signal(const Signal& f, const Signal& g) {
  Signal s;
  s.name = f.name + "-" + g.name;
  s.at_log = [a = f.at_log, b = g.at_log](double v) { return a(v) - b(v); };
  if (f.sup_norm && g.sup_norm) s.sup_norm = *f.sup_norm + *g.sup_norm;
  if (f.support && g.support)
    s.support = LogInterval{std::min(f.support->lo, g.support->lo),
                            std::max(f.support->hi, g.support->hi)};
  if (f.holder && g.holder && f.holder->order == g.holder->order)
    s.holder = HolderInfo{f.holder->order, f.holder->constant + g.holder->constant};
  if (f.mellin_derivative_log && g.mellin_derivative_log)
    s.mellin_derivative_log = [a = f.mellin_derivative_log,
                               b = g.mellin_derivative_log](double v) { return a(v) - b(v); };
  if (f.log_antiderivative && g.log_antiderivative)
    s.log_antiderivative = [a = f.log_antiderivative,
                            b = g.log_antiderivative](double v) { return a(v) - b(v); };
  if (!s.sup_norm) {
    auto growth = [](const Signal& x) -> std::optional<LogGrowth> {
      if (x.log_growth) return x.log_growth;
      if (x.sup_norm) return LogGrowth{*x.sup_norm, 0.0};
      return std::nullopt;
    };
    auto gf = growth(f);
    auto gg = growth(g);
    if (gf && gg) s.log_growth = LogGrowth{gf->a + gg->a, gf->b + gg->b};
  }
  s.breakpoints = merged(f.breakpoints, g.breakpoints);
  s.discontinuities = merged(f.discontinuities, g.discontinuities);
  return s;
}

Signal grid_signal(std::vector<double> vs, std::vector<double> values) {
  require(vs.size() >= 2 && vs.size() == values.size(),
          "grid signal needs matching abscissae and values, at least two");
  for (std::size_t i = 0; i + 1 < vs.size(); ++i)
    require(vs[i + 1] > vs[i], "grid signal abscissae must increase");
  double sup = 0.0;
  for (double y : values) {
    require(std::isfinite(y), "grid signal values must be finite");
    sup = std::max(sup, std::abs(y));
  }
  // Cumulative trapezoid integral at the nodes.
  std::vector<double> cum(vs.size(), 0.0);
  for (std::size_t i = 1; i < vs.size(); ++i)
    cum[i] = cum[i - 1] + 0.5 * (values[i] + values[i - 1]) * (vs[i] - vs[i - 1]);

  struct Data {
    std::vector<double> v, y, c;
  };
  auto data = std::make_shared<Data>(Data{std::move(vs), std::move(values), std::move(cum)});

  Signal s;
  s.name = "grid(" + std::to_string(data->v.size()) + ")";
  s.at_log = [data](double v) {
    const auto& xs = data->v;
    if (v < xs.front() || v > xs.back()) return 0.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), v);
    if (it == xs.end()) return data->y.back();
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (v - xs[i]) / (xs[i + 1] - xs[i]);
    return data->y[i] + t * (data->y[i + 1] - data->y[i]);
  };
  s.log_antiderivative = [data](double v) {
    const auto& xs = data->v;
    if (v <= xs.front()) return 0.0;
    if (v >= xs.back()) return data->c.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double h = v - xs[i];
    const double slope = (data->y[i + 1] - data->y[i]) / (xs[i + 1] - xs[i]);
    return data->c[i] + data->y[i] * h + 0.5 * slope * h * h;
  };
  s.sup_norm = sup;
  s.support = LogInterval{data->v.front(), data->v.back()};
  if (data->y.front() != 0.0) s.discontinuities.push_back(data->v.front());
  if (data->y.back() != 0.0) s.discontinuities.push_back(data->v.back());
  s.breakpoints = data->v;
  return s;
}

namespace {

const std::map<std::string, std::vector<std::string>>& signal_parameter_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"constant", {"c"}},
      {"clipped_log", {"c"}},
      {"log_identity", {}},
      {"power", {"a", "c"}},
      {"sin_log", {"c"}},
      {"holder_bump", {"nu"}},
      {"mollified_indicator", {"a", "b", "eps", "height"}},
      {"indicator", {"a", "b", "height"}},
  };
  return table;
}

}  // namespace

std::vector<std::string> builtin_signal_parameters(const std::string& name) {
  const auto& table = signal_parameter_table();
  auto it = table.find(name);
  if (it == table.end()) throw ValidationError("unknown signal '" + name + "'");
  return it->second;
}

Signal make_builtin_signal(const std::string& name,
                           const std::map<std::string, double>& params) {
  const auto allowed = builtin_signal_parameters(name);
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ValidationError("signal '" + name + "' has no parameter '" + key + "'");
  }
  auto get = [&params](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto need = [&params, &name](const char* key) {
    auto it = params.find(key);
    if (it == params.end())
      throw ValidationError("signal '" + name + "' needs parameter '" + key + "'");
    return it->second;
  };
  if (name == "constant") return constant_signal(need("c"));
  if (name == "clipped_log") return clipped_log_signal(get("c", 6.0));
  if (name == "log_identity") return log_identity_signal();
  if (name == "power") return power_clipped_signal(need("a"), get("c", 4.0));
  if (name == "sin_log") return sin_log_signal(get("c", 6.0));
  if (name == "holder_bump") return holder_bump_signal(need("nu"));
  if (name == "mollified_indicator")
    return mollified_indicator_signal(get("a", 0.0), get("b", 1.0), get("eps", 0.5),
                                      get("height", 1.0));
  if (name == "indicator")
    return indicator_signal(get("a", 0.0), get("b", 1.0), get("height", 1.0));
  throw ValidationError("unknown signal '" + name + "'");
}

}  // namespace expkant
