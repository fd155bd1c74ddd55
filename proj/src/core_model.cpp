#include "expkant/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "expkant/error.hpp"
#include "expkant/quadrature.hpp"

namespace expkant {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

// SamplingScheme

SamplingScheme SamplingScheme::uniform(double step, double offset) {
  if (!finite_positive(step))
    throw ValidationError("uniform scheme needs a finite step > 0");
  if (!std::isfinite(offset)) throw ValidationError("scheme offset must be finite");
  SamplingScheme s;
  s.step_ = step;
  s.offset_ = offset;
  s.lower_gap_ = step;
  s.upper_gap_ = step;
  return s;
}

SamplingScheme SamplingScheme::tabulated(std::vector<double> nodes) {
  if (nodes.size() < 2)
    throw ValidationError("tabulated scheme needs at least two nodes");
  double lo = kInf;
  double hi = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i]) || !std::isfinite(nodes[i + 1]))
      throw ValidationError("scheme nodes must be finite");
    const double g = nodes[i + 1] - nodes[i];
    if (!(g > 0.0))
      throw ValidationError("scheme nodes must be strictly increasing");
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  SamplingScheme s;
  s.offset_ = nodes.front();
  s.step_ = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  s.lower_gap_ = lo;
  s.upper_gap_ = hi;
  s.nodes_ = std::move(nodes);
  return s;
}

double SamplingScheme::period() const noexcept {
  return nodes_.empty() ? step_ : nodes_.back() - nodes_.front();
}

Index SamplingScheme::nodes_per_period() const noexcept {
  return nodes_.empty() ? 1 : static_cast<Index>(nodes_.size() - 1);
}

double SamplingScheme::node(Index k) const {
  if (nodes_.empty()) return offset_ + static_cast<double>(k) * step_;
  const Index n = nodes_per_period();
  Index q = k / n;
  Index r = k % n;
  if (r < 0) {
    r += n;
    --q;
  }
  return nodes_[static_cast<std::size_t>(r)] + static_cast<double>(q) * period();
}

Index SamplingScheme::first_index_at_or_above(double value) const {
  if (!std::isfinite(value)) throw ValidationError("index search needs a finite value");
  Index k;
  if (nodes_.empty()) {
    k = static_cast<Index>(std::ceil((value - offset_) / step_));
  } else {
    const Index n = nodes_per_period();
    const double P = period();
    const Index q = static_cast<Index>(std::floor((value - nodes_.front()) / P));
    const double local = value - static_cast<double>(q) * P;
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), local);
    k = q * n + static_cast<Index>(it - nodes_.begin());
  }
  while (node(k) < value) ++k;
  while (node(k - 1) >= value) --k;
  return k;
}

Index SamplingScheme::last_index_at_or_below(double value) const {
  Index k = first_index_at_or_above(value);
  if (node(k) > value) --k;
  return k;
}

std::string SamplingScheme::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (nodes_.empty()) {
    os << "uniform:" << step_;
    if (offset_ != 0.0) os << "+" << offset_;
  } else {
    os << "tabulated:" << nodes_per_period() << " nodes, period " << period();
  }
  return os.str();
}

// KernelProfile

KernelProfile::KernelProfile(std::string name, LogFunction at_log,
                             ProfileSupport support, double sup_bound,
                             std::vector<double> knots, LogFunction outer_mass)
    : name_(std::move(name)),
      at_log_(std::move(at_log)),
      support_(support),
      sup_bound_(sup_bound),
      knots_(std::move(knots)),
      outer_mass_(std::move(outer_mass)) {
  if (!at_log_) throw ValidationError("kernel profile needs an evaluator");
  if (auto* c = std::get_if<CompactSupport>(&support_)) {
    if (!finite_positive(c->radius))
      throw ValidationError("compact profile radius must be finite and > 0");
  } else {
    const auto& d = std::get<DecayingSupport>(support_);
    if (!(d.power > 1.0) || !(d.constant > 0.0) || !(d.from >= 0.0))
      throw ValidationError("decaying profile needs power > 1, constant > 0, from >= 0");
  }
  std::sort(knots_.begin(), knots_.end());
  l1_log_norm_ = compute_log_l1_norm(*this);
}

double KernelProfile::operator()(double x) const {
  if (!(x > 0.0)) throw ValidationError("kernel profile evaluated at x <= 0");
  return at_log_(std::log(x));
}

double KernelProfile::compact_radius() const {
  if (auto* c = std::get_if<CompactSupport>(&support_)) return c->radius;
  return kInf;
}

double compute_log_l1_norm(const KernelProfile& profile) {
  auto integrand = [&profile](double v) { return std::abs(profile.at_log(v)); };
  if (profile.is_compact()) {
    const double R = profile.compact_radius();
    return integrate_adaptive(integrand, -R, R, profile.knots(), 1e-13).value;
  }
  const double V = 32.0 * 2.0 * kPi;
  const double core = integrate_adaptive(integrand, -V, V, profile.knots(), 1e-13).value;
  if (profile.has_outer_mass()) return core + profile.outer_mass(V);
  // Fall back on the declared decay envelope for the tails.
  const auto* d = profile.decay();
  const double tail = 2.0 * d->constant * std::pow(V, 1.0 - d->power) / (d->power - 1.0);
  return core + tail;
}

// B-splines

double central_bspline(int degree, double v) {
  if (degree < 0) throw ValidationError("B-spline degree must be >= 0");
  const int m = degree + 1;  // cardinal order
  const double x = v + 0.5 * m;
  if (x <= 0.0 || x >= m) {
    // Degree 0 is the half-open box [-1/2, 1/2).
    return (degree == 0 && x == 0.0) ? 1.0 : 0.0;
  }
  // N_1(t) on the shifted arguments x - j, j = 0..m-1, then raise order.
  std::vector<double> n(m);
  for (int j = 0; j < m; ++j) {
    const double t = x - j;
    n[j] = (t >= 0.0 && t < 1.0) ? 1.0 : 0.0;
  }
  for (int order = 2; order <= m; ++order) {
    for (int j = 0; j + order <= m; ++j) {
      const double t = x - j;
      n[j] = (t * n[j] + (order - t) * n[j + 1]) / (order - 1);
    }
  }
  return n[0];
}

KernelProfile make_bspline_profile(int order) {
  if (order < 2) throw ValidationError("bspline profile needs order >= 2");
  const double radius = 0.5 * (order + 1);
  std::vector<double> knots;
  for (int j = 0; j <= order + 1; ++j) knots.push_back(-radius + j);
  return KernelProfile("bspline(" + std::to_string(order) + ")",
                       [order](double v) { return central_bspline(order, v); },
                       CompactSupport{radius}, central_bspline(order, 0.0),
                       std::move(knots));
}

// Mellin-Fejer profile

namespace {

double fejer_at_log(double v) {
  const double h = 0.5 * v;
  double s;
  if (std::abs(h) < 1e-3) {
    const double h2 = h * h;
    s = 1.0 - h2 / 3.0 + 2.0 * h2 * h2 / 45.0;
  } else {
    const double r = std::sin(h) / h;
    s = r * r;
  }
  return s / (2.0 * kPi);
}

// int_V^inf e^{iv} v^-2 dv by its asymptotic expansion; accurate for V >= 50.
std::complex<double> oscillatory_tail_asymptotic(double V) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> lead = i * std::exp(i * V);
  std::complex<double> sum = 0.0;
  std::complex<double> factor = 1.0;  // (-i)^j (n)_j
  double vpow = 1.0 / (V * V);
  double last = kInf;
  for (int j = 0; j < 60; ++j) {
    const std::complex<double> term = factor * vpow;
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
    factor *= -i * static_cast<double>(2 + j);
    vpow /= V;
  }
  return lead * sum;
}

double fejer_outer_mass(double V) {
  V = std::abs(V);
  if (V >= 50.0) {
    return (2.0 / kPi) * (1.0 / V - oscillatory_tail_asymptotic(V).real());
  }
  // Exact unit mass minus the core integral.
  std::vector<double> cuts;
  for (double c = -V + 2.0 * kPi; c < V; c += 2.0 * kPi) cuts.push_back(c);
  const double core = integrate_adaptive(fejer_at_log, -V, V, cuts, 1e-14).value;
  return std::max(0.0, 1.0 - core);
}

}  // namespace

KernelProfile make_mellin_fejer_profile() {
  std::vector<double> knots;
  // Zeros of the profile; the adaptive rule benefits from splitting there.
  for (int j = -32; j <= 32; ++j) knots.push_back(2.0 * kPi * j);
  return KernelProfile("mellin_fejer", fejer_at_log,
                       DecayingSupport{2.0, 2.0 / kPi, 0.0}, 1.0 / (2.0 * kPi),
                       std::move(knots), fejer_outer_mass);
}

KernelProfile make_log_indicator_profile() {
  return KernelProfile("log_indicator",
                       [](double v) { return (v >= 0.0 && v <= 1.0) ? 1.0 : 0.0; },
                       CompactSupport{1.0}, 1.0, {0.0, 1.0});
}

KernelProfile make_builtin_profile(std::string_view name, int order) {
  if (name == "bspline") return make_bspline_profile(order);
  if (name == "mellin_fejer") return make_mellin_fejer_profile();
  if (name == "log_indicator") return make_log_indicator_profile();
  throw ValidationError("unknown kernel profile '" + std::string(name) + "'");
}

// Slopes and responses

SlopeFunction power_slope(double scale, double exponent) {
  if (!finite_positive(scale) || !(exponent > 0.0 && exponent <= 1.0))
    throw ValidationError("power slope needs scale > 0 and exponent in (0, 1]");
  std::ostringstream os;
  os << scale << "*u^" << exponent;
  SlopeFunction s;
  s.name = os.str();
  s.evaluate = [scale, exponent](double u) {
    if (u <= 0.0) return 0.0;
    return exponent == 1.0 ? scale * u : scale * std::pow(u, exponent);
  };
  s.concave = true;
  s.growth_exponent = exponent;
  s.scale = scale;
  return s;
}

ResponseFamily make_identity_response() {
  ResponseFamily r;
  r.name = "identity";
  r.evaluate = [](double, double u) { return u; };
  r.deviation_rate = kInf;
  r.lipschitz_slope = power_slope(1.0, 1.0);
  return r;
}

ResponseFamily make_soft_response(double alpha) {
  if (!finite_positive(alpha)) throw ValidationError("soft response needs alpha > 0");
  ResponseFamily r;
  std::ostringstream os;
  os << "soft(" << alpha << ")";
  r.name = os.str();
  r.evaluate = [alpha](double w, double u) {
    return u + std::pow(w, -alpha) * std::tanh(u);
  };
  r.deviation_rate = alpha;
  r.lipschitz_slope = power_slope(2.0, 1.0);
  r.valid_from_w = 1.0;
  return r;
}

ResponseFamily make_soft_power_response(double alpha, double rr) {
  if (!finite_positive(alpha)) throw ValidationError("soft_power response needs alpha > 0");
  if (!(rr > 0.0 && rr <= 1.0))
    throw ValidationError("soft_power response needs r in (0, 1]");
  ResponseFamily r;
  std::ostringstream os;
  os << "soft_power(" << alpha << "," << rr << ")";
  r.name = os.str();
  r.evaluate = [alpha, rr](double w, double u) {
    const double a = std::abs(u);
    const double bump = std::min(std::pow(a, rr), 1.0);
    return u + std::pow(w, -alpha) * std::copysign(bump, u) * (u == 0.0 ? 0.0 : 1.0);
  };
  r.deviation_rate = alpha;
  r.lipschitz_slope = power_slope(2.0, rr);
  // 2^{1-r} (1 + w^-alpha) <= 2 once w^-alpha <= 2^r - 1.
  const double need = std::pow(2.0, rr) - 1.0;
  r.valid_from_w = rr == 1.0 ? 1.0 : std::pow(need, -1.0 / alpha);
  r.valid_span = 2.0;
  return r;
}

ResponseFamily make_response(std::string_view name, double alpha, double r) {
  if (name == "identity") return make_identity_response();
  if (name == "soft") return make_soft_response(alpha);
  if (name == "soft_power") return make_soft_power_response(alpha, r);
  throw ValidationError("unknown response family '" + std::string(name) + "'");
}

// Signals

double Signal::operator()(double x) const {
  if (!(x > 0.0)) throw ValidationError("signal evaluated at x <= 0");
  return at_log(std::log(x));
}

// phi-functions

PhiFunction power_phi(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw ValidationError("power phi needs p >= 1");
  std::ostringstream os;
  os << "u^" << p;
  return {os.str(),
          [p](double u) {
            if (u <= 0.0) return 0.0;
            return p == 2.0 ? u * u : (p == 1.0 ? u : std::pow(u, p));
          },
          true};
}

PhiFunction power_log_phi(double p) {
  if (!finite_positive(p)) throw ValidationError("power_log phi needs p > 0");
  std::ostringstream os;
  os << "u^" << p << "(1+|ln u|)";
  return {os.str(),
          [p](double u) {
            if (u <= 0.0) return 0.0;
            return std::pow(u, p) * (1.0 + std::abs(std::log(u)));
          },
          false};
}

PhiFunction exponential_phi(bool allow) {
  if (!allow)
    throw ValidationError("exponential phi is disabled; pass allow_exponential");
  return {"exp(u)-1", [](double u) { return u <= 0.0 ? 0.0 : std::expm1(u); }, true};
}

PhiFunction make_phi(std::string_view name, double p, bool allow_exponential) {
  if (name == "power") return power_phi(p);
  if (name == "power_log") return power_log_phi(p);
  if (name == "exponential") return exponential_phi(allow_exponential);
  throw ValidationError("unknown phi-function '" + std::string(name) + "'");
}

PhiPair matched_power_pair(double p, const SlopeFunction& slope) {
  if (!slope.growth_exponent)
    throw ValidationError("matched pair needs a power-type slope");
  const double q = *slope.growth_exponent;
  const double s = slope.scale;
  PhiPair pair;
  pair.phi = power_phi(p);
  const double pq = p * q;
  std::ostringstream os;
  os << "u^" << pq;
  pair.eta = {os.str(),
              [pq](double u) { return u <= 0.0 ? 0.0 : std::pow(u, pq); },
              pq >= 1.0};
  pair.c_lambda = [q, s](double lambda) { return std::pow(lambda, q) / s; };
  return pair;
}

}  // namespace expkant
