#include "expkant/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "expkant/error.hpp"
#include "expkant/moments.hpp"
#include "expkant/parallel.hpp"

namespace expkant {

TruncationPolicy TruncationPolicy::window(double gamma, double beta) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ValidationError("window truncation needs a finite gamma > 0");
  TruncationPolicy p;
  p.mode = Mode::window;
  p.gamma = gamma;
  p.beta = beta;
  return p;
}

TruncationPolicy TruncationPolicy::tolerance(double epsilon, double beta) {
  if (!(epsilon > 0.0)) throw ValidationError("tolerance truncation needs epsilon > 0");
  TruncationPolicy p;
  p.mode = Mode::tolerance;
  p.epsilon = epsilon;
  p.beta = beta;
  return p;
}

double mean_value(const Signal& f, Index k, double w, const SamplingScheme& scheme,
                  const QuadratureSpec& quad) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("mean value needs w > 0");
  const double tk = scheme.node(k);
  const double tk1 = scheme.node(k + 1);
  double a = tk / w;
  double b = tk1 / w;
  const double scale = w / (tk1 - tk);
  if (f.support) {
    if (b <= f.support->lo || a >= f.support->hi) return 0.0;
  }
  double integral;
  if (quad.use_antiderivative && f.log_antiderivative) {
    integral = f.log_antiderivative(b) - f.log_antiderivative(a);
  } else {
    if (f.support) {
      a = std::max(a, f.support->lo);
      b = std::min(b, f.support->hi);
    }
    // Split the cell at the signal's non-smooth points.
    auto lo = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), a);
    auto hi = std::lower_bound(f.breakpoints.begin(), f.breakpoints.end(), b);
    integral = 0.0;
    double left = a;
    for (auto it = lo; it != hi; ++it) {
      integral += integrate_doubling(f.at_log, left, *it, quad).value;
      left = *it;
    }
    integral += integrate_doubling(f.at_log, left, b, quad).value;
  }
  const double m = integral * scale;
  if (!std::isfinite(m))
    throw EvaluationError("non-finite signal values in the cell of k = " + std::to_string(k));
  return m;
}

struct KantorovichOperator::Cache {
  std::mutex mutex;
  std::map<double, double> moments;
};

KantorovichOperator::KantorovichOperator(NonlinearKernel kernel, SamplingScheme scheme,
                                         TruncationPolicy truncation,
                                         QuadratureSpec quadrature)
    : kernel_(std::move(kernel)),
      scheme_(std::move(scheme)),
      truncation_(truncation),
      quadrature_(quadrature),
      cache_(std::make_shared<Cache>()) {
  if (truncation_.max_terms < 1) throw ValidationError("max_terms must be >= 1");
  if (truncation_.mode == TruncationPolicy::Mode::window && !(truncation_.gamma > 0.0))
    throw ValidationError("window truncation needs gamma > 0");
}

double KantorovichOperator::moment_bound(double beta) const {
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->moments.find(beta);
    if (it != cache_->moments.end()) return it->second;
  }
  const MomentReport rep = discrete_moment(kernel_.profile, scheme_, beta);
  const double value = rep.diverged ? kInf : rep.upper;
  std::lock_guard lock(cache_->mutex);
  cache_->moments[beta] = value;
  return value;
}

double KantorovichOperator::tail_order() const {
  if (truncation_.beta > 0.0) return truncation_.beta;
  if (const auto* d = kernel_.profile.decay()) return std::min(1.0, 0.5 * (d->power - 1.0));
  return 1.0;
}

KantorovichOperator::Window KantorovichOperator::window_for(const Signal& f, double w,
                                                            double y, bool sampled) const {
  const bool bounded = f.sup_norm.has_value();
  if (!bounded) {
    if (!f.log_growth)
      throw ValidationError("signal '" + f.name +
                            "' is unbounded and declares no log-growth bound");
    const auto& q = kernel_.slope().growth_exponent;
    if (!q || *q != 1.0)
      throw ValidationError("log-growth signals need an identity-type slope psi(u) = s u");
  }
  const double R = kernel_.profile.compact_radius();  // kInf when decaying
  const double beta = tail_order();
  const double psi2 = bounded ? kernel_.slope()(2.0 * *f.sup_norm) : kInf;
  const double cap_half = 0.5 * static_cast<double>(truncation_.max_terms) * scheme_.lower_gap();

  double gw = kInf;  // truncation half-width in the phase variable
  switch (truncation_.mode) {
    case TruncationPolicy::Mode::automatic:
      if (!kernel_.profile.is_compact()) {
        gw = bounded ? std::pow(psi2 * moment_bound(beta) / 1e-10, 1.0 / beta) : cap_half;
      }
      break;
    case TruncationPolicy::Mode::window:
      gw = truncation_.gamma * w;
      break;
    case TruncationPolicy::Mode::tolerance:
      gw = bounded ? std::pow(psi2 * moment_bound(beta) / truncation_.epsilon, 1.0 / beta)
                   : cap_half;
      break;
  }
  if (std::isnan(gw)) gw = cap_half;
  gw = std::min(gw, cap_half);

  const double H = std::min(R, gw);
  Window win;
  win.k0 = scheme_.first_index_at_or_above(y - H);
  win.k1 = scheme_.last_index_at_or_below(y + H);
  if (win.k1 < win.k0)
    throw EvaluationError("empty retained index set (truncation window too narrow)");
  const Index tk0 = win.k0;
  const Index tk1 = win.k1;

  if (f.support) {
    Index s0, s1;
    if (sampled) {
      s0 = scheme_.first_index_at_or_above(w * f.support->lo);
      s1 = scheme_.last_index_at_or_below(w * f.support->hi);
    } else {
      s0 = scheme_.last_index_at_or_below(w * f.support->lo);
      s1 = scheme_.first_index_at_or_above(w * f.support->hi) - 1;
    }
    win.k0 = std::max(win.k0, s0);
    win.k1 = std::min(win.k1, s1);
    // Every cell on which f lives is inside the truncation window.
    if (s0 >= tk0 && s1 <= tk1) return win;
  }
  if (gw >= R) return win;  // whole kernel support retained

  if (bounded) {
    win.bound = psi2 * moment_bound(beta) / std::pow(gw, beta);
  } else {
    // |mean_k| <= A + (b / w) |t_k - y| with A = a + b (|y| + Delta) / w.
    const auto& g = *f.log_growth;
    const double A = g.a + g.b * (std::abs(y) + scheme_.upper_gap()) / w;
    const PhaseSum t0 = phase_sum(kernel_.profile, scheme_, 0.0, y, gw, 2.0 * gw);
    const PhaseSum t1 = phase_sum(kernel_.profile, scheme_, 1.0, y, gw, 2.0 * gw);
    if (t1.diverged)
      throw PreconditionError("L2(1)", "log-growth signals need a finite first moment");
    win.bound = kernel_.slope().scale * (A * t0.upper() + (g.b / w) * t1.upper());
  }
  return win;
}

EvalResult KantorovichOperator::evaluate(const Signal& f, double w, double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("operator needs x > 0");
  return evaluate_log(f, w, std::log(x));
}

EvalResult KantorovichOperator::evaluate_log(const Signal& f, double w, double v) const {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("operator needs w > 0");
  if (!std::isfinite(v)) throw ValidationError("operator needs finite ln x");
  EvalResult out;
  if (f.sup_norm && *f.sup_norm == 0.0) return out;
  const double y = w * v;
  const Window win = window_for(f, w, y, false);
  out.truncation_bound = win.bound;
  double sum = 0.0;
  for (Index k = win.k0; k <= win.k1; ++k) {
    const double l = kernel_.profile.at_log(y - scheme_.node(k));
    if (l == 0.0) continue;
    sum += l * kernel_.response(w, mean_value(f, k, w, scheme_, quadrature_));
    ++out.terms;
  }
  out.value = sum;
  return out;
}

std::vector<EvalResult> KantorovichOperator::evaluate_many_log(const Signal& f, double w,
                                                               std::span<const double> vs) const {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("operator needs w > 0");
  std::vector<EvalResult> out(vs.size());
  if (vs.empty()) return out;
  if (f.sup_norm && *f.sup_norm == 0.0) return out;
  std::vector<Window> wins(vs.size());
  Index kmin = 0, kmax = -1;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!std::isfinite(vs[i])) throw ValidationError("operator needs finite ln x");
    wins[i] = window_for(f, w, w * vs[i], false);
    if (wins[i].k1 < wins[i].k0) continue;
    if (kmax < kmin) {
      kmin = wins[i].k0;
      kmax = wins[i].k1;
    } else {
      kmin = std::min(kmin, wins[i].k0);
      kmax = std::max(kmax, wins[i].k1);
    }
  }
  std::vector<double> means;
  if (kmax >= kmin) {
    means.resize(static_cast<std::size_t>(kmax - kmin + 1));
    parallel_for(means.size(), [&](std::size_t i) {
      means[i] = kernel_.response(w, mean_value(f, kmin + static_cast<Index>(i), w, scheme_,
                                                quadrature_));
    });
  }
  parallel_for(vs.size(), [&](std::size_t i) {
    const double y = w * vs[i];
    double sum = 0.0;
    Index terms = 0;
    for (Index k = wins[i].k0; k <= wins[i].k1; ++k) {
      const double l = kernel_.profile.at_log(y - scheme_.node(k));
      if (l == 0.0) continue;
      sum += l * means[static_cast<std::size_t>(k - kmin)];
      ++terms;
    }
    out[i] = {sum, wins[i].bound, terms};
  });
  return out;
}

EvalResult KantorovichOperator::evaluate_generalized(const Signal& f, double w, double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("operator needs x > 0");
  return evaluate_generalized_log(f, w, std::log(x));
}

EvalResult KantorovichOperator::evaluate_generalized_log(const Signal& f, double w,
                                                         double v) const {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("operator needs w > 0");
  EvalResult out;
  if (f.sup_norm && *f.sup_norm == 0.0) return out;
  const double y = w * v;
  const Window win = window_for(f, w, y, true);
  out.truncation_bound = win.bound;
  double sum = 0.0;
  for (Index k = win.k0; k <= win.k1; ++k) {
    const double tk = scheme_.node(k);
    const double l = kernel_.profile.at_log(y - tk);
    if (l == 0.0) continue;
    const double sample = f.at_log(tk / w);
    if (!std::isfinite(sample))
      throw EvaluationError("non-finite sample at k = " + std::to_string(k));
    sum += l * kernel_.response(w, sample);
    ++out.terms;
  }
  out.value = sum;
  return out;
}

SupError KantorovichOperator::sup_error_log(const Signal& f, double w,
                                            std::span<const double> vs) const {
  if (vs.empty()) throw ValidationError("sup error needs a non-empty grid");
  const auto vals = evaluate_many_log(f, w, vs);
  SupError s;
  s.at = std::exp(vs[0]);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double e = std::abs(vals[i].value - f.at_log(vs[i]));
    if (e > s.value) {
      s.value = e;
      s.at = std::exp(vs[i]);
    }
    s.truncation_bound = std::max(s.truncation_bound, vals[i].truncation_bound);
  }
  return s;
}

SupError KantorovichOperator::sup_error(const Signal& f, double w,
                                        std::span<const double> xs) const {
  std::vector<double> vs;
  vs.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0)) throw ValidationError("sup error grid needs x > 0");
    vs.push_back(std::log(x));
  }
  SupError s = sup_error_log(f, w, vs);
  return s;
}

}  // namespace expkant
