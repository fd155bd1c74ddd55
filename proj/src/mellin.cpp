#include "expkant/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expkant/error.hpp"
#include "expkant/parallel.hpp"

namespace expkant {

namespace {

// Central difference with one Richardson step.
double richardson(const std::function<double(double)>& F, double v, double h) {
  const double d1 = (F(v + h) - F(v - h)) / (2.0 * h);
  const double d2 = (F(v + 0.5 * h) - F(v - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

MellinDerivative mellin_derivative(const Signal& f, double x, double h) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("Mellin derivative needs x > 0");
  if (!(h > 0.0)) throw ValidationError("Mellin derivative needs h > 0");
  const double v = std::log(x);
  MellinDerivative out;
  if (f.mellin_derivative_log) {
    out.value = f.mellin_derivative_log(v);
    out.declared = true;
    return out;
  }
  const double a = richardson(f.at_log, v, h);
  const double b = richardson(f.at_log, v, 0.5 * h);
  out.value = b;
  out.discrepancy = std::abs(a - b);
  out.differentiable = std::isfinite(a) && std::isfinite(b) && out.discrepancy <= 1e-4;
  return out;
}

VoronovskajaReport voronovskaja_experiment(const Signal& f, double x, double r,
                                           const KantorovichOperator& op,
                                           std::span<const double> w_list) {
  if (!(r > 0.0 && r <= 1.0)) throw ValidationError("Voronovskaja order r must lie in (0, 1]");
  if (!(x > 0.0)) throw ValidationError("Voronovskaja point needs x > 0");
  if (w_list.size() < 3) throw ValidationError("Voronovskaja experiment needs >= 3 w values");
  const auto& kernel = op.kernel();
  const auto& q = kernel.slope().growth_exponent;
  if (!q || std::abs(*q - r) > 1e-12) {
    std::ostringstream os;
    os << "slope must be of the form s u^" << r;
    throw PreconditionError("chi3", os.str());
  }
  const double alpha = kernel.response.deviation_rate.value_or(0.0);
  if (!(r < alpha)) throw PreconditionError("chi4", "need r < alpha");
  if (w_list.front() < kernel.response.valid_from_w)
    throw PreconditionError("chi3", "declared slope is not valid at the smallest w");

  VoronovskajaReport rep;
  rep.x = x;
  rep.r = r;
  rep.moment_r = discrete_moment(kernel.profile, op.scheme(), r);
  if (rep.moment_r.diverged) throw PreconditionError("L2", "moment of order r diverges");
  rep.l3 = check_L3(kernel.profile, op.scheme(), r, 0.5, w_list);
  if (!rep.l3.passed) throw PreconditionError("L3", rep.l3.detail);
  const MellinDerivative theta = mellin_derivative(f, x);
  if (!theta.differentiable)
    throw PreconditionError("mellin_derivative", "f is not differentiable at x");

  rep.theta_f = theta.value;
  rep.m0 = op.moment_bound(0.0);
  rep.mr = rep.moment_r.upper;
  rep.upper_gap = op.scheme().upper_gap();
  rep.slope_scale = kernel.slope().scale;
  const double t = std::pow(std::abs(theta.value), r);
  rep.rhs_bound = rep.slope_scale *
                  (std::pow(rep.upper_gap, r) * t / std::pow(2.0, r) * rep.m0 + t * rep.mr);

  rep.w_values.assign(w_list.begin(), w_list.end());
  rep.lhs_values.assign(w_list.size(), 0.0);
  const double fx = f(x);
  parallel_for(w_list.size(), [&](std::size_t i) {
    const double w = w_list[i];
    rep.lhs_values[i] = std::pow(w, r) * std::abs(op.evaluate(f, w, x).value - fx);
  });
  const std::size_t tail = std::max<std::size_t>(1, (w_list.size() + 2) / 3);
  rep.tail_max = *std::max_element(rep.lhs_values.end() - tail, rep.lhs_values.end());
  rep.passed = rep.tail_max <= rep.rhs_bound * 1.05;
  return rep;
}

}  // namespace expkant
