#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "expkant/error.hpp"
#include "expkant/experiments.hpp"
#include "expkant/moments.hpp"
#include "expkant/signals.hpp"

namespace expkant {

namespace {

std::string format(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Sampled L >= 0, bounded by its declared sup, finite log-L1 norm.
ConditionStatus check_L1(const KernelProfile& profile, double& sampled_sup) {
  const double R = profile.is_compact() ? profile.compact_radius() + 1.0 : 64.0;
  const int n = 20001;
  double lo = kInf, hi = 0.0;
  bool finite = true;
  for (int i = 0; i < n; ++i) {
    const double v = -R + 2.0 * R * i / (n - 1);
    const double y = profile.at_log(v);
    if (!std::isfinite(y)) finite = false;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  sampled_sup = hi;
  const double l1 = profile.l1_log_norm();
  ConditionStatus s;
  s.passed = finite && lo >= 0.0 && hi <= profile.sup_bound() * (1.0 + 1e-12) &&
             std::isfinite(l1) && l1 > 0.0;
  s.detail = "min " + format(lo) + ", max " + format(hi) + ", declared sup " +
             format(profile.sup_bound()) + ", log-L1 norm " + format(l1);
  return s;
}

// |g_w(u) - g_w(v)| <= psi(|u - v|) on random pairs, plus psi(0) = 0,
// monotonicity and (when declared) concavity of psi on a grid.
ConditionStatus check_chi3(const NonlinearKernel& kernel, std::span<const double> w_list,
                           std::uint64_t seed, double& worst_ratio) {
  const auto& g = kernel.response;
  const auto& psi = kernel.slope();
  ConditionStatus s;
  worst_ratio = 0.0;
  std::ostringstream detail;

  bool psi_ok = psi(0.0) == 0.0;
  double prev = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double a = 1e-6 * std::pow(1e8, i / 400.0);
    const double pa = psi(a);
    if (!(pa >= prev) || !std::isfinite(pa)) psi_ok = false;
    prev = pa;
    if (psi.concave) {
      const double b = 1.5 * a;
      const double mid = psi(0.5 * (a + b));
      if (mid < 0.5 * (pa + psi(b)) * (1.0 - 1e-12)) psi_ok = false;
    }
  }
  if (!psi_ok) detail << "psi is not a nondecreasing " << (psi.concave ? "concave " : "")
                      << "function vanishing at 0; ";

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = std::min(g.valid_span, 10.0);
  int checked_w = 0;
  bool ok = psi_ok;
  for (double w : w_list) {
    if (w < g.valid_from_w) continue;
    ++checked_w;
    for (int i = 0; i < 4000; ++i) {
      const double mag = std::pow(10.0, -6.0 + 7.5 * unit(rng));
      const double u = (unit(rng) < 0.5 ? -mag : mag) * (i % 4 == 0 ? 0.0 : 1.0);
      double h = span * std::pow(10.0, -8.0 * unit(rng));
      if (unit(rng) < 0.5) h = -h;
      const double v = u + h;
      const double lhs = std::abs(g(w, u) - g(w, v));
      const double d = std::abs(u - v);
      const double rhs = psi(d);
      const double slack = 1e-12 * rhs + 8.0 * 2.2e-16 * std::max({std::abs(u), std::abs(v), 1e-300});
      if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
      if (lhs > rhs + slack) ok = false;
    }
  }
  if (checked_w == 0) {
    ok = false;
    detail << "no w in the list is in the declared validity range w >= " << g.valid_from_w << "; ";
  }
  detail << "max |g(u)-g(v)|/psi(|u-v|) = " << worst_ratio << " over " << checked_w << " w values";
  s.passed = ok;
  s.detail = detail.str();
  return s;
}

}  // namespace

bool AuditReport::passed(const std::string& condition) const {
  auto it = status.find(condition);
  return it != status.end() && it->second.passed;
}

std::optional<std::string> AuditReport::first_failure(
    const std::vector<std::string>& required) const {
  for (const auto& c : required)
    if (!passed(c)) return c;
  return std::nullopt;
}

AuditReport audit_kernel(const NonlinearKernel& kernel, const SamplingScheme& scheme,
                         const AuditOptions& options) {
  AuditReport a;
  const auto& profile = kernel.profile;
  const double beta = options.beta.value_or(profile.is_compact() ? 1.0 : 0.5);
  const double r = std::min(1.0, options.r.value_or(std::max(beta, 1e-3)));

  double sampled_sup = 0.0;
  a.status["L1"] = check_L1(profile, sampled_sup);

  const MomentReport m0 = discrete_moment(profile, scheme, 0.0);
  {
    ConditionStatus s;
    s.passed = a.status["L1"].passed && !m0.diverged && std::isfinite(m0.upper);
    s.detail = "sum_k |chi| = |g_w(u)| m0 with M0 <= " + format(m0.upper);
    a.status["chi1"] = s;
  }
  {
    ConditionStatus s;
    s.passed = true;
    for (double w : options.w_list)
      if (kernel.response(w, 0.0) != 0.0) s.passed = false;
    s.detail = s.passed ? "g_w(0) = 0 for every w" : "g_w(0) != 0";
    a.status["chi2"] = s;
  }
  double ratio = 0.0;
  a.status["chi3"] = check_chi3(kernel, options.w_list, options.seed, ratio);

  const Chi4Reports c4 = check_chi4(kernel, scheme, options.j, options.w_list);
  a.chi4_S = c4.S;
  a.chi4_T = c4.T;
  a.status["chi4"] = {c4.S.passed && c4.T.passed, "S: " + c4.S.detail + "; T: " + c4.T.detail};
  a.chi4_star = check_chi4_star(kernel, scheme, options.w_list);
  a.status["chi4_star"] = {a.chi4_star.passed, a.chi4_star.detail};

  a.L2 = discrete_moment(profile, scheme, beta);
  a.status["L2"] = {!a.L2.diverged && std::isfinite(a.L2.upper),
                    "M_" + format(beta) + " " +
                        (a.L2.diverged ? std::string("diverged") : "<= " + format(a.L2.upper))};

  a.L3 = check_L3(profile, scheme, r, options.gamma, options.w_list);
  a.status["L3"] = {a.L3.passed, a.L3.detail};
  a.e3_1 = check_e3_1(profile, options.gamma, options.w_list);
  a.status["e3_1"] = {a.e3_1.passed, a.e3_1.detail};

  Json st = Json::object();
  for (const auto& [name, s] : a.status) st[name] = {{"passed", s.passed}, {"detail", s.detail}};
  a.json = {{"kernel", profile.name() + " + " + kernel.response.name},
            {"scheme", scheme.describe()},
            {"w_values", json_numbers(options.w_list)},
            {"status", st},
            {"M0", to_json(m0)},
            {"L2", to_json(a.L2)},
            {"chi4_S", to_json(a.chi4_S)},
            {"chi4_T", to_json(a.chi4_T)},
            {"chi4_star", to_json(a.chi4_star)},
            {"L3", to_json(a.L3)},
            {"e3_1", to_json(a.e3_1)},
            {"chi3_worst_ratio", json_number(ratio)},
            {"profile_sampled_sup", json_number(sampled_sup)}};
  return a;
}

std::vector<std::pair<Signal, Signal>> random_mollified_pairs(std::uint64_t seed, int count) {
  if (count < 1) throw ValidationError("need at least one random pair");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    const double a = -2.0 + 2.0 * unit(rng);
    const double b = a + 0.5 + 1.5 * unit(rng);
    const double eps = (0.05 + 0.4 * unit(rng)) * (b - a);
    const double height = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * unit(rng));
    return mollified_indicator_signal(a, b, eps, height);
  };
  std::vector<std::pair<Signal, Signal>> out;
  for (int i = 0; i < count; ++i) {
    Signal f = draw();
    Signal g = draw();
    out.emplace_back(std::move(f), std::move(g));
  }
  return out;
}

}  // namespace expkant
