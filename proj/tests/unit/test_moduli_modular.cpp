#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "expkant/error.hpp"
#include "expkant/experiments.hpp"
#include "expkant/modular.hpp"
#include "expkant/moduli.hpp"
#include "expkant/signals.hpp"
#include "oracles.hpp"

using namespace expkant;

namespace {

// min(sqrt|v|, 1) with a linear fade to zero on [4, 5].
Signal sqrt_type_signal() {
  Signal s;
  s.name = "sqrt_type";
  s.at_log = [](double v) {
    const double a = std::abs(v);
    const double fade = a <= 4.0 ? 1.0 : std::max(0.0, 5.0 - a);
    return std::min(std::sqrt(a), 1.0) * fade;
  };
  s.sup_norm = 1.0;
  s.support = LogInterval{-5.0, 5.0};
  s.breakpoints = {-5.0, -4.0, -1.0, 0.0, 1.0, 4.0, 5.0};
  return s;
}

}  // namespace

TEST_SUITE("moduli") {

TEST_CASE("log modulus of ln x is the identity") {
  for (double d : {0.01, 0.2, 1.0}) CHECK(log_modulus(log_identity_signal(), d) == doctest::Approx(d).epsilon(1e-12));
  CHECK(log_modulus(constant_signal(5.0), 0.3) == 0.0);
}

TEST_CASE("square-root type signal") {
  const Signal f = sqrt_type_signal();
  for (double d : {0.04, 0.01, 0.0025}) {
    const double lib = log_modulus(f, d);
    const double ref = oracle::modulus(f.at_log, d, -0.2, 0.2, 4001, 64);
    CHECK(lib == doctest::Approx(std::sqrt(d)).epsilon(1e-6));
    CHECK(lib >= ref - 1e-12);
  }
  const ModulusCurve c = modulus_curve(f, geometric_deltas(0.05, 8));
  REQUIRE(c.fitted_order);
  CHECK(*c.fitted_order == doctest::Approx(0.5).epsilon(0.1));
  for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] <= c.values[i - 1]);
}

TEST_CASE("estimates are lower bounds of the dense oracle") {
  const Signal f = holder_bump_signal(0.5);
  for (double d : {0.3, 0.05}) {
    const double ref = oracle::modulus(f.at_log, d, -1.5, 1.5, 6001, 32);
    const double lib = log_modulus(f, d);
    CHECK(lib <= std::pow(std::min(d, 1.0), 0.5) + 1e-12);
    CHECK(lib >= ref - 1e-9);
  }
}

TEST_CASE("holder fit and zero marker") {
  const HolderFit z = holder_fit(std::vector<double>{0.1, 0.05, 0.025}, std::vector<double>{0, 0, 0});
  CHECK(z.zero_modulus);
  const HolderFit h = holder_fit(std::vector<double>{0.1, 0.05, 0.025, 0.0125},
                                 std::vector<double>{0.2, 0.1, 0.05, 0.025});
  CHECK(h.order == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(geometric_deltas(1.0, 3) == std::vector<double>{1.0, 0.5, 0.25});
  CHECK_THROWS_AS(log_modulus(sin_log_signal(), -1.0), ValidationError);
}

TEST_CASE("subadditivity") {
  const SubadditivityResult r = subadditivity_check(log_identity_signal(), 0.2, 3.0);
  CHECK(r.lhs == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(r.rhs == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(r.passed);
  CHECK(subadditivity_check(constant_signal(1.0), 0.2, 2.0).passed);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> D(0.01, 0.5), L(0.1, 5.0);
  for (const Signal& f : {sin_log_signal(), holder_bump_signal(0.3), mollified_indicator_signal()})
    for (int i = 0; i < 7; ++i) CHECK(subadditivity_check(f, D(rng), L(rng)).passed);
}

}  // TEST_SUITE

TEST_SUITE("modular") {

TEST_CASE("closed-form modulars") {
  CHECK(modular(power_phi(3.0), indicator_signal(0.0, 1.0, 1.7), 1.0).value ==
        doctest::Approx(std::pow(1.7, 3.0)).epsilon(1e-10));
  CHECK(modular(power_phi(2.0), indicator_signal(0.0, 2.0), 3.0).value == doctest::Approx(18.0).epsilon(1e-10));
  CHECK(modular(power_phi(2.0), constant_signal(0.0), 1.0).value == 0.0);
  // A linear ramp: int_0^1 (lam v)^2 dv = lam^2 / 3.
  const Signal ramp = grid_signal({0.0, 1.0}, {0.0, 1.0});
  CHECK(modular(power_phi(2.0), ramp, 2.0).value == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("modular error of indicators") {
  const Signal f = indicator_signal(0.0, 1.0);
  CHECK(modular_error(power_phi(1.0), f, f, 1.0).value == 0.0);
  for (double h : {0.1, -0.25}) {
    const Signal g = dilate_signal(f, h);
    CHECK(modular_error(power_phi(1.0), f, g, 1.0).value == doctest::Approx(2 * std::abs(h)).epsilon(1e-8));
  }
}

TEST_CASE("monotone and continuous in lambda") {
  const Signal f = sin_log_signal();
  double prev = 0.0;
  for (double lam = 0.1; lam <= 2.0; lam += 0.1) {
    const double v = modular(power_phi(2.0), f, lam).value;
    CHECK(v >= prev);
    prev = v;
  }
  const double a = modular(power_phi(2.0), f, 1.0).value;
  const double b = modular(power_phi(2.0), f, 1.0 + 1e-7).value;
  CHECK(std::abs(a - b) < 1e-5);
}

TEST_CASE("convexity splitting") {
  // I[lam (f - g)] <= a I[(lam / a) f] + (1 - a) I[(lam / (1 - a)) g].
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> A(0.05, 0.95), L(0.1, 2.0);
  for (const auto& [f, g] : random_mollified_pairs(21, 8)) {
    const double a = A(rng), lam = L(rng);
    const double lhs = modular(power_phi(2.0), difference_signal(f, g), lam).value;
    const double rhs = a * modular(power_phi(2.0), f, lam / a).value +
                       (1 - a) * modular(power_phi(2.0), g, lam / (1 - a)).value;
    CHECK(lhs <= rhs * (1 + 1e-9) + 1e-14);
  }
}

TEST_CASE("modular dilation invariance") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> H(-3.0, 3.0), L(0.1, 3.0);
  const std::vector<Signal> sigs{sin_log_signal(), mollified_indicator_signal(), holder_bump_signal(0.5)};
  for (int i = 0; i < 20; ++i) {
    const Signal& f = sigs[i % sigs.size()];
    const double h = H(rng), lam = L(rng);
    const double a = modular(power_phi(2.0), f, lam).value;
    const double b = modular(power_phi(2.0), dilate_signal(f, h), lam).value;
    CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, a));
  }
}

TEST_CASE("condition H") {
  std::vector<double> lams, us;
  for (int i = 1; i < 100; ++i) lams.push_back(i / 100.0);
  for (int i = 0; i <= 200; ++i) us.push_back(std::pow(10.0, -4 + 8.0 * i / 200));
  for (const SlopeFunction& s : {power_slope(1.0, 1.0), power_slope(2.0, 0.5)})
    CHECK(check_H(matched_power_pair(2.0, s), s, lams, us).passed);
  const SlopeFunction twice = power_slope(2.0, 1.0);
  PhiPair bad{power_phi(2.0), power_phi(2.0), [](double) { return 1.0; }};
  const HReport r = check_H(bad, twice, lams, us);
  CHECK_FALSE(r.passed);
  CHECK(r.worst_margin < 0.0);
}

TEST_CASE("modular lipschitz estimate") {
  const KantorovichOperator op(NonlinearKernel{make_bspline_profile(2), make_identity_response()},
                               SamplingScheme::uniform());
  const PhiPair pair = matched_power_pair(2.0, op.kernel().slope());
  const Signal f = mollified_indicator_signal();
  const LipschitzModularReport same = modular_lipschitz_check(op, pair, f, f, 8.0, 0.5);
  CHECK(same.lhs == 0.0);
  CHECK(same.passed);
  const LipschitzModularReport r = modular_lipschitz_check(op, pair, f, constant_signal(0.0), 8.0, 0.5);
  CHECK(r.passed);
  CHECK(r.lhs <= r.rhs);
  CHECK(r.c == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("log smoothness") {
  const Signal ind = indicator_signal(0.0, 1.0);
  for (double d : {0.05, 0.2})
    CHECK(log_smoothness(power_phi(1.0), ind, 1.0, d).value == doctest::Approx(2 * d).epsilon(1e-6));
  CHECK(log_smoothness(power_phi(2.0), constant_signal(0.0), 1.0, 0.3).value == 0.0);
  const Signal bump = sin_log_signal(1.0);
  const double big = log_smoothness(power_phi(2.0), bump, 1.0, 0.02).value;
  const double small = log_smoothness(power_phi(2.0), bump, 1.0, 0.01).value;
  CHECK(big / small == doctest::Approx(4.0).epsilon(0.08));
  const SmoothnessCurve c = smoothness_curve(power_phi(1.0), ind, 1.0, geometric_deltas(0.2, 5));
  CHECK(lip_class_fit(c).order == doctest::Approx(1.0).epsilon(1e-3));
  const SmoothnessCurve z = smoothness_curve(power_phi(1.0), constant_signal(0.0), 1.0, geometric_deltas(0.2, 5));
  CHECK(lip_class_fit(z).zero_modulus);
}

TEST_CASE("operator modular error decreases") {
  const KantorovichOperator op(NonlinearKernel{make_bspline_profile(2), make_identity_response()},
                               SamplingScheme::uniform());
  const Signal f = mollified_indicator_signal();
  const std::vector<double> lam{1.0};
  double prev = kInf;
  for (double w : {4.0, 16.0, 64.0}) {
    const OperatorModularError e = operator_modular_error(power_phi(2.0), op, f, w, lam, 2048);
    CHECK(e.values[0] < prev);
    CHECK(e.quadrature_errors[0] < 0.05 * e.values[0] + 1e-12);
    prev = e.values[0];
  }
}

}  // TEST_SUITE
