#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "expkant/core_model.hpp"
#include "expkant/error.hpp"
#include "oracles.hpp"

using namespace expkant;

TEST_SUITE("core_model") {

TEST_CASE("bspline values against the truncated-power formula") {
  CHECK(central_bspline(2, 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  const KernelProfile b2 = make_bspline_profile(2);
  CHECK(b2(1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(b2(std::exp(1.5)) == 0.0);
  CHECK(b2(std::exp(-1.6)) == 0.0);
  for (int n = 1; n <= 5; ++n) {
    for (int i = -400; i <= 400; ++i) {
      const double v = i * 0.01 * (n + 1) / 2.0 + 1e-3;
      CHECK(central_bspline(n, v) == doctest::Approx(oracle::bspline(n, v)).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("bspline partition of unity and compact radius") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int n : {2, 3, 4}) {
    const KernelProfile p = make_bspline_profile(n);
    CHECK(p.is_compact());
    CHECK(p.compact_radius() == doctest::Approx((n + 1) / 2.0));
    CHECK(p.l1_log_norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 50; ++i) {
      const double y = U(rng);
      double s = 0.0;
      for (int k = -20; k <= 20; ++k) s += oracle::bspline(n, y - std::floor(y) - k);
      double lib = 0.0;
      for (int k = -20; k <= 20; ++k) lib += p.at_log(y - std::floor(y) - k);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(lib == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("mellin fejer profile") {
  const KernelProfile f = make_mellin_fejer_profile();
  CHECK_FALSE(f.is_compact());
  CHECK(f(1.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
  for (double v : {-30.0, -2.5, -0.1, 0.3, 1.0, 7.0, 100.0})
    CHECK(f.at_log(v) == doctest::Approx(oracle::fejer(v)).epsilon(1e-12));
  // The profile is band-limited, so the midpoint sum with step 1/2 is exact on
  // the whole line; only the truncation at V contributes, ~ 2 / (pi V).
  const double V = 65536.0;
  const double mid = oracle::midpoint(oracle::fejer, -V, V, static_cast<long>(4 * V));
  const double l1 = mid + 2.0 / (std::numbers::pi * V);
  CHECK(l1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f.l1_log_norm() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("log indicator profile") {
  const KernelProfile t = make_log_indicator_profile();
  CHECK(t.at_log(0.5) == 1.0);
  CHECK(t.at_log(1.5) == 0.0);
  CHECK(t.at_log(-0.5) == 0.0);
  CHECK(t.l1_log_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("builtin profile lookup") {
  CHECK(make_builtin_profile("bspline", 3).compact_radius() == doctest::Approx(2.0));
  CHECK_THROWS_AS(make_builtin_profile("gaussian"), ValidationError);
  CHECK_THROWS_AS(make_builtin_profile("bspline", 0), ValidationError);
}

TEST_CASE("uniform scheme") {
  const SamplingScheme s = SamplingScheme::uniform(0.5, 0.25);
  CHECK(s.node(0) == 0.25);
  CHECK(s.node(-3) == doctest::Approx(-1.25));
  CHECK(s.lower_gap() == 0.5);
  CHECK(s.upper_gap() == 0.5);
  for (double v : {-3.3, -0.25, 0.0, 0.25, 1.1, 7.75}) {
    const Index a = s.first_index_at_or_above(v);
    CHECK(s.node(a) >= v);
    CHECK(s.node(a - 1) < v);
    const Index b = s.last_index_at_or_below(v);
    CHECK(s.node(b) <= v);
    CHECK(s.node(b + 1) > v);
  }
  CHECK_THROWS_AS(SamplingScheme::uniform(0.0), ValidationError);
  CHECK_THROWS_AS(SamplingScheme::uniform(-1.0), ValidationError);
}

TEST_CASE("tabulated scheme extends periodically") {
  const SamplingScheme s = SamplingScheme::tabulated({0.0, 0.3, 1.0, 1.5, 2.0});
  CHECK(s.lower_gap() == doctest::Approx(0.3));
  CHECK(s.upper_gap() == doctest::Approx(0.7));
  CHECK(s.period() == doctest::Approx(2.0));
  CHECK(s.nodes_per_period() == 4);
  for (Index k = -50; k < 50; ++k) {
    CHECK(s.gap(k) >= s.lower_gap() - 1e-12);
    CHECK(s.gap(k) <= s.upper_gap() + 1e-12);
    CHECK(s.node(k + 4) == doctest::Approx(s.node(k) + 2.0));
  }
  for (double v : {-5.1, -2.0, 0.0, 0.29, 0.31, 3.7}) {
    const Index a = s.first_index_at_or_above(v);
    CHECK(s.node(a) >= v - 1e-12);
    CHECK(s.node(a - 1) < v);
  }
  CHECK_THROWS_AS(SamplingScheme::tabulated({0.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(SamplingScheme::tabulated({0.0}), ValidationError);
}

TEST_CASE("identity and soft responses") {
  const ResponseFamily id = make_identity_response();
  CHECK(id(10.0, 0.3) == 0.3);
  CHECK(id(1.0, 0.0) == 0.0);
  const ResponseFamily soft = make_soft_response(1.0);
  CHECK(soft(7.0, 0.0) == 0.0);
  REQUIRE(soft.deviation_rate);
  CHECK(*soft.deviation_rate == 1.0);
  for (double w : {1.0, 4.0, 64.0}) {
    double dev = 0.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double u = i * 0.005;
      dev = std::max(dev, std::abs(soft(w, u) - u));
    }
    CHECK(dev <= 1.0 / w + 1e-15);
  }
  CHECK_THROWS_AS(make_response("cubic"), ValidationError);
  CHECK_THROWS_AS(make_soft_response(0.0), ValidationError);
}

TEST_CASE("declared slopes dominate on random pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (const ResponseFamily& g : {make_soft_response(1.0), make_soft_power_response(1.0, 0.5)}) {
    for (double w : {std::max(1.0, g.valid_from_w), 16.0, 256.0}) {
      for (int i = 0; i < 2000; ++i) {
        const double u = U(rng);
        const double v = u + std::min(g.valid_span, 2.0) * (U(rng) / 3.0);
        const double lhs = std::abs(g(w, u) - g(w, v));
        const double rhs = g.lipschitz_slope(std::abs(u - v));
        CHECK(lhs <= rhs * (1 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST_CASE("power slope") {
  const SlopeFunction s = power_slope(2.0, 0.5);
  CHECK(s(0.0) == 0.0);
  CHECK(s(4.0) == doctest::Approx(4.0));
  REQUIRE(s.growth_exponent);
  CHECK(*s.growth_exponent == 0.5);
  CHECK_THROWS_AS(power_slope(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(power_slope(1.0, 1.5), ValidationError);
}

TEST_CASE("phi functions") {
  const PhiFunction p2 = power_phi(2.0);
  CHECK(p2(3.0) == 9.0);
  CHECK(p2(0.0) == 0.0);
  CHECK(p2.convex);
  CHECK_FALSE(power_log_phi(2.0).convex);
  CHECK_THROWS_AS(power_phi(0.5), ValidationError);
  CHECK_THROWS_AS(make_phi("exponential", 1.0), ValidationError);
  CHECK(make_phi("exponential", 1.0, true)(1.0) == doctest::Approx(std::numbers::e - 1.0));
}

TEST_CASE("matched power pair satisfies the H identity") {
  for (const SlopeFunction& s : {power_slope(1.0, 1.0), power_slope(2.0, 0.5)}) {
    const PhiPair pair = matched_power_pair(2.0, s);
    for (double lam : {0.05, 0.3, 0.9})
      for (double u : {1e-3, 0.5, 3.0, 40.0}) {
        const double lhs = pair.phi(pair.c_lambda(lam) * s(u));
        CHECK(lhs == doctest::Approx(pair.eta(lam * u)).epsilon(1e-12));
      }
  }
}

TEST_CASE("nonlinear kernel factorises") {
  const NonlinearKernel k{make_bspline_profile(2), make_soft_response(1.0)};
  CHECK(k.at_log(0.2, 4.0, 0.7) ==
        doctest::Approx(oracle::bspline(2, 0.2) * (0.7 + 0.25 * std::tanh(0.7))));
  CHECK(k(std::exp(0.2), 4.0, 0.0) == 0.0);
}

}  // TEST_SUITE
