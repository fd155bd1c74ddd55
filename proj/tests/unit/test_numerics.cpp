#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "expkant/error.hpp"
#include "expkant/parallel.hpp"
#include "expkant/quadrature.hpp"
#include "expkant/rate_fit.hpp"
#include "expkant/signals.hpp"
#include "oracles.hpp"

using namespace expkant;

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre exact on polynomials of degree 2m-1") {
  for (int m : {1, 2, 5, 8, 16}) {
    const auto& rule = gauss_legendre(m);
    CHECK(rule.nodes.size() == static_cast<std::size_t>(m));
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) ==
          doctest::Approx(2.0).epsilon(1e-14));
    const int d = 2 * m - 1;
    const double got = apply_rule([d](double x) { return std::pow(x, d) + std::pow(x, d - 1); },
                                  0.0, 1.0, QuadratureSpec::Rule::gauss_legendre, m);
    CHECK(got == doctest::Approx(1.0 / (d + 1) + (d > 0 ? 1.0 / d : 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("doubling and adaptive integration") {
  const auto e = integrate_doubling([](double u) { return std::exp(u); }, 0.0, 1.0, {});
  CHECK(e.converged);
  CHECK(e.value == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-13));
  QuadratureSpec mid;
  mid.rule = QuadratureSpec::Rule::midpoint;
  mid.max_nodes = 1 << 20;
  mid.tolerance = 1e-9;
  CHECK(integrate_doubling([](double u) { return std::exp(u); }, 0.0, 1.0, mid).value ==
        doctest::Approx(std::numbers::e - 1.0).epsilon(1e-8));
  const auto s = integrate_adaptive([](double u) { return std::sqrt(std::abs(u)); }, -1.0, 1.0,
                                    std::vector<double>{0.0});
  CHECK(s.value == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("pairwise sum") {
  std::vector<double> xs(1 << 16, 0.1);
  long double ref = 0.0L;
  for (double x : xs) ref += x;
  CHECK(pairwise_sum(xs) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-15));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

}  // TEST_SUITE

TEST_SUITE("signals") {

TEST_CASE("declared metadata is consistent") {
  const std::vector<Signal> sigs{constant_signal(2.5),       clipped_log_signal(6.0),
                                 power_clipped_signal(0.7),  sin_log_signal(6.0),
                                 holder_bump_signal(0.5),    mollified_indicator_signal(),
                                 indicator_signal(0.0, 1.0, 2.0)};
  for (const Signal& f : sigs) {
    CAPTURE(f.name);
    REQUIRE(f.sup_norm);
    for (int i = -2000; i <= 2000; ++i) {
      const double v = i * 0.006;
      CHECK(std::abs(f.at_log(v)) <= *f.sup_norm + 1e-14);
      if (f.support && !f.support->contains(v)) CHECK(f.at_log(v) == 0.0);
    }
    if (f.has_mellin_derivative()) {
      for (double v : {-2.3, -0.7, 0.2, 0.9, 3.3}) {
        const double h = 1e-5;
        const double fd = (f.at_log(v + h) - f.at_log(v - h)) / (2 * h);
        CHECK(f.mellin_derivative_log(v) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
    if (f.log_antiderivative) {
      for (double v : {-1.9, -0.4, 0.33, 0.8, 2.7}) {
        const double ref = oracle::midpoint_split(f.at_log, -1.0, v, f.breakpoints, 100000);
        const double lib = f.log_antiderivative(v) - f.log_antiderivative(-1.0);
        CHECK(lib == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
      }
    }
  }
}

TEST_CASE("builtin values") {
  CHECK(clipped_log_signal()(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(power_clipped_signal(2.0)(1.5) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(sin_log_signal()(std::numbers::e) == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
  CHECK(holder_bump_signal(0.5).at_log(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mollified_indicator_signal().at_log(0.5) == 1.0);
  CHECK(mollified_indicator_signal().at_log(-0.6) == 0.0);
  CHECK_FALSE(indicator_signal(0.0, 1.0).continuous());
  CHECK(log_identity_signal().at_log(-4.0) == -4.0);
  CHECK_FALSE(log_identity_signal().bounded());
}

TEST_CASE("dilate and difference") {
  const Signal f = sin_log_signal();
  const Signal g = dilate_signal(f, 0.3);
  CHECK(g.at_log(0.2) == f.at_log(0.5));
  const Signal d = difference_signal(f, g);
  CHECK(d.at_log(1.0) == doctest::Approx(f.at_log(1.0) - f.at_log(1.3)));
}

TEST_CASE("lookup validation") {
  CHECK(make_builtin_signal("constant", {{"c", 3.0}}).at_log(9.0) == 3.0);
  CHECK_THROWS_AS(make_builtin_signal("constant", {}), ValidationError);
  CHECK_THROWS_AS(make_builtin_signal("constant", {{"c", 1.0}, {"k", 2.0}}), ValidationError);
  CHECK_THROWS_AS(make_builtin_signal("gaussian", {}), ValidationError);
  CHECK_THROWS_AS(holder_bump_signal(1.5), ValidationError);
  CHECK(builtin_signal_parameters("mollified_indicator").size() == 4);
}

TEST_CASE("grid signal interpolates") {
  const Signal g = grid_signal({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
  CHECK(g.at_log(0.5) == doctest::Approx(1.0));
  CHECK(g.at_log(3.0) == 0.0);
}

}  // TEST_SUITE

TEST_SUITE("rate_fit") {

TEST_CASE("exact power law") {
  std::vector<double> ws, es;
  for (double w = 4; w <= 256; w *= 2) {
    ws.push_back(w);
    es.push_back(0.5 / w);
  }
  const RateFit f = fit_rate(ws, es);
  CHECK_FALSE(f.exact);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.points_used == 5);  // largest two thirds of 7, rounded up
  CHECK(f.intercept == doctest::Approx(std::log(0.5)).epsilon(1e-10));
}

TEST_CASE("noisy square-root law") {
  std::vector<double> ws, es;
  unsigned state = 12345;
  for (double w = 2; w <= 4096; w *= 2) {
    state = state * 1103515245u + 12345u;
    const double noise = ((state >> 8) % 2001) / 1000.0 - 1.0;
    ws.push_back(w);
    es.push_back(std::pow(w, -0.5) * (1 + 0.01 * noise));
  }
  const RateFit f = fit_rate(ws, es);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(std::abs(f.slope + 0.5) <= 0.05);
  CHECK(f.r_squared >= 0.0);
  CHECK(f.r_squared <= 1.0);
  CHECK(f.points_used >= 3);
}

TEST_CASE("exact marker and errors") {
  const std::vector<double> ws{1, 2, 3, 4};
  CHECK(fit_rate(ws, std::vector<double>{0, 0, 0, 0}).exact);
  CHECK(fit_rate(ws, std::vector<double>{1, 0.5, 1e-13, 1e-14}).exact);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ValidationError);
  CHECK_THROWS_AS(fit_rate(ws, std::vector<double>{1, 2, 3}), ValidationError);
}

}  // TEST_SUITE

TEST_SUITE("parallel") {

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  bool all_once = true;
  for (auto& h : hits) all_once = all_once && h.load() == 1;
  CHECK(all_once);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw EvaluationError("boom");
                  }),
                  EvaluationError);
  set_worker_count(1);
  CHECK(worker_count() == 1);
  set_worker_count(0);
}

}  // TEST_SUITE
