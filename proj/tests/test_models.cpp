#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bro/estimators.hpp"
#include "bro/models.hpp"
#include "bro/posterior.hpp"
#include "bro/stats.hpp"

using namespace bro;

namespace {
Eigen::VectorXd point(double x) { return Eigen::VectorXd::Constant(1, x); }
Eigen::VectorXd theta2(double a, double b) { return (Eigen::VectorXd(2) << a, b).finished(); }
}  // namespace

TEST_CASE("quadratic simulate obeys the response and gradient formulas") {
  const QuadraticModel model;
  const Eigen::VectorXd theta = theta2(-15.0, 10.0);
  const RngStream stream(42);

  // at x = 0 the value vanishes and the gradient is theta1 + xi
  const InnerObservation at0 = model.simulate(point(0.0), theta, stream);
  CHECK(at0.value == 0.0);

  // recover xi from the gradient and check the value identity at x = 1
  const InnerObservation at1 = model.simulate(point(1.0), theta, stream);
  const double xi = at1.gradient[0] - (-15.0 + 2.0 * 1.0 * 10.0);
  CHECK(at1.value == doctest::Approx(-15.0 + 10.0 + xi).epsilon(1e-12));

  // same stream, same xi at both decisions
  CHECK(at0.gradient[0] - (-15.0) == doctest::Approx(xi).epsilon(1e-12));
}

TEST_CASE("quadratic simulate is deterministic in (x, theta, stream)") {
  const QuadraticModel model;
  const RngStream stream(7);
  const InnerObservation a = model.simulate(point(0.3), theta2(-15.0, 10.0), stream);
  const InnerObservation b = model.simulate(point(0.3), theta2(-15.0, 10.0), stream);
  CHECK(a.value == b.value);
  CHECK(a.gradient[0] == b.gradient[0]);
}

TEST_CASE("quadratic noise statistics follow theta1^2 / divisor") {
  const QuadraticModel model(25.0);  // std = |theta1| / 5
  const Eigen::VectorXd theta = theta2(-10.0, 3.0);
  RunningStats xi_stats;
  const RngStream root(11);
  for (int i = 0; i < 100000; ++i) {
    const InnerObservation obs = model.simulate(point(1.0), theta, root.child(i));
    xi_stats.add(obs.gradient[0] - (-10.0 + 6.0));
  }
  CHECK(std::abs(xi_stats.mean()) <= 4.0 * xi_stats.std_error());
  CHECK(xi_stats.stddev() == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("quadratic responses are Lipschitz with the pathwise constant") {
  const QuadraticModel model;
  const RngStream root(13);
  SplitMix64 eng = RngStream(99).engine();
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd theta = theta2(-15.0 + 5.0 * standard_normal(eng), 10.0 + standard_normal(eng));
    const double x1 = uniform(eng, -5.0, 5.0);
    const double x2 = uniform(eng, -5.0, 5.0);
    const RngStream stream = root.child(trial);  // shared xi
    const InnerObservation o1 = model.simulate(point(x1), theta, stream);
    const InnerObservation o2 = model.simulate(point(x2), theta, stream);
    const double xi = o1.gradient[0] - theta[0] - 2.0 * x1 * theta[1];
    // sup over the box of |theta1 + 2 x theta2 + xi| is attained at an endpoint
    const double k_path = std::max(std::abs(theta[0] - 10.0 * theta[1] + xi),
                                   std::abs(theta[0] + 10.0 * theta[1] + xi));
    CHECK(std::abs(o2.value - o1.value) <= k_path * std::abs(x2 - x1) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("rate functions match their closed forms and endpoints") {
  CHECK(rate_lambda(0.0, 0.1) == doctest::Approx(40.0));
  CHECK(rate_mu(0.0, 0.05) == doctest::Approx(0.0));
  CHECK(rate_lambda(10.0, 0.1) == doctest::Approx(80.0 * std::exp(-1.0) / (1.0 + std::exp(-1.0))));
  CHECK(rate_lambda(10.0, 0.1) == doctest::Approx(21.5173).epsilon(1e-4));

  // lambda decreasing, mu increasing in p
  CHECK(rate_lambda(5.0, 0.1) > rate_lambda(6.0, 0.1));
  CHECK(rate_mu(5.0, 0.05) < rate_mu(6.0, 0.05));
}

TEST_CASE("rate derivatives agree with central finite differences") {
  const double h = 1e-6;
  for (double p : {0.5, 2.0, 10.0, 25.0, 100.0}) {
    for (double theta : {0.01, 0.05, 0.1, 0.3}) {
      const double fd_l = (rate_lambda(p + h, theta) - rate_lambda(p - h, theta)) / (2.0 * h);
      CHECK(rate_lambda_dp(p, theta) == doctest::Approx(fd_l).epsilon(1e-6));
      const double fd_m = (rate_mu(p + h, theta) - rate_mu(p - h, theta)) / (2.0 * h);
      CHECK(rate_mu_dp(p, theta) == doctest::Approx(fd_m).epsilon(1e-6));
    }
  }
}

TEST_CASE("market simulate reproduces the arrival-time construction") {
  const MarketModel model;
  const double p = 12.5;
  const Eigen::VectorXd theta = theta2(0.1, 0.05);
  const RngStream stream(314);
  const InnerObservation obs = model.simulate(point(p), theta, stream);

  // replay the stream: customer and provider exponentials interleave
  SplitMix64 eng = stream.engine();
  const double lambda = rate_lambda(p, theta[0]);
  const double mu = rate_mu(p, theta[1]);
  const double dlambda = rate_lambda_dp(p, theta[0]);
  const double dmu = rate_mu_dp(p, theta[1]);
  double sc = 0.0, sp = 0.0, wait = 0.0, wait_grad = 0.0;
  for (int i = 0; i < model.params().customers; ++i) {
    sc += unit_exponential(eng);
    sp += unit_exponential(eng);
    const double ac = sc / lambda;
    const double ap = sp / mu;
    const double w = ap - ac;
    CHECK(std::max(0.0, w) >= 0.0);
    if (w > 0.0) {
      wait += w;
      wait_grad += (-ap * dmu / mu) - (-ac * dlambda / lambda);
    }
  }
  const double m_inv = 1.0 / model.params().customers;
  CHECK(obs.value == doctest::Approx(wait * m_inv - 0.04 * p * lambda).epsilon(1e-12));
  CHECK(obs.gradient[0] ==
        doctest::Approx(wait_grad * m_inv - 0.04 * (lambda + p * dlambda)).epsilon(1e-12));
}

TEST_CASE("market waits are non-negative and values finite") {
  const MarketModel model;
  const RngStream root(272);
  for (int i = 0; i < 100; ++i) {
    const double p = std::min(1.0 + 2.99 * i, 300.0);
    const InnerObservation obs = model.simulate(point(p), theta2(0.08, 0.06), root.child(i));
    CHECK(std::isfinite(obs.value));
    CHECK(std::isfinite(obs.gradient[0]));
  }
}

TEST_CASE("market rejects a vanishing provider rate") {
  const MarketModel model;
  CHECK_THROWS_AS(model.simulate(point(10.0), theta2(0.1, 0.0), RngStream(1)),
                  std::domain_error);
}

TEST_CASE("market determinism") {
  const MarketModel model;
  const RngStream stream(5150);
  const InnerObservation a = model.simulate(point(17.0), theta2(0.09, 0.04), stream);
  const InnerObservation b = model.simulate(point(17.0), theta2(0.09, 0.04), stream);
  CHECK(a.value == b.value);
  CHECK(a.gradient[0] == b.gradient[0]);
}

TEST_CASE("quadratic pathwise gradient equals the CRN finite difference exactly") {
  // h is affine in theta and quadratic in x with noise linear in x, so the
  // central difference under common xi cancels exactly.
  const QuadraticModel model;
  const RngStream root(808);
  const double h = 0.25;
  for (double x : {-1.5, -0.5, 0.3, 1.0, 2.0}) {
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd theta = theta2(-15.0, 10.0);
      const RngStream s = root.child(i);
      const double up = model.simulate(point(x + h), theta, s).value;
      const double dn = model.simulate(point(x - h), theta, s).value;
      const double grad = model.simulate(point(x), theta, s).gradient[0];
      CHECK((up - dn) / (2.0 * h) == doctest::Approx(grad).epsilon(1e-10));
    }
  }
}

TEST_CASE("market IPA gradient matches CRN finite differences of the mean cost") {
  const MarketModel model;
  const Eigen::VectorXd theta = theta2(0.1, 0.05);
  const double h = 0.05;
  const RngStream root(909);
  for (double p : {5.0, 10.0, 20.0, 30.0, 60.0}) {
    RunningStats paired;  // fd_i - grad_i under common randomness
    for (int i = 0; i < 20000; ++i) {
      const RngStream s = root.child(i);
      const double up = model.simulate(point(p + h), theta, s).value;
      const double dn = model.simulate(point(p - h), theta, s).value;
      const double grad = model.simulate(point(p), theta, s).gradient[0];
      paired.add((up - dn) / (2.0 * h) - grad);
    }
    // second-order truncation slack on top of the Monte Carlo band
    CHECK(std::abs(paired.mean()) <= 3.0 * paired.std_error() + 2e-3);
  }
}
