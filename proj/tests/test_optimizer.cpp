#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bro/estimators.hpp"
#include "bro/nelder_mead.hpp"
#include "bro/oracle.hpp"
#include "bro/saa.hpp"
#include "bro/sa.hpp"
#include "bro/stats.hpp"

using namespace bro;

namespace {

Eigen::VectorXd point(double x) { return Eigen::VectorXd::Constant(1, x); }

const GaussianPosterior kGaussian((Eigen::VectorXd(2) << -15.0, 10.0).finished(),
                                  (Eigen::VectorXd(2) << 4.0, 2.0).finished());

// Noise-free model whose expectation gradient is exactly x.
struct LinearGradientModel final : SimulationModel {
  Box box = Box::interval(-5.0, 5.0);
  Eigen::Index decision_dim() const override { return 1; }
  const Box& decision_box() const override { return box; }
  InnerObservation simulate(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                            RngStream) const override {
    return InnerObservation{0.5 * x[0] * x[0], Eigen::VectorXd::Constant(1, x[0])};
  }
};

}  // namespace

TEST_CASE("project clamps coordinatewise and is idempotent") {
  const Box box = Box::interval(-5.0, 5.0);
  CHECK(project(point(1.25), box)[0] == doctest::Approx(1.25));
  CHECK(project(point(7.0), box)[0] == doctest::Approx(5.0));
  CHECK(project(point(-9.0), box)[0] == doctest::Approx(-5.0));

  SplitMix64 eng(3);
  Box wide(Eigen::ArrayXd::Constant(3, -1.0), Eigen::ArrayXd::Constant(3, 2.0));
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x[d] = uniform(eng, -10.0, 10.0);
    const Eigen::VectorXd once = project(x, wide);
    CHECK((project(once, wide) - once).norm() == 0.0);
  }

  CHECK_THROWS_AS(Box(Eigen::ArrayXd::Constant(1, 2.0), Eigen::ArrayXd::Constant(1, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("step schedule validity window") {
  StepSchedule bad;
  bad.gamma = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.gamma = 1.01;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.gamma = 1.0;
  CHECK_NOTHROW(bad.validate());
  bad.c = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  const StepSchedule paper;  // defaults
  CHECK(paper.at(0) == doctest::Approx(20.0 / std::pow(100.0, 0.8)));
  CHECK(paper.at(900) == doctest::Approx(20.0 / std::pow(1000.0, 0.8)));
}

TEST_CASE("budget schedule rounding and monotonicity") {
  const BudgetSchedule b;  // n_t = round(100 + 0.5 t), m = floor(n/10)
  CHECK(b.n_at(0) == 100);
  CHECK(b.n_at(1) == 101);  // round half away from zero
  CHECK(b.n_at(2) == 101);
  CHECK(b.n_at(1000) == 600);
  CHECK(b.m_at(0) == 10);
  CHECK(b.m_at(1000) == 60);
  for (long t = 0; t < 500; ++t) {
    CHECK(b.n_at(t + 1) >= b.n_at(t));
    CHECK(b.m_at(t + 1) >= b.m_at(t));
  }

  BudgetSchedule fixed;
  fixed.n0 = 100;
  fixed.n_slope = 0.0;
  fixed.m_divisor = 5.0;
  CHECK(fixed.n_at(999) == 100);
  CHECK(fixed.m_at(999) == 20);

  BudgetSchedule bad;
  bad.n_slope = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("SA contracts the deterministic wired model") {
  const LinearGradientModel model;
  StepSchedule step;
  step.c = 0.9;
  step.t0 = 1.0;
  step.gamma = 0.8;
  BudgetSchedule budget;
  budget.n0 = 1;
  budget.n_slope = 0.0;
  budget.m_divisor = 1.0;

  const SATrace trace = sa_run(model, kGaussian, RiskSpec::expectation(), step, budget,
                               point(4.0), 120, RngStream(1));
  CHECK(std::abs(trace.final_x[0]) < 5e-3);

  // |x_t| eventually decreases monotonically
  for (std::size_t t = 1; t < trace.iterations.size(); ++t) {
    CHECK(std::abs(trace.iterations[t].x[0]) <= std::abs(trace.iterations[t - 1].x[0]) + 1e-12);
  }
}

TEST_CASE("SA traces are seed-deterministic and stay in the box") {
  const QuadraticModel model;
  StepSchedule step;
  step.c = 5.0;  // deliberately large: exercise the projection
  step.t0 = 1.0;
  step.gamma = 0.8;
  BudgetSchedule budget;
  budget.n0 = 50;
  budget.n_slope = 0.5;
  budget.m_divisor = 5.0;

  const SATrace a = sa_run(model, kGaussian, RiskSpec::cvar(0.75), step, budget, point(-2.0), 40,
                           RngStream(77));
  const SATrace b = sa_run(model, kGaussian, RiskSpec::cvar(0.75), step, budget, point(-2.0), 40,
                           RngStream(77));
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t t = 0; t < a.iterations.size(); ++t) {
    CHECK(a.iterations[t].x[0] == b.iterations[t].x[0]);
    CHECK(a.iterations[t].y[0] == b.iterations[t].y[0]);
    CHECK(a.iterations[t].objective == b.iterations[t].objective);
    CHECK(a.iterations[t].x[0] >= -5.0);
    CHECK(a.iterations[t].x[0] <= 5.0);
  }
  CHECK(a.final_x[0] == b.final_x[0]);
}

TEST_CASE("SA rejects invalid runs") {
  const QuadraticModel model;
  const StepSchedule step;
  const BudgetSchedule budget;
  CHECK_THROWS_AS(sa_run(model, kGaussian, RiskSpec::cvar(0.75), step, budget, point(-2.0), 0,
                         RngStream(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sa_run(model, kGaussian, RiskSpec::cvar(0.75), step, budget, point(-7.0), 10,
                         RngStream(1)),
                  std::invalid_argument);
}

TEST_CASE("SA aborts with a diagnostic record on simulation domain errors") {
  const MarketModel model;
  // theta_p = 0 makes the provider rate vanish
  const DiracPosterior degenerate((Eigen::VectorXd(2) << 0.1, 0.0).finished());
  StepSchedule step;
  step.c = 1.0;
  step.t0 = 10.0;
  step.gamma = 0.8;
  BudgetSchedule budget;
  budget.n0 = 5;
  budget.n_slope = 0.0;
  budget.m_divisor = 5.0;
  const SATrace trace =
      sa_run(model, degenerate, RiskSpec::cvar(0.7), step, budget, point(10.0), 10, RngStream(3));
  CHECK(trace.aborted);
  CHECK_FALSE(trace.abort_message.empty());
  CHECK(trace.iterations.size() == 1);
}

TEST_CASE("SA final-iterate spread shrinks as the horizon grows") {
  const QuadraticModel model;
  StepSchedule step;
  step.c = 0.1;
  step.t0 = 1.3;
  step.gamma = 1.0;
  // growing budgets shrink the estimator bias along the run
  BudgetSchedule budget;
  budget.n0 = 100;
  budget.n_slope = 0.5;
  budget.m_divisor = 5.0;
  const RiskSpec spec = RiskSpec::cvar(0.75);
  const ScalarOptimum opt = quadratic_optimum(spec, QuadraticPosteriorParams{});

  const RngStream root(2024);
  RunningStats final_short, final_long, gap_short, gap_long;
  for (int r = 0; r < 12; ++r) {
    const SATrace t_long = sa_run(model, kGaussian, spec, step, budget, point(-2.0), 600,
                                  root.child(r));
    const double x60 = t_long.iterations[60].x[0];
    final_short.add(x60);
    final_long.add(t_long.final_x[0]);
    gap_short.add(quadratic_closed_form(x60, spec, QuadraticPosteriorParams{}).value - opt.value);
    gap_long.add(quadratic_closed_form(t_long.final_x[0], spec, QuadraticPosteriorParams{}).value -
                 opt.value);
  }
  CHECK(final_long.stddev() < final_short.stddev());
  CHECK(gap_long.mean() < gap_short.mean());
}

TEST_CASE("nelder-mead minimizes a smooth unimodal function") {
  NelderMeadOptions options;
  options.box = Box::interval(-10.0, 10.0);
  const auto f = [](const Eigen::VectorXd& x) { return (x[0] - 3.0) * (x[0] - 3.0); };
  const NelderMeadResult res = nelder_mead(f, point(-4.0), 60, options);
  CHECK(std::abs(res.x[0] - 3.0) < 1e-4);
  CHECK(res.evaluations <= 60);

  CHECK_THROWS_AS(nelder_mead(f, point(0.0), 1, options), std::invalid_argument);
}

TEST_CASE("nelder-mead respects the evaluation budget and returns best seen") {
  NelderMeadOptions options;
  options.box = Box::interval(-10.0, 10.0);
  long calls = 0;
  const auto f = [&](const Eigen::VectorXd& x) {
    ++calls;
    return std::cos(x[0]) + 0.01 * x[0] * x[0];
  };
  const NelderMeadResult res = nelder_mead(f, point(8.0), 25, options);
  CHECK(calls == 25);
  CHECK(res.evaluations == 25);
  CHECK(std::isfinite(res.value));
}

TEST_CASE("nelder-mead in 2d") {
  NelderMeadOptions options;
  options.box = Box(Eigen::ArrayXd::Constant(2, -4.0), Eigen::ArrayXd::Constant(2, 4.0));
  const auto f = [](const Eigen::VectorXd& x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  const NelderMeadResult res = nelder_mead(f, Eigen::VectorXd::Zero(2), 200, options);
  CHECK(std::abs(res.x[0] - 1.0) < 1e-3);
  CHECK(std::abs(res.x[1] + 0.5) < 1e-3);
}

TEST_CASE("SAA freezing gives deterministic objectives; seeds distinguish problems") {
  const QuadraticModel model;
  const RiskSpec spec = RiskSpec::cvar(0.75);
  const FrozenProblem frozen = saa_freeze(model, kGaussian, spec, 100, 20, RngStream(50));

  const double v1 = frozen.objective(point(0.3));
  const double v2 = frozen.objective(point(0.3));
  CHECK(v1 == v2);

  const FrozenProblem other = saa_freeze(model, kGaussian, spec, 100, 20, RngStream(51));
  CHECK(frozen.objective(point(0.3)) != other.objective(point(0.3)));
}

TEST_CASE("frozen objective slopes are stable under step halving") {
  const QuadraticModel model;
  const RiskSpec spec = RiskSpec::cvar(0.75);
  const FrozenProblem frozen = saa_freeze(model, kGaussian, spec, 200, 40, RngStream(52));
  const double x = 0.3;
  const auto slope = [&](double h) {
    return (frozen.objective(point(x + h)) - frozen.objective(point(x - h))) / (2.0 * h);
  };
  const double s1 = slope(1e-3);
  const double s2 = slope(5e-4);
  CHECK(std::abs(s1 - s2) <= 1e-3 * (1.0 + std::abs(s1)));

  // the analytic frozen gradient matches a tiny central difference
  const double fd = slope(1e-7);
  const double analytic = frozen.gradient(point(x)).gradient[0];
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("frozen mean-variance gradient differentiates the frozen objective") {
  const QuadraticModel model;
  const RiskSpec spec = RiskSpec::mean_variance(0.1);
  const FrozenProblem frozen = saa_freeze(model, kGaussian, spec, 150, 30, RngStream(53));
  const double x = 0.8;
  const double h = 1e-6;
  const double fd =
      (frozen.objective(point(x + h)) - frozen.objective(point(x - h))) / (2.0 * h);
  CHECK(frozen.gradient(point(x)).gradient[0] == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("projected descent on the frozen problem settles at a stationary point") {
  const QuadraticModel model;
  const RiskSpec spec = RiskSpec::cvar(0.75);
  const FrozenProblem frozen = saa_freeze(model, kGaussian, spec, 100, 20, RngStream(54));
  StepSchedule step;
  step.c = 0.1;
  step.t0 = 1.3;
  step.gamma = 1.0;
  Eigen::VectorXd x = point(-2.0);
  const Box& box = model.decision_box();
  for (long t = 0; t < 300; ++t) {
    x = project(x - step.at(t) * frozen.gradient(x).gradient, box);
  }
  CHECK(std::abs(frozen.gradient(x).gradient[0]) < 0.2);
  CHECK(std::abs(x[0] - 0.4748) < 0.2);  // frozen optimum sits near the true one
}
