#include "bro/sa.hpp"

#include <limits>
#include <stdexcept>

namespace bro {

GradientEstimate estimate_gradient(const SimulationModel& model, const PosteriorSampler& posterior,
                                   const RiskSpec& spec, const Eigen::VectorXd& x, int n, int m,
                                   int k_batches, RngStream stream) {
  switch (spec.kind) {
    case RiskSpec::Kind::expectation: {
      const NestedBatch batch =
          simulate_batch(model, posterior, x, n, m, stream.child(0), InnerStorage::aggregated);
      return grad_expectation(batch);
    }
    case RiskSpec::Kind::mean_variance: {
      // n independent realizations of the unbiased five-run estimator.
      GradientEstimate acc;
      acc.gradient = Eigen::VectorXd::Zero(model.decision_dim());
      for (int r = 0; r < n; ++r) {
        const GradientEstimate one = grad_mean_variance(
            model, posterior, x, spec.weight, stream.child(static_cast<std::uint64_t>(r)));
        acc.gradient += one.gradient;
        acc.objective += one.objective;
      }
      acc.gradient /= static_cast<double>(n);
      acc.objective /= static_cast<double>(n);
      return acc;
    }
    case RiskSpec::Kind::var: {
      std::vector<NestedBatch> batches;
      batches.reserve(static_cast<std::size_t>(k_batches));
      for (int b = 0; b < k_batches; ++b) {
        batches.push_back(simulate_batch(model, posterior, x, n, m,
                                         stream.child(static_cast<std::uint64_t>(b)),
                                         InnerStorage::aggregated));
      }
      return grad_var_batched(batches, spec.alpha);
    }
    case RiskSpec::Kind::cvar: {
      const NestedBatch batch =
          simulate_batch(model, posterior, x, n, m, stream.child(0), InnerStorage::aggregated);
      return grad_cvar(batch, spec.alpha);
    }
  }
  throw std::logic_error("unhandled risk kind");
}

SATrace sa_run(const SimulationModel& model, const PosteriorSampler& posterior,
               const RiskSpec& spec, const StepSchedule& steps, const BudgetSchedule& budget,
               const Eigen::VectorXd& x0, long iterations, RngStream stream) {
  spec.validate();
  steps.validate();
  budget.validate();
  if (iterations < 1) throw std::invalid_argument("SA needs at least one iteration");
  const Box& box = model.decision_box();
  if (!box.contains(x0)) throw std::invalid_argument("SA start point must lie inside the box");

  SATrace trace;
  trace.seed = stream.key();
  trace.iterations.reserve(static_cast<std::size_t>(iterations));

  Eigen::VectorXd x = x0;
  for (long t = 0; t < iterations; ++t) {
    const int n = budget.n_at(t);
    const int m = budget.m_at(t);
    const double eps = steps.at(t);

    SAIteration rec;
    rec.t = t;
    rec.x = x;
    rec.n = n;
    rec.m = m;
    rec.eps = eps;
    try {
      const GradientEstimate g = estimate_gradient(model, posterior, spec, x, n, m,
                                                   budget.k_batches,
                                                   stream.child(static_cast<std::uint64_t>(t)));
      rec.y = -g.gradient;  // estimators return ascent gradients; we minimize
      rec.objective = g.objective;
    } catch (const std::domain_error& e) {
      rec.y = Eigen::VectorXd::Zero(x.size());
      rec.objective = std::numeric_limits<double>::quiet_NaN();
      trace.iterations.push_back(std::move(rec));
      trace.aborted = true;
      trace.abort_message = e.what();
      break;
    }
    trace.iterations.push_back(rec);
    x = project(x + eps * rec.y, box);
  }
  trace.final_x = x;
  return trace;
}

}  // namespace bro
