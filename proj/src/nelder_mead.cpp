#include "bro/nelder_mead.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bro {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& x0, long max_evals,
                             const NelderMeadOptions& options) {
  const Eigen::Index dim = x0.size();
  if (max_evals < dim + 1) {
    throw std::invalid_argument("Nelder-Mead needs at least dim+1 evaluations");
  }

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  double edge = options.initial_edge;
  if (edge <= 0.0) {
    edge = 0.05 * (options.box.hi - options.box.lo).minCoeff();
  }

  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  long evals = 0;

  auto eval = [&](const Eigen::VectorXd& x) {
    const double v = objective(x);
    ++evals;
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };
  auto clamp = [&](const Eigen::VectorXd& x) { return project(x, options.box); };

  struct Vertex {
    Eigen::VectorXd x;
    double value;
  };
  std::vector<Vertex> simplex;
  simplex.push_back({clamp(x0), eval(clamp(x0))});
  for (Eigen::Index i = 0; i < dim && evals < max_evals; ++i) {
    Eigen::VectorXd xi = x0;
    xi[i] += edge;
    xi = clamp(xi);
    if ((xi - x0).norm() < 0.5 * edge) {  // bumped into the box; step inward instead
      xi = x0;
      xi[i] -= edge;
      xi = clamp(xi);
    }
    simplex.push_back({xi, eval(xi)});
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.value < b.value; };
  for (long iter = 0; iter < options.max_iterations && evals < max_evals &&
                      simplex.size() == static_cast<std::size_t>(dim) + 1;
       ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    Vertex& worst = simplex.back();

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].x;
    centroid /= static_cast<double>(simplex.size() - 1);

    const Eigen::VectorXd reflected = clamp(centroid + kReflect * (centroid - worst.x));
    const double f_reflected = eval(reflected);

    if (f_reflected < simplex.front().value) {
      if (evals >= max_evals) break;
      const Eigen::VectorXd expanded = clamp(centroid + kExpand * (reflected - centroid));
      const double f_expanded = eval(expanded);
      worst = f_expanded < f_reflected ? Vertex{expanded, f_expanded}
                                       : Vertex{reflected, f_reflected};
      continue;
    }
    if (f_reflected < simplex[simplex.size() - 2].value) {
      worst = Vertex{reflected, f_reflected};
      continue;
    }
    if (evals >= max_evals) break;
    const Eigen::VectorXd contracted = clamp(centroid + kContract * (worst.x - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < worst.value) {
      worst = Vertex{contracted, f_contracted};
      continue;
    }
    for (std::size_t i = 1; i < simplex.size() && evals < max_evals; ++i) {
      simplex[i].x = clamp(simplex.front().x + kShrink * (simplex[i].x - simplex.front().x));
      simplex[i].value = eval(simplex[i].x);
    }
  }

  best.evaluations = evals;
  return best;
}

}  // namespace bro
