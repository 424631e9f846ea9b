#include "invlab/bounds.hpp"

#include "invlab/errors.hpp"

#include <cmath>
#include <limits>

namespace invlab {

double tv_distance(const TransitionModel& t1, const TransitionModel& t2) {
  if (t1.num_actions() != t2.num_actions() || t1.num_states() != t2.num_states())
    throw ValidationError("dimension mismatch: transition models have different shapes");
  double worst = 0;
  for (Index a = 0; a < t1.num_actions(); ++a) {
    Vector l1 = (t1.slice(a) - t2.slice(a)).cwiseAbs().rowwise().sum();
    worst = std::max(worst, 0.5 * l1.maxCoeff());
  }
  return std::min(worst, 1.0);
}

double sim_bound_horizon(double h, double delta) {
  if (!(h >= 1.0) || !std::isfinite(h)) throw ValidationError("effective horizon must be finite and >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("delta out of range [0,1]");
  return h - h / (1.0 + (h - 1.0) * delta);
}

double sim_bound(double gamma, double delta) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma out of range [0,1)");
  return sim_bound_horizon(1.0 / (1.0 - gamma), delta);
}

double safe_horizon(double eps, double delta) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("eps must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta out of range (0,1]");
  const double d = 1.0 - eps;
  return ((1.0 + eps) + std::sqrt(d * d + 4.0 * eps / delta)) / 2.0;
}

double sqrt_threshold(double eps, double delta) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  return std::sqrt(eps / delta);
}

bool reward_in_unit_interval(const TaskSpec& task) {
  return task.reward.size() > 0 && task.reward.minCoeff() >= 0.0 && task.reward.maxCoeff() <= 1.0;
}

BoundsReport bounds_report(double gamma, double delta, double eps) {
  BoundsReport r;
  r.delta = delta;
  r.h = 1.0 / (1.0 - gamma);
  r.b = sim_bound(gamma, delta);
  r.sqrt_eps = delta * r.h * r.h;
  r.eps = eps;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (eps > 0.0) {
    r.safe_h = delta > 0.0 ? safe_horizon(eps, delta) : inf;
    r.sqrt_h = delta > 0.0 ? sqrt_threshold(eps, delta) : inf;
    r.certified = r.h <= r.safe_h;
  }
  return r;
}

Certificate certify_unexploitable(const TaskSpec& task, double eps, const TransitionModel& t1,
                                  const TransitionModel& t2) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  t1.check_shape(task);
  t2.check_shape(task);
  Certificate c;
  c.report = bounds_report(task.gamma, tv_distance(t1, t2), eps);
  if (!reward_in_unit_interval(task)) {
    c.refused = true;
    c.report.certified = false;
    c.reason =
        "reward must lie in [0,1]; rescale it as (R - min R) / (max R - min R) and scale eps by the "
        "same factor before certifying";
  }
  return c;
}

}  // namespace invlab
