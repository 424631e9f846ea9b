#pragma once

// Model-error bounds for rewards in [0,1].
//
//   delta = 1/2 max_{s,a} |T1(.|s,a) - T2(.|s,a)|_1
//   B(h, delta) = h - h / (1 + (h-1) delta),       h = 1/(1-gamma)
//   H(eps, delta) = ((1+eps) + sqrt((1-eps)^2 + 4 eps/delta)) / 2
//
// |J1(pi) - J2(pi)| <= B for every pi, so a pair cannot be eps-exploitable
// once B <= eps, i.e. once h <= H(eps, delta). sqrt(eps/delta) <= H is the
// looser rule of thumb.

#include "invlab/mdp.hpp"

#include <optional>
#include <string>

namespace invlab {

double tv_distance(const TransitionModel& t1, const TransitionModel& t2);

/// B in value units. Requires 0 <= gamma < 1 and 0 <= delta <= 1.
double sim_bound(double gamma, double delta);
/// Same bound parameterized by the effective horizon h >= 1.
double sim_bound_horizon(double h, double delta);

/// Closed-form safe horizon. Requires eps > 0 and 0 < delta <= 1.
double safe_horizon(double eps, double delta);

/// sqrt(eps/delta). Requires eps > 0 and delta > 0.
double sqrt_threshold(double eps, double delta);

struct BoundsReport {
  double delta = 0;
  double h = 0;
  double b = 0;       // sim_bound at (h, delta); the eps above which eps-unexploitability holds
  double safe_h = 0;  // H(eps, delta); +inf when delta == 0
  double sqrt_h = 0;  // sqrt(eps/delta); +inf when delta == 0
  double sqrt_eps = 0;  // delta h^2: the eps above which the sqrt rule applies at this h
  double eps = 0;
  bool certified = false;  // h <= H(eps, delta)
};

struct Certificate {
  bool refused = false;
  std::string reason;  // populated when refused
  BoundsReport report;
};

/// True iff every reward lies in [0,1].
bool reward_in_unit_interval(const TaskSpec& task);

/// Certifies eps-unexploitability of (t1, t2) at the task's gamma. Refuses
/// (without rescaling) when the reward is outside [0,1].
Certificate certify_unexploitable(const TaskSpec& task, double eps, const TransitionModel& t1,
                                  const TransitionModel& t2);

/// Bounds without the certification step; valid for any delta in [0,1].
BoundsReport bounds_report(double gamma, double delta, double eps);

}  // namespace invlab
