#include "invlab/bounds.hpp"
#include "invlab/constructions.hpp"
#include "invlab/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace invlab;

TEST_CASE("tv distance against the direct formula") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    TransitionModel a = oracle::random_model(rng, 4, 2), b = oracle::random_model(rng, 4, 2);
    CHECK(tv_distance(a, b) == doctest::Approx(oracle::tv(a, b)).epsilon(1e-14));
  }
  FigureSetup fs = figure_task_and_models();
  CHECK(std::abs(tv_distance(fs.t1, fs.t2a) - 0.40) <= 1e-12);
  CHECK(std::abs(tv_distance(fs.t1, fs.t2b) - 0.14) <= 1e-12);
  CHECK(tv_distance(fs.t1, fs.t1) == 0.0);
}

TEST_CASE("simulation bound values") {
  CHECK(sim_bound(0.9, 0.40) == doctest::Approx(7.826).epsilon(1e-3));
  CHECK(sim_bound(0.9, 0.14) == doctest::Approx(5.575).epsilon(1e-3));
  CHECK(sim_bound(0.9, 0.81) == doctest::Approx(8.794).epsilon(1e-3));
  CHECK(sim_bound(0.9, 0.64) == doctest::Approx(8.520).epsilon(1e-3));
  CHECK(sim_bound(0.9, 0.0) == 0.0);
  CHECK(sim_bound(0.9, 1.0) == doctest::Approx(9.0));
  CHECK(sim_bound(0.0, 0.5) == 0.0);
  CHECK_THROWS(sim_bound(1.0, 0.5));
  CHECK_THROWS(sim_bound(0.5, 1.5));
}

TEST_CASE("safe horizon agrees with bisection") {
  for (double eps : {0.05, 0.5, 1.0, 3.0, 10.0})
    for (double delta : {0.01, 0.1, 0.5, 1.0}) {
      double h = safe_horizon(eps, delta);
      CHECK(h == doctest::Approx(oracle::horizon_by_bisection(eps, delta)).epsilon(1e-10));
      CHECK(sim_bound_horizon(h, delta) == doctest::Approx(eps).epsilon(1e-10));
      CHECK(sqrt_threshold(eps, delta) <= h);
    }
  CHECK(safe_horizon(1.0, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS(safe_horizon(0.0, 0.5));
  CHECK_THROWS(safe_horizon(1.0, 0.0));
}

TEST_CASE("certification") {
  TightnessSetup ts = tightness_mdp(0.9, 0.5);
  const double b = sim_bound(0.9, 0.5);
  CHECK(certify_unexploitable(ts.task, b + 1e-6, ts.t1, ts.t2).report.certified);
  CHECK_FALSE(certify_unexploitable(ts.task, b - 1e-6, ts.t1, ts.t2).report.certified);

  TaskSpec loud = ts.task;
  loud.reward(0, 0) = 2.0;
  Certificate c = certify_unexploitable(loud, 1.0, ts.t1, ts.t2);
  CHECK(c.refused);
  CHECK_FALSE(c.report.certified);

  BoundsReport same = bounds_report(0.9, 0.0, 1.0);
  CHECK(std::isinf(same.safe_h));
  CHECK(same.certified);
}

TEST_CASE("value discrepancy never exceeds the bound") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 10; ++k) {
    TaskSpec task = oracle::random_task(rng, 3, 2, 0.85);
    TransitionModel a = oracle::random_model(rng, 3, 2), b = oracle::random_model(rng, 3, 2);
    const double limit = sim_bound(task.gamma, oracle::tv(a, b));
    for (int p = 0; p < 20; ++p) {
      Matrix pi = oracle::random_stochastic(rng, 3, 2);
      CHECK(std::abs(oracle::value(a, task, pi) - oracle::value(b, task, pi)) <= limit + 1e-9);
    }
  }
}
