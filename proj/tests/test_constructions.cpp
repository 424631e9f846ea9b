#include "invlab/bounds.hpp"
#include "invlab/constructions.hpp"
#include "invlab/errors.hpp"
#include "invlab/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace invlab;

TEST_CASE("figure models") {
  FigureSetup fs = figure_task_and_models();
  TransitionModel lit = figure_t2b_literal();
  for (Index a = 0; a < 2; ++a) CHECK((fs.t2b.slice(a) - lit.slice(a)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fs.t2a.slice(0) == fs.t2a.slice(1));
}

TEST_CASE("tightness construction attains the bound") {
  for (double gamma : {0.5, 0.9, 0.99})
    for (double delta : {0.1, 0.5, 0.9}) {
      TightnessSetup ts = tightness_mdp(gamma, delta);
      Matrix stay = Matrix::Zero(2, 2), leave = Matrix::Zero(2, 2);
      stay.col(0).setOnes();
      leave.col(1).setOnes();
      const double h = 1.0 / (1.0 - gamma);
      CHECK(oracle::value(ts.t1, ts.task, stay) == doctest::Approx(h).epsilon(1e-12));
      CHECK(oracle::value(ts.t1, ts.task, leave) ==
            doctest::Approx(1.0 / (1.0 - gamma * (1.0 - delta))).epsilon(1e-12));
      CHECK(tv_distance(ts.t1, ts.t2) == doctest::Approx(delta).epsilon(1e-14));
      FinitePolicySet set;
      set.policies = deterministic_policies(2, 2);
      GapEstimate g = exploitation_gap(ts.t1, ts.t2, ts.task, PolicySetSpec::finite_set(set));
      CHECK(std::abs(g.gap - sim_bound(gamma, delta)) <= 1e-9);
    }
  CHECK_THROWS_AS(tightness_mdp(0.0, 0.5), ValidationError);
  CHECK_THROWS_AS(tightness_mdp(0.9, 0.0), ValidationError);
}

TEST_CASE("finite counterexample ordering is model independent") {
  std::mt19937_64 rng(13);
  FiniteCounterexample ce = finite_ce_task(0.7);
  for (int k = 0; k < 20; ++k) {
    TransitionModel t = oracle::random_model(rng, 2, 2);
    double j0 = oracle::value(t, ce.task, ce.policies.policies[0].probs());
    double j1 = oracle::value(t, ce.task, ce.policies.policies[1].probs());
    double j2 = oracle::value(t, ce.task, ce.policies.policies[2].probs());
    CHECK(j1 == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
    CHECK(std::abs(j2) < 1e-12);
    CHECK(j1 > j0);
    CHECK(j0 > j2);
  }
}

TEST_CASE("hacking counterexample margins") {
  std::mt19937_64 rng(19);
  TaskSpec task = oracle::random_task(rng, 3, 2, 0.8);
  for (int k = 0; k < 20; ++k) {
    TransitionModel t = oracle::random_model(rng, 3, 2);
    HackingCounterexample hc = hacking_ce(t, task);
    CHECK(hc.margin == doctest::Approx(5.0));
    CHECK(policy_value(t, task, hc.pi, hc.reward) == doctest::Approx(5.0));
    CHECK(std::abs(policy_value(t, task, hc.pi, hc.reward_prime)) < 1e-12);
    CHECK(policy_value(t, task, hc.pi_prime, hc.reward_prime) == doctest::Approx(5.0));
  }
  TaskSpec flat = make_task(0.0, task.d0, task.reward);
  CHECK_THROWS(hacking_ce(oracle::random_model(rng, 3, 2), flat));
}

TEST_CASE("reduction to reward hacking on the tightness witness") {
  TightnessSetup ts = tightness_mdp(0.9, 0.5);
  FinitePolicySet set;
  set.policies = deterministic_policies(2, 2);
  GapEstimate g = exploitation_gap(ts.t1, ts.t2, ts.task, PolicySetSpec::finite_set(set));
  REQUIRE(g.witness.has_value());
  HackingReduction red = exploitation_to_hacking_reward(ts.t1, ts.task, *g.witness);
  Matrix df = oracle::visits(ts.t1, ts.task, g.witness->pi_prime.probs()) -
              oracle::visits(ts.t1, ts.task, g.witness->pi.probs());
  CHECK(red.delta_f_squared == doctest::Approx(df.squaredNorm()).epsilon(1e-9));
  CHECK(red.margin_reward_prime == doctest::Approx(df.squaredNorm()).epsilon(1e-9));
  CHECK(red.margin_reward > 0.0);
  CHECK(red.reward_prime.norm() > 0.0);

  InversionWitness same = *g.witness;
  same.pi_prime = same.pi;
  CHECK_THROWS_AS(exploitation_to_hacking_reward(ts.t1, ts.task, same), CorruptWitness);
}

TEST_CASE("search is reproducible and empty without discounting") {
  FigureSetup fs = figure_task_and_models();
  SearchConfig config(ThetaFamily::two_action(fs.task));
  config.trials = 60;
  config.seed = 3;
  SearchResult a = dirichlet_search(fs.task, config, Execution::Serial);
  SearchResult b = dirichlet_search(fs.task, config, Execution::Parallel);
  REQUIRE(a.pairs.size() == b.pairs.size());
  CHECK(a.trials_run == 60);
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    CHECK(a.pairs[k].trial == b.pairs[k].trial);
    CHECK(a.pairs[k].gap.gap == b.pairs[k].gap.gap);
    CHECK(a.pairs[k].gap.gap <= sim_bound(0.9, tv_distance(a.pairs[k].t1, a.pairs[k].t2)) + 1e-9);
    if (k > 0) CHECK(a.pairs[k - 1].gap.gap >= a.pairs[k].gap.gap);
  }
  CHECK(!a.pairs.empty());

  TaskSpec flat = make_task(0.0, fs.task.d0, fs.task.reward);
  SearchConfig flat_config(ThetaFamily::two_action(flat));
  flat_config.trials = 50;
  CHECK(dirichlet_search(flat, flat_config).pairs.empty());
}
