#include "invlab/constructions.hpp"
#include "invlab/bounds.hpp"
#include "invlab/exploit.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace invlab;

TEST_CASE("finite inversion picks the largest smaller margin") {
  std::vector<double> v1 = {3.0, 2.0, 0.0};
  std::vector<double> v2 = {0.0, 1.0, 5.0};
  auto inv = check_inversion_finite(v1, v2);
  REQUIRE(inv.has_value());
  CHECK(inv->pi_index == 0);
  CHECK(inv->pi_prime_index == 2);
  CHECK(inv->margin_1 == 3.0);
  CHECK(inv->margin_2 == 5.0);
  CHECK_FALSE(check_inversion_finite(v1, v1).has_value());
  std::vector<double> tie = {1.0, 1.0};
  CHECK_FALSE(check_inversion_finite(tie, tie).has_value());
}

TEST_CASE("exact deterministic gap equals brute force") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 5; ++k) {
    TaskSpec task = oracle::random_task(rng, 3, 2, 0.8);
    TransitionModel a = oracle::random_model(rng, 3, 2), b = oracle::random_model(rng, 3, 2);
    double best = 0.0;
    auto all = oracle::all_deterministic(3, 2);
    for (const Matrix& p : all)
      for (const Matrix& q : all) {
        double m1 = oracle::value(a, task, p) - oracle::value(a, task, q);
        double m2 = oracle::value(b, task, q) - oracle::value(b, task, p);
        best = std::max(best, std::min(m1, m2));
      }
    FinitePolicySet set;
    set.policies = deterministic_policies(3, 2);
    GapEstimate g = exploitation_gap(a, b, task, PolicySetSpec::finite_set(set));
    CHECK(g.gap == doctest::Approx(best).epsilon(1e-9));
    CHECK(g.method == "exact-finite");
  }
}

TEST_CASE("figure panels classify as trivial and equivalent on the theta line") {
  FigureSetup fs = figure_task_and_models();
  ThetaFamily line = ThetaFamily::two_action(fs.task);
  PairClassification a = classify_pair(fs.t1, fs.t2a, fs.task, line);
  CHECK(a.verdict == Verdict::Trivial);
  CHECK(a.trivial_side == 2);
  PairClassification b = classify_pair(fs.t1, fs.t2b, fs.task, line);
  CHECK(b.verdict == Verdict::Equivalent);
  CHECK_FALSE(b.witness.has_value());
}

TEST_CASE("panel (b) models disagree once state-dependent policies are allowed") {
  FigureSetup fs = figure_task_and_models();
  PairClassification c = classify_pair(fs.t1, fs.t2b, fs.task, PolicySetSpec::stationary(64, 0));
  CHECK(c.verdict == Verdict::Exploitable);
  REQUIRE(c.witness.has_value());
  CHECK(reverify(*c.witness, fs.t1, fs.t2b, fs.task));
}

TEST_CASE("identical models are equivalent") {
  FigureSetup fs = figure_task_and_models();
  PairClassification c = classify_pair(fs.t1, fs.t1, fs.task, PolicySetSpec::interior(32, 4));
  CHECK(c.verdict == Verdict::Equivalent);
}

TEST_CASE("zero discount forces equivalence") {
  std::mt19937_64 rng(8);
  TaskSpec task = oracle::random_task(rng, 3, 2, 0.0);
  TransitionModel a = oracle::random_model(rng, 3, 2), b = oracle::random_model(rng, 3, 2);
  PairClassification c = classify_pair(a, b, task, PolicySetSpec::interior(16, 0));
  CHECK(c.verdict == Verdict::Equivalent);
  CHECK(c.evidence.degeneracy != "none");
}

TEST_CASE("sampled policy sets are deterministic and in-set") {
  FigureSetup fs = figure_task_and_models();
  for (const PolicySetSpec& spec :
       {PolicySetSpec::interior(20, 5), PolicySetSpec::delta_deterministic(0.8, 20, 5),
        PolicySetSpec::eps_suboptimal(1.0, fs.t1, 20, 5)}) {
    FinitePolicySet a = sample_policies(spec, fs.task), b = sample_policies(spec, fs.task);
    REQUIRE(a.size() == 20);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a.policies[k].probs() == b.policies[k].probs());
      CHECK(in_policy_set(spec, fs.task, a.policies[k]));
    }
  }
  CHECK_THROWS_AS(sample_policies(PolicySetSpec::eps_suboptimal(1e-9, fs.t1, 5, 0), fs.task),
                  RejectionBudgetExceeded);
}

TEST_CASE("row projection onto the simplex") {
  Matrix m(2, 3);
  m << 0.5, 0.5, 0.5, 2.0, -1.0, 0.0;
  Matrix p = project_rows_to_simplex(m);
  CHECK(p(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(p(1, 0) == doctest::Approx(1.0));
  CHECK(p(1, 1) == doctest::Approx(0.0));
  Matrix q = project_rows_to_simplex(m, 0.1);
  CHECK(q.minCoeff() >= 0.1 - 1e-15);
  CHECK(q.row(1).sum() == doctest::Approx(1.0));
}

TEST_CASE("gap estimates stay below the simulation bound") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 5; ++k) {
    TaskSpec task = oracle::random_task(rng, 3, 2, 0.9);
    TransitionModel a = oracle::random_model(rng, 3, 2), b = oracle::random_model(rng, 3, 2);
    const double limit = sim_bound(task.gamma, tv_distance(a, b)) + 1e-9;
    GapEstimate line = exploitation_gap(a, b, task, ThetaFamily::two_action(task));
    GapEstimate sampled = exploitation_gap(a, b, task, PolicySetSpec::stationary(16, 1));
    CHECK(line.gap <= limit);
    CHECK(sampled.gap <= limit);
    if (sampled.witness) CHECK(reverify(*sampled.witness, a, b, task, 0.0));
  }
}
