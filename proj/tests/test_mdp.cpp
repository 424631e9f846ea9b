#include "invlab/errors.hpp"
#include "invlab/mdp.hpp"
#include "invlab/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace invlab;

namespace {

RawTask small_raw() {
  RawTask raw;
  raw.states = {"x", "y"};
  raw.actions = {"l", "r"};
  raw.gamma = 0.5;
  raw.d0 = {0.25, 0.75};
  raw.reward = {{1, 0}, {0, 2}};
  return raw;
}

std::string message_of(const RawTask& raw) {
  try {
    validate_task(raw);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("validate_task reports each failure distinctly") {
  CHECK_NOTHROW(validate_task(small_raw()));

  RawTask one_action = small_raw();
  one_action.actions = {"l"};
  for (auto& row : one_action.reward) row.resize(1);
  CHECK(message_of(one_action).find("at least two actions") != std::string::npos);

  RawTask bad_gamma = small_raw();
  bad_gamma.gamma = 1.0;
  CHECK(message_of(bad_gamma).find("gamma") != std::string::npos);

  RawTask bad_d0 = small_raw();
  bad_d0.d0 = {0.5, 0.6};
  CHECK(message_of(bad_d0).find("d0") != std::string::npos);

  RawTask ragged = small_raw();
  ragged.reward[1].push_back(3.0);
  CHECK(message_of(ragged).find("dimension mismatch") != std::string::npos);
}

TEST_CASE("duplicate names get suffixes") {
  RawTask raw = small_raw();
  raw.states = {"x", "x"};
  TaskSpec task = validate_task(raw);
  CHECK(task.state_names[0] != task.state_names[1]);
}

TEST_CASE("transition rows must be stochastic") {
  Matrix bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(TransitionModel({bad, bad}), ValidationError);
  Matrix neg(2, 2);
  neg << 1.2, -0.2, 0.5, 0.5;
  CHECK_THROWS_AS(TransitionModel({neg, neg}), ValidationError);
  Matrix almost(2, 2);
  almost << 0.5, 0.5 + 1e-11, 1, 0;
  TransitionModel t({almost, almost});
  CHECK(t.slice(0).row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("values match fixed-point iteration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    TaskSpec task = oracle::random_task(rng, 4, 3, 0.95);
    TransitionModel t = oracle::random_model(rng, 4, 3);
    Policy pi(oracle::random_stochastic(rng, 4, 3));
    CHECK(policy_value(t, task, pi) == doctest::Approx(oracle::value(t, task, pi.probs())).epsilon(1e-10));
    Matrix f = visit_counts(t, task, pi).f;
    CHECK((f - oracle::visits(t, task, pi.probs())).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((f.array() * task.reward.array()).sum() == doctest::Approx(policy_value(t, task, pi)).epsilon(1e-10));
    CHECK(f.sum() == doctest::Approx(task.horizon()).epsilon(1e-10));
  }
}

TEST_CASE("optimal value dominates every deterministic policy") {
  std::mt19937_64 rng(5);
  TaskSpec task = oracle::random_task(rng, 3, 2, 0.8);
  TransitionModel t = oracle::random_model(rng, 3, 2);
  double best = -1e300;
  for (const Matrix& pi : oracle::all_deterministic(3, 2)) best = std::max(best, oracle::value(t, task, pi));
  CHECK(optimal_value(t, task) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("deterministic enumeration order and limit") {
  auto all = deterministic_policies(2, 3);
  REQUIRE(all.size() == 9);
  CHECK(all[1](0, 0) == 1.0);
  CHECK(all[1](1, 1) == 1.0);
  CHECK(all[3](0, 1) == 1.0);
  CHECK_THROWS(deterministic_policies(20, 3, 1000));
}

TEST_CASE("theta family endpoints") {
  TaskSpec task = make_task(0.5, Vector::Constant(2, 0.5), Matrix::Zero(2, 2));
  ThetaFamily fam = ThetaFamily::two_action(task);
  CHECK(fam.at(1.0)(0, 0) == 1.0);
  CHECK(fam.at(0.0)(1, 1) == 1.0);
  CHECK(fam.at(0.25)(1, 0) == doctest::Approx(0.25));
  CHECK(fam.at(0.25).is_state_independent());
}

TEST_CASE("degeneracy flags") {
  TaskSpec task = make_task(0.0, Vector::Constant(2, 0.5), Matrix::Ones(2, 2));
  CHECK(check_degeneracy(task, ThetaFamily::two_action(task)).gamma_zero);
  TaskSpec flat = make_task(0.5, Vector::Constant(2, 0.5), Matrix::Ones(2, 2));
  CHECK(check_degeneracy(flat, ThetaFamily::two_action(flat)).stateless);
  Matrix reward(2, 2);
  reward << 1, 0, 0, 0;
  TaskSpec live = make_task(0.5, Vector::Constant(2, 0.5), reward);
  CHECK_FALSE(check_degeneracy(live, ThetaFamily::two_action(live)).degenerate());
}

TEST_CASE("rng streams are keyed, not sequential") {
  Rng a = make_stream(7, 3, 1), b = make_stream(7, 3, 1), c = make_stream(7, 4, 1);
  CHECK(a() == b());
  CHECK(make_stream(7, 3, 1)() != c());
  Rng r = make_stream(1, 0);
  Vector x = sample_dirichlet(r, 5, 0.5);
  CHECK(x.sum() == doctest::Approx(1.0));
  CHECK(x.minCoeff() >= 0.0);
}
