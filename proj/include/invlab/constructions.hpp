#pragma once

// Concrete MDPs, counterexamples and reductions, plus the random search
// used to find exploitable pairs.

#include "invlab/exploit.hpp"
#include "invlab/mdp.hpp"
#include "invlab/witness.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace invlab {

/// Three-state, two-action task with R(s,a) = 1{s = s0}, gamma = 0.9 and
/// uniform d0, together with the shared model T1, a trivial partner T2a
/// (both actions identical) and T2b = 0.7 T1 + 0.1 (blend toward uniform).
struct FigureSetup {
  TaskSpec task;
  TransitionModel t1;
  TransitionModel t2a;
  TransitionModel t2b;
};

FigureSetup figure_task_and_models();

/// The printed T2b matrices, for checking the blend.
TransitionModel figure_t2b_literal();

/// pi(a0|s) = theta, pi(a1|s) = 1 - theta at every state.
Policy theta_policy(double theta, const TaskSpec& task);

/// Two states, d0 = (1, 0), R = 1{s = 0}, state 1 absorbing. Under t1 action 0
/// self-loops at state 0 and action 1 leaves with probability delta; t2 swaps
/// the actions. Both deterministic gaps equal sim_bound(gamma, delta).
struct TightnessSetup {
  TaskSpec task;
  TransitionModel t1;
  TransitionModel t2;
};

TightnessSetup tightness_mdp(double gamma, double delta);

/// Two states, d0 uniform, R = 1{(s0,a0)} + 1{(s1,a1)}, and the policies
/// pi0 = (a0, a0), pi1 = (a0, a1), pi2 = (a1, a0). Every model orders them
/// J(pi1) = 1/(1-gamma) > J(pi0) > 0 = J(pi2).
struct FiniteCounterexample {
  TaskSpec task;
  FinitePolicySet policies;  // labels "pi0", "pi1", "pi2"
};

FiniteCounterexample finite_ce_task(double gamma);

/// R = 1{a = a0}, R' = 1{a = a1}; pi always plays a0, pi' always plays a1.
/// The pair is hackable with both margins 1/(1-gamma), and no transition
/// model changes either ordering.
struct HackingCounterexample {
  Matrix reward;
  Matrix reward_prime;
  Policy pi;
  Policy pi_prime;
  double margin = 0;  // 1/(1-gamma)
};

HackingCounterexample hacking_ce(const TransitionModel& t, const TaskSpec& task);

class CorruptWitness : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// R' = F^{pi'} - F^{pi} under t. In the environment fixed at t the reward
/// pair (task.reward, R') is hackable on {pi, pi'}.
struct HackingReduction {
  Matrix reward_prime;
  double margin_reward = 0;        // J_R(pi) - J_R(pi')
  double margin_reward_prime = 0;  // J_R'(pi') - J_R'(pi)
  double delta_f_squared = 0;      // |F^{pi'} - F^{pi}|^2
};

HackingReduction exploitation_to_hacking_reward(const TransitionModel& t, const TaskSpec& task,
                                                const InversionWitness& w);

struct SearchConfig {
  double dirichlet_alpha = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  PolicyDomain family;  // ThetaFamily or a sampled PolicySetSpec
  double min_gap = 0.0;
  std::size_t screen_grid = 201;  // theta grid used to screen each trial
  std::optional<TransitionModel> base_model;  // fixed first model; drawn when absent

  explicit SearchConfig(PolicyDomain family_) : family(std::move(family_)) {}
};

struct SearchPair {
  std::size_t trial = 0;
  TransitionModel t1;
  TransitionModel t2;
  GapEstimate gap;
};

struct SearchResult {
  std::vector<SearchPair> pairs;  // gap descending, then trial index
  std::size_t trials_run = 0;
  std::uint64_t seed = 0;
};

enum class Execution { Serial, Parallel };

/// Draws model pairs trial by trial (streams keyed by (seed, trial)), keeps
/// those with a verified witness and gap >= min_gap. The result does not
/// depend on the execution mode or thread count.
SearchResult dirichlet_search(const TaskSpec& task, const SearchConfig& config,
                              Execution exec = Execution::Parallel);

}  // namespace invlab
