#pragma once

// Core finite-MDP types and exact (linear-solve) evaluation.
//
// A task is an MDP with the transition model removed: states, actions, the
// initial distribution d0, the reward matrix R(s,a) and the discount gamma.
// Transition models are kept separate so the same task can be evaluated
// under several models (and the same model under several rewards).

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace invlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance for row sums / distributions.
inline constexpr double kStochasticTol = 1e-9;

/// Unvalidated task contents, as read from a document.
struct RawTask {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  double gamma = 0.0;
  std::vector<double> d0;
  std::vector<std::vector<double>> reward;  // [state][action]
};

struct TaskSpec {
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  double gamma = 0.0;
  Vector d0;
  Matrix reward;  // |S| x |A|

  Index num_states() const { return reward.rows(); }
  Index num_actions() const { return reward.cols(); }
  double horizon() const { return 1.0 / (1.0 - gamma); }
};

/// Checks every task invariant; each failure mode has its own message.
/// Duplicate names are made unique by appending "#k".
TaskSpec validate_task(const RawTask& raw);

/// Builds a task from matrices, generating names "s0.." and "a0..".
TaskSpec make_task(double gamma, Vector d0, Matrix reward);

/// Per-action row-stochastic |S| x |S| matrices, T(s'|s,a) = slice(a)(s,s').
class TransitionModel {
 public:
  TransitionModel() = default;
  /// Rows within kStochasticTol of 1 are renormalized; anything else throws.
  explicit TransitionModel(std::vector<Matrix> slices);

  Index num_actions() const { return static_cast<Index>(slices_.size()); }
  Index num_states() const { return slices_.empty() ? 0 : slices_.front().rows(); }
  const Matrix& slice(Index action) const { return slices_[static_cast<std::size_t>(action)]; }
  const std::vector<Matrix>& slices() const { return slices_; }
  double prob(Index from, Index action, Index to) const { return slice(action)(from, to); }

  /// Throws ValidationError if the shape does not match the task.
  void check_shape(const TaskSpec& task) const;

  friend bool operator==(const TransitionModel&, const TransitionModel&) = default;

 private:
  std::vector<Matrix> slices_;
};

/// Stationary stochastic policy pi(a|s), stored |S| x |A|.
class Policy {
 public:
  Policy() = default;
  explicit Policy(Matrix probs);

  static Policy uniform(Index states, Index actions);
  /// Plays `action` with probability 1 at every state.
  static Policy constant_action(Index states, Index actions, Index action);
  /// Deterministic policy with choice[s] selected at state s.
  static Policy deterministic(std::span<const Index> choice, Index actions);

  const Matrix& probs() const { return probs_; }
  double operator()(Index s, Index a) const { return probs_(s, a); }
  Index num_states() const { return probs_.rows(); }
  Index num_actions() const { return probs_.cols(); }

  /// True iff every entry is strictly positive (membership in the interior).
  bool is_interior() const;
  /// True iff every row equals the first row.
  bool is_state_independent(double tol = 1e-12) const;
  void check_shape(const TaskSpec& task) const;

 private:
  Matrix probs_;
};

/// The line of policies (1-theta)*low + theta*high, theta in [0,1].
class ThetaFamily {
 public:
  ThetaFamily(Policy low, Policy high);

  /// low = "always a1", high = "always a0", so that pi_theta(a0|s) = theta.
  static ThetaFamily two_action(const TaskSpec& task);

  Policy at(double theta) const;
  const Policy& low() const { return low_; }
  const Policy& high() const { return high_; }
  /// high - low; a tangent direction along the family.
  Matrix direction() const { return high_.probs() - low_.probs(); }

 private:
  Policy low_;
  Policy high_;
};

struct FinitePolicySet {
  std::vector<Policy> policies;
  std::vector<std::string> labels;

  std::size_t size() const { return policies.size(); }
  void check(const TaskSpec& task) const;
};

struct VisitCounts {
  Vector mu;  // discounted state occupancy
  Matrix f;   // discounted state-action visit counts
};

struct ValueReport {
  Vector v;      // V^pi
  double j = 0;  // d0 . V^pi
  Vector r_pi;   // expected one-step reward per state
};

/// P^pi(s'|s) = sum_a pi(a|s) T(s'|s,a).
Matrix policy_transition_matrix(const TransitionModel& t, const Policy& pi);

/// Solves (I - gamma P^pi) V = r^pi with a dense LU factorization.
ValueReport state_values(const TransitionModel& t, const TaskSpec& task, const Policy& pi);

/// Shorthand for state_values(...).j.
double policy_value(const TransitionModel& t, const TaskSpec& task, const Policy& pi);

/// Same as policy_value but with an explicit reward matrix in place of task.reward.
double policy_value(const TransitionModel& t, const TaskSpec& task, const Policy& pi,
                    const Matrix& reward);

/// mu solves (I - gamma P^T) mu = d0; f(s,a) = mu(s) pi(a|s).
VisitCounts visit_counts(const TransitionModel& t, const TaskSpec& task, const Policy& pi);

struct OptimalSolution {
  double j = 0;
  Vector v;
  Policy policy;  // greedy deterministic policy
  int iterations = 0;
};

/// Value iteration to 1e-12 sup-norm, then exact evaluation of the greedy policy.
OptimalSolution solve_optimal(const TransitionModel& t, const TaskSpec& task);
double optimal_value(const TransitionModel& t, const TaskSpec& task);

struct DegeneracyReport {
  bool gamma_zero = false;
  bool stateless = false;

  bool degenerate() const { return gamma_zero || stateless; }
  std::string describe() const;
};

/// Flags the two situations in which the value cannot depend on the model.
DegeneracyReport check_degeneracy(const TaskSpec& task, std::span<const Policy> policies);
DegeneracyReport check_degeneracy(const TaskSpec& task, const ThetaFamily& family);

/// Every deterministic policy, in lexicographic order of the action choice
/// (state 0 varies slowest). Throws if there would be more than `limit`.
std::vector<Policy> deterministic_policies(Index states, Index actions, std::size_t limit = 1u << 16);

}  // namespace invlab
