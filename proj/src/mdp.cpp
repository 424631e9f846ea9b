#include "invlab/mdp.hpp"

#include "invlab/errors.hpp"
#include "invlab/witness.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace invlab {
namespace {

std::vector<std::string> unique_names(const std::vector<std::string>& names) {
  std::map<std::string, int> seen;
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    int k = seen[n]++;
    out.push_back(k == 0 ? n : n + "#" + std::to_string(k + 1));
  }
  return out;
}

std::vector<std::string> generated_names(const char* prefix, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void check_distribution_rows(const Matrix& m, const char* what) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c)) || m(r, c) < 0.0) {
        std::ostringstream os;
        os << what << ": negative or non-finite entry at row " << r;
        throw ValidationError(os.str());
      }
    }
    double sum = m.row(r).sum();
    if (std::abs(sum - 1.0) > kStochasticTol) {
      std::ostringstream os;
      os.precision(17);
      os << what << ": row " << r << " sums to " << sum << ", not 1";
      throw ValidationError(os.str());
    }
  }
}

}  // namespace

TaskSpec validate_task(const RawTask& raw) {
  const auto ns = static_cast<Index>(raw.states.size());
  const auto na = static_cast<Index>(raw.actions.size());
  if (ns < 1) throw ValidationError("task needs at least one state");
  if (na < 2) throw ValidationError("task needs at least two actions");
  if (!(raw.gamma >= 0.0 && raw.gamma < 1.0)) throw ValidationError("gamma out of range [0,1)");
  if (static_cast<Index>(raw.d0.size()) != ns)
    throw ValidationError("dimension mismatch: d0 has " + std::to_string(raw.d0.size()) +
                          " entries for " + std::to_string(ns) + " states");
  if (static_cast<Index>(raw.reward.size()) != ns)
    throw ValidationError("dimension mismatch: reward has " + std::to_string(raw.reward.size()) +
                          " rows for " + std::to_string(ns) + " states");

  TaskSpec task;
  task.state_names = unique_names(raw.states);
  task.action_names = unique_names(raw.actions);
  task.gamma = raw.gamma;
  task.d0 = Vector(ns);
  task.reward = Matrix(ns, na);

  double total = 0;
  for (Index s = 0; s < ns; ++s) {
    double p = raw.d0[static_cast<std::size_t>(s)];
    if (!std::isfinite(p) || p < 0.0) throw ValidationError("d0 not a distribution: negative entry");
    task.d0(s) = p;
    total += p;
  }
  if (std::abs(total - 1.0) > kStochasticTol) throw ValidationError("d0 not a distribution");

  for (Index s = 0; s < ns; ++s) {
    const auto& row = raw.reward[static_cast<std::size_t>(s)];
    if (static_cast<Index>(row.size()) != na)
      throw ValidationError("dimension mismatch: reward row " + std::to_string(s) + " has " +
                            std::to_string(row.size()) + " columns for " + std::to_string(na) +
                            " actions");
    for (Index a = 0; a < na; ++a) {
      double r = row[static_cast<std::size_t>(a)];
      if (!std::isfinite(r)) throw ValidationError("reward entry is not finite");
      task.reward(s, a) = r;
    }
  }
  return task;
}

TaskSpec make_task(double gamma, Vector d0, Matrix reward) {
  RawTask raw;
  raw.states = generated_names("s", reward.rows());
  raw.actions = generated_names("a", reward.cols());
  raw.gamma = gamma;
  raw.d0.assign(d0.data(), d0.data() + d0.size());
  for (Index s = 0; s < reward.rows(); ++s) {
    std::vector<double> row(static_cast<std::size_t>(reward.cols()));
    for (Index a = 0; a < reward.cols(); ++a) row[static_cast<std::size_t>(a)] = reward(s, a);
    raw.reward.push_back(std::move(row));
  }
  return validate_task(raw);
}

// --- TransitionModel -------------------------------------------------------

TransitionModel::TransitionModel(std::vector<Matrix> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) throw ValidationError("transition model has no actions");
  const Index n = slices_.front().rows();
  for (std::size_t a = 0; a < slices_.size(); ++a) {
    Matrix& m = slices_[a];
    if (m.rows() != n || m.cols() != n)
      throw ValidationError("dimension mismatch: transition slice " + std::to_string(a) +
                            " is not " + std::to_string(n) + "x" + std::to_string(n));
    check_distribution_rows(m, ("transition slice " + std::to_string(a)).c_str());
    for (Index r = 0; r < n; ++r) m.row(r) /= m.row(r).sum();
  }
}

void TransitionModel::check_shape(const TaskSpec& task) const {
  if (num_actions() != task.num_actions() || num_states() != task.num_states())
    throw ValidationError("dimension mismatch: transition model is " + std::to_string(num_actions()) +
                          " actions x " + std::to_string(num_states()) + " states, task has " +
                          std::to_string(task.num_actions()) + " x " +
                          std::to_string(task.num_states()));
}

// --- Policy ----------------------------------------------------------------

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) throw ValidationError("policy is empty");
  check_distribution_rows(probs_, "policy");
  for (Index r = 0; r < probs_.rows(); ++r) probs_.row(r) /= probs_.row(r).sum();
}

Policy Policy::uniform(Index states, Index actions) {
  return Policy(Matrix::Constant(states, actions, 1.0 / static_cast<double>(actions)));
}

Policy Policy::constant_action(Index states, Index actions, Index action) {
  Matrix m = Matrix::Zero(states, actions);
  m.col(action).setOnes();
  return Policy(std::move(m));
}

Policy Policy::deterministic(std::span<const Index> choice, Index actions) {
  Matrix m = Matrix::Zero(static_cast<Index>(choice.size()), actions);
  for (std::size_t s = 0; s < choice.size(); ++s) m(static_cast<Index>(s), choice[s]) = 1.0;
  return Policy(std::move(m));
}

bool Policy::is_interior() const { return (probs_.array() > 0.0).all(); }

bool Policy::is_state_independent(double tol) const {
  for (Index s = 1; s < probs_.rows(); ++s)
    if ((probs_.row(s) - probs_.row(0)).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

void Policy::check_shape(const TaskSpec& task) const {
  if (num_states() != task.num_states() || num_actions() != task.num_actions())
    throw ValidationError("dimension mismatch: policy is " + std::to_string(num_states()) + "x" +
                          std::to_string(num_actions()));
}

ThetaFamily::ThetaFamily(Policy low, Policy high) : low_(std::move(low)), high_(std::move(high)) {
  if (low_.num_states() != high_.num_states() || low_.num_actions() != high_.num_actions())
    throw ValidationError("theta family endpoints have different shapes");
}

ThetaFamily ThetaFamily::two_action(const TaskSpec& task) {
  if (task.num_actions() != 2) throw ValidationError("theta family requires exactly two actions");
  return ThetaFamily(Policy::constant_action(task.num_states(), 2, 1),
                     Policy::constant_action(task.num_states(), 2, 0));
}

Policy ThetaFamily::at(double theta) const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta outside [0,1]");
  return Policy((1.0 - theta) * low_.probs() + theta * high_.probs());
}

void FinitePolicySet::check(const TaskSpec& task) const {
  if (policies.empty()) throw ValidationError("policy set is empty");
  for (const auto& p : policies) p.check_shape(task);
  if (!labels.empty() && labels.size() != policies.size())
    throw ValidationError("policy set has " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(policies.size()) + " policies");
}

// --- Evaluation --------------------------------------------------------------

Matrix policy_transition_matrix(const TransitionModel& t, const Policy& pi) {
  if (t.num_states() != pi.num_states() || t.num_actions() != pi.num_actions())
    throw ValidationError("dimension mismatch between transition model and policy");
  const Index n = t.num_states();
  Matrix p = Matrix::Zero(n, n);
  for (Index a = 0; a < t.num_actions(); ++a)
    p.noalias() += pi.probs().col(a).asDiagonal() * t.slice(a);
  return p;
}

namespace {

ValueReport solve_values(const TransitionModel& t, const TaskSpec& task, const Policy& pi,
                         const Matrix& reward) {
  t.check_shape(task);
  pi.check_shape(task);
  const Index n = task.num_states();
  ValueReport out;
  out.r_pi = pi.probs().cwiseProduct(reward).rowwise().sum();
  Matrix a = Matrix::Identity(n, n) - task.gamma * policy_transition_matrix(t, pi);
  out.v = a.partialPivLu().solve(out.r_pi);
  out.j = task.d0.dot(out.v);
  return out;
}

}  // namespace

ValueReport state_values(const TransitionModel& t, const TaskSpec& task, const Policy& pi) {
  return solve_values(t, task, pi, task.reward);
}

double policy_value(const TransitionModel& t, const TaskSpec& task, const Policy& pi) {
  return solve_values(t, task, pi, task.reward).j;
}

double policy_value(const TransitionModel& t, const TaskSpec& task, const Policy& pi,
                    const Matrix& reward) {
  if (reward.rows() != task.num_states() || reward.cols() != task.num_actions())
    throw ValidationError("dimension mismatch: reward matrix");
  return solve_values(t, task, pi, reward).j;
}

VisitCounts visit_counts(const TransitionModel& t, const TaskSpec& task, const Policy& pi) {
  t.check_shape(task);
  pi.check_shape(task);
  const Index n = task.num_states();
  Matrix a = Matrix::Identity(n, n) - task.gamma * policy_transition_matrix(t, pi).transpose();
  VisitCounts out;
  out.mu = a.partialPivLu().solve(task.d0);
  out.f = out.mu.asDiagonal() * pi.probs();
  return out;
}

OptimalSolution solve_optimal(const TransitionModel& t, const TaskSpec& task) {
  t.check_shape(task);
  const Index n = task.num_states();
  const Index na = task.num_actions();
  Vector v = Vector::Zero(n);
  Matrix q(n, na);
  OptimalSolution out;
  // Contraction factor gamma; cap the sweep count so gamma near 1 still ends.
  constexpr int kMaxIterations = 200000;
  for (out.iterations = 0; out.iterations < kMaxIterations; ++out.iterations) {
    for (Index a = 0; a < na; ++a) q.col(a) = task.reward.col(a) + task.gamma * t.slice(a) * v;
    Vector next = q.rowwise().maxCoeff();
    double diff = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (diff <= 1e-12) break;
  }
  for (Index a = 0; a < na; ++a) q.col(a) = task.reward.col(a) + task.gamma * t.slice(a) * v;
  std::vector<Index> choice(static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) q.row(s).maxCoeff(&choice[static_cast<std::size_t>(s)]);
  out.policy = Policy::deterministic(choice, na);
  ValueReport exact = state_values(t, task, out.policy);
  out.v = exact.v;
  out.j = exact.j;
  return out;
}

double optimal_value(const TransitionModel& t, const TaskSpec& task) {
  return solve_optimal(t, task).j;
}

std::string DegeneracyReport::describe() const {
  if (gamma_zero && stateless) return "gamma-zero,stateless";
  if (gamma_zero) return "gamma-zero";
  if (stateless) return "stateless";
  return "none";
}

namespace {

bool reward_is_stateless(const TaskSpec& task) {
  for (Index s = 1; s < task.num_states(); ++s)
    if ((task.reward.row(s) - task.reward.row(0)).cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

}  // namespace

DegeneracyReport check_degeneracy(const TaskSpec& task, std::span<const Policy> policies) {
  DegeneracyReport rep;
  rep.gamma_zero = task.gamma == 0.0;
  bool all_stateless = !policies.empty();
  for (const auto& p : policies) all_stateless = all_stateless && p.is_state_independent();
  rep.stateless = reward_is_stateless(task) && all_stateless;
  return rep;
}

DegeneracyReport check_degeneracy(const TaskSpec& task, const ThetaFamily& family) {
  const Policy ends[] = {family.low(), family.high()};
  return check_degeneracy(task, ends);
}

std::vector<Policy> deterministic_policies(Index states, Index actions, std::size_t limit) {
  double count = std::pow(static_cast<double>(actions), static_cast<double>(states));
  if (count > static_cast<double>(limit))
    throw ValidationError("too many deterministic policies to enumerate");
  std::vector<Policy> out;
  std::vector<Index> choice(static_cast<std::size_t>(states), 0);
  while (true) {
    out.push_back(Policy::deterministic(choice, actions));
    Index s = states - 1;
    while (s >= 0 && ++choice[static_cast<std::size_t>(s)] == actions) {
      choice[static_cast<std::size_t>(s)] = 0;
      --s;
    }
    if (s < 0) break;
  }
  return out;
}

// --- Witness helpers ---------------------------------------------------------

InversionWitness evaluate_pair(const TransitionModel& t1, const TransitionModel& t2,
                               const TaskSpec& task, const Policy& pi, const Policy& pi_prime) {
  InversionWitness w{pi, pi_prime, 0, 0};
  w.margin_1 = policy_value(t1, task, pi) - policy_value(t1, task, pi_prime);
  w.margin_2 = policy_value(t2, task, pi_prime) - policy_value(t2, task, pi);
  return w;
}

bool reverify(const InversionWitness& w, const TransitionModel& t1, const TransitionModel& t2,
              const TaskSpec& task, double eps, double tol) {
  InversionWitness fresh = evaluate_pair(t1, t2, task, w.pi, w.pi_prime);
  return fresh.margin_1 > eps && fresh.margin_2 > eps &&
         std::abs(fresh.margin_1 - w.margin_1) <= tol &&
         std::abs(fresh.margin_2 - w.margin_2) <= tol;
}

}  // namespace invlab
