#include "invlab/constructions.hpp"

#include "invlab/errors.hpp"
#include "invlab/kernels.hpp"
#include "invlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace invlab {
namespace {

Matrix rows3(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), 3);
  Index r = 0;
  for (auto row : rows) {
    Index c = 0;
    for (double x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

}  // namespace

FigureSetup figure_task_and_models() {
  Matrix reward = Matrix::Zero(3, 2);
  reward.row(0).setOnes();
  FigureSetup fs{make_task(0.9, Vector::Constant(3, 1.0 / 3.0), reward), {}, {}, {}};

  Matrix a0 = rows3({{0.7, 0.2, 0.1}, {0.5, 0.3, 0.2}, {0.4, 0.3, 0.3}});
  Matrix a1 = rows3({{0.1, 0.3, 0.6}, {0.1, 0.2, 0.7}, {0.1, 0.1, 0.8}});
  fs.t1 = TransitionModel({a0, a1});

  Matrix shared = rows3({{0.4, 0.3, 0.3}, {0.2, 0.5, 0.3}, {0.3, 0.3, 0.4}});
  fs.t2a = TransitionModel({shared, shared});

  const double alpha = 0.3;
  const double uniform = alpha / 3.0;
  fs.t2b = TransitionModel({((1.0 - alpha) * a0).array() + uniform, ((1.0 - alpha) * a1).array() + uniform});
  return fs;
}

TransitionModel figure_t2b_literal() {
  return TransitionModel({rows3({{0.59, 0.24, 0.17}, {0.45, 0.31, 0.24}, {0.38, 0.31, 0.31}}),
                          rows3({{0.17, 0.31, 0.52}, {0.17, 0.24, 0.59}, {0.17, 0.17, 0.66}})});
}

Policy theta_policy(double theta, const TaskSpec& task) {
  return ThetaFamily::two_action(task).at(theta);
}

TightnessSetup tightness_mdp(double gamma, double delta) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma out of range (0,1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta out of range (0,1]");
  Matrix reward(2, 2);
  reward << 1, 1, 0, 0;
  Vector d0(2);
  d0 << 1, 0;
  TightnessSetup ts{make_task(gamma, d0, reward), {}, {}};

  Matrix stay(2, 2), leave(2, 2);
  stay << 1, 0, 0, 1;
  leave << 1 - delta, delta, 0, 1;
  ts.t1 = TransitionModel({stay, leave});
  ts.t2 = TransitionModel({leave, stay});
  return ts;
}

FiniteCounterexample finite_ce_task(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma out of range (0,1)");
  Matrix reward(2, 2);
  reward << 1, 0, 0, 1;
  FiniteCounterexample ce{make_task(gamma, Vector::Constant(2, 0.5), reward), {}};
  const Index pi0[] = {0, 0};
  const Index pi1[] = {0, 1};
  const Index pi2[] = {1, 0};
  ce.policies.policies = {Policy::deterministic(pi0, 2), Policy::deterministic(pi1, 2),
                          Policy::deterministic(pi2, 2)};
  ce.policies.labels = {"pi0", "pi1", "pi2"};
  return ce;
}

HackingCounterexample hacking_ce(const TransitionModel& t, const TaskSpec& task) {
  t.check_shape(task);
  if (task.gamma == 0.0) throw ValidationError("hacking counterexample needs gamma > 0");
  const Index ns = task.num_states();
  const Index na = task.num_actions();
  HackingCounterexample ce;
  ce.reward = Matrix::Zero(ns, na);
  ce.reward.col(0).setOnes();
  ce.reward_prime = Matrix::Zero(ns, na);
  ce.reward_prime.col(1).setOnes();
  ce.pi = Policy::constant_action(ns, na, 0);
  ce.pi_prime = Policy::constant_action(ns, na, 1);
  ce.margin = task.horizon();
  return ce;
}

HackingReduction exploitation_to_hacking_reward(const TransitionModel& t, const TaskSpec& task,
                                                const InversionWitness& w) {
  t.check_shape(task);
  Matrix f = visit_counts(t, task, w.pi).f;
  Matrix f_prime = visit_counts(t, task, w.pi_prime).f;
  HackingReduction out;
  out.reward_prime = f_prime - f;
  out.delta_f_squared = out.reward_prime.squaredNorm();
  if (!(out.delta_f_squared > 0.0))
    throw CorruptWitness("corrupt witness: both policies have identical visit counts");
  out.margin_reward = policy_value(t, task, w.pi) - policy_value(t, task, w.pi_prime);
  out.margin_reward_prime = policy_value(t, task, w.pi_prime, out.reward_prime) -
                            policy_value(t, task, w.pi, out.reward_prime);
  return out;
}

namespace {

constexpr std::uint64_t kSaltModels = 11;

struct TrialOutcome {
  bool kept = false;
  SearchPair pair;
};

// Cheap screen: theta grid or the sampled set, no refinement.
double screen_gap(const TransitionModel& t1, const TransitionModel& t2, const TaskSpec& task,
                  const FinitePolicySet& screen) {
  auto v1 = kernels::serial::evaluate_values(t1, task, screen.policies);
  auto v2 = kernels::serial::evaluate_values(t2, task, screen.policies);
  auto best = kernels::serial::best_pair(v1, v2);
  return best ? best->score() : 0.0;
}

TrialOutcome run_trial(const TaskSpec& task, const SearchConfig& config,
                       const FinitePolicySet& screen, std::size_t trial) {
  Rng rng = make_stream(config.seed, trial, kSaltModels);
  const Index ns = task.num_states();
  const Index na = task.num_actions();
  TrialOutcome out;
  out.pair.trial = trial;
  out.pair.t1 = config.base_model ? *config.base_model
                                  : random_transition_model(rng, ns, na, config.dirichlet_alpha);
  out.pair.t2 = random_transition_model(rng, ns, na, config.dirichlet_alpha);

  // Refinement raises the gap only slightly above the screen, so clear misses stop here.
  double screened = screen_gap(out.pair.t1, out.pair.t2, task, screen);
  if (!(screened > 0.0) || screened < 0.5 * config.min_gap) return out;
  GapOptions opts;
  out.pair.gap = exploitation_gap(out.pair.t1, out.pair.t2, task, config.family, opts);
  out.kept = out.pair.gap.witness && out.pair.gap.gap >= config.min_gap &&
             reverify(*out.pair.gap.witness, out.pair.t1, out.pair.t2, task);
  return out;
}

}  // namespace

SearchResult dirichlet_search(const TaskSpec& task, const SearchConfig& config, Execution exec) {
  if (!(config.dirichlet_alpha > 0.0)) throw ValidationError("Dirichlet alpha must be positive");
  if (config.trials < 1) throw ValidationError("search needs at least one trial");
  if (!(config.min_gap >= 0.0)) throw ValidationError("min_gap must be nonnegative");
  if (config.base_model) config.base_model->check_shape(task);

  FinitePolicySet screen;
  if (const auto* fam = std::get_if<ThetaFamily>(&config.family)) {
    fam->low().check_shape(task);
    auto grid = theta_grid(config.screen_grid);
    screen = theta_policies(*fam, grid);
  } else {
    screen = sample_policies(std::get<PolicySetSpec>(config.family), task);
  }

  std::vector<TrialOutcome> outcomes(config.trials);
  const auto n = static_cast<long>(config.trials);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long k = 0; k < n; ++k)
      outcomes[static_cast<std::size_t>(k)] = run_trial(task, config, screen, static_cast<std::size_t>(k));
  } else {
    for (long k = 0; k < n; ++k)
      outcomes[static_cast<std::size_t>(k)] = run_trial(task, config, screen, static_cast<std::size_t>(k));
  }

  SearchResult result;
  result.trials_run = config.trials;
  result.seed = config.seed;
  for (auto& o : outcomes)
    if (o.kept) result.pairs.push_back(std::move(o.pair));
  std::stable_sort(result.pairs.begin(), result.pairs.end(), [](const SearchPair& a, const SearchPair& b) {
    if (a.gap.gap != b.gap.gap) return a.gap.gap > b.gap.gap;
    return a.trial < b.trial;
  });
  return result;
}

}  // namespace invlab
