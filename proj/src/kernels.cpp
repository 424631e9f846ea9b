#include "invlab/kernels.hpp"

#include "invlab/errors.hpp"
#include "invlab/rng.hpp"

#include <omp.h>

#include <limits>

namespace invlab {

Vector sample_dirichlet(Rng& rng, Index n, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("Dirichlet concentration must be positive");
  std::gamma_distribution<double> gamma(alpha, 1.0);
  Vector x(n);
  double sum = 0;
  do {
    for (Index i = 0; i < n; ++i) x(i) = gamma(rng);
    sum = x.sum();
  } while (!(sum > 0.0));
  return x / sum;
}

TransitionModel random_transition_model(Rng& rng, Index states, Index actions, double alpha) {
  std::vector<Matrix> slices;
  for (Index a = 0; a < actions; ++a) {
    Matrix m(states, states);
    for (Index s = 0; s < states; ++s) m.row(s) = sample_dirichlet(rng, states, alpha).transpose();
    slices.push_back(std::move(m));
  }
  return TransitionModel(std::move(slices));
}

Policy random_policy(Rng& rng, Index states, Index actions, double alpha) {
  Matrix m(states, actions);
  for (Index s = 0; s < states; ++s) m.row(s) = sample_dirichlet(rng, actions, alpha).transpose();
  return Policy(std::move(m));
}

namespace kernels {

bool better(const PairChoice& a, const PairChoice& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

namespace {

void check_lengths(std::span<const double> v1, std::span<const double> v2) {
  if (v1.size() != v2.size())
    throw ValidationError("value lists have different lengths (" + std::to_string(v1.size()) +
                          " vs " + std::to_string(v2.size()) + ")");
}

// Best pair whose first index lies in [begin, end).
std::optional<PairChoice> best_pair_rows(std::span<const double> v1, std::span<const double> v2,
                                         std::size_t begin, std::size_t end) {
  std::optional<PairChoice> best;
  const std::size_t n = v1.size();
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      PairChoice c{i, j, v1[i] - v1[j], v2[j] - v2[i]};
      if (!best || better(c, *best)) best = c;
    }
  }
  return best;
}

}  // namespace

namespace serial {

std::vector<double> evaluate_values(const TransitionModel& t, const TaskSpec& task,
                                    std::span<const Policy> policies) {
  std::vector<double> out;
  out.reserve(policies.size());
  for (const auto& p : policies) out.push_back(policy_value(t, task, p));
  return out;
}

std::optional<PairChoice> best_pair(std::span<const double> v1, std::span<const double> v2) {
  check_lengths(v1, v2);
  return best_pair_rows(v1, v2, 0, v1.size());
}

}  // namespace serial

namespace parallel {

std::vector<double> evaluate_values(const TransitionModel& t, const TaskSpec& task,
                                    std::span<const Policy> policies) {
  t.check_shape(task);
  for (const auto& p : policies) p.check_shape(task);
  std::vector<double> out(policies.size());
  const auto n = static_cast<long>(policies.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = policy_value(t, task, policies[static_cast<std::size_t>(k)]);
  return out;
}

std::optional<PairChoice> best_pair(std::span<const double> v1, std::span<const double> v2) {
  check_lengths(v1, v2);
  const auto n = static_cast<long>(v1.size());
  std::optional<PairChoice> best;
#pragma omp parallel
  {
    std::optional<PairChoice> local;
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i) {
      auto row = best_pair_rows(v1, v2, static_cast<std::size_t>(i), static_cast<std::size_t>(i) + 1);
      if (row && (!local || better(*row, *local))) local = row;
    }
#pragma omp critical(invlab_best_pair)
    {
      if (local && (!best || better(*local, *best))) best = local;
    }
  }
  return best;
}

}  // namespace parallel

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace kernels
}  // namespace invlab
