#pragma once

// Data-parallel kernels. Each kernel has a plain serial reference in
// `serial::` and an OpenMP version in `parallel::` that returns bit-identical
// results: work items are independent and reductions use a total order.

#include "invlab/mdp.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace invlab::kernels {

struct PairChoice {
  std::size_t i = 0;  // plays pi
  std::size_t j = 0;  // plays pi'
  double margin_1 = 0;
  double margin_2 = 0;

  double score() const { return margin_1 < margin_2 ? margin_1 : margin_2; }
};

/// Strict total order: higher score first, then lexicographically smaller (i, j).
bool better(const PairChoice& a, const PairChoice& b);

namespace serial {

std::vector<double> evaluate_values(const TransitionModel& t, const TaskSpec& task,
                                    std::span<const Policy> policies);

/// Ordered pair (i != j) maximizing min(v1[i]-v1[j], v2[j]-v2[i]).
/// nullopt for fewer than two values.
std::optional<PairChoice> best_pair(std::span<const double> v1, std::span<const double> v2);

}  // namespace serial

namespace parallel {

std::vector<double> evaluate_values(const TransitionModel& t, const TaskSpec& task,
                                    std::span<const Policy> policies);

std::optional<PairChoice> best_pair(std::span<const double> v1, std::span<const double> v2);

}  // namespace parallel

/// Caps OpenMP parallelism (0 leaves the runtime default).
void set_thread_limit(int threads);
int max_threads();

}  // namespace invlab::kernels
