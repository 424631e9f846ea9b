#pragma once

#include "invlab/mdp.hpp"

#include <cstdint>
#include <random>

namespace invlab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of the independent stream `index` under `master`. `salt` separates
/// unrelated uses of the same (master, index), e.g. policies vs. models.
/// Streams depend only on these three numbers, never on thread scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index, std::uint64_t salt = 0) {
  return mix64(mix64(master ^ mix64(salt)) + 0x9E3779B97F4A7C15ull * (index + 1));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index, std::uint64_t salt = 0) {
  return Rng(stream_seed(master, index, salt));
}

/// Symmetric Dirichlet(alpha) draw of dimension n.
Vector sample_dirichlet(Rng& rng, Index n, double alpha);

/// Every row of every action slice drawn from symmetric Dirichlet(alpha).
TransitionModel random_transition_model(Rng& rng, Index states, Index actions, double alpha);

/// Per-state Dirichlet(alpha) rows.
Policy random_policy(Rng& rng, Index states, Index actions, double alpha = 1.0);

}  // namespace invlab
