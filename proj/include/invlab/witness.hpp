#pragma once

#include "invlab/mdp.hpp"

namespace invlab {

/// A policy pair on which two value functions disagree strictly:
/// J1(pi) > J1(pi') and J2(pi') > J2(pi).
struct InversionWitness {
  Policy pi;
  Policy pi_prime;
  double margin_1 = 0;  // J1(pi) - J1(pi')
  double margin_2 = 0;  // J2(pi') - J2(pi)

  double min_margin() const { return margin_1 < margin_2 ? margin_1 : margin_2; }
};

/// Builds a witness by evaluating both policies under both models.
/// The margins may be non-positive; callers decide whether that counts.
InversionWitness evaluate_pair(const TransitionModel& t1, const TransitionModel& t2,
                               const TaskSpec& task, const Policy& pi, const Policy& pi_prime);

/// Re-solves all four values from scratch and checks both margins exceed `eps`
/// and reproduce the stored ones within `tol`.
bool reverify(const InversionWitness& w, const TransitionModel& t1, const TransitionModel& t2,
              const TaskSpec& task, double eps = 0.0, double tol = 1e-9);

}  // namespace invlab
