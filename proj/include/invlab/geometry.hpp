#pragma once

// First-order structure of J on the product of action simplices.
//
// Tangent vectors are |S| x |A| matrices whose rows sum to zero; the
// gradient of J is the orthogonal projection of dJ/dpi(a|s) onto that
// subspace (row-mean subtraction). Two value functions admit a local
// inversion exactly when their projected gradients are not positively
// proportional, and inversion_direction constructs the direction to step.

#include "invlab/mdp.hpp"
#include "invlab/witness.hpp"

#include <optional>
#include <stdexcept>
#include <string_view>

namespace invlab {

class TangentDirection {
 public:
  TangentDirection() = default;
  /// Throws unless every row sums to zero within 1e-12 (scaled by the row's magnitude).
  explicit TangentDirection(Matrix dir);
  /// Orthogonal projection of an arbitrary matrix onto row-sum-zero matrices.
  static TangentDirection project(const Matrix& m);

  const Matrix& dir() const { return dir_; }

 private:
  Matrix dir_;
};

struct ValueGradient {
  Matrix grad;  // projected, rows sum to zero
  Policy base_policy;
};

/// Projected gradient of J at pi: row-centred mu(s) * Q(s,a).
/// Boundary policies are accepted; the result is then a one-sided object.
ValueGradient value_gradient(const TransitionModel& t, const TaskSpec& task, const Policy& pi);

/// Unprojected dJ/dpi(a|s) = mu(s) Q(s,a).
Matrix raw_value_gradient(const TransitionModel& t, const TaskSpec& task, const Policy& pi);

double directional_derivative(const ValueGradient& g, const TangentDirection& v);

enum class RelationKind { BothZero, OneZero, PositivelyProportional, Antiparallel, LinearlyIndependent };

std::string_view to_string(RelationKind kind);

struct GradientRelation {
  RelationKind kind = RelationKind::BothZero;
  std::optional<double> lambda;  // set when the gradients are dependent and nonzero
};

struct RelationTolerances {
  double zero_abs = 1e-10;  // |g| at or below this counts as zero
  double gram = 1e-10;      // Gram determinant of unit vectors at or below this is dependent
};

/// zero_abs = 1e-10 * ||R||_F / (1 - gamma), gram = 1e-10.
RelationTolerances default_relation_tolerances(const TaskSpec& task);

/// Works on any pair of same-shaped arrays (full gradients or restrictions).
GradientRelation gradient_relation(const Matrix& g1, const Matrix& g2, const RelationTolerances& tol);
GradientRelation gradient_relation(const ValueGradient& g1, const ValueGradient& g2,
                                   const RelationTolerances& tol);

/// Direction v with <g1,v> = 1 and <g2,v> = -1. Minimum-norm solution when the
/// gradients are independent, g1/|g1|^2 when they are antiparallel.
/// Throws NoInversionDirection otherwise.
Matrix inversion_direction(const Matrix& g1, const Matrix& g2, const RelationTolerances& tol);
TangentDirection inversion_direction(const ValueGradient& g1, const ValueGradient& g2,
                                     const RelationTolerances& tol);

class NoInversionDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when pi +/- eps v leaves the simplex for every scheduled eps.
class LeavesSimplex : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Largest t such that pi + t v and pi - t v both stay nonnegative.
double simplex_step_limit(const Policy& pi, const Matrix& v);

/// Tries eps = 10^-k * simplex_step_limit(pi, v), k = 1..8, and returns the first
/// (pi + eps v, pi - eps v) pair whose margins are both strictly positive.
std::optional<InversionWitness> local_inversion_witness(const TransitionModel& t1,
                                                        const TransitionModel& t2,
                                                        const TaskSpec& task, const Policy& pi,
                                                        const TangentDirection& v);

}  // namespace invlab
