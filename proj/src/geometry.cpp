#include "invlab/geometry.hpp"

#include "invlab/errors.hpp"

#include <cmath>
#include <limits>

namespace invlab {

TangentDirection::TangentDirection(Matrix dir) : dir_(std::move(dir)) {
  for (Index r = 0; r < dir_.rows(); ++r) {
    double scale = std::max(1.0, dir_.row(r).cwiseAbs().maxCoeff());
    if (std::abs(dir_.row(r).sum()) > 1e-12 * scale)
      throw ValidationError("tangent direction row " + std::to_string(r) + " does not sum to zero");
  }
}

TangentDirection TangentDirection::project(const Matrix& m) {
  Matrix out = m;
  out.colwise() -= m.rowwise().mean();
  return TangentDirection(std::move(out));
}

Matrix raw_value_gradient(const TransitionModel& t, const TaskSpec& task, const Policy& pi) {
  ValueReport values = state_values(t, task, pi);
  VisitCounts counts = visit_counts(t, task, pi);
  Matrix q(task.num_states(), task.num_actions());
  for (Index a = 0; a < task.num_actions(); ++a)
    q.col(a) = task.reward.col(a) + task.gamma * t.slice(a) * values.v;
  return counts.mu.asDiagonal() * q;
}

ValueGradient value_gradient(const TransitionModel& t, const TaskSpec& task, const Policy& pi) {
  return ValueGradient{TangentDirection::project(raw_value_gradient(t, task, pi)).dir(), pi};
}

double directional_derivative(const ValueGradient& g, const TangentDirection& v) {
  if (g.grad.rows() != v.dir().rows() || g.grad.cols() != v.dir().cols())
    throw ValidationError("dimension mismatch between gradient and direction");
  return g.grad.cwiseProduct(v.dir()).sum();
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::BothZero: return "BothZero";
    case RelationKind::OneZero: return "OneZero";
    case RelationKind::PositivelyProportional: return "PositivelyProportional";
    case RelationKind::Antiparallel: return "Antiparallel";
    case RelationKind::LinearlyIndependent: return "LinearlyIndependent";
  }
  return "?";
}

RelationTolerances default_relation_tolerances(const TaskSpec& task) {
  RelationTolerances tol;
  double scale = task.reward.norm() * task.horizon();
  tol.zero_abs = 1e-10 * (scale > 0.0 ? scale : 1.0);
  return tol;
}

GradientRelation gradient_relation(const Matrix& g1, const Matrix& g2, const RelationTolerances& tol) {
  if (g1.rows() != g2.rows() || g1.cols() != g2.cols())
    throw ValidationError("dimension mismatch between gradients");
  const double n1 = g1.norm();
  const double n2 = g2.norm();
  const bool z1 = n1 <= tol.zero_abs;
  const bool z2 = n2 <= tol.zero_abs;
  if (z1 && z2) return {RelationKind::BothZero, std::nullopt};
  if (z1 || z2) return {RelationKind::OneZero, std::nullopt};

  const double cosine = g1.cwiseProduct(g2).sum() / (n1 * n2);
  const double gram = 1.0 - cosine * cosine;
  if (gram > tol.gram) return {RelationKind::LinearlyIndependent, std::nullopt};

  const double lambda = g2.cwiseProduct(g1).sum() / (n1 * n1);
  // |lambda| = n2/n1 > 0 here, so the sign decides.
  return {lambda > 0.0 ? RelationKind::PositivelyProportional : RelationKind::Antiparallel, lambda};
}

GradientRelation gradient_relation(const ValueGradient& g1, const ValueGradient& g2,
                                   const RelationTolerances& tol) {
  return gradient_relation(g1.grad, g2.grad, tol);
}

Matrix inversion_direction(const Matrix& g1, const Matrix& g2, const RelationTolerances& tol) {
  GradientRelation rel = gradient_relation(g1, g2, tol);
  if (rel.kind == RelationKind::Antiparallel) return g1 / g1.squaredNorm();
  if (rel.kind != RelationKind::LinearlyIndependent)
    throw NoInversionDirection(std::string("no inversion direction: gradients are ") +
                               std::string(to_string(rel.kind)));
  // v = a g1 + b g2 with the 2x2 Gram system [<gi,gj>] (a,b) = (1,-1).
  Eigen::Matrix2d gram;
  gram(0, 0) = g1.squaredNorm();
  gram(1, 1) = g2.squaredNorm();
  gram(0, 1) = gram(1, 0) = g1.cwiseProduct(g2).sum();
  Eigen::Vector2d coef = gram.fullPivLu().solve(Eigen::Vector2d(1.0, -1.0));
  return coef(0) * g1 + coef(1) * g2;
}

TangentDirection inversion_direction(const ValueGradient& g1, const ValueGradient& g2,
                                     const RelationTolerances& tol) {
  return TangentDirection::project(inversion_direction(g1.grad, g2.grad, tol));
}

double simplex_step_limit(const Policy& pi, const Matrix& v) {
  double limit = std::numeric_limits<double>::infinity();
  for (Index s = 0; s < v.rows(); ++s)
    for (Index a = 0; a < v.cols(); ++a)
      if (v(s, a) != 0.0) limit = std::min(limit, pi(s, a) / std::abs(v(s, a)));
  return limit;
}

std::optional<InversionWitness> local_inversion_witness(const TransitionModel& t1,
                                                        const TransitionModel& t2,
                                                        const TaskSpec& task, const Policy& pi,
                                                        const TangentDirection& v) {
  pi.check_shape(task);
  const Matrix& dir = v.dir();
  const double limit = simplex_step_limit(pi, dir);
  if (!(limit > 0.0)) throw LeavesSimplex("pi +/- eps v leaves the simplex for every eps");
  if (!std::isfinite(limit)) return std::nullopt;  // v == 0

  double eps = limit;
  for (int k = 1; k <= 8; ++k) {
    eps *= 0.1;
    Policy plus(pi.probs() + eps * dir);
    Policy minus(pi.probs() - eps * dir);
    InversionWitness w = evaluate_pair(t1, t2, task, plus, minus);
    if (w.margin_1 > 0.0 && w.margin_2 > 0.0) return w;
  }
  return std::nullopt;
}

}  // namespace invlab
