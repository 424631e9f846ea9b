#include "invlab/exploit.hpp"

#include "invlab/errors.hpp"
#include "invlab/kernels.hpp"
#include "invlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace invlab {

std::string_view to_string(PolicySetKind kind) {
  switch (kind) {
    case PolicySetKind::Interior: return "interior";
    case PolicySetKind::Stationary: return "stationary";
    case PolicySetKind::DeltaDeterministic: return "delta-deterministic";
    case PolicySetKind::EpsSuboptimal: return "eps-suboptimal";
    case PolicySetKind::Finite: return "finite";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Trivial: return "Trivial";
    case Verdict::Equivalent: return "Equivalent";
    case Verdict::Exploitable: return "Exploitable";
    case Verdict::NoInversionFound: return "NoInversionFound";
  }
  return "?";
}

PolicySetSpec PolicySetSpec::interior(std::size_t samples, std::uint64_t seed) {
  PolicySetSpec s;
  s.kind = PolicySetKind::Interior;
  s.samples = samples;
  s.seed = seed;
  return s;
}

PolicySetSpec PolicySetSpec::stationary(std::size_t samples, std::uint64_t seed) {
  PolicySetSpec s = interior(samples, seed);
  s.kind = PolicySetKind::Stationary;
  return s;
}

PolicySetSpec PolicySetSpec::delta_deterministic(double delta_det, std::size_t samples,
                                                 std::uint64_t seed) {
  PolicySetSpec s = interior(samples, seed);
  s.kind = PolicySetKind::DeltaDeterministic;
  s.delta_det = delta_det;
  return s;
}

PolicySetSpec PolicySetSpec::eps_suboptimal(double eps, TransitionModel reference,
                                            std::size_t samples, std::uint64_t seed) {
  PolicySetSpec s = interior(samples, seed);
  s.kind = PolicySetKind::EpsSuboptimal;
  s.eps = eps;
  s.reference = std::move(reference);
  return s;
}

PolicySetSpec PolicySetSpec::finite_set(FinitePolicySet set) {
  PolicySetSpec s;
  s.kind = PolicySetKind::Finite;
  s.samples = set.size();
  s.finite = std::move(set);
  return s;
}

// --- Sampling ----------------------------------------------------------------

namespace {

constexpr std::uint64_t kSaltInterior = 1;
constexpr std::uint64_t kSaltDelta = 2;
constexpr std::uint64_t kSaltSuboptimal = 3;
constexpr std::size_t kMaxEnumerated = 1024;

Policy interior_sample(Rng& rng, const TaskSpec& task) {
  while (true) {
    Policy p = random_policy(rng, task.num_states(), task.num_actions(), 1.0);
    if (p.is_interior()) return p;
  }
}

/// Raises the largest action of every row to at least delta_det, shrinking the
/// others proportionally.
Policy make_delta_deterministic(const Policy& p, double delta_det) {
  Matrix m = p.probs();
  for (Index s = 0; s < m.rows(); ++s) {
    Index top = 0;
    double mx = m.row(s).maxCoeff(&top);
    if (mx >= delta_det) continue;
    double scale = (1.0 - delta_det) / (1.0 - mx);
    m.row(s) *= scale;
    m(s, top) = delta_det;
  }
  return Policy(std::move(m));
}

void validate_spec(const PolicySetSpec& spec, const TaskSpec& task) {
  switch (spec.kind) {
    case PolicySetKind::DeltaDeterministic:
      if (!(spec.delta_det >= 1.0 / static_cast<double>(task.num_actions()) && spec.delta_det < 1.0))
        throw ValidationError("delta_det must lie in [1/|A|, 1)");
      break;
    case PolicySetKind::EpsSuboptimal:
      if (!(spec.eps > 0.0)) throw ValidationError("eps-suboptimal sets need eps > 0");
      if (!spec.reference) throw ValidationError("eps-suboptimal sets need a reference model");
      spec.reference->check_shape(task);
      break;
    case PolicySetKind::Finite: spec.finite.check(task); break;
    default: break;
  }
  if (spec.kind != PolicySetKind::Finite && spec.samples == 0 &&
      spec.kind != PolicySetKind::Stationary)
    throw ValidationError("policy set needs at least one sample");
}

std::string det_label(const Policy& p) {
  std::string s = "det:";
  for (Index st = 0; st < p.num_states(); ++st) {
    Index a = 0;
    p.probs().row(st).maxCoeff(&a);
    s += std::to_string(a);
  }
  return s;
}

}  // namespace

FinitePolicySet sample_policies(const PolicySetSpec& spec, const TaskSpec& task) {
  validate_spec(spec, task);
  FinitePolicySet out;
  const Index ns = task.num_states();
  const Index na = task.num_actions();

  switch (spec.kind) {
    case PolicySetKind::Finite: return spec.finite;

    case PolicySetKind::Stationary: {
      if (std::pow(static_cast<double>(na), static_cast<double>(ns)) <= kMaxEnumerated) {
        for (auto& p : deterministic_policies(ns, na, kMaxEnumerated)) {
          out.labels.push_back(det_label(p));
          out.policies.push_back(std::move(p));
        }
      }
      [[fallthrough]];
    }
    case PolicySetKind::Interior:
      for (std::size_t k = 0; k < spec.samples; ++k) {
        Rng rng = make_stream(spec.seed, k, kSaltInterior);
        out.policies.push_back(interior_sample(rng, task));
        out.labels.push_back("sample:" + std::to_string(k));
      }
      return out;

    case PolicySetKind::DeltaDeterministic:
      for (std::size_t k = 0; k < spec.samples; ++k) {
        Rng rng = make_stream(spec.seed, k, kSaltDelta);
        out.policies.push_back(make_delta_deterministic(interior_sample(rng, task), spec.delta_det));
        out.labels.push_back("sample:" + std::to_string(k));
      }
      return out;

    case PolicySetKind::EpsSuboptimal: {
      const double threshold = optimal_value(*spec.reference, task) - spec.eps;
      std::size_t attempts = 0;
      for (std::size_t k = 0; k < spec.samples; ++k) {
        Rng rng = make_stream(spec.seed, k, kSaltSuboptimal);
        bool accepted = false;
        for (std::size_t tries = 0; tries < kRejectionBudgetPerSample; ++tries) {
          ++attempts;
          Policy p = interior_sample(rng, task);
          if (policy_value(*spec.reference, task, p) >= threshold) {
            out.policies.push_back(std::move(p));
            out.labels.push_back("sample:" + std::to_string(k));
            accepted = true;
            break;
          }
        }
        if (!accepted) {
          double rate = static_cast<double>(k) / static_cast<double>(attempts);
          std::ostringstream os;
          os << "rejection budget exceeded for eps-suboptimal sample " << k << " (acceptance rate "
             << rate << " over " << attempts << " attempts)";
          throw RejectionBudgetExceeded(os.str(), rate);
        }
      }
      return out;
    }
  }
  return out;
}

std::vector<double> theta_grid(std::size_t n) {
  if (n < 2) throw ValidationError("theta grid needs at least two points");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

FinitePolicySet theta_policies(const ThetaFamily& family, std::span<const double> thetas) {
  FinitePolicySet out;
  for (double th : thetas) {
    out.policies.push_back(family.at(th));
    std::ostringstream os;
    os.precision(17);
    os << "theta:" << th;
    out.labels.push_back(os.str());
  }
  return out;
}

bool in_policy_set(const PolicySetSpec& spec, const TaskSpec& task, const Policy& pi) {
  pi.check_shape(task);
  switch (spec.kind) {
    case PolicySetKind::Interior: return pi.is_interior();
    case PolicySetKind::Stationary: return true;
    case PolicySetKind::DeltaDeterministic:
      return (pi.probs().rowwise().maxCoeff().array() >= spec.delta_det - 1e-12).all();
    case PolicySetKind::EpsSuboptimal:
      return policy_value(*spec.reference, task, pi) >= optimal_value(*spec.reference, task) - spec.eps;
    case PolicySetKind::Finite:
      for (const auto& p : spec.finite.policies)
        if ((p.probs() - pi.probs()).cwiseAbs().maxCoeff() <= 1e-12) return true;
      return false;
  }
  return false;
}

std::optional<FiniteInversion> check_inversion_finite(std::span<const double> values_1,
                                                      std::span<const double> values_2) {
  auto best = kernels::parallel::best_pair(values_1, values_2);
  if (!best || !(best->margin_1 > 0.0 && best->margin_2 > 0.0)) return std::nullopt;
  return FiniteInversion{best->i, best->j, best->margin_1, best->margin_2};
}

// --- Classification ----------------------------------------------------------

void RelationTally::add(RelationKind kind) {
  switch (kind) {
    case RelationKind::BothZero: ++both_zero; break;
    case RelationKind::OneZero: ++one_zero; break;
    case RelationKind::PositivelyProportional: ++positively_proportional; break;
    case RelationKind::Antiparallel: ++antiparallel; break;
    case RelationKind::LinearlyIndependent: ++linearly_independent; break;
  }
}

ClassifyOptions default_classify_options() { return ClassifyOptions{}; }

namespace {

// A domain resolved to concrete policies plus, for each, the tangent basis the
// gradient is restricted to (empty = the full tangent space).
struct ResolvedDomain {
  FinitePolicySet set;
  std::optional<Matrix> line;  // theta families move only along this direction
  std::string name;
  std::uint64_t seed = 0;
};

constexpr std::size_t kClassifyThetaSamples = 64;

ResolvedDomain resolve(const PolicyDomain& domain, const TaskSpec& task, std::size_t theta_points) {
  ResolvedDomain r;
  if (const auto* fam = std::get_if<ThetaFamily>(&domain)) {
    fam->low().check_shape(task);
    auto grid = theta_grid(theta_points);
    r.set = theta_policies(*fam, grid);
    r.line = fam->direction();
    r.name = "theta";
  } else {
    const auto& spec = std::get<PolicySetSpec>(domain);
    r.set = sample_policies(spec, task);
    r.name = std::string(to_string(spec.kind));
    r.seed = spec.seed;
  }
  return r;
}

double spread(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

int sign_with_tol(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

bool orderings_agree(const std::vector<double>& v1, const std::vector<double>& v2, double tol1,
                     double tol2) {
  for (std::size_t i = 0; i < v1.size(); ++i)
    for (std::size_t j = i + 1; j < v1.size(); ++j)
      if (sign_with_tol(v1[i] - v1[j], tol1) != sign_with_tol(v2[i] - v2[j], tol2)) return false;
  return true;
}

}  // namespace

PairClassification classify_pair(const TransitionModel& t1, const TransitionModel& t2,
                                 const TaskSpec& task, const PolicyDomain& domain,
                                 const ClassifyOptions& options) {
  t1.check_shape(task);
  t2.check_shape(task);
  PairClassification out;
  Evidence& ev = out.evidence;
  ev.value_tol = options.value_tol;
  ev.relation_tol = options.relation_tol.value_or(default_relation_tolerances(task));

  ResolvedDomain dom = resolve(domain, task, kClassifyThetaSamples);
  ev.domain = dom.name;
  ev.seed = dom.seed;
  ev.samples = dom.set.size();
  ev.note = "sampled certificate over " + std::to_string(ev.samples) +
            " policies; only Exploitable verdicts are proofs";

  DegeneracyReport deg = std::holds_alternative<ThetaFamily>(domain)
                             ? check_degeneracy(task, std::get<ThetaFamily>(domain))
                             : check_degeneracy(task, dom.set.policies);
  ev.degeneracy = deg.describe();
  if (deg.degenerate()) {
    out.verdict = Verdict::Equivalent;
    ev.note = "degenerate task (" + deg.describe() + "): the value does not depend on the model";
    return out;
  }

  // (1) triviality
  auto v1 = kernels::parallel::evaluate_values(t1, task, dom.set.policies);
  auto v2 = kernels::parallel::evaluate_values(t2, task, dom.set.policies);
  const double tol1 = options.value_tol * (1.0 + max_abs(v1));
  const double tol2 = options.value_tol * (1.0 + max_abs(v2));
  const bool trivial1 = spread(v1) <= tol1;
  const bool trivial2 = spread(v2) <= tol2;
  if (trivial1 || trivial2) {
    out.verdict = Verdict::Trivial;
    out.trivial_side = (trivial1 ? 1 : 0) + (trivial2 ? 2 : 0);
    return out;
  }

  // (2) direct scan of the sampled pairs
  if (auto inv = check_inversion_finite(v1, v2)) {
    out.verdict = Verdict::Exploitable;
    out.witness = evaluate_pair(t1, t2, task, dom.set.policies[inv->pi_index],
                                dom.set.policies[inv->pi_prime_index]);
    return out;
  }

  // (3) gradient sweep at interior samples
  for (const Policy& pi : dom.set.policies) {
    if (!pi.is_interior()) continue;
    ++ev.gradient_points;
    Matrix g1 = value_gradient(t1, task, pi).grad;
    Matrix g2 = value_gradient(t2, task, pi).grad;
    Matrix r1 = g1, r2 = g2;
    if (dom.line) {
      r1 = Matrix::Constant(1, 1, g1.cwiseProduct(*dom.line).sum());
      r2 = Matrix::Constant(1, 1, g2.cwiseProduct(*dom.line).sum());
    }
    GradientRelation rel = gradient_relation(r1, r2, ev.relation_tol);
    ev.tally.add(rel.kind);
    if (out.witness) continue;
    if (rel.kind != RelationKind::LinearlyIndependent && rel.kind != RelationKind::Antiparallel) continue;

    Matrix v = inversion_direction(r1, r2, ev.relation_tol);
    Matrix dir = dom.line ? Matrix(v(0, 0) * *dom.line) : v;
    auto w = local_inversion_witness(t1, t2, task, pi, TangentDirection::project(dir));
    if (w && reverify(*w, t1, t2, task)) out.witness = std::move(w);
  }
  if (out.witness) {
    out.verdict = Verdict::Exploitable;
    return out;
  }

  // (4) equivalence certificate
  const bool gradients_agree = ev.tally.antiparallel == 0 && ev.tally.linearly_independent == 0;
  if (gradients_agree && orderings_agree(v1, v2, tol1, tol2)) {
    out.verdict = Verdict::Equivalent;
  } else {
    out.verdict = Verdict::NoInversionFound;
  }
  return out;
}

// --- Gap estimation ----------------------------------------------------------

Matrix project_rows_to_simplex(const Matrix& m, double floor) {
  const Index n = m.cols();
  const double total = 1.0 - floor * static_cast<double>(n);
  if (total < 0.0) throw ValidationError("simplex floor too large for the number of actions");
  Matrix out(m.rows(), n);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < n; ++c) u[static_cast<std::size_t>(c)] = m(r, c) - floor;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0;
    double shift = 0;
    for (Index k = 0; k < n; ++k) {
      cumulative += u[static_cast<std::size_t>(k)];
      double candidate = (cumulative - total) / static_cast<double>(k + 1);
      if (u[static_cast<std::size_t>(k)] - candidate > 0.0) shift = candidate;
    }
    for (Index c = 0; c < n; ++c) out(r, c) = std::max(m(r, c) - floor - shift, 0.0) + floor;
  }
  return out;
}

namespace {

GapEstimate gap_from_choice(const TransitionModel& t1, const TransitionModel& t2,
                            const TaskSpec& task, const FinitePolicySet& set,
                            const std::optional<kernels::PairChoice>& best, std::string method) {
  GapEstimate est;
  est.method = std::move(method);
  if (best && best->margin_1 > 0.0 && best->margin_2 > 0.0) {
    est.witness = evaluate_pair(t1, t2, task, set.policies[best->i], set.policies[best->j]);
    est.gap = std::max(0.0, est.witness->min_margin());
  }
  return est;
}

// Golden-section maximization of f on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iterations; ++k) {
    if (fc >= fd) {
      b = d; d = c; fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

GapEstimate theta_gap(const TransitionModel& t1, const TransitionModel& t2, const TaskSpec& task,
                      const ThetaFamily& family, const GapOptions& options) {
  family.low().check_shape(task);
  auto grid = theta_grid(options.theta_grid);
  FinitePolicySet set = theta_policies(family, grid);
  auto v1 = kernels::parallel::evaluate_values(t1, task, set.policies);
  auto v2 = kernels::parallel::evaluate_values(t2, task, set.policies);
  auto best = kernels::parallel::best_pair(v1, v2);
  GapEstimate est = gap_from_choice(t1, t2, task, set, best, "theta-grid");
  if (!est.witness || !options.refine) return est;

  est.method = "theta-grid+golden";
  const double cell = 1.0 / static_cast<double>(options.theta_grid - 1);
  auto j1 = [&](double th) { return policy_value(t1, task, family.at(th)); };
  auto j2 = [&](double th) { return policy_value(t2, task, family.at(th)); };
  auto score = [&](double th, double thp) { return std::min(j1(th) - j1(thp), j2(thp) - j2(th)); };

  double th = grid[best->i], thp = grid[best->j];
  double current = score(th, thp);
  const double lo_a = std::max(0.0, th - cell), hi_a = std::min(1.0, th + cell);
  const double lo_b = std::max(0.0, thp - cell), hi_b = std::min(1.0, thp + cell);
  for (int round = 0; round < 4; ++round) {
    double cand = golden_max([&](double x) { return score(x, thp); }, lo_a, hi_a, 60);
    if (score(cand, thp) > current) { th = cand; current = score(th, thp); }
    cand = golden_max([&](double x) { return score(th, x); }, lo_b, hi_b, 60);
    if (score(th, cand) > current) { thp = cand; current = score(th, thp); }
  }
  InversionWitness refined = evaluate_pair(t1, t2, task, family.at(th), family.at(thp));
  if (refined.min_margin() > est.gap) {
    est.witness = refined;
    est.gap = refined.min_margin();
  }
  return est;
}

// Projects a step back into the policy set; nullopt means the step is rejected.
std::optional<Policy> retract(const PolicySetSpec& spec, const TaskSpec& task, const Matrix& m,
                              double eps_threshold) {
  switch (spec.kind) {
    case PolicySetKind::Interior: return Policy(project_rows_to_simplex(m, 1e-9));
    case PolicySetKind::Stationary: return Policy(project_rows_to_simplex(m, 0.0));
    case PolicySetKind::DeltaDeterministic:
      return make_delta_deterministic(Policy(project_rows_to_simplex(m, 0.0)), spec.delta_det);
    case PolicySetKind::EpsSuboptimal: {
      Policy p(project_rows_to_simplex(m, 1e-9));
      if (policy_value(*spec.reference, task, p) >= eps_threshold) return p;
      return std::nullopt;
    }
    case PolicySetKind::Finite: return std::nullopt;
  }
  return std::nullopt;
}

GapEstimate sampled_gap(const TransitionModel& t1, const TransitionModel& t2, const TaskSpec& task,
                        const PolicySetSpec& spec, const GapOptions& options) {
  FinitePolicySet set = sample_policies(spec, task);
  auto v1 = kernels::parallel::evaluate_values(t1, task, set.policies);
  auto v2 = kernels::parallel::evaluate_values(t2, task, set.policies);
  auto best = kernels::parallel::best_pair(v1, v2);
  if (spec.kind == PolicySetKind::Finite) return gap_from_choice(t1, t2, task, set, best, "exact-finite");

  GapEstimate est = gap_from_choice(t1, t2, task, set, best, "sampled+multistart");
  if (set.size() < 2 || options.multistart_starts == 0) return est;

  // Starts: the best-scoring sampled pairs.
  std::vector<kernels::PairChoice> pairs;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j)
      if (i != j) pairs.push_back({i, j, v1[i] - v1[j], v2[j] - v2[i]});
  const std::size_t starts = std::min(options.multistart_starts, pairs.size());
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<long>(starts), pairs.end(), kernels::better);

  const double eps_threshold = spec.kind == PolicySetKind::EpsSuboptimal
                                   ? optimal_value(*spec.reference, task) - spec.eps
                                   : 0.0;
  std::optional<InversionWitness> best_w = est.witness;
  double best_score = est.witness ? est.witness->min_margin() : -std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < starts; ++s) {
    Policy a = set.policies[pairs[s].i];
    Policy b = set.policies[pairs[s].j];
    for (std::size_t it = 0; it < options.multistart_steps; ++it) {
      InversionWitness w = evaluate_pair(t1, t2, task, a, b);
      if (w.margin_1 > 0.0 && w.margin_2 > 0.0 && w.min_margin() > best_score) {
        best_score = w.min_margin();
        best_w = w;
      }
      // Subgradient of min(m1, m2); both pieces when they are within a small band.
      const double band = 1e-3 * std::max(std::abs(w.margin_1), std::abs(w.margin_2));
      Matrix da = Matrix::Zero(task.num_states(), task.num_actions());
      Matrix db = da;
      if (w.margin_1 <= w.margin_2 + band) {
        da += raw_value_gradient(t1, task, a);
        db -= raw_value_gradient(t1, task, b);
      }
      if (w.margin_2 <= w.margin_1 + band) {
        da -= raw_value_gradient(t2, task, a);
        db += raw_value_gradient(t2, task, b);
      }
      da = TangentDirection::project(da).dir();
      db = TangentDirection::project(db).dir();
      const double norm = std::sqrt(da.squaredNorm() + db.squaredNorm());
      if (!(norm > 0.0)) break;
      const double step = 0.1 / (1.0 + static_cast<double>(it)) / norm;
      auto na = retract(spec, task, a.probs() + step * da, eps_threshold);
      auto nb = retract(spec, task, b.probs() + step * db, eps_threshold);
      if (na) a = std::move(*na);
      if (nb) b = std::move(*nb);
    }
  }
  if (best_w && reverify(*best_w, t1, t2, task)) {
    est.witness = best_w;
    est.gap = std::max(0.0, best_w->min_margin());
  }
  return est;
}

}  // namespace

GapEstimate exploitation_gap(const TransitionModel& t1, const TransitionModel& t2,
                             const TaskSpec& task, const PolicyDomain& domain,
                             const GapOptions& options) {
  t1.check_shape(task);
  t2.check_shape(task);
  if (const auto* fam = std::get_if<ThetaFamily>(&domain)) return theta_gap(t1, t2, task, *fam, options);
  return sampled_gap(t1, t2, task, std::get<PolicySetSpec>(domain), options);
}

EpsExploitResult is_eps_exploitable(const TransitionModel& t1, const TransitionModel& t2,
                                    const TaskSpec& task, const PolicyDomain& domain, double eps,
                                    const GapOptions& options) {
  if (!(eps >= 0.0)) throw ValidationError("eps must be nonnegative");
  GapEstimate est = exploitation_gap(t1, t2, task, domain, options);
  EpsExploitResult out;
  if (est.witness && est.witness->margin_1 > eps && est.witness->margin_2 > eps) {
    out.exploitable = true;
    out.witness = est.witness;
  }
  return out;
}

CollinearityReport visit_collinearity(const FinitePolicySet& set, const TransitionModel& t,
                                      const TaskSpec& task, double tol) {
  set.check(task);
  if (set.size() < 2) throw ValidationError("collinearity needs at least two policies");
  const Index dim = task.num_states() * task.num_actions();
  Matrix f0 = visit_counts(t, task, set.policies.front()).f;
  Matrix diffs(static_cast<Index>(set.size() - 1), dim);
  for (std::size_t k = 1; k < set.size(); ++k) {
    Matrix d = visit_counts(t, task, set.policies[k]).f - f0;
    diffs.row(static_cast<Index>(k - 1)) = Eigen::Map<const Vector>(d.data(), dim).transpose();
  }
  Eigen::JacobiSVD<Matrix> svd(diffs);
  const Vector& sv = svd.singularValues();
  CollinearityReport rep;
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  if (top > 0.0)
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol * top) ++rep.rank_of_differences;
  rep.collinear = rep.rank_of_differences <= 1;
  return rep;
}

}  // namespace invlab
