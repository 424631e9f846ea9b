#pragma once

// Detecting and measuring value inversions between two transition models on
// a fixed task.
//
// Verdicts over continuous policy sets are sampled certificates: an
// Exploitable verdict always carries a witness that re-verifies with fresh
// solves, while Trivial / Equivalent / NoInversionFound only record what the
// samples showed.

#include "invlab/geometry.hpp"
#include "invlab/mdp.hpp"
#include "invlab/witness.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace invlab {

enum class PolicySetKind {
  Interior,            // per-state Dirichlet(1) rows
  Stationary,          // all deterministic policies plus interior samples
  DeltaDeterministic,  // max_a pi(a|s) >= delta_det at every state
  EpsSuboptimal,       // J_ref(pi) >= J*_ref - eps
  Finite,              // an explicit list
};

std::string_view to_string(PolicySetKind kind);

struct PolicySetSpec {
  PolicySetKind kind = PolicySetKind::Interior;
  double delta_det = 0.0;
  double eps = 0.0;
  std::optional<TransitionModel> reference;  // EpsSuboptimal only
  FinitePolicySet finite;                    // Finite only
  std::size_t samples = 64;
  std::uint64_t seed = 0;

  static PolicySetSpec interior(std::size_t samples, std::uint64_t seed);
  static PolicySetSpec stationary(std::size_t samples, std::uint64_t seed);
  static PolicySetSpec delta_deterministic(double delta_det, std::size_t samples, std::uint64_t seed);
  static PolicySetSpec eps_suboptimal(double eps, TransitionModel reference, std::size_t samples,
                                      std::uint64_t seed);
  static PolicySetSpec finite_set(FinitePolicySet set);
};

/// Either a sampled/enumerated policy set or the theta line.
using PolicyDomain = std::variant<PolicySetSpec, ThetaFamily>;

/// Raised by sample_policies when EpsSuboptimal rejection sampling runs dry.
class RejectionBudgetExceeded : public std::runtime_error {
 public:
  RejectionBudgetExceeded(const std::string& what, double acceptance_rate)
      : std::runtime_error(what), acceptance_rate(acceptance_rate) {}
  double acceptance_rate;
};

/// Rejection attempts allowed per requested EpsSuboptimal sample.
inline constexpr std::size_t kRejectionBudgetPerSample = 20000;

/// Deterministic in (spec, task). Sample k depends only on (seed, k).
FinitePolicySet sample_policies(const PolicySetSpec& spec, const TaskSpec& task);

/// Evenly spaced theta values 0, 1/(n-1), ..., 1 and their policies.
std::vector<double> theta_grid(std::size_t n);
FinitePolicySet theta_policies(const ThetaFamily& family, std::span<const double> thetas);

/// True iff pi belongs to the set described by spec (Finite: exact membership).
bool in_policy_set(const PolicySetSpec& spec, const TaskSpec& task, const Policy& pi);

struct FiniteInversion {
  std::size_t pi_index = 0;
  std::size_t pi_prime_index = 0;
  double margin_1 = 0;
  double margin_2 = 0;
};

/// Best strict inversion among ordered index pairs: maximizes the smaller
/// margin, ties broken by lexicographic index order.
std::optional<FiniteInversion> check_inversion_finite(std::span<const double> values_1,
                                                      std::span<const double> values_2);

enum class Verdict { Trivial, Equivalent, Exploitable, NoInversionFound };
std::string_view to_string(Verdict v);

struct RelationTally {
  std::size_t both_zero = 0;
  std::size_t one_zero = 0;
  std::size_t positively_proportional = 0;
  std::size_t antiparallel = 0;
  std::size_t linearly_independent = 0;

  void add(RelationKind kind);
  std::size_t total() const {
    return both_zero + one_zero + positively_proportional + antiparallel + linearly_independent;
  }
};

struct Evidence {
  std::size_t samples = 0;
  std::size_t gradient_points = 0;
  std::uint64_t seed = 0;
  double value_tol = 0;
  RelationTolerances relation_tol;
  RelationTally tally;
  std::string domain;
  std::string degeneracy = "none";
  std::string note;
};

struct PairClassification {
  Verdict verdict = Verdict::NoInversionFound;
  int trivial_side = 0;  // 1, 2, or 3 (both) when Trivial
  std::optional<InversionWitness> witness;
  Evidence evidence;
};

struct ClassifyOptions {
  double value_tol = 1e-9;  // relative spread below which a side is trivial
  std::optional<RelationTolerances> relation_tol;  // defaults from the task
};

ClassifyOptions default_classify_options();

PairClassification classify_pair(const TransitionModel& t1, const TransitionModel& t2,
                                 const TaskSpec& task, const PolicyDomain& domain,
                                 const ClassifyOptions& options = default_classify_options());

struct GapEstimate {
  double gap = 0;
  std::optional<InversionWitness> witness;
  std::string method;  // "exact-finite", "theta-grid+golden", "sampled+multistart"
};

struct GapOptions {
  std::size_t theta_grid = 1001;
  bool refine = true;
  std::size_t multistart_starts = 16;
  std::size_t multistart_steps = 200;
};

/// Largest eps for which the pair is eps-exploitable, as found by the search
/// appropriate to the domain. Exact for finite sets; a witnessed lower bound otherwise.
GapEstimate exploitation_gap(const TransitionModel& t1, const TransitionModel& t2,
                             const TaskSpec& task, const PolicyDomain& domain,
                             const GapOptions& options = {});

struct EpsExploitResult {
  bool exploitable = false;
  std::optional<InversionWitness> witness;
};

EpsExploitResult is_eps_exploitable(const TransitionModel& t1, const TransitionModel& t2,
                                    const TaskSpec& task, const PolicyDomain& domain, double eps,
                                    const GapOptions& options = {});

struct CollinearityReport {
  bool collinear = false;
  Index rank_of_differences = 0;
};

/// Numeric rank of {F^pi - F^pi0}; singular values above tol * largest count.
CollinearityReport visit_collinearity(const FinitePolicySet& set, const TransitionModel& t,
                                      const TaskSpec& task, double tol = 1e-9);

/// Euclidean projection of each row onto {x >= floor, sum x = 1}.
Matrix project_rows_to_simplex(const Matrix& m, double floor = 0.0);

}  // namespace invlab
