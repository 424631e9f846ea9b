#include "commands.hpp"

#include "invlab/bounds.hpp"
#include "invlab/constructions.hpp"
#include "invlab/errors.hpp"
#include "invlab/exploit.hpp"
#include "invlab/geometry.hpp"
#include "invlab/io.hpp"
#include "invlab/kernels.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

namespace invlab::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;
using io::format_number;

/// Everything an output document records about how it was produced.
struct RunManifest {
  std::vector<std::string> command_line;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> input_digests;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void input(const std::string& path) { input_digests[path] = io::file_digest(path); }

  Json to_json() const {
    Json m;
    m["tool"] = "invlab";
    m["version"] = kToolVersion;
    m["command_line"] = command_line;
    m["seeds"] = seeds;
    m["tolerances"] = tolerances;
    m["inputs"] = input_digests;
    m["threads"] = kernels::max_threads();
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
  }
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    io::write_text(out_path, text);
  }
}

void emit_document(const RunManifest& manifest, Json result, const std::string& out_path,
                   std::ostream& out) {
  Json doc;
  doc["manifest"] = manifest.to_json();
  doc["result"] = std::move(result);
  emit(doc.dump(2) + "\n", out_path, out);
}

struct FamilyFlags {
  std::string family;
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  double delta_det = 0.9;
  double eps = 0.0;
};

void add_family_flags(CLI::App* cmd, FamilyFlags& f, const std::string& default_family) {
  f.family = default_family;
  cmd->add_option("--family", f.family,
                  "policy set: theta | stationary | interior | delta-det | eps-subopt | deterministic")
      ->capture_default_str();
  cmd->add_option("--samples", f.samples, "sampled policies")->capture_default_str();
  cmd->add_option("--seed", f.seed, "sampling seed")->capture_default_str();
  cmd->add_option("--delta-det", f.delta_det, "threshold for delta-det sets")->capture_default_str();
}

/// eps-subopt sets use `reference` (the first model) for J*.
PolicyDomain make_domain(const FamilyFlags& f, const TaskSpec& task, const TransitionModel& reference) {
  if (f.family == "theta") return ThetaFamily::two_action(task);
  if (f.family == "stationary") return PolicySetSpec::stationary(f.samples, f.seed);
  if (f.family == "interior") return PolicySetSpec::interior(f.samples, f.seed);
  if (f.family == "delta-det") return PolicySetSpec::delta_deterministic(f.delta_det, f.samples, f.seed);
  if (f.family == "eps-subopt") return PolicySetSpec::eps_suboptimal(f.eps, reference, f.samples, f.seed);
  if (f.family == "deterministic") {
    FinitePolicySet set;
    set.policies = deterministic_policies(task.num_states(), task.num_actions());
    return PolicySetSpec::finite_set(std::move(set));
  }
  throw ValidationError("unknown policy family '" + f.family + "'");
}

std::string default_family(const TaskSpec& task) { return task.num_actions() == 2 ? "theta" : "stationary"; }

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string task, t1, t2, out;
  FamilyFlags fam;
  double tol = 1e-9;
  std::optional<double> zero_tol;
  double gram_tol = 1e-10;
  std::optional<double> eps;
};

int cmd_analyze(const AnalyzeArgs& a, RunManifest& manifest, std::ostream& out) {
  TaskSpec task = io::load_task(a.task);
  TransitionModel t1 = io::load_transitions(a.t1, task);
  TransitionModel t2 = io::load_transitions(a.t2, task);
  for (const auto& p : {a.task, a.t1, a.t2}) manifest.input(p);

  FamilyFlags fam = a.fam;
  if (a.eps) fam.eps = *a.eps;
  PolicyDomain domain = make_domain(fam, task, t1);

  ClassifyOptions opts;
  opts.value_tol = a.tol;
  RelationTolerances rel = default_relation_tolerances(task);
  if (a.zero_tol) rel.zero_abs = *a.zero_tol;
  rel.gram = a.gram_tol;
  opts.relation_tol = rel;
  manifest.seeds["sampling"] = fam.seed;
  manifest.tolerances = {{"value", opts.value_tol}, {"zero_gradient", rel.zero_abs}, {"gram", rel.gram}};

  PairClassification cls = classify_pair(t1, t2, task, domain, opts);

  Json result;
  result["classification"] = io::to_json(cls);
  const double delta = tv_distance(t1, t2);
  Json bounds;
  if (a.eps) {
    Certificate cert = certify_unexploitable(task, *a.eps, t1, t2);
    bounds = io::to_json(cert.report);
    if (cert.refused) bounds["refused"] = cert.reason;
  } else {
    bounds = io::to_json(bounds_report(task.gamma, delta, 0.0));
  }
  if (!reward_in_unit_interval(task)) {
    bounds["eps_star"] = nullptr;
    bounds["sqrt_eps_threshold"] = nullptr;
    bounds["note"] = "reward outside [0,1]: bounds do not apply";
  }
  result["bounds"] = std::move(bounds);
  emit_document(manifest, std::move(result), a.out, out);
  return kOk;
}

// --- gap -----------------------------------------------------------------------

struct GapArgs {
  std::string task, t1, t2, out;
  FamilyFlags fam;
  std::size_t grid = 1001;
  bool no_refine = false;
};

int cmd_gap(const GapArgs& a, RunManifest& manifest, std::ostream& out) {
  TaskSpec task = io::load_task(a.task);
  TransitionModel t1 = io::load_transitions(a.t1, task);
  TransitionModel t2 = io::load_transitions(a.t2, task);
  for (const auto& p : {a.task, a.t1, a.t2}) manifest.input(p);
  FamilyFlags fam = a.fam;
  if (fam.family.empty()) fam.family = default_family(task);
  PolicyDomain domain = make_domain(fam, task, t1);
  GapOptions opts;
  opts.theta_grid = a.grid;
  opts.refine = !a.no_refine;
  manifest.seeds["sampling"] = fam.seed;

  GapEstimate est = exploitation_gap(t1, t2, task, domain, opts);
  Json result = io::to_json(est);
  result["family"] = fam.family;
  result["delta"] = tv_distance(t1, t2);
  if (reward_in_unit_interval(task)) result["sim_bound"] = sim_bound(task.gamma, tv_distance(t1, t2));
  emit_document(manifest, std::move(result), a.out, out);
  return kOk;
}

// --- horizon -------------------------------------------------------------------

struct HorizonArgs {
  std::optional<double> eps, delta;
  std::size_t grid = 0;
  double eps_min = 0.1, eps_max = 10.0, delta_min = 0.01, delta_max = 1.0;
  std::string out;
};

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  v.back() = hi;
  return v;
}

std::string horizon_csv(std::size_t n, double eps_min, double eps_max, double delta_min, double delta_max) {
  std::ostringstream os;
  os << "eps,delta,H\n";
  for (double e : log_space(eps_min, eps_max, n))
    for (double d : log_space(delta_min, delta_max, n))
      os << format_number(e) << ',' << format_number(d) << ',' << format_number(safe_horizon(e, d)) << '\n';
  return os.str();
}

int cmd_horizon(const HorizonArgs& a, RunManifest& manifest, std::ostream& out) {
  if (a.grid > 0) {
    if (!(a.eps_min > 0 && a.eps_max >= a.eps_min && a.delta_min > 0 && a.delta_max <= 1.0 &&
          a.delta_max >= a.delta_min))
      throw ValidationError("grid bounds must satisfy 0 < eps_min <= eps_max and 0 < delta_min <= delta_max <= 1");
    emit(horizon_csv(a.grid, a.eps_min, a.eps_max, a.delta_min, a.delta_max), a.out, out);
    if (!a.out.empty()) io::write_text(a.out + ".manifest.json", manifest.to_json().dump(2) + "\n");
    return kOk;
  }
  if (!a.eps || !a.delta) throw ValidationError("horizon needs --eps and --delta, or --grid N");
  Json result;
  result["eps"] = *a.eps;
  result["delta"] = *a.delta;
  result["H"] = safe_horizon(*a.eps, *a.delta);
  result["sqrt_threshold"] = sqrt_threshold(*a.eps, *a.delta);
  emit_document(manifest, std::move(result), a.out, out);
  return kOk;
}

// --- search --------------------------------------------------------------------

struct SearchArgs {
  std::string task, base, out;
  double alpha = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double min_gap = 0.0;
  std::string family = "theta";
  std::size_t samples = 64;
  std::size_t grid = 201;
};

int cmd_search(const SearchArgs& a, RunManifest& manifest, std::ostream& out) {
  TaskSpec task = a.task.empty() ? figure_task_and_models().task : io::load_task(a.task);
  if (!a.task.empty()) manifest.input(a.task);
  PolicyDomain family = ThetaFamily::two_action(task);
  if (a.family == "interior") {
    family = PolicySetSpec::interior(a.samples, a.seed);
  } else if (a.family != "theta") {
    throw ValidationError("search --family must be theta or interior");
  }
  SearchConfig config(family);
  config.dirichlet_alpha = a.alpha;
  config.trials = a.trials;
  config.seed = a.seed;
  config.min_gap = a.min_gap;
  config.screen_grid = a.grid;
  if (!a.base.empty()) {
    config.base_model = io::load_transitions(a.base, task);
    manifest.input(a.base);
  }
  manifest.seeds["search"] = a.seed;
  manifest.tolerances = {{"min_gap", a.min_gap}, {"alpha", a.alpha}};

  SearchResult res = dirichlet_search(task, config);
  Json result = io::to_json(res);
  result["task"] = io::to_json(task);
  result["family"] = a.family;
  emit_document(manifest, std::move(result), a.out, out);
  return kOk;
}

// --- reproduce -----------------------------------------------------------------

struct ReproduceArgs {
  std::string target, outdir = ".", t2c, t2d;
  std::size_t grid = 1001;
};

std::string panel_csv(const FigureSetup& fs, const TransitionModel& t2, std::size_t n) {
  std::ostringstream os;
  os << "theta,J1,J2\n";
  ThetaFamily fam = ThetaFamily::two_action(fs.task);
  for (double th : theta_grid(n)) {
    Policy p = fam.at(th);
    os << format_number(th) << ',' << format_number(policy_value(fs.t1, fs.task, p)) << ','
       << format_number(policy_value(t2, fs.task, p)) << '\n';
  }
  return os.str();
}

std::string table_row(const std::string& panel, const FigureSetup& fs, const TransitionModel& t2,
                      std::size_t grid) {
  const double delta = tv_distance(fs.t1, t2);
  GapOptions opts;
  opts.theta_grid = grid;
  GapEstimate g = exploitation_gap(fs.t1, t2, fs.task, ThetaFamily::two_action(fs.task), opts);
  const double h = fs.task.horizon();
  std::ostringstream os;
  os << panel << ',' << format_number(delta) << ',' << format_number(g.gap) << ','
     << format_number(sim_bound(fs.task.gamma, delta)) << ',' << format_number(delta * h * h) << ",\n";
  return os.str();
}

int cmd_reproduce(const ReproduceArgs& a, RunManifest& manifest) {
  FigureSetup fs = figure_task_and_models();
  fs::create_directories(a.outdir);
  const fs::path dir(a.outdir);
  if (a.target == "figures") {
    io::write_text(dir / "panel_a.csv", panel_csv(fs, fs.t2a, a.grid));
    io::write_text(dir / "panel_b.csv", panel_csv(fs, fs.t2b, a.grid));
    io::write_text(dir / "horizon_contour.csv", horizon_csv(50, 0.1, 10.0, 0.01, 1.0));
  } else if (a.target == "table") {
    std::string csv = "panel,delta,gap,thm_threshold,sqrt_threshold,note\n";
    csv += table_row("a", fs, fs.t2a, a.grid);
    csv += table_row("b", fs, fs.t2b, a.grid);
    for (auto [panel, path] : {std::pair{"c", a.t2c}, std::pair{"d", a.t2d}}) {
      if (path.empty()) {
        csv += std::string(panel) + ",NA,NA,NA,NA,transition model not bundled; pass --t2" + panel + "\n";
      } else {
        manifest.input(path);
        csv += table_row(panel, fs, io::load_transitions(path, fs.task), a.grid);
      }
    }
    io::write_text(dir / "table.csv", csv);
  } else {
    throw ValidationError("unknown reproduce target '" + a.target + "' (expected figures or table)");
  }
  io::write_text(dir / ("manifest_" + a.target + ".json"), manifest.to_json().dump(2) + "\n");
  return kOk;
}

// --- gradient ------------------------------------------------------------------

struct GradientArgs {
  std::string task, t, policy, out;
  std::optional<double> theta;
};

int cmd_gradient(const GradientArgs& a, std::ostream& out) {
  TaskSpec task = io::load_task(a.task);
  TransitionModel t = io::load_transitions(a.t, task);
  Policy pi;
  if (!a.policy.empty()) {
    pi = io::load_policy(a.policy, task);
  } else if (a.theta) {
    pi = theta_policy(*a.theta, task);
  } else {
    throw ValidationError("gradient needs --policy FILE or --theta X");
  }
  ValueGradient g = value_gradient(t, task, pi);
  std::ostringstream os;
  os << "state,action,value\n";
  for (Index s = 0; s < g.grad.rows(); ++s)
    for (Index act = 0; act < g.grad.cols(); ++act)
      os << task.state_names[static_cast<std::size_t>(s)] << ','
         << task.action_names[static_cast<std::size_t>(act)] << ',' << format_number(g.grad(s, act)) << '\n';
  emit(os.str(), a.out, out);
  return kOk;
}

void apply_thread_env() {
  if (const char* env = std::getenv("INVLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) kernels::set_thread_limit(n);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  apply_thread_env();
  CLI::App app{"Value-inversion analysis for finite MDPs", "invlab"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "classify a pair of transition models");
  c_analyze->add_option("--task", analyze.task, "task document")->required();
  c_analyze->add_option("--t1", analyze.t1, "first transition model")->required();
  c_analyze->add_option("--t2", analyze.t2, "second transition model")->required();
  add_family_flags(c_analyze, analyze.fam, "stationary");
  c_analyze->add_option("--tol", analyze.tol, "relative value tolerance")->capture_default_str();
  c_analyze->add_option("--zero-tol", analyze.zero_tol, "absolute zero-gradient tolerance");
  c_analyze->add_option("--gram-tol", analyze.gram_tol, "Gram determinant tolerance")->capture_default_str();
  c_analyze->add_option("--eps", analyze.eps, "certify eps-unexploitability at this eps");
  c_analyze->add_option("--out", analyze.out, "output file");

  GapArgs gap;
  auto* c_gap = app.add_subcommand("gap", "estimate the exploitation gap");
  c_gap->add_option("--task", gap.task, "task document")->required();
  c_gap->add_option("--t1", gap.t1, "first transition model")->required();
  c_gap->add_option("--t2", gap.t2, "second transition model")->required();
  add_family_flags(c_gap, gap.fam, "");
  c_gap->add_option("--grid", gap.grid, "theta grid points")->capture_default_str();
  c_gap->add_flag("--no-refine", gap.no_refine, "skip golden-section refinement");
  c_gap->add_option("--out", gap.out, "output file");

  HorizonArgs horizon;
  auto* c_horizon = app.add_subcommand("horizon", "safe horizon H(eps, delta)");
  c_horizon->add_option("--eps", horizon.eps, "tolerated inversion");
  c_horizon->add_option("--delta", horizon.delta, "total variation distance");
  c_horizon->add_option("--grid", horizon.grid, "emit an N x N CSV grid instead");
  c_horizon->add_option("--eps-min", horizon.eps_min)->capture_default_str();
  c_horizon->add_option("--eps-max", horizon.eps_max)->capture_default_str();
  c_horizon->add_option("--delta-min", horizon.delta_min)->capture_default_str();
  c_horizon->add_option("--delta-max", horizon.delta_max)->capture_default_str();
  c_horizon->add_option("--out", horizon.out, "output file");

  SearchArgs search;
  auto* c_search = app.add_subcommand("search", "Dirichlet search for exploitable pairs");
  c_search->add_option("--task", search.task, "task document (default: built-in figure task)");
  c_search->add_option("--t1", search.base, "fixed first model (default: drawn per trial)");
  c_search->add_option("--alpha", search.alpha, "Dirichlet concentration")->capture_default_str();
  c_search->add_option("--trials", search.trials)->capture_default_str();
  c_search->add_option("--seed", search.seed)->capture_default_str();
  c_search->add_option("--min-gap", search.min_gap)->capture_default_str();
  c_search->add_option("--family", search.family, "theta | interior")->capture_default_str();
  c_search->add_option("--samples", search.samples, "policies for --family interior")->capture_default_str();
  c_search->add_option("--grid", search.grid, "theta screening grid")->capture_default_str();
  c_search->add_option("--out", search.out, "output file");

  ReproduceArgs reproduce;
  auto* c_reproduce = app.add_subcommand("reproduce", "write figure data or the bound table as CSV");
  c_reproduce->add_option("target", reproduce.target, "figures | table")->required();
  c_reproduce->add_option("--outdir", reproduce.outdir)->capture_default_str();
  c_reproduce->add_option("--t2c", reproduce.t2c, "panel (c) partner model");
  c_reproduce->add_option("--t2d", reproduce.t2d, "panel (d) partner model");
  c_reproduce->add_option("--grid", reproduce.grid, "theta grid points")->capture_default_str();

  GradientArgs gradient;
  auto* c_gradient = app.add_subcommand("gradient", "dump the projected value gradient as CSV");
  c_gradient->add_option("--task", gradient.task)->required();
  c_gradient->add_option("--t", gradient.t, "transition model")->required();
  c_gradient->add_option("--policy", gradient.policy, "policy document");
  c_gradient->add_option("--theta", gradient.theta, "use the two-action theta policy");
  c_gradient->add_option("--out", gradient.out, "output file");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  RunManifest manifest;
  manifest.command_line = args;
  try {
    if (c_analyze->parsed()) return cmd_analyze(analyze, manifest, out);
    if (c_gap->parsed()) return cmd_gap(gap, manifest, out);
    if (c_horizon->parsed()) return cmd_horizon(horizon, manifest, out);
    if (c_search->parsed()) return cmd_search(search, manifest, out);
    if (c_reproduce->parsed()) return cmd_reproduce(reproduce, manifest);
    if (c_gradient->parsed()) return cmd_gradient(gradient, out);
  } catch (const io::FileNotFound& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
  return kValidationError;
}

}  // namespace invlab::cli
