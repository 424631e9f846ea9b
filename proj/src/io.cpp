#include "invlab/io.hpp"

#include "invlab/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace invlab::io {
namespace {

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key))
    throw ParseError(std::string("missing key '") + key + "'");
  return doc.at(key);
}

std::vector<double> numbers(const Json& arr, const std::string& what) {
  if (!arr.is_array()) throw ParseError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : arr) {
    if (!x.is_number()) throw ParseError(what + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> strings(const Json& arr, const std::string& what) {
  if (!arr.is_array()) throw ParseError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : arr) {
    if (!x.is_string()) throw ParseError(what + " must contain only strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

Matrix matrix(const Json& arr, const std::string& what) {
  if (!arr.is_array() || arr.empty()) throw ParseError(what + " must be a non-empty 2-D array");
  const auto rows = static_cast<Index>(arr.size());
  Index cols = -1;
  Matrix m;
  for (Index r = 0; r < rows; ++r) {
    auto row = numbers(arr[static_cast<std::size_t>(r)], what + " row");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw ValidationError("dimension mismatch: " + what + " rows have different lengths");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileNotFound("cannot write file: " + path.string());
  out << text;
}

Json read_json(const std::filesystem::path& path) {
  std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("parse failure in " + path.string() + ": " + e.what());
  }
}

RawTask parse_task(const Json& doc) {
  RawTask raw;
  raw.states = strings(require(doc, "states"), "states");
  raw.actions = strings(require(doc, "actions"), "actions");
  const Json& g = require(doc, "gamma");
  if (!g.is_number()) throw ParseError("gamma must be a number");
  raw.gamma = g.get<double>();
  raw.d0 = numbers(require(doc, "d0"), "d0");
  const Json& rew = require(doc, "reward");
  if (!rew.is_array()) throw ParseError("reward must be a 2-D array");
  for (const auto& row : rew) raw.reward.push_back(numbers(row, "reward row"));
  return raw;
}

TaskSpec load_task(const std::filesystem::path& path) { return validate_task(parse_task(read_json(path))); }

TransitionModel parse_transitions(const Json& doc) {
  const Json& arr = require(doc, "transitions");
  if (!arr.is_array() || arr.empty()) throw ParseError("transitions must be a 3-D array");
  std::vector<Matrix> slices;
  for (std::size_t a = 0; a < arr.size(); ++a)
    slices.push_back(matrix(arr[a], "transitions[" + std::to_string(a) + "]"));
  return TransitionModel(std::move(slices));
}

TransitionModel load_transitions(const std::filesystem::path& path, const TaskSpec& task) {
  TransitionModel t = parse_transitions(read_json(path));
  t.check_shape(task);
  return t;
}

Policy parse_policy(const Json& doc) { return Policy(matrix(require(doc, "probs"), "probs")); }

Policy load_policy(const std::filesystem::path& path, const TaskSpec& task) {
  Policy p = parse_policy(read_json(path));
  p.check_shape(task);
  return p;
}

// --- Serialization -------------------------------------------------------------

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const TaskSpec& task) {
  Json out;
  out["states"] = task.state_names;
  out["actions"] = task.action_names;
  out["gamma"] = task.gamma;
  out["d0"] = std::vector<double>(task.d0.data(), task.d0.data() + task.d0.size());
  out["reward"] = to_json(task.reward);
  return out;
}

Json to_json(const TransitionModel& t) {
  Json arr = Json::array();
  for (const auto& s : t.slices()) arr.push_back(to_json(s));
  return Json{{"transitions", std::move(arr)}};
}

Json to_json(const Policy& pi) { return Json{{"probs", to_json(pi.probs())}}; }

Json to_json(const InversionWitness& w) {
  Json out;
  out["pi"] = to_json(w.pi.probs());
  out["pi_prime"] = to_json(w.pi_prime.probs());
  out["margin_1"] = w.margin_1;
  out["margin_2"] = w.margin_2;
  return out;
}

Json to_json(const PairClassification& c) {
  Json out;
  out["verdict"] = std::string(to_string(c.verdict));
  if (c.verdict == Verdict::Trivial)
    out["trivial_side"] = c.trivial_side == 3 ? Json("both") : Json(c.trivial_side);
  out["witness"] = c.witness ? to_json(*c.witness) : Json(nullptr);
  const Evidence& e = c.evidence;
  Json ev;
  ev["domain"] = e.domain;
  ev["samples"] = e.samples;
  ev["gradient_points"] = e.gradient_points;
  ev["seed"] = e.seed;
  ev["value_tol"] = e.value_tol;
  ev["zero_gradient_tol"] = e.relation_tol.zero_abs;
  ev["gram_tol"] = e.relation_tol.gram;
  ev["degeneracy"] = e.degeneracy;
  ev["gradient_relations"] = Json{{"BothZero", e.tally.both_zero},
                                  {"OneZero", e.tally.one_zero},
                                  {"PositivelyProportional", e.tally.positively_proportional},
                                  {"Antiparallel", e.tally.antiparallel},
                                  {"LinearlyIndependent", e.tally.linearly_independent}};
  ev["note"] = e.note;
  out["evidence"] = std::move(ev);
  return out;
}

Json to_json(const GapEstimate& g) {
  Json out;
  out["gap"] = g.gap;
  out["method"] = g.method;
  out["witness"] = g.witness ? to_json(*g.witness) : Json(nullptr);
  return out;
}

namespace {
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
}  // namespace

Json to_json(const BoundsReport& b) {
  Json out;
  out["delta"] = b.delta;
  out["h"] = b.h;
  out["eps_star"] = b.b;
  out["sqrt_eps_threshold"] = b.sqrt_eps;
  if (b.eps > 0.0) {
    out["eps"] = b.eps;
    out["safe_horizon"] = finite_or_null(b.safe_h);
    out["sqrt_horizon"] = finite_or_null(b.sqrt_h);
    out["certified"] = b.certified;
  }
  return out;
}

Json to_json(const SearchResult& r) {
  Json out;
  out["seed"] = r.seed;
  out["trials_run"] = r.trials_run;
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json j;
    j["trial"] = p.trial;
    j["t1"] = to_json(p.t1)["transitions"];
    j["t2"] = to_json(p.t2)["transitions"];
    j["gap"] = to_json(p.gap);
    pairs.push_back(std::move(j));
  }
  out["pairs"] = std::move(pairs);
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string file_digest(const std::filesystem::path& path) {
  std::string bytes = read_text(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace invlab::io
