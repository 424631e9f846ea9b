#pragma once

// Document formats.
//
//   task:        {"states": [..], "actions": [..], "gamma": g, "d0": [..],
//                 "reward": [[r(s,a) for a] for s]}
//   transitions: {"transitions": [[[T(s'|s,a) for s'] for s] for a]}
//   policy:      {"probs": [[pi(a|s) for a] for s]}
//
// Reports are JSON objects; CSV output uses 17 significant digits and a '.'
// decimal point regardless of locale.

#include "invlab/bounds.hpp"
#include "invlab/errors.hpp"
#include "invlab/constructions.hpp"
#include "invlab/exploit.hpp"
#include "invlab/mdp.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace invlab::io {

using Json = nlohmann::ordered_json;

class FileNotFound : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

RawTask parse_task(const Json& doc);
TaskSpec load_task(const std::filesystem::path& path);
TransitionModel parse_transitions(const Json& doc);
TransitionModel load_transitions(const std::filesystem::path& path, const TaskSpec& task);
Policy parse_policy(const Json& doc);
Policy load_policy(const std::filesystem::path& path, const TaskSpec& task);

Json to_json(const Matrix& m);
Json to_json(const TaskSpec& task);
Json to_json(const TransitionModel& t);  // {"transitions": ...}
Json to_json(const Policy& pi);          // {"probs": ...}
Json to_json(const InversionWitness& w);
Json to_json(const PairClassification& c);
Json to_json(const GapEstimate& g);
Json to_json(const BoundsReport& b);
Json to_json(const SearchResult& r);

/// Shortest text with 17 significant digits, "inf"/"nan" for non-finite values.
std::string format_number(double x);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace invlab::io
