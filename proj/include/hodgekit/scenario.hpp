#pragma once

// Scenario files and reports. A scenario is a JSON document
//
//   { "context": {...}, "seed": 42, "tolerances": {...}, "parallel": false,
//     "jobs": [ { "kind": "lu", "params": {...} }, ... ] }
//
// Parsing rejects unknown keys and fills defaults, so to_json(parse(x)) is
// the canonical form of x.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hodgekit/hodge_core.hpp"

namespace hodge {

using json = nlohmann::json;

struct ContextSpec {
  int weight = 1;
  std::vector<int> hodge_numbers{1, 1};
  std::optional<Mat> polarization;
  std::optional<Mat> base;
};

struct JobSpec {
  std::string kind;
  json params;  // validated, defaults filled
  std::optional<ContextSpec> context;
  std::optional<std::string> expect_error;  // ErrorKind name
};

struct Scenario {
  ContextSpec context;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  bool parallel = false;
  std::vector<JobSpec> jobs;
};

const std::vector<std::string>& job_kinds();

/// Throws Error(ParseError) naming the offending field path, or the line of
/// a syntax error.
Scenario parse_scenario(const json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Default parameters of a job kind after validation.
json default_params(const std::string& kind);

json to_json(const Scenario& s);
json to_json(const ContextSpec& c);

/// FNV-1a 64 of the canonical dump.
std::uint64_t scenario_hash(const Scenario& s);

Context make_context(const ContextSpec& spec, const Tolerances& tol);

struct JobResult {
  std::string kind;
  bool passed = false;
  json payload;
  double wall_ms = 0.0;
  std::optional<std::string> error;
};

struct Report {
  std::string tool_version;
  std::string scenario_hash;
  std::vector<JobResult> jobs;
  bool passed = false;
};

struct RunOptions {
  std::optional<bool> parallel;    // overrides the scenario flag
  std::string table_path;          // curve jobs write a CSV sample table here
};

/// Context errors surface as Error; job failures are captured per job.
Report run_scenario(const Scenario& s, const RunOptions& opts = {});
json to_json(const Report& r);
/// Report without wall-clock fields; equal across reruns.
json payloads(const Report& r);

// JSON helpers shared with the CLI.
json complex_to_json(cplx z);
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, const std::string& path);

}  // namespace hodge
