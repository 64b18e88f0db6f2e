#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recsynth/semantics.hpp"
#include "recsynth/synth.hpp"

namespace recsynth {

// Result of one command on one input; serialized as one JSON object per line.
struct RunReport {
  std::string mode;     // check | synth | eval | bench
  std::string problem;  // file stem
  // accepted | rejected | synthesized | no-solution | timeout | evaluated |
  // fuel-exhausted | error
  std::string outcome;
  std::optional<std::string> program;
  std::optional<std::string> pattern;  // pattern name
  std::optional<std::string> bound;    // goal bound
  std::optional<SearchStats> stats;
  std::optional<std::vector<CostSample>> samples;
  std::optional<FitResult> fit;
  std::optional<std::string> value;  // eval
  std::optional<int64_t> cost;       // eval
  std::optional<std::string> message;  // rejection site or error text
};

struct CliOptions {
  SearchConfig search;
  std::string solver_cmd = "z3 -in -smt2";
  int query_timeout_ms = 2000;
  int64_t fuel = kDefaultFuel;
  bool timing = true;  // include wall-clock fields in JSON
};

// Exit status for a report: 0 accepted/synthesized/evaluated, 2 rejected or
// no solution, 3 timeout or fuel exhausted, 4 input error, 5 solver error.
int exit_code(const RunReport& r);

// One letter per recurrence family: N, C, M, A, T.
std::string pattern_letter(PatternId id);

std::string to_json_line(const RunReport& r, bool timing = true);

RunReport cmd_check(const std::string& problem_file, const std::string& program_file, const CliOptions& opts);
RunReport cmd_synth(const std::string& problem_file, const CliOptions& opts);
// `args` are value terms; `problem_file` supplies auxiliaries and data types.
RunReport cmd_eval(const std::string& program_file, const std::vector<std::string>& args,
                   const std::optional<std::string>& problem_file, const CliOptions& opts);
// Every *.problem file under the given directories (or the files themselves),
// in name order. One failing problem does not stop the run.
std::vector<RunReport> cmd_bench(const std::vector<std::string>& inputs, const CliOptions& opts);

// Plain-text table of bench reports: name, bound, time, pattern.
std::string bench_table(const std::vector<RunReport>& reports);

// Parses "2:3" or "2:3,1:2" into the divide and subtract ranges.
PatternRange parse_d_range(const std::string& text);

}  // namespace recsynth
