#include "recsynth/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "recsynth/parser.hpp"

namespace recsynth {

namespace fs = std::filesystem;

namespace {

// Unreadable files are input errors, like syntax errors.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

ProblemRef load_problem(const std::string& path) {
  return std::make_shared<const SynthesisProblem>(parse_problem(read_file(path)));
}

Checker make_checker(const CliOptions& opts) {
  CheckerOptions co;
  co.timeout_ms = opts.query_timeout_ms;
  return Checker(std::make_shared<Z3Process>(Z3Process::split_command(opts.solver_cmd)), co);
}

RunReport error_report(std::string mode, std::string problem, const std::string& msg) {
  RunReport r;
  r.mode = std::move(mode);
  r.problem = std::move(problem);
  r.outcome = "error";
  r.message = msg;
  return r;
}

// Runs `body`, turning exceptions into error reports. Solver failures are
// marked so that exit_code can tell them apart from input errors.
template <class F>
RunReport guarded(const std::string& mode, const std::string& problem, F body) {
  try {
    return body();
  } catch (const SolverError& e) {
    return error_report(mode, problem, std::string("solver: ") + e.what());
  } catch (const ParseError& e) {
    return error_report(mode, problem, std::string("input: ") + e.what());
  } catch (const InputError& e) {
    return error_report(mode, problem, std::string("input: ") + e.what());
  } catch (const TypeError& e) {
    return error_report(mode, problem, std::string("input: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return error_report(mode, problem, std::string("input: ") + e.what());
  }
}

void fill_synth(RunReport& r, const SynthesisProblem& p, const SynthResult& s, bool measure_fit) {
  r.outcome = outcome_name(s.outcome);
  r.bound = print_bound_o(p.goal.ann.bound);
  r.stats = s.stats;
  if (!s.program) return;
  r.program = print_program(*s.program);
  r.pattern = pattern_name(s.pattern->id);
  if (!measure_fit) return;
  auto inputs = generate_inputs(p, size_ladder(p.goal.ann.bound));
  auto samples = measure(*s.program, make_defs(p), Theory::from_problem(p), p.sizes.at(p.goal_name), inputs);
  r.fit = fit_bound(samples, p.goal.ann.bound);
  r.samples = std::move(samples);
}

}  // namespace

int exit_code(const RunReport& r) {
  const std::string& o = r.outcome;
  if (o == "accepted" || o == "synthesized" || o == "evaluated") return 0;
  if (o == "rejected" || o == "no-solution") return 2;
  if (o == "timeout" || o == "fuel-exhausted") return 3;
  if (r.message && r.message->rfind("solver:", 0) == 0) return 5;
  return 4;
}

std::string pattern_letter(PatternId id) {
  switch (id) {
    case PatternId::MasterLog:
    case PatternId::MasterNLogN: return "M";
    case PatternId::AkraBazzi: return "A";
    case PatternId::CFiniteLinear:
    case PatternId::CFiniteQuadratic: return "C";
    case PatternId::TreeCorrelated: return "T";
    case PatternId::NonRecursive: return "N";
  }
  return "?";
}

std::string to_json_line(const RunReport& r, bool timing) {
  nlohmann::ordered_json j;
  j["mode"] = r.mode;
  j["problem"] = r.problem;
  j["outcome"] = r.outcome;
  if (r.bound) j["bound"] = *r.bound;
  if (r.program) j["program"] = *r.program;
  if (r.pattern) j["pattern"] = *r.pattern;
  if (r.stats) {
    nlohmann::ordered_json s;
    s["eterms_enumerated"] = r.stats->eterms_enumerated;
    s["eterms_rejected_by_cost"] = r.stats->eterms_rejected_by_cost;
    s["validity_queries"] = r.stats->validity_queries;
    s["solver_calls"] = r.stats->solver_calls;
    if (timing) s["elapsed_ms"] = std::round(r.stats->elapsed_ms * 10) / 10;
    j["stats"] = s;
  }
  if (r.samples) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& c : *r.samples) a.push_back({c.size, c.cost});
    j["cost_samples"] = a;
  }
  if (r.fit) j["fit"] = {{"pass", r.fit->pass}, {"witness", std::round(r.fit->witness * 1000) / 1000}};
  if (r.value) j["value"] = *r.value;
  if (r.cost) j["cost"] = *r.cost;
  if (r.message) j["message"] = *r.message;
  return j.dump();
}

RunReport cmd_check(const std::string& problem_file, const std::string& program_file, const CliOptions& opts) {
  return guarded("check", stem(problem_file), [&] {
    ProblemRef p = load_problem(problem_file);
    Term prog = parse_program(read_file(program_file));
    Checker checker = make_checker(opts);
    TypeChecker tc(p, checker, TypeCheckerOptions{opts.search.range, true});
    RunReport r;
    r.mode = "check";
    r.problem = stem(problem_file);
    r.bound = print_bound_o(p->goal.ann.bound);
    r.program = print_program(prog);
    auto pat = tc.check_fix(tc.goal(), prog);
    if (pat) {
      r.outcome = "accepted";
      r.pattern = pattern_name(pat->id);
    } else {
      r.outcome = "rejected";
      if (const auto& rej = tc.last_rejection())
        r.message = stage_name(rej->stage) + " check failed for '" + pretty_print(rej->term) + "' under " +
                    print_logic(rej->context);
    }
    return r;
  });
}

RunReport cmd_synth(const std::string& problem_file, const CliOptions& opts) {
  return guarded("synth", stem(problem_file), [&] {
    ProblemRef p = load_problem(problem_file);
    Checker checker = make_checker(opts);
    RunReport r;
    r.mode = "synth";
    r.problem = stem(problem_file);
    fill_synth(r, *p, synthesize(p, opts.search, checker), false);
    return r;
  });
}

RunReport cmd_eval(const std::string& program_file, const std::vector<std::string>& args,
                   const std::optional<std::string>& problem_file, const CliOptions& opts) {
  return guarded("eval", stem(program_file), [&] {
    Defs defs;
    if (problem_file) defs = make_defs(*load_problem(*problem_file));
    Term prog = parse_program(read_file(program_file));
    add_program(defs, prog);
    std::vector<Value> vals;
    for (const auto& a : args) {
      // Negative literals are not terms of the language.
      int64_t n = 0;
      auto [end, ec] = std::from_chars(a.data(), a.data() + a.size(), n);
      if (ec == std::errc() && end == a.data() + a.size()) vals.push_back(Value::integer(n));
      else vals.push_back(eval_fast(parse_term(a), defs, opts.fuel).value);
    }
    RunReport r;
    r.mode = "eval";
    r.problem = stem(program_file);
    try {
      EvalResult e = call(prog->name, vals, defs, opts.fuel);
      r.outcome = "evaluated";
      r.value = print_value(e.value);
      r.cost = e.cost;
    } catch (const EvalError& e) {
      if (e.kind() != EvalError::Kind::FuelExhausted) throw std::invalid_argument(e.what());
      r.outcome = "fuel-exhausted";
      r.message = e.what();
    }
    return r;
  });
}

std::vector<RunReport> cmd_bench(const std::vector<std::string>& inputs, const CliOptions& opts) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> here;
      for (const auto& e : fs::directory_iterator(in))
        if (e.path().extension() == ".problem") here.push_back(e.path().string());
      std::sort(here.begin(), here.end());
      files.insert(files.end(), here.begin(), here.end());
    } else {
      files.push_back(in);
    }
  }
  std::vector<RunReport> out;
  for (const auto& f : files) {
    out.push_back(guarded("bench", stem(f), [&] {
      ProblemRef p = load_problem(f);
      Checker checker = make_checker(opts);
      RunReport r;
      r.mode = "bench";
      r.problem = stem(f);
      fill_synth(r, *p, synthesize(p, opts.search, checker), true);
      return r;
    }));
  }
  return out;
}

std::string bench_table(const std::vector<RunReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "problem" << std::setw(14) << "bound" << std::setw(10) << "time(s)"
     << std::setw(6) << "rec" << std::setw(14) << "outcome" << "pattern\n";
  for (const auto& r : reports) {
    std::string letter = "-";
    for (PatternId id : {PatternId::MasterLog, PatternId::MasterNLogN, PatternId::AkraBazzi, PatternId::CFiniteLinear,
                         PatternId::CFiniteQuadratic, PatternId::TreeCorrelated, PatternId::NonRecursive})
      if (r.pattern && *r.pattern == pattern_name(id)) letter = pattern_letter(id);
    std::ostringstream t;
    if (r.stats) t << std::fixed << std::setprecision(2) << r.stats->elapsed_ms / 1000;
    else t << "-";
    os << std::setw(18) << r.problem << std::setw(14) << r.bound.value_or("-") << std::setw(10) << t.str()
       << std::setw(6) << letter << std::setw(14) << r.outcome << r.pattern.value_or("-") << '\n';
  }
  return os.str();
}

PatternRange parse_d_range(const std::string& text) {
  PatternRange r;
  auto pair = [&](const std::string& s, int& lo, int& hi) {
    auto c = s.find(':');
    if (c == std::string::npos) throw std::invalid_argument("expected lo:hi in '" + s + "'");
    try {
      lo = std::stoi(s.substr(0, c));
      hi = std::stoi(s.substr(c + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad range '" + s + "'");
    }
    if (lo < 1 || hi < lo) throw std::invalid_argument("empty range '" + s + "'");
  };
  auto comma = text.find(',');
  pair(text.substr(0, comma), r.div_min, r.div_max);
  if (r.div_min < 2) throw std::invalid_argument("divide range must start at 2 or more");
  if (comma != std::string::npos) pair(text.substr(comma + 1), r.sub_min, r.sub_max);
  return r;
}

}  // namespace recsynth
