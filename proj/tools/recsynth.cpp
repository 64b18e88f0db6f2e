// Command-line front end: check, synth, eval and bench.
#include <CLI11.hpp>

#include <iostream>

#include "recsynth/cli.hpp"

using namespace recsynth;

int main(int argc, char** argv) {
  CLI::App app{"recsynth: synthesis of recursive programs under complexity bounds"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string d_range;
  auto search_flags = [&](CLI::App* c) {
    c->add_option("--depth", opts.search.depth, "E-term depth bound")->check(CLI::PositiveNumber);
    c->add_option("--match-bound", opts.search.match_bound, "nested match bound")->check(CLI::NonNegativeNumber);
    c->add_option("--timeout", opts.search.timeout_ms, "search timeout in milliseconds")->check(CLI::PositiveNumber);
    c->add_flag("!--no-prune", opts.search.pruning, "skip cost annotations while enumerating");
    c->add_option("--d-range", d_range, "pattern parameter ranges, DIV_LO:DIV_HI[,SUB_LO:SUB_HI]");
  };
  auto solver_flags = [&](CLI::App* c) {
    c->add_option("--solver-cmd", opts.solver_cmd, "SMT-LIB2 solver command reading from stdin");
    c->add_option("--query-timeout", opts.query_timeout_ms, "per-query solver timeout in milliseconds");
  };

  std::string problem, program, format = "json";
  std::vector<std::string> values, inputs;
  std::optional<std::string> aux_problem;

  auto* check = app.add_subcommand("check", "type-check a program against a problem's goal");
  check->add_option("problem", problem, "problem file")->required();
  check->add_option("program", program, "program file")->required();
  solver_flags(check);
  check->add_option("--d-range", d_range, "pattern parameter ranges, DIV_LO:DIV_HI[,SUB_LO:SUB_HI]");

  auto* synth = app.add_subcommand("synth", "synthesize a program for a problem");
  synth->add_option("problem", problem, "problem file")->required();
  search_flags(synth);
  solver_flags(synth);

  auto* eval = app.add_subcommand("eval", "run a program on argument values and report its cost");
  eval->add_option("program", program, "program file")->required();
  eval->add_option("args", values, "argument values");
  eval->add_option("--problem", aux_problem, "problem file providing auxiliaries and data types");
  eval->add_option("--fuel", opts.fuel, "evaluation step limit")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "synthesize and measure every problem of a corpus");
  bench->add_option("inputs", inputs, "corpus directories or problem files")->required();
  bench->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  search_flags(bench);
  solver_flags(bench);

  for (auto* c : {synth, bench}) c->add_flag("!--no-timing", opts.timing, "omit wall-clock fields from reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  if (!d_range.empty()) {
    try {
      opts.search.range = parse_d_range(d_range);
    } catch (const std::invalid_argument& e) {
      std::cerr << "recsynth: " << e.what() << '\n';
      return 4;
    }
  }

  auto emit = [&](const RunReport& r) {
    std::cout << to_json_line(r, opts.timing) << '\n';
    if (r.outcome == "error") std::cerr << "recsynth: " << r.message.value_or("error") << '\n';
  };

  if (check->parsed()) {
    RunReport r = cmd_check(problem, program, opts);
    emit(r);
    return exit_code(r);
  }
  if (synth->parsed()) {
    RunReport r = cmd_synth(problem, opts);
    emit(r);
    return exit_code(r);
  }
  if (eval->parsed()) {
    RunReport r = cmd_eval(program, values, aux_problem, opts);
    emit(r);
    return exit_code(r);
  }
  for (const auto& in : inputs) {
    if (!std::filesystem::exists(in)) {
      std::cerr << "recsynth: no such corpus " << in << '\n';
      return 4;
    }
  }
  auto reports = cmd_bench(inputs, opts);
  if (format == "table") std::cout << bench_table(reports);
  else
    for (const auto& r : reports) emit(r);
  int rc = 0;
  for (const auto& r : reports) rc = std::max(rc, exit_code(r) == 0 ? 0 : 2);
  return rc;
}
