#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "recsynth/logic_eval.hpp"

namespace recsynth {

// Checks that hypothesis implies conclusion for every assignment of `vars`
// satisfying the theory's axioms.
struct ValidityQuery {
  std::shared_ptr<const Theory> theory;
  std::vector<std::pair<std::string, Sort>> vars;
  LExpr hypothesis;
  LExpr conclusion;
};

struct Verdict {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Unknown;
  LModel model;        // counter-model when Invalid (possibly partial)
  std::string reason;  // why Unknown

  static Verdict valid() { return {Kind::Valid, {}, {}}; }
  static Verdict invalid(LModel m) { return {Kind::Invalid, std::move(m), {}}; }
  static Verdict unknown(std::string r) { return {Kind::Unknown, {}, std::move(r)}; }
  bool is_valid() const { return kind == Kind::Valid; }
};

std::string print_verdict(const Verdict& v);

// Raised when the solver process cannot be started or replies with garbage.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ground instances of the theory's axioms relevant to the query, plus
// nonnegativity of intrinsic measures on every data-sorted term.
std::vector<LExpr> instantiate_axioms(const ValidityQuery& q);

// SMT-LIB2 text: comment header, declarations, one assertion per axiom
// instance, the negated implication, then (check-sat).
std::string emit_query(const ValidityQuery& q);

// SMT-LIB2 symbol used for a query variable.
std::string smt_var_name(const std::string& v);

struct SolverReply {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  std::map<std::string, std::string> values;  // SMT symbol -> value text, when Sat
  std::string reason;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  // `query` is emit_query output; `model_symbols` are requested on Sat.
  virtual SolverReply solve(const std::string& query, const std::vector<std::string>& model_symbols,
                            int timeout_ms) = 0;
};

// Persistent SMT-LIB2 solver process driven over pipes; each query runs inside
// push/pop. A reply that does not arrive in time restarts the process.
class Z3Process : public SolverBackend {
 public:
  explicit Z3Process(std::vector<std::string> command = {"z3", "-in", "-smt2"});
  ~Z3Process() override;
  Z3Process(const Z3Process&) = delete;
  Z3Process& operator=(const Z3Process&) = delete;

  SolverReply solve(const std::string& query, const std::vector<std::string>& model_symbols,
                    int timeout_ms) override;

  // Splits a shell-like command string on whitespace.
  static std::vector<std::string> split_command(const std::string& cmd);

 private:
  void start();
  void stop();
  void send(const std::string& text);
  // Reads one line, or one balanced s-expression when it starts with '('.
  // Returns false on timeout.
  bool read_reply(std::string& out, int timeout_ms);

  std::vector<std::string> command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// Always answers with a fixed status; for fault injection.
class FixedVerdict : public SolverBackend {
 public:
  explicit FixedVerdict(SolverReply::Status s) : status_(s) {}
  SolverReply solve(const std::string&, const std::vector<std::string>&, int) override;
  int calls() const { return calls_; }

 private:
  SolverReply::Status status_;
  int calls_ = 0;
};

struct CheckerStats {
  long queries = 0;          // check() requests
  long cache_hits = 0;
  long syntactic = 0;        // decided without the solver by the syntactic precheck
  long concrete_refuted = 0; // refuted by concrete evaluation
  long solver_calls = 0;
  double solver_seconds = 0;
};

struct CheckerOptions {
  int timeout_ms = 2000;
  bool concrete_refutation = true;
  int concrete_samples = 48;
};

// Validity checking with memoization, a syntactic precheck, and concrete
// counter-model search in front of the solver. Not thread-safe.
class Checker {
 public:
  Checker(std::shared_ptr<SolverBackend> backend, CheckerOptions opts = {});

  Verdict check(const ValidityQuery& q);
  const CheckerStats& stats() const { return stats_; }
  const CheckerOptions& options() const { return opts_; }

 private:
  std::optional<LModel> concrete_counter_model(const ValidityQuery& q, const std::vector<LExpr>& instances);

  std::shared_ptr<SolverBackend> backend_;
  CheckerOptions opts_;
  CheckerStats stats_;
  std::map<std::string, Verdict> cache_;
};

// True iff psi is in O(psi2).
bool check_big_o(const BoundExpr& psi, const BoundExpr& psi2);

// Constants tried for the existential in check_poly_bound.
inline const std::vector<int64_t> kPolyBoundLadder = {1, 2, 4, 8, 16};

// Decides whether |v| < p(|args|) once every argument magnitude exceeds some
// constant from the ladder. `q.hypothesis` is the refinement context; its
// conclusion is ignored. Valid on the first constant that works, else Unknown.
Verdict check_poly_bound(Checker& checker, const ValidityQuery& q, const std::vector<LExpr>& arg_sizes,
                         const LExpr& value_size, const LExpr& p);

// |t| for a term of sort `s`: absolute value for Int, intrinsic measure for data, 0 for Bool.
LExpr magnitude(const Theory& th, const LExpr& t, const Sort& s);

}  // namespace recsynth
