#include "recsynth/validity.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace recsynth {

std::string print_verdict(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Valid: return "valid";
    case Verdict::Kind::Invalid: {
      std::string s = "invalid";
      for (const auto& [k, val] : v.model) s += " " + k + "=" + print_lval(val);
      return s;
    }
    case Verdict::Kind::Unknown: return "unknown (" + v.reason + ")";
  }
  return "?";
}

// ---- query construction ----

std::string smt_var_name(const std::string& v) { return "v_" + v; }

namespace {

std::string smt_sort(const Sort& s) {
  if (s.is_int()) return "Int";
  if (s.is_bool()) return "Bool";
  return "S_" + s.data;
}

void emit_expr(const Theory& th, const LExpr& e, std::ostringstream& os) {
  auto nary = [&](const char* op) {
    os << '(' << op;
    for (const auto& k : e->kids) {
      os << ' ';
      emit_expr(th, k, os);
    }
    os << ')';
  };
  switch (e->op) {
    case LOp::Var: os << smt_var_name(e->name); return;
    case LOp::Int:
      if (e->value < 0) os << "(- " << (0ULL - static_cast<uint64_t>(e->value)) << ')';
      else os << e->value;
      return;
    case LOp::Bool: os << (e->value ? "true" : "false"); return;
    case LOp::App: {
      bool ctor = th.find_ctor(e->name).second != nullptr;
      std::string head = (ctor ? "C_" : "f_") + e->name;
      if (e->kids.empty()) {
        os << head;
        return;
      }
      nary(head.c_str());
      return;
    }
    case LOp::Add: nary("+"); return;
    case LOp::Sub: nary("-"); return;
    case LOp::Mul: nary("*"); return;
    case LOp::Div: nary("div"); return;
    case LOp::CeilDiv:
      os << "(- (div (- ";
      emit_expr(th, e->kids[0], os);
      os << ") ";
      emit_expr(th, e->kids[1], os);
      os << "))";
      return;
    case LOp::Mod: nary("mod"); return;
    case LOp::Neg: nary("-"); return;
    case LOp::Eq: nary("="); return;
    case LOp::Le: nary("<="); return;
    case LOp::Lt: nary("<"); return;
    case LOp::And: nary("and"); return;
    case LOp::Or: nary("or"); return;
    case LOp::Not: nary("not"); return;
    case LOp::Implies: nary("=>"); return;
    case LOp::Ite: nary("ite"); return;
  }
}

std::string emit(const Theory& th, const LExpr& e) {
  std::ostringstream os;
  emit_expr(th, e, os);
  return os.str();
}

// Appends `e` unless an equal expression is already present.
void push_unique(std::vector<LExpr>& xs, const LExpr& e) {
  for (const auto& x : xs)
    if (lequal(x, e)) return;
  xs.push_back(e);
}

void collect_data_terms(const Theory& th, const LExpr& e, const std::map<std::string, Sort>& vars,
                        std::vector<LExpr>& out) {
  for (const auto& k : e->kids) collect_data_terms(th, k, vars, out);
  if (e->op == LOp::Var || (e->op == LOp::App && th.find_ctor(e->name).second)) {
    auto s = sort_of(th, e, vars);
    if (s && s->is_data()) push_unique(out, e);
  }
}

void collect_ctor_apps(const Theory& th, const LExpr& e, std::vector<LExpr>& out) {
  for (const auto& k : e->kids) collect_ctor_apps(th, k, out);
  if (e->op == LOp::App && th.find_ctor(e->name).second) push_unique(out, e);
}

// Constructor application whose arguments are distinct axiom variables.
const LNode* find_trigger(const Theory& th, const LExpr& e, const std::set<std::string>& axvars) {
  if (e->op == LOp::App && th.find_ctor(e->name).second && !e->kids.empty()) {
    std::set<std::string> seen;
    bool ok = true;
    for (const auto& k : e->kids) ok = ok && k->op == LOp::Var && axvars.count(k->name) && seen.insert(k->name).second;
    if (ok) return e.get();
  }
  for (const auto& k : e->kids)
    if (const LNode* t = find_trigger(th, k, axvars)) return t;
  return nullptr;
}

constexpr size_t kMaxInstancesPerAxiom = 2000;

}  // namespace

std::vector<LExpr> instantiate_axioms(const ValidityQuery& q) {
  const Theory& th = *q.theory;
  std::map<std::string, Sort> vars(q.vars.begin(), q.vars.end());
  std::vector<LExpr> data_terms, ctor_apps;
  for (const LExpr& e : {q.hypothesis, q.conclusion}) {
    collect_data_terms(th, e, vars, data_terms);
    collect_ctor_apps(th, e, ctor_apps);
  }
  auto candidates = [&](const Sort& s) {
    std::vector<LExpr> out;
    if (s.is_data()) {
      for (const auto& t : data_terms)
        if (sort_of(th, t, vars) == s) out.push_back(t);
    } else {
      for (const auto& [n, vs] : q.vars)
        if (vs == s) out.push_back(lx::var(n));
    }
    return out;
  };

  std::vector<LExpr> out;
  for (const auto& ax : th.axioms) {
    std::set<std::string> axvars;
    for (const auto& [n, s] : ax.vars) axvars.insert(n);
    const LNode* trig = find_trigger(th, ax.body, axvars);
    std::vector<std::map<std::string, LExpr>> seeds;
    if (trig) {
      for (const auto& app : ctor_apps) {
        if (app->name != trig->name) continue;
        std::map<std::string, LExpr> b;
        for (size_t i = 0; i < trig->kids.size(); ++i) b[trig->kids[i]->name] = app->kids[i];
        seeds.push_back(std::move(b));
      }
    } else {
      seeds.emplace_back();
    }
    size_t produced = 0;
    for (const auto& seed : seeds) {
      std::vector<std::pair<std::string, std::vector<LExpr>>> rest;
      bool empty = false;
      for (const auto& [n, s] : ax.vars) {
        if (seed.count(n)) continue;
        auto c = candidates(s);
        if (c.empty()) empty = true;
        rest.emplace_back(n, std::move(c));
      }
      if (empty) continue;
      std::map<std::string, LExpr> b = seed;
      std::function<void(size_t)> rec = [&](size_t i) {
        if (produced >= kMaxInstancesPerAxiom) return;
        if (i == rest.size()) {
          push_unique(out, subst_logic_all(ax.body, b));
          ++produced;
          return;
        }
        for (const auto& c : rest[i].second) {
          b[rest[i].first] = c;
          rec(i + 1);
        }
      };
      rec(0);
    }
  }
  for (const auto& t : data_terms) {
    auto s = sort_of(th, t, vars);
    const DataDecl* d = th.find_data(s->data);
    if (d && !d->measure.empty()) push_unique(out, lx::le(lx::num(0), lx::app(d->measure, {t})));
  }
  return out;
}

namespace {

std::string emit_with(const ValidityQuery& q, const std::vector<LExpr>& instances) {
  const Theory& th = *q.theory;
  std::map<std::string, Sort> vars(q.vars.begin(), q.vars.end());
  for (const auto& v : free_vars(q.hypothesis))
    if (!vars.count(v)) throw std::invalid_argument("undeclared variable '" + v + "' in query");
  for (const auto& v : free_vars(q.conclusion))
    if (!vars.count(v)) throw std::invalid_argument("undeclared variable '" + v + "' in query");

  std::ostringstream os;
  os << "; recsynth validity query\n";
  if (!th.data.empty()) {
    os << "(declare-datatypes (";
    for (size_t i = 0; i < th.data.size(); ++i) os << (i ? " " : "") << '(' << smt_sort(Sort::of_data(th.data[i].name)) << " 0)";
    os << ") (";
    for (size_t i = 0; i < th.data.size(); ++i) {
      os << (i ? " " : "") << '(';
      const auto& ctors = th.data[i].ctors;
      for (size_t j = 0; j < ctors.size(); ++j) {
        os << (j ? " " : "") << "(C_" << ctors[j].name;
        for (size_t k = 0; k < ctors[j].fields.size(); ++k)
          os << " (C_" << ctors[j].name << '_' << k << ' ' << smt_sort(ctors[j].fields[k].sort) << ')';
        os << ')';
      }
      os << ')';
    }
    os << "))\n";
  }
  for (const auto& m : th.measures) {
    os << "(declare-fun f_" << m.name << " (";
    for (size_t i = 0; i < m.args.size(); ++i) os << (i ? " " : "") << smt_sort(m.args[i].sort);
    os << ") " << smt_sort(m.result.sort) << ")\n";
  }
  for (const auto& [n, s] : q.vars) os << "(declare-const " << smt_var_name(n) << ' ' << smt_sort(s) << ")\n";
  for (const auto& inst : instances) os << "(assert " << emit(th, inst) << ")\n";
  os << "(assert (and " << emit(th, q.hypothesis) << " (not " << emit(th, q.conclusion) << ")))\n";
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace

std::string emit_query(const ValidityQuery& q) { return emit_with(q, instantiate_axioms(q)); }

// ---- solver process ----

Z3Process::Z3Process(std::vector<std::string> command) : command_(std::move(command)) {
  if (command_.empty()) throw SolverError("empty solver command");
}

Z3Process::~Z3Process() { stop(); }

std::vector<std::string> Z3Process::split_command(const std::string& cmd) {
  std::istringstream is(cmd);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

void Z3Process::start() {
  static const bool sigpipe_ignored = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;
  int in[2], out[2], err[2];
  if (pipe(in) != 0 || pipe(out) != 0 || pipe2(err, O_CLOEXEC) != 0) throw SolverError("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw SolverError("fork() failed");
  if (pid == 0) {
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(in[0]);
    close(in[1]);
    close(out[0]);
    close(out[1]);
    close(err[0]);
    std::vector<char*> argv;
    for (auto& a : command_) argv.push_back(a.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int e = errno;
    ssize_t ignored = write(err[1], &e, sizeof e);
    (void)ignored;
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  close(err[1]);
  int child_errno = 0;
  ssize_t n = read(err[0], &child_errno, sizeof child_errno);
  close(err[0]);
  if (n == sizeof child_errno) {
    close(in[1]);
    close(out[0]);
    waitpid(pid, nullptr, 0);
    throw SolverError("cannot start solver '" + command_[0] + "': " + std::strerror(child_errno));
  }
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
  send("(set-option :produce-models true)\n");
}

void Z3Process::stop() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
  to_child_ = from_child_ = -1;
  buffer_.clear();
}

void Z3Process::send(const std::string& text) {
  size_t off = 0;
  while (off < text.size()) {
    ssize_t n = write(to_child_, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      stop();
      throw SolverError("solver process closed its input");
    }
    off += static_cast<size_t>(n);
  }
}

bool Z3Process::read_reply(std::string& out, int timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    size_t start = buffer_.find_first_not_of(" \t\r\n");
    if (start != std::string::npos) {
      size_t end = std::string::npos;
      if (buffer_[start] == '(') {
        int depth = 0;
        bool in_string = false;
        for (size_t i = start; i < buffer_.size(); ++i) {
          char c = buffer_[i];
          if (in_string) {
            if (c == '"') in_string = false;
          } else if (c == '"') {
            in_string = true;
          } else if (c == '(') {
            ++depth;
          } else if (c == ')' && --depth == 0) {
            end = i + 1;
            break;
          }
        }
      } else {
        size_t nl = buffer_.find('\n', start);
        if (nl != std::string::npos) end = nl;
      }
      if (end != std::string::npos) {
        out = buffer_.substr(start, end - start);
        buffer_.erase(0, end);
        return true;
      }
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return false;
    pollfd pfd{from_child_, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) return false;
    char buf[4096];
    ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0) {
      stop();
      throw SolverError("solver process exited unexpectedly");
    }
    buffer_.append(buf, static_cast<size_t>(n));
  }
}

namespace {

// Splits "((a 1) (b (- 2)))" into symbol/value pairs.
std::map<std::string, std::string> parse_values(const std::string& s) {
  std::map<std::string, std::string> out;
  size_t i = 1;
  while (i < s.size()) {
    size_t open = s.find('(', i);
    if (open == std::string::npos) break;
    size_t sym_start = open + 1;
    size_t sym_end = s.find_first_of(" \t\r\n", sym_start);
    if (sym_end == std::string::npos) break;
    int depth = 1;
    size_t j = sym_end;
    for (; j < s.size() && depth > 0; ++j) {
      if (s[j] == '(') ++depth;
      if (s[j] == ')') --depth;
    }
    std::string val = s.substr(sym_end, j - 1 - sym_end);
    size_t a = val.find_first_not_of(" \t\r\n"), b = val.find_last_not_of(" \t\r\n");
    out[s.substr(sym_start, sym_end - sym_start)] = a == std::string::npos ? "" : val.substr(a, b - a + 1);
    i = j;
  }
  return out;
}

}  // namespace

SolverReply Z3Process::solve(const std::string& query, const std::vector<std::string>& model_symbols, int timeout_ms) {
  if (pid_ < 0) start();
  const int wait_ms = timeout_ms + 2000;
  send("(set-option :timeout " + std::to_string(timeout_ms) + ")\n(push 1)\n" + query);
  std::string line;
  if (!read_reply(line, wait_ms)) {
    stop();
    return {SolverReply::Status::Unknown, {}, "no reply before deadline"};
  }
  SolverReply reply;
  if (line == "unsat") {
    reply.status = SolverReply::Status::Unsat;
  } else if (line == "sat") {
    reply.status = SolverReply::Status::Sat;
    if (!model_symbols.empty()) {
      std::string req = "(get-value (";
      for (size_t i = 0; i < model_symbols.size(); ++i) req += (i ? " " : "") + model_symbols[i];
      send(req + "))\n");
      std::string vals;
      if (!read_reply(vals, wait_ms)) {
        stop();
        return {SolverReply::Status::Sat, {}, "model not returned"};
      }
      if (vals.rfind("(error", 0) == 0) throw SolverError("solver error: " + vals);
      reply.values = parse_values(vals);
    }
  } else if (line == "unknown") {
    reply.status = SolverReply::Status::Unknown;
    send("(get-info :reason-unknown)\n");
    std::string why;
    if (!read_reply(why, wait_ms)) {
      stop();
      return {SolverReply::Status::Unknown, {}, "unknown"};
    }
    reply.reason = why;
  } else {
    stop();
    throw SolverError("malformed solver reply: " + line);
  }
  send("(pop 1)\n");
  return reply;
}

SolverReply FixedVerdict::solve(const std::string&, const std::vector<std::string>&, int) {
  ++calls_;
  return {status_, {}, "fixed verdict"};
}

// ---- checker ----

Checker::Checker(std::shared_ptr<SolverBackend> backend, CheckerOptions opts)
    : backend_(std::move(backend)), opts_(opts) {}

namespace {

bool syntactically_valid(const ValidityQuery& q) {
  if (is_true(q.conclusion)) return true;
  std::vector<LExpr> hyps, goals;
  conjuncts(q.hypothesis, hyps);
  conjuncts(q.conclusion, goals);
  for (const auto& h : hyps)
    if (is_false(h)) return true;
  for (const auto& g : goals) {
    if (is_true(g)) continue;
    bool found = false;
    for (const auto& h : hyps) found = found || lequal(g, h);
    if (!found) return false;
  }
  return true;
}

std::optional<LVal> parse_smt_value(const std::string& s) {
  if (s == "true") return LVal::boolean(true);
  if (s == "false") return LVal::boolean(false);
  std::string t = s;
  bool negative = false;
  if (t.rfind("(-", 0) == 0 && t.back() == ')') {
    negative = true;
    t = t.substr(2, t.size() - 3);
    size_t a = t.find_first_not_of(' ');
    t = a == std::string::npos ? "" : t.substr(a);
  }
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos || t.size() > 18) return std::nullopt;
  int64_t v = std::stoll(t);
  return LVal::integer(negative ? -v : v);
}

}  // namespace

std::optional<LModel> Checker::concrete_counter_model(const ValidityQuery& q, const std::vector<LExpr>& instances) {
  const Theory& th = *q.theory;
  LogicEvaluator ev(th);
  static const std::vector<int64_t> kInts = {0, 1, 2, 3, -1, 4, 5, 7, 8, 16, 6, -2};
  std::map<std::string, std::vector<LVal>> data_pool;
  for (const auto& [n, s] : q.vars)
    if (s.is_data() && !data_pool.count(s.data)) data_pool[s.data] = enumerate_data(th, s.data, 2, {0, 1, 2, 3}, 80);

  std::vector<LExpr> hyps;
  conjuncts(q.hypothesis, hyps);
  std::mt19937 rng(0x5eed);
  auto pick = [&](size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); };

  for (int sample = 0; sample < opts_.concrete_samples; ++sample) {
    LModel m;
    for (;;) {
      bool progress = false;
      for (const auto& h : hyps) {
        if (h->op != LOp::Eq) continue;
        for (int side = 0; side < 2; ++side) {
          const LExpr& a = h->kids[side];
          const LExpr& b = h->kids[1 - side];
          if (a->op != LOp::Var) continue;
          if (!m.count(a->name)) {
            if (auto v = ev.eval(b, m)) {
              m[a->name] = *v;
              progress = true;
            }
          } else if (b->op == LOp::App && m[a->name].kind == LVal::Kind::Data && m[a->name].ctor == b->name &&
                     m[a->name].fields.size() == b->kids.size()) {
            for (size_t i = 0; i < b->kids.size(); ++i) {
              const LExpr& k = b->kids[i];
              if (k->op == LOp::Var && !m.count(k->name)) {
                m[k->name] = m[a->name].fields[i];
                progress = true;
              }
            }
          }
        }
      }
      if (progress) continue;
      const std::pair<std::string, Sort>* next = nullptr;
      for (const auto& v : q.vars)
        if (!m.count(v.first)) {
          next = &v;
          break;
        }
      if (!next) break;
      const Sort& s = next->second;
      if (s.is_int()) {
        m[next->first] = LVal::integer(kInts[sample < 12 ? static_cast<size_t>(sample) % kInts.size() : pick(kInts.size())]);
      } else if (s.is_bool()) {
        m[next->first] = LVal::boolean(pick(2) == 1);
      } else {
        const auto& pool = data_pool[s.data];
        if (pool.empty()) return std::nullopt;
        m[next->first] = pool[pick(pool.size())];
      }
    }
    auto holds = [&](const LExpr& e) {
      auto v = ev.eval(e, m);
      return v && v->kind == LVal::Kind::Bool && v->i == 1;
    };
    bool ok = true;
    for (const auto& h : hyps) ok = ok && holds(h);
    for (const auto& inst : instances) ok = ok && holds(inst);
    if (!ok) continue;
    auto c = ev.eval(q.conclusion, m);
    if (c && c->kind == LVal::Kind::Bool && c->i == 0) return m;
  }
  return std::nullopt;
}

Verdict Checker::check(const ValidityQuery& q) {
  ++stats_.queries;
  if (syntactically_valid(q)) {
    ++stats_.syntactic;
    return Verdict::valid();
  }
  std::vector<LExpr> instances = instantiate_axioms(q);
  std::string text = emit_with(q, instances);
  if (auto it = cache_.find(text); it != cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  Verdict v;
  std::optional<LModel> cm;
  if (opts_.concrete_refutation) cm = concrete_counter_model(q, instances);
  if (cm) {
    ++stats_.concrete_refuted;
    v = Verdict::invalid(*cm);
  } else {
    std::vector<std::string> syms;
    std::map<std::string, std::string> back;
    for (const auto& [n, s] : q.vars) {
      if (s.is_data()) continue;
      syms.push_back(smt_var_name(n));
      back[smt_var_name(n)] = n;
    }
    ++stats_.solver_calls;
    auto t0 = std::chrono::steady_clock::now();
    SolverReply r = backend_->solve(text, syms, opts_.timeout_ms);
    stats_.solver_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    switch (r.status) {
      case SolverReply::Status::Unsat: v = Verdict::valid(); break;
      case SolverReply::Status::Sat: {
        LModel m;
        for (const auto& [sym, val] : r.values)
          if (auto lv = parse_smt_value(val); lv && back.count(sym)) m[back[sym]] = *lv;
        v = Verdict::invalid(std::move(m));
        break;
      }
      case SolverReply::Status::Unknown: v = Verdict::unknown(r.reason.empty() ? "solver unknown" : r.reason); break;
    }
  }
  cache_.emplace(std::move(text), v);
  return v;
}

// ---- bounds ----

bool check_big_o(const BoundExpr& psi, const BoundExpr& psi2) {
  BoundExpr a = psi.canonical(), b = psi2.canonical();
  if (a.is_constant()) return true;
  // Compare exponents a_num/a_den against b_num/b_den without division.
  __int128 lhs = static_cast<__int128>(a.a_num) * b.a_den;
  __int128 rhs = static_cast<__int128>(b.a_num) * a.a_den;
  if (lhs < rhs) return true;
  return lhs == rhs && a.b <= b.b;
}

LExpr magnitude(const Theory& th, const LExpr& t, const Sort& s) {
  if (s.is_int()) return lx::ite(lx::le(lx::num(0), t), t, lx::neg(t));
  if (s.is_data()) {
    const DataDecl* d = th.find_data(s.data);
    if (d && !d->measure.empty()) return lx::app(d->measure, {t});
  }
  return lx::num(0);
}

Verdict check_poly_bound(Checker& checker, const ValidityQuery& q, const std::vector<LExpr>& arg_sizes,
                         const LExpr& value_size, const LExpr& p) {
  for (int64_t c : kPolyBoundLadder) {
    ValidityQuery attempt = q;
    std::vector<LExpr> hyp{q.hypothesis};
    for (const auto& s : arg_sizes) hyp.push_back(lx::lt(lx::num(c), s));
    attempt.hypothesis = lx::conj_all(hyp);
    attempt.conclusion = lx::lt(value_size, p);
    if (checker.check(attempt).is_valid()) return Verdict::valid();
  }
  return Verdict::unknown("no constant in the ladder witnesses the bound");
}

}  // namespace recsynth
