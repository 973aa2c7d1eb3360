#include "choret/oracle.hpp"

#include <algorithm>
#include <random>
#include <utility>

#include "choret/projector.hpp"

namespace choret {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// The value each process observes from one choreography form. Processes not
// listed observed Unit.
using ValueMap = std::map<ProcessName, Value>;

Value value_at(const ValueMap& vm, const ProcessName& p) {
  auto it = vm.find(p);
  return it == vm.end() ? Value(Unit{}) : it->second;
}

struct Interp {
  const Fixture& fixture;
  std::map<ProcessName, Store> stores;
  std::vector<Message> log;

  Interp(const ChorProgram& program, const Fixture& fix) : fixture(fix) {
    for (const auto& p : program.processes)
      stores.emplace(p, Store(fix.for_process(p).globals));
  }

  Value eval_at(const LocalExprPtr& e, const ProcessName& p) {
    return eval_local(*e, stores.at(p), fixture.for_process(p).builtins);
  }

  ValueMap eval_expr(const ChorExprPtr& e) {
    return std::visit(
        overloaded{
            [&](const ChorExpr::At& n) -> ValueMap {
              Value v = Unit{};
              for (const auto& ex : n.exprs) v = eval_at(ex, n.process);
              return {{n.process, v}};
            },
            [&](const ChorExpr::Comm& n) -> ValueMap {
              Value v = eval_at(n.expr, n.source);
              log.push_back(Message{n.source, n.target, v});
              return {{n.source, Unit{}}, {n.target, v}};
            },
            [&](const ChorExpr::If& n) -> ValueMap {
              bool taken = truthy(eval_at(n.guard, n.guard_at));
              return eval_expr(taken ? n.then_branch : n.else_branch);
            },
            [&](const ChorExpr::Sel& n) -> ValueMap {
              for (const auto& [label, target] : n.pairs)
                log.push_back(Message{n.chooser, target, label});
              return eval_expr(n.body);
            },
            [&](const ChorExpr::Let& n) -> ValueMap {
              // Parallel let: every binding evaluates before any name binds,
              // and every process opens a frame.
              std::vector<ValueMap> vals;
              vals.reserve(n.bindings.size());
              for (const auto& [binding, expr] : n.bindings)
                vals.push_back(eval_expr(expr));
              for (auto& [p, store] : stores) store.push_frame();
              for (size_t i = 0; i < n.bindings.size(); ++i) {
                std::visit(overloaded{
                               [&](const GlobalBinding& b) {
                                 for (auto& [p, store] : stores)
                                   store.define(b.name, value_at(vals[i], p));
                               },
                               [&](const LocatedBinding& b) {
                                 stores.at(b.process)
                                     .define(b.name, value_at(vals[i], b.process));
                               },
                           },
                           n.bindings[i].first);
              }
              ValueMap out;
              try {
                out = eval_expr(n.body);
              } catch (...) {
                for (auto& [p, store] : stores) store.pop_frame();
                throw;
              }
              for (auto& [p, store] : stores) store.pop_frame();
              return out;
            },
            [&](const ChorExpr::LetStar& n) -> ValueMap {
              return eval_expr(desugar_let_star(n, e->loc()));
            },
            [&](const ChorExpr::Set& n) -> ValueMap {
              ValueMap vm = eval_expr(n.value);
              stores.at(n.target.process)
                  .assign(n.target.name, value_at(vm, n.target.process));
              vm[n.target.process] = Unit{};
              return vm;
            },
            [&](const ChorExpr::Seq& n) -> ValueMap {
              ValueMap last;
              for (const auto& t : n.terms) last = eval_term(t);
              return last;
            },
        },
        e->node());
  }

  ValueMap eval_term(const ChorTermPtr& t) {
    return std::visit(
        overloaded{
            [&](const ChorTerm::Define& n) -> ValueMap {
              ValueMap vm = eval_expr(n.value);
              std::visit(overloaded{
                             [&](const GlobalBinding& b) {
                               for (auto& [p, store] : stores)
                                 store.define(b.name, value_at(vm, p));
                             },
                             [&](const LocatedBinding& b) {
                               stores.at(b.process)
                                   .define(b.name, value_at(vm, b.process));
                             },
                         },
                         n.binding);
              return {};
            },
            [&](const ChorTerm::DefineComm& n) -> ValueMap {
              Value v = eval_at(n.source_expr, n.source_process);
              log.push_back(Message{n.source_process, n.target_process, v});
              stores.at(n.target_process).define(n.target_var, v);
              return {};
            },
            [&](const ChorTerm::Bare& n) -> ValueMap { return eval_expr(n.expr); },
        },
        t->node());
  }
};

}  // namespace

GlobalState interpret(const ChorProgram& program, const Fixture& fixture) {
  Interp interp(program, fixture);
  ValueMap last;
  for (const auto& term : program.body) last = interp.eval_term(term);
  GlobalState out;
  for (const auto& p : program.processes) {
    out.stores[p] = interp.stores.at(p).top_level();
    out.values[p] = value_at(last, p);
  }
  out.log = std::move(interp.log);
  return out;
}

namespace {

// Payload types the generator tracks per variable. Unit marks values that a
// process holds but must not feed into builtins; Mixed marks an if whose
// branches disagree. Neither is ever referenced again.
enum class Ty { Int, Bool, Str, Sym, Unit, Mixed };

using TyMap = std::map<ProcessName, Ty>;

Ty ty_at(const TyMap& m, const ProcessName& p) {
  auto it = m.find(p);
  return it == m.end() ? Ty::Unit : it->second;
}

bool usable(Ty t) { return t != Ty::Unit && t != Ty::Mixed; }

class Gen {
 public:
  explicit Gen(const GenConfig& config)
      : depth_limit_(std::max(0, config.max_depth)),
        fanout_(std::max(1, config.max_fanout)),
        rng_(config.seed) {
    size_t count = 2 + below(static_cast<size_t>(
                           std::clamp(config.max_processes, 2, 8)) - 1);
    static const char* kNames[] = {"A", "B", "C", "D", "E", "F", "G", "H"};
    for (size_t i = 0; i < count; ++i) procs_.emplace_back(kNames[i]);
  }

  ChorProgram run() {
    Env env;
    for (const auto& p : procs_) env[p];
    std::vector<ChorTermPtr> terms;
    size_t count = 2 + below(static_cast<size_t>(fanout_));
    for (size_t i = 0; i < count; ++i)
      terms.push_back(gen_term(env, depth_limit_).first);
    return ChorProgram{procs_, std::move(terms)};
  }

 private:
  // Visible variables and their payload types, per process.
  using Env = std::map<ProcessName, std::map<std::string, Ty>>;

  struct Typed {
    ChorExprPtr expr;
    TyMap tys;
  };

  int depth_limit_;
  int fanout_;
  std::mt19937_64 rng_;
  std::vector<ProcessName> procs_;
  int next_var_ = 0;
  int next_label_ = 0;

  // rng() % n is deterministic across platforms; uniform_int_distribution
  // is not, and reproducible seeds matter more than its uniformity here.
  size_t below(size_t n) { return static_cast<size_t>(rng_() % n); }

  const ProcessName& pick_proc() { return procs_[below(procs_.size())]; }

  ProcessName pick_other(const ProcessName& p) {
    std::vector<ProcessName> others;
    for (const auto& q : procs_)
      if (q != p) others.push_back(q);
    return others[below(others.size())];
  }

  std::string fresh_var() { return "v" + std::to_string(next_var_++); }

  Ty base_ty() {
    static const Ty kBase[] = {Ty::Int, Ty::Bool, Ty::Str, Ty::Sym};
    return kBase[below(4)];
  }

  Value lit_of(Ty t) {
    switch (t) {
      case Ty::Int: {
        static const std::int64_t kInts[] = {0, 1, 2, 5, 7, -3, 42, 100};
        return kInts[below(8)];
      }
      case Ty::Bool:
        return below(2) == 0;
      case Ty::Str: {
        static const char* kStrs[] = {"a", "bc", "hello", "x y", "zig"};
        return std::string(kStrs[below(5)]);
      }
      default: {
        static const char* kSyms[] = {"red", "green", "blue", "ok", "go"};
        return Symbol{kSyms[below(5)]};
      }
    }
  }

  std::vector<std::string> vars_of(const Env& env, const ProcessName& p, Ty want) {
    std::vector<std::string> out;
    for (const auto& [name, ty] : env.at(p))
      if (ty == want) out.push_back(name);
    return out;
  }

  LocalExprPtr gen_local(const Env& env, const ProcessName& p, Ty want, int depth) {
    std::vector<std::string> vars = vars_of(env, p, want);
    size_t roll = below(100);
    if (!vars.empty() && roll < 30)
      return LocalExpr::var(vars[below(vars.size())]);
    if (depth <= 0 || roll < 55 || want == Ty::Sym)
      return LocalExpr::lit(lit_of(want));
    if (roll < 65) {
      std::vector<LocalExprPtr> body;
      body.push_back(gen_local(env, p, base_ty(), depth - 1));
      body.push_back(gen_local(env, p, want, depth - 1));
      return LocalExpr::block(std::move(body));
    }
    return gen_app(env, p, want, depth - 1);
  }

  LocalExprPtr gen_app(const Env& env, const ProcessName& p, Ty want, int depth) {
    std::vector<LocalExprPtr> args;
    switch (want) {
      case Ty::Int: {
        static const char* kOps[] = {"+", "-", "*"};
        const char* op = kOps[below(3)];
        size_t arity = 2 + below(2);
        for (size_t i = 0; i < arity; ++i)
          args.push_back(gen_local(env, p, Ty::Int, depth));
        return LocalExpr::app(op, std::move(args));
      }
      case Ty::Str: {
        size_t arity = 2 + below(2);
        for (size_t i = 0; i < arity; ++i)
          args.push_back(gen_local(env, p, Ty::Str, depth));
        return LocalExpr::app("string-append", std::move(args));
      }
      default: {
        size_t pick = below(8);
        if (pick < 4) {
          static const char* kCmp[] = {"<=", "<", ">=", ">"};
          args.push_back(gen_local(env, p, Ty::Int, depth));
          args.push_back(gen_local(env, p, Ty::Int, depth));
          return LocalExpr::app(kCmp[pick], std::move(args));
        }
        if (pick == 4) {
          Ty t = base_ty();
          args.push_back(gen_local(env, p, t, depth));
          args.push_back(gen_local(env, p, t, depth));
          return LocalExpr::app("eq?", std::move(args));
        }
        if (pick == 5) {
          args.push_back(gen_local(env, p, Ty::Bool, depth));
          return LocalExpr::app("not", std::move(args));
        }
        args.push_back(gen_local(env, p, Ty::Bool, depth));
        args.push_back(gen_local(env, p, Ty::Bool, depth));
        return LocalExpr::app(pick == 6 ? "and" : "or", std::move(args));
      }
    }
  }

  std::pair<ChorTermPtr, TyMap> gen_term(Env& env, int depth) {
    size_t roll = below(100);
    if (roll < 25) {
      Typed value = gen_expr(env, depth - 1);
      Binding binding = make_binding(env, value.tys);
      return {ChorTerm::define(binding, value.expr), {}};
    }
    if (roll < 40) {
      ProcessName target = pick_proc();
      ProcessName source = pick_other(target);
      Ty t = base_ty();
      LocalExprPtr e = gen_local(env, source, t, 2);
      std::string x = fresh_var();
      env[target][x] = t;
      return {ChorTerm::define_comm(target, x, source, e), {}};
    }
    Typed value = gen_expr(env, depth);
    return {ChorTerm::bare(value.expr), value.tys};
  }

  // Records the new name's per-process type and returns the binder.
  Binding make_binding(Env& env, const TyMap& tys) {
    std::string name = fresh_var();
    if (below(100) < 35) {
      for (const auto& p : procs_) env[p][name] = ty_at(tys, p);
      return GlobalBinding{name};
    }
    ProcessName owner = pick_proc();
    env[owner][name] = ty_at(tys, owner);
    return LocatedBinding{owner, name};
  }

  // A body of one or more terms in a private scope copy: names defined
  // inside are never referenced after the body, which keeps references
  // valid no matter which frame the definition lands in.
  Typed gen_body(const Env& env, int depth, size_t min_terms) {
    Env local = env;
    size_t count = min_terms + below(static_cast<size_t>(fanout_));
    std::vector<ChorTermPtr> terms;
    TyMap last;
    for (size_t i = 0; i < count; ++i) {
      auto [term, tys] = gen_term(local, depth);
      terms.push_back(std::move(term));
      last = std::move(tys);
    }
    return {ChorExpr::seq(std::move(terms)), std::move(last)};
  }

  Typed gen_at(const Env& env) {
    ProcessName p = pick_proc();
    size_t count = 1 + below(static_cast<size_t>(fanout_));
    std::vector<LocalExprPtr> exprs;
    Ty last = Ty::Int;
    for (size_t i = 0; i < count; ++i) {
      last = base_ty();
      exprs.push_back(gen_local(env, p, last, 2));
    }
    return {ChorExpr::at(p, std::move(exprs)), {{p, last}}};
  }

  Typed gen_expr(const Env& env, int depth) {
    if (depth <= 0) return gen_at(env);
    size_t roll = below(100);
    if (roll < 22) return gen_at(env);
    if (roll < 42) {
      ProcessName source = pick_proc();
      ProcessName target = pick_other(source);
      Ty t = base_ty();
      LocalExprPtr e = gen_local(env, source, t, 2);
      return {ChorExpr::comm(source, e, target), {{source, Ty::Unit}, {target, t}}};
    }
    if (roll < 54) return gen_if(env, depth);
    if (roll < 64) return gen_sel(env, depth);
    if (roll < 82) return gen_let(env, depth, roll < 74);
    if (roll < 90) return gen_set(env, depth);
    // The surface language sequences only inside bodies, so a sequence in
    // expression position travels as a bindingless let.
    Typed body = gen_body(env, depth - 1, 2);
    return {ChorExpr::let({}, body.expr), std::move(body.tys)};
  }

  // Either branch announces the verdict to every other process before doing
  // anything else, so all projections stay mergeable and nobody stalls.
  Typed gen_if(const Env& env, int depth) {
    ProcessName p = pick_proc();
    LocalExprPtr guard = gen_local(env, p, Ty::Bool, 2);
    std::string tag = std::to_string(next_label_++);
    auto wrap = [&](Typed branch, const char* prefix) {
      std::vector<std::pair<Label, ProcessName>> pairs;
      for (const auto& q : procs_)
        if (q != p) pairs.emplace_back(Label(prefix + tag), q);
      return Typed{ChorExpr::sel(p, std::move(pairs), branch.expr),
                   std::move(branch.tys)};
    };
    Typed then_branch = wrap(gen_body(env, depth - 1, 1), "then");
    Typed else_branch = wrap(gen_body(env, depth - 1, 1), "else");
    TyMap tys = then_branch.tys;
    for (const auto& [q, t] : else_branch.tys)
      if (ty_at(tys, q) != t) tys[q] = Ty::Mixed;
    for (auto& [q, t] : tys)
      if (ty_at(else_branch.tys, q) != t) t = Ty::Mixed;
    return {ChorExpr::if_(p, guard, then_branch.expr, else_branch.expr),
            std::move(tys)};
  }

  Typed gen_sel(const Env& env, int depth) {
    ProcessName chooser = pick_proc();
    std::vector<ProcessName> pool;
    for (const auto& q : procs_)
      if (q != chooser) pool.push_back(q);
    for (size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[below(i)]);
    pool.resize(1 + below(pool.size()));
    std::vector<std::pair<Label, ProcessName>> pairs;
    for (const auto& q : pool)
      pairs.emplace_back(Label("sel" + std::to_string(next_label_++)), q);
    Typed body = gen_body(env, depth - 1, 1);
    return {ChorExpr::sel(chooser, std::move(pairs), body.expr),
            std::move(body.tys)};
  }

  Typed gen_let(const Env& env, int depth, bool star) {
    size_t count = 1 + below(static_cast<size_t>(fanout_));
    Env inner = env;
    std::vector<std::pair<Binding, ChorExprPtr>> bindings;
    for (size_t i = 0; i < count; ++i) {
      // A plain let evaluates all bound forms before binding anything, so
      // its bound forms must not see sibling names; let* may.
      Typed value = gen_expr(star ? inner : env, depth - 1);
      bindings.emplace_back(make_binding(inner, value.tys), value.expr);
    }
    Typed body = gen_body(inner, depth - 1, 1);
    ChorExprPtr expr = star ? ChorExpr::let_star(std::move(bindings), body.expr)
                            : ChorExpr::let(std::move(bindings), body.expr);
    return {std::move(expr), std::move(body.tys)};
  }

  // set! keeps the variable's payload type so later references stay valid,
  // and the new value is computed at the owner or sent to it.
  Typed gen_set(const Env& env, int depth) {
    struct Cand {
      ProcessName owner;
      std::string name;
      Ty ty;
    };
    std::vector<Cand> cands;
    for (const auto& [p, vars] : env)
      for (const auto& [name, ty] : vars)
        if (usable(ty)) cands.push_back(Cand{p, name, ty});
    if (cands.empty()) return gen_at(env);
    const Cand& c = cands[below(cands.size())];
    ChorExprPtr value;
    if (procs_.size() > 1 && below(2) == 0) {
      ProcessName source = pick_other(c.owner);
      value = ChorExpr::comm(source, gen_local(env, source, c.ty, 2), c.owner);
    } else {
      std::vector<LocalExprPtr> exprs;
      exprs.push_back(gen_local(env, c.owner, c.ty, 2));
      value = ChorExpr::at(c.owner, std::move(exprs));
    }
    (void)depth;
    return {ChorExpr::set(LocatedBinding{c.owner, c.name}, value), {}};
  }
};

}  // namespace

ChorProgram gen_choreography(const GenConfig& config) { return Gen(config).run(); }

namespace {

std::string join_payloads(const std::vector<Payload>& seq) {
  std::string out;
  for (const auto& p : seq) {
    if (!out.empty()) out += ", ";
    out += print_payload(p);
  }
  return out;
}

}  // namespace

DiffReport diff_run(const ChorProgram& program, const Fixture& fixture) {
  GlobalState want = interpret(program, fixture);
  std::map<ProcessName, NetProgramPtr> nets = project_program(program);
  RunResult got = run_network(nets, fixture);

  DiffReport report;
  auto fail = [&](std::string detail) {
    report.match = false;
    report.detail = std::move(detail);
  };

  for (const auto& p : program.processes) {
    const ProcessResult& pr = got.per_process.at(p);
    const Value& expect = want.values.at(p);
    if (!(pr.value == expect)) {
      fail("process " + p.text() + ": final value " + print_value(pr.value) +
           ", interpreter says " + print_value(expect));
      return report;
    }
    const auto& ws = want.stores.at(p);
    if (pr.store != ws) {
      for (const auto& [name, v] : ws) {
        auto it = pr.store.find(name);
        if (it == pr.store.end()) {
          fail("process " + p.text() + ": variable '" + name +
               "' missing from the run");
          return report;
        }
        if (!(it->second == v)) {
          fail("process " + p.text() + ": variable '" + name + "' is " +
               print_value(it->second) + ", interpreter says " + print_value(v));
          return report;
        }
      }
      for (const auto& [name, v] : pr.store) {
        if (!ws.count(name)) {
          fail("process " + p.text() + ": unexpected variable '" + name + "'");
          return report;
        }
      }
    }
  }

  for (const auto& s : program.processes) {
    for (const auto& r : program.processes) {
      if (s == r) continue;
      std::vector<Payload> want_seq;
      std::vector<Payload> got_seq;
      for (const auto& m : want.log)
        if (m.sender == s && m.receiver == r) want_seq.push_back(m.payload);
      for (const auto& m : got.per_process.at(s).sent)
        if (m.receiver == r) got_seq.push_back(m.payload);
      if (want_seq != got_seq) {
        fail("channel " + s.text() + " to " + r.text() + ": run sent [" +
             join_payloads(got_seq) + "], interpreter says [" +
             join_payloads(want_seq) + "]");
        return report;
      }
    }
  }
  return report;
}

}  // namespace choret
