#include "choret/runtime.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <thread>

namespace choret {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// Wrapping arithmetic keeps generated programs free of undefined behavior
// however literals get chained through variables.
std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                   static_cast<std::uint64_t>(b));
}

std::int64_t want_int(const std::string& builtin, const Value& v) {
  if (const auto* n = std::get_if<std::int64_t>(&v)) return *n;
  throw EvalError(builtin + ": expected an integer, got " + print_value(v));
}

const std::string& want_string(const std::string& builtin, const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw EvalError(builtin + ": expected a string, got " + print_value(v));
}

void want_arity(const std::string& builtin, const std::vector<Value>& args, size_t n) {
  if (args.size() != n)
    throw EvalError(builtin + ": expected " + std::to_string(n) + " arguments, got " +
                    std::to_string(args.size()));
}

BuiltinFn int_compare(std::string name, bool (*cmp)(std::int64_t, std::int64_t)) {
  return [name = std::move(name), cmp](const std::vector<Value>& args) -> Value {
    want_arity(name, args, 2);
    return cmp(want_int(name, args[0]), want_int(name, args[1]));
  };
}

}  // namespace

std::string print_payload(const Payload& p) {
  if (const auto* label = std::get_if<Label>(&p)) return "label " + label->text();
  return print_value(std::get<Value>(p));
}

EvalError::EvalError(std::string message, SourceLoc loc)
    : std::runtime_error(loc.known() ? loc.to_string() + ": " + message : message),
      loc_(loc) {}

RunError::RunError(ProcessName process, std::string message)
    : std::runtime_error("process " + process.text() + ": " + message),
      process_(std::move(process)) {}

namespace {

std::string describe_deadlock(const std::vector<std::pair<ProcessName, ProcessName>>& w) {
  std::string out = "deadlock:";
  for (const auto& [blocked, peer] : w)
    out += " " + blocked.text() + " waits on " + peer.text() + ";";
  if (!w.empty()) out.pop_back();
  return out;
}

}  // namespace

namespace {

std::vector<std::pair<ProcessName, ProcessName>> sorted_waiting(
    std::vector<std::pair<ProcessName, ProcessName>> waiting) {
  std::sort(waiting.begin(), waiting.end());
  return waiting;
}

}  // namespace

DeadlockError::DeadlockError(std::vector<std::pair<ProcessName, ProcessName>> waiting)
    : std::runtime_error(describe_deadlock(sorted_waiting(waiting))),
      waiting_(sorted_waiting(std::move(waiting))) {}

BuiltinTable core_builtins() {
  BuiltinTable t;
  t["+"] = [](const std::vector<Value>& args) -> Value {
    std::int64_t acc = 0;
    for (const Value& v : args) acc = wrap_add(acc, want_int("+", v));
    return acc;
  };
  t["*"] = [](const std::vector<Value>& args) -> Value {
    std::int64_t acc = 1;
    for (const Value& v : args) acc = wrap_mul(acc, want_int("*", v));
    return acc;
  };
  t["-"] = [](const std::vector<Value>& args) -> Value {
    if (args.empty()) throw EvalError("-: expected at least 1 argument");
    std::int64_t acc = want_int("-", args[0]);
    if (args.size() == 1) return wrap_sub(0, acc);
    for (size_t i = 1; i < args.size(); ++i) acc = wrap_sub(acc, want_int("-", args[i]));
    return acc;
  };
  t["<="] = int_compare("<=", [](std::int64_t a, std::int64_t b) { return a <= b; });
  t["<"] = int_compare("<", [](std::int64_t a, std::int64_t b) { return a < b; });
  t[">="] = int_compare(">=", [](std::int64_t a, std::int64_t b) { return a >= b; });
  t[">"] = int_compare(">", [](std::int64_t a, std::int64_t b) { return a > b; });
  t["eq?"] = [](const std::vector<Value>& args) -> Value {
    want_arity("eq?", args, 2);
    return args[0] == args[1];
  };
  t["not"] = [](const std::vector<Value>& args) -> Value {
    want_arity("not", args, 1);
    return !truthy(args[0]);
  };
  t["string-append"] = [](const std::vector<Value>& args) -> Value {
    std::string out;
    for (const Value& v : args) out += want_string("string-append", v);
    return out;
  };
  t["void"] = [](const std::vector<Value>&) -> Value { return Unit{}; };
  return t;
}

const ProcessSetup& Fixture::for_process(const ProcessName& p) const {
  auto it = per_process.find(p.text());
  return it == per_process.end() ? defaults : it->second;
}

void Store::assign(const std::string& name, Value v) {
  for (auto frame = frames_.rbegin(); frame != frames_.rend(); ++frame) {
    auto it = frame->find(name);
    if (it != frame->end()) {
      it->second = std::move(v);
      return;
    }
  }
  throw EvalError("set!: variable '" + name + "' is not bound");
}

const Value* Store::lookup(const std::string& name) const {
  for (auto frame = frames_.rbegin(); frame != frames_.rend(); ++frame) {
    auto it = frame->find(name);
    if (it != frame->end()) return &it->second;
  }
  return nullptr;
}

Value eval_local(const LocalExpr& e, const Store& store, const BuiltinTable& builtins) {
  return std::visit(
      overloaded{
          [&](const LocalExpr::Lit& n) -> Value { return n.value; },
          [&](const LocalExpr::Var& n) -> Value {
            const Value* v = store.lookup(n.name);
            if (!v) throw EvalError("variable '" + n.name + "' is not bound", e.loc());
            return *v;
          },
          [&](const LocalExpr::App& n) -> Value {
            // and/or short-circuit, so they cannot go through the table.
            if (n.builtin == "and") {
              Value v = true;
              for (const auto& arg : n.args) {
                v = eval_local(*arg, store, builtins);
                if (!truthy(v)) return v;
              }
              return v;
            }
            if (n.builtin == "or") {
              for (const auto& arg : n.args) {
                Value v = eval_local(*arg, store, builtins);
                if (truthy(v)) return v;
              }
              return false;
            }
            auto it = builtins.find(n.builtin);
            if (it == builtins.end())
              throw EvalError("unknown builtin '" + n.builtin + "'", e.loc());
            std::vector<Value> args;
            args.reserve(n.args.size());
            for (const auto& arg : n.args) args.push_back(eval_local(*arg, store, builtins));
            try {
              return it->second(args);
            } catch (const EvalError& err) {
              if (err.loc().known()) throw;
              throw EvalError(err.what(), e.loc());
            }
          },
          [&](const LocalExpr::Block& n) -> Value {
            Value v = Unit{};
            for (const auto& form : n.body) v = eval_local(*form, store, builtins);
            return v;
          },
      },
      e.node());
}

Transport::Transport(std::vector<ProcessName> participants)
    : active_(participants.size()) {}

void Transport::send(const ProcessName& from, const ProcessName& to, Payload payload) {
  std::lock_guard<std::mutex> lock(mu_);
  boxes_[{from.text(), to.text()}].push_back(std::move(payload));
  cv_.notify_all();
}

// All live processes blocked, each on an empty mailbox: nothing can wake
// anyone, ever.
bool Transport::quiescent_locked() const {
  if (active_ == 0 || waiting_.size() != active_) return false;
  for (const auto& [blocked, peer] : waiting_) {
    auto box = boxes_.find({peer.text(), blocked.text()});
    if (box != boxes_.end() && !box->second.empty()) return false;
  }
  return true;
}

Payload Transport::receive(const ProcessName& self, const ProcessName& from) {
  std::unique_lock<std::mutex> lock(mu_);
  auto& box = boxes_[{from.text(), self.text()}];
  while (box.empty()) {
    if (deadlocked_) throw DeadlockError(diagnosis_);
    waiting_.insert_or_assign(self, from);
    if (quiescent_locked()) {
      diagnosis_.assign(waiting_.begin(), waiting_.end());
      deadlocked_ = true;
      cv_.notify_all();
      throw DeadlockError(diagnosis_);
    }
    cv_.wait(lock);
    waiting_.erase(self);
  }
  Payload payload = std::move(box.front());
  box.pop_front();
  return payload;
}

void Transport::retire(const ProcessName& self) {
  std::lock_guard<std::mutex> lock(mu_);
  --active_;
  waiting_.erase(self);
  if (!deadlocked_ && quiescent_locked()) {
    diagnosis_.assign(waiting_.begin(), waiting_.end());
    deadlocked_ = true;
    cv_.notify_all();
  }
}

namespace {

struct NetCtx {
  const ProcessName& self;
  Transport& transport;
  const BuiltinTable& builtins;
  std::vector<Message>& sent;
};

Value exec(const NetProgramPtr& n, Store& store, NetCtx& ctx) {
  return std::visit(
      overloaded{
          [&](const NetProgram::Local& x) -> Value {
            return eval_local(*x.expr, store, ctx.builtins);
          },
          [&](const NetProgram::Void&) -> Value { return Unit{}; },
          [&](const NetProgram::Send& x) -> Value {
            Value v = eval_local(*x.expr, store, ctx.builtins);
            ctx.transport.send(ctx.self, x.peer, v);
            ctx.sent.push_back(Message{ctx.self, x.peer, v});
            return Unit{};
          },
          [&](const NetProgram::Recv& x) -> Value {
            Payload p = ctx.transport.receive(ctx.self, x.peer);
            if (const auto* label = std::get_if<Label>(&p))
              throw RunError(ctx.self, "expected a value from " + x.peer.text() +
                                           ", received selection label '" +
                                           label->text() + "'");
            return std::get<Value>(p);
          },
          [&](const NetProgram::Choose& x) -> Value {
            ctx.transport.send(ctx.self, x.peer, x.label);
            ctx.sent.push_back(Message{ctx.self, x.peer, x.label});
            return exec(x.cont, store, ctx);
          },
          [&](const NetProgram::Branch& x) -> Value {
            Payload p = ctx.transport.receive(ctx.self, x.peer);
            const auto* label = std::get_if<Label>(&p);
            if (!label)
              throw RunError(ctx.self, "expected a selection label from " + x.peer.text() +
                                           ", received " + print_payload(p));
            for (const auto& [arm_label, prog] : x.arms)
              if (arm_label == *label) return exec(prog, store, ctx);
            throw RunError(ctx.self, "unexpected label '" + label->text() + "' from " +
                                         x.peer.text());
          },
          [&](const NetProgram::If& x) -> Value {
            if (truthy(eval_local(*x.guard, store, ctx.builtins)))
              return exec(x.then_branch, store, ctx);
            return exec(x.else_branch, store, ctx);
          },
          [&](const NetProgram::Let& x) -> Value {
            // Plain let: all bound programs run before any name is visible.
            std::vector<Value> values;
            values.reserve(x.bindings.size());
            for (const auto& [name, prog] : x.bindings)
              values.push_back(exec(prog, store, ctx));
            store.push_frame();
            for (size_t i = 0; i < x.bindings.size(); ++i)
              if (x.bindings[i].first != "_")
                store.define(x.bindings[i].first, std::move(values[i]));
            Value v;
            try {
              v = exec(x.body, store, ctx);
            } catch (...) {
              store.pop_frame();
              throw;
            }
            store.pop_frame();
            return v;
          },
          [&](const NetProgram::Define& x) -> Value {
            Value v = exec(x.value, store, ctx);
            if (x.name != "_") store.define(x.name, std::move(v));
            return Unit{};
          },
          [&](const NetProgram::Set& x) -> Value {
            Value v = exec(x.value, store, ctx);
            store.assign(x.name, std::move(v));
            return Unit{};
          },
          [&](const NetProgram::Seq& x) -> Value {
            Value v = Unit{};
            for (const auto& item : x.items) v = exec(item, store, ctx);
            return v;
          },
      },
      n->node());
}

}  // namespace

ProcessResult run_process(const ProcessName& self, const NetProgramPtr& program,
                          Transport& transport, const ProcessSetup& setup) {
  Store store(setup.globals);
  ProcessResult result;
  NetCtx ctx{self, transport, setup.builtins, result.sent};
  try {
    result.value = exec(program, store, ctx);
  } catch (...) {
    transport.retire(self);
    throw;
  }
  transport.retire(self);
  result.store = store.top_level();
  return result;
}

RunResult run_network(const std::map<ProcessName, NetProgramPtr>& programs,
                      const Fixture& fixture) {
  std::vector<ProcessName> participants;
  for (const auto& [name, prog] : programs) participants.push_back(name);
  Transport transport(participants);

  struct Outcome {
    std::optional<ProcessResult> result;
    std::exception_ptr error;
    bool is_deadlock = false;
  };
  std::vector<Outcome> outcomes(participants.size());

  std::vector<std::thread> threads;
  threads.reserve(participants.size());
  for (size_t i = 0; i < participants.size(); ++i) {
    const ProcessName& name = participants[i];
    const NetProgramPtr& program = programs.at(name);
    threads.emplace_back([&, i, name, program] {
      try {
        outcomes[i].result = run_process(name, program, transport,
                                         fixture.for_process(name));
      } catch (const DeadlockError&) {
        outcomes[i].error = std::current_exception();
        outcomes[i].is_deadlock = true;
      } catch (const EvalError& e) {
        // Attribute local faults to the process that hit them.
        try {
          throw RunError(name, e.what());
        } catch (...) {
          outcomes[i].error = std::current_exception();
        }
      } catch (...) {
        outcomes[i].error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();

  // A process error usually strands its peers; report the root cause, not
  // the resulting deadlock.
  for (const Outcome& o : outcomes)
    if (o.error && !o.is_deadlock) std::rethrow_exception(o.error);
  for (const Outcome& o : outcomes)
    if (o.error) std::rethrow_exception(o.error);

  RunResult result;
  for (size_t i = 0; i < participants.size(); ++i)
    result.per_process.emplace(participants[i], std::move(*outcomes[i].result));
  return result;
}

}  // namespace choret
