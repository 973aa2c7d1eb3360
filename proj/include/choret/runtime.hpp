#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "choret/ast.hpp"

namespace choret {

// What travels over a channel: ordinary values from send, or selection
// labels from choose~>. Receiving one kind where the other is expected is a
// runtime error, not a silent coercion.
using Payload = std::variant<Value, Label>;

struct Message {
  ProcessName sender;
  ProcessName receiver;
  Payload payload;

  friend bool operator==(const Message&, const Message&) = default;
};

std::string print_payload(const Payload& p);

// Local evaluation faults: unbound variables, unknown builtins, arity and
// type errors. Pure of communication, so both the distributed runtime and
// the sequential interpreter raise identical errors.
class EvalError : public std::runtime_error {
 public:
  EvalError(std::string message, SourceLoc loc = {});

  const SourceLoc& loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

// Distributed-execution faults attributed to one process: unexpected branch
// labels, payload kind mismatches, or an EvalError surfacing mid-run.
class RunError : public std::runtime_error {
 public:
  RunError(ProcessName process, std::string message);

  const ProcessName& process() const { return process_; }

 private:
  ProcessName process_;
};

class DeadlockError : public std::runtime_error {
 public:
  // Each entry: (blocked process, peer it waits on). Sorted by process name.
  explicit DeadlockError(std::vector<std::pair<ProcessName, ProcessName>> waiting);

  const std::vector<std::pair<ProcessName, ProcessName>>& waiting() const {
    return waiting_;
  }

 private:
  std::vector<std::pair<ProcessName, ProcessName>> waiting_;
};

// Builtins are pure host functions fixed before a run starts.
using BuiltinFn = std::function<Value(const std::vector<Value>&)>;
using BuiltinTable = std::map<std::string, BuiltinFn>;

// + - * <= < >= > eq? not string-append void. and/or are special forms
// handled by eval_local itself (they short-circuit).
BuiltinTable core_builtins();

struct ProcessSetup {
  BuiltinTable builtins = core_builtins();
  std::map<std::string, Value> globals;  // seeds the top-level store frame
};

struct Fixture {
  ProcessSetup defaults;
  std::map<std::string, ProcessSetup> per_process;  // keyed by process text

  const ProcessSetup& for_process(const ProcessName& p) const;
};

// Mutable variable environment: a stack of frames, the bottom one being the
// process's top level. define binds in the innermost frame, set! assigns the
// nearest existing binding, lookup searches inside out.
class Store {
 public:
  Store() { frames_.emplace_back(); }
  explicit Store(std::map<std::string, Value> globals) {
    frames_.push_back(std::move(globals));
  }

  void push_frame() { frames_.emplace_back(); }
  void pop_frame() { frames_.pop_back(); }

  void define(const std::string& name, Value v) { frames_.back()[name] = std::move(v); }
  void assign(const std::string& name, Value v);
  const Value* lookup(const std::string& name) const;

  const std::map<std::string, Value>& top_level() const { return frames_.front(); }

 private:
  std::vector<std::map<std::string, Value>> frames_;
};

Value eval_local(const LocalExpr& e, const Store& store, const BuiltinTable& builtins);

// In-process reliable transport: one FIFO mailbox per ordered (sender,
// receiver) pair. receive blocks until a payload arrives; when every live
// process is blocked on an empty mailbox no message can ever arrive, so the
// last process to block (or retire) raises a deadlock diagnosis in all of
// them rather than hanging the run.
class Transport {
 public:
  explicit Transport(std::vector<ProcessName> participants);

  void send(const ProcessName& from, const ProcessName& to, Payload payload);
  Payload receive(const ProcessName& self, const ProcessName& from);
  void retire(const ProcessName& self);

 private:
  bool quiescent_locked() const;

  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::pair<std::string, std::string>, std::deque<Payload>> boxes_;
  std::map<ProcessName, ProcessName> waiting_;
  size_t active_;
  bool deadlocked_ = false;
  std::vector<std::pair<ProcessName, ProcessName>> diagnosis_;
};

struct ProcessResult {
  std::map<std::string, Value> store;  // final top-level frame
  Value value = Unit{};                // value of the last form
  std::vector<Message> sent;           // this process's sends, in order

  friend bool operator==(const ProcessResult&, const ProcessResult&) = default;
};

struct RunResult {
  std::map<ProcessName, ProcessResult> per_process;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

ProcessResult run_process(const ProcessName& self, const NetProgramPtr& program,
                          Transport& transport, const ProcessSetup& setup);

// Runs every projection on its own thread. Rethrows the first per-process
// error (by process name order); a deadlock diagnosis is reported only when
// no process failed for a more specific reason.
RunResult run_network(const std::map<ProcessName, NetProgramPtr>& programs,
                      const Fixture& fixture);

}  // namespace choret
