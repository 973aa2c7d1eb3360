#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "choret/ast.hpp"
#include "choret/runtime.hpp"

namespace choret {

// What the sequential reference evaluation observed: the same facts the
// threaded runtime reports, gathered in one pass with no projection and no
// concurrency involved.
struct GlobalState {
  std::map<ProcessName, std::map<std::string, Value>> stores;  // final top frames
  std::map<ProcessName, Value> values;  // value of the last form, per process
  std::vector<Message> log;             // every payload, in source order
};

// Walks the choreography directly, tracking one store per process. Throws
// EvalError on local faults; never deadlocks because there is no waiting.
GlobalState interpret(const ChorProgram& program, const Fixture& fixture = {});

struct GenConfig {
  std::uint64_t seed = 0;
  int max_depth = 5;      // nesting of choreography constructs
  int max_processes = 4;  // at least 2 take part
  int max_fanout = 3;     // terms per body, bindings per let, call arity
};

// Deterministic: the same config yields the same program on every platform
// (mt19937_64 plus modulo, never std::uniform_int_distribution). Every
// generated program projects cleanly and runs without faults: if guards are
// announced to all other processes with distinct labels, set! keeps the
// variable's payload type, and only bound variables are referenced.
ChorProgram gen_choreography(const GenConfig& config);

struct DiffReport {
  bool match = true;
  std::string detail;  // empty on match, otherwise the first difference
};

// Projects the choreography, runs the projections on the threaded runtime,
// interprets the source sequentially, and compares final stores, final
// values, and the payload sequence of every ordered process pair.
DiffReport diff_run(const ChorProgram& program, const Fixture& fixture = {});

}  // namespace choret
