#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace choret {

// Position of a form in its source, 1-based. line == 0 means the node was
// synthesized (by the projector, a generator, or test code).
struct SourceLoc {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  std::string to_string() const;
};

// Identity of a participant. Compares by exact text.
class ProcessName {
 public:
  ProcessName() = default;
  explicit ProcessName(std::string text);

  const std::string& text() const { return text_; }

  friend bool operator==(const ProcessName&, const ProcessName&) = default;
  friend auto operator<=>(const ProcessName&, const ProcessName&) = default;

 private:
  std::string text_;
};

// Selection label transmitted by choose~> and dispatched on by branch?~>.
// Distinct from Symbol: labels steer control flow, symbols are data.
class Label {
 public:
  Label() = default;
  explicit Label(std::string text);

  const std::string& text() const { return text_; }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

 private:
  std::string text_;
};

struct Unit {
  friend bool operator==(const Unit&, const Unit&) = default;
};

struct Symbol {
  std::string name;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

// Runtime values of the local expression language. Unit is what a process
// observes for forms it does not participate in.
using Value = std::variant<std::int64_t, bool, std::string, Symbol, Unit>;

// Scheme truthiness: everything except #f counts as true.
bool truthy(const Value& v);

std::string print_value(const Value& v);
std::string quote_string(const std::string& s);

class LocalExpr;
using LocalExprPtr = std::shared_ptr<const LocalExpr>;

// Purely local computation: literals, variables, builtin applications and
// blocks. No lambdas and no communication, so evaluation never blocks.
class LocalExpr {
 public:
  struct Lit {
    Value value;
  };
  struct Var {
    std::string name;
  };
  struct App {
    std::string builtin;  // resolved against the builtin table at eval time
    std::vector<LocalExprPtr> args;
  };
  struct Block {
    std::vector<LocalExprPtr> body;  // nonempty; value of the last form
  };
  using Node = std::variant<Lit, Var, App, Block>;

  LocalExpr(Node node, SourceLoc loc) : node_(std::move(node)), loc_(loc) {}

  const Node& node() const { return node_; }
  const SourceLoc& loc() const { return loc_; }

  static LocalExprPtr lit(Value v, SourceLoc loc = {});
  static LocalExprPtr var(std::string name, SourceLoc loc = {});
  static LocalExprPtr app(std::string builtin, std::vector<LocalExprPtr> args,
                          SourceLoc loc = {});
  static LocalExprPtr block(std::vector<LocalExprPtr> body, SourceLoc loc = {});

 private:
  Node node_;
  SourceLoc loc_;
};

// Structural equality ignoring source locations.
bool expr_equal(const LocalExpr& a, const LocalExpr& b);
bool expr_equal(const LocalExprPtr& a, const LocalExprPtr& b);
bool operator==(const LocalExpr& a, const LocalExpr& b);

struct GlobalBinding {
  std::string name;

  friend bool operator==(const GlobalBinding&, const GlobalBinding&) = default;
};

struct LocatedBinding {
  ProcessName process;
  std::string name;

  friend bool operator==(const LocatedBinding&, const LocatedBinding&) = default;
};

// Binder in let/define position: a global X visible at every process, or a
// located (at P x) visible only at P.
using Binding = std::variant<GlobalBinding, LocatedBinding>;

class ChorExpr;
class ChorTerm;
using ChorExprPtr = std::shared_ptr<const ChorExpr>;
using ChorTermPtr = std::shared_ptr<const ChorTerm>;

class ChorExpr {
 public:
  struct At {
    ProcessName process;
    std::vector<LocalExprPtr> exprs;  // nonempty
  };
  struct Comm {
    ProcessName source;
    LocalExprPtr expr;  // evaluated at source
    ProcessName target;
  };
  struct If {
    ProcessName guard_at;
    LocalExprPtr guard;
    ChorExprPtr then_branch;
    ChorExprPtr else_branch;
  };
  struct Sel {
    ProcessName chooser;
    // Pairwise distinct targets, none equal to the chooser.
    std::vector<std::pair<Label, ProcessName>> pairs;
    ChorExprPtr body;
  };
  struct Let {
    std::vector<std::pair<Binding, ChorExprPtr>> bindings;
    ChorExprPtr body;
  };
  struct LetStar {
    std::vector<std::pair<Binding, ChorExprPtr>> bindings;
    ChorExprPtr body;
  };
  struct Set {
    LocatedBinding target;
    ChorExprPtr value;
  };
  // Grouping for multi-form bodies. Elements are terms because the surface
  // language allows define/define/<~ inside sel~> and let bodies.
  struct Seq {
    std::vector<ChorTermPtr> terms;  // nonempty, never a single bare expression
  };
  using Node = std::variant<At, Comm, If, Sel, Let, LetStar, Set, Seq>;

  ChorExpr(Node node, SourceLoc loc) : node_(std::move(node)), loc_(loc) {}

  const Node& node() const { return node_; }
  const SourceLoc& loc() const { return loc_; }

  static ChorExprPtr at(ProcessName p, std::vector<LocalExprPtr> exprs,
                        SourceLoc loc = {});
  static ChorExprPtr comm(ProcessName source, LocalExprPtr expr,
                          ProcessName target, SourceLoc loc = {});
  static ChorExprPtr if_(ProcessName guard_at, LocalExprPtr guard,
                         ChorExprPtr then_branch, ChorExprPtr else_branch,
                         SourceLoc loc = {});
  static ChorExprPtr sel(ProcessName chooser,
                         std::vector<std::pair<Label, ProcessName>> pairs,
                         ChorExprPtr body, SourceLoc loc = {});
  static ChorExprPtr let(std::vector<std::pair<Binding, ChorExprPtr>> bindings,
                         ChorExprPtr body, SourceLoc loc = {});
  static ChorExprPtr let_star(std::vector<std::pair<Binding, ChorExprPtr>> bindings,
                              ChorExprPtr body, SourceLoc loc = {});
  static ChorExprPtr set(LocatedBinding target, ChorExprPtr value,
                         SourceLoc loc = {});
  // Canonicalizes: a single bare-expression term collapses to the expression.
  static ChorExprPtr seq(std::vector<ChorTermPtr> terms, SourceLoc loc = {});

 private:
  Node node_;
  SourceLoc loc_;
};

class ChorTerm {
 public:
  struct Define {
    Binding binding;
    ChorExprPtr value;
  };
  struct DefineComm {
    // (define/<~ (at P x) (at Q e)): Q evaluates e, sends it to P, P binds x.
    ProcessName target_process;
    std::string target_var;
    ProcessName source_process;
    LocalExprPtr source_expr;
  };
  struct Bare {
    ChorExprPtr expr;
  };
  using Node = std::variant<Define, DefineComm, Bare>;

  ChorTerm(Node node, SourceLoc loc) : node_(std::move(node)), loc_(loc) {}

  const Node& node() const { return node_; }
  const SourceLoc& loc() const { return loc_; }

  static ChorTermPtr define(Binding binding, ChorExprPtr value, SourceLoc loc = {});
  static ChorTermPtr define_comm(ProcessName target_process, std::string target_var,
                                 ProcessName source_process, LocalExprPtr source_expr,
                                 SourceLoc loc = {});
  static ChorTermPtr bare(ChorExprPtr expr, SourceLoc loc = {});

 private:
  Node node_;
  SourceLoc loc_;
};

struct ChorProgram {
  std::vector<ProcessName> processes;  // nonempty, pairwise distinct
  std::vector<ChorTermPtr> body;
};

// Process names appearing in at/~>/sel~>/define/<~ forms and if guards
// (located binders included; they are at-forms).
std::set<ProcessName> mentioned_processes(const ChorProgram& p);

// Empty string if the program's invariants hold, else a description of the
// first violation (used by the parser to reject ill-formed programs).
std::string validate_program(const ChorProgram& p);

class NetProgram;
using NetProgramPtr = std::shared_ptr<const NetProgram>;

// Per-process program produced by projection. No source locations: nodes are
// synthesized, and equality is purely structural.
class NetProgram {
 public:
  struct Local {
    LocalExprPtr expr;
  };
  struct Void {};
  struct Send {
    ProcessName peer;
    LocalExprPtr expr;
  };
  struct Recv {
    ProcessName peer;
  };
  struct Choose {
    ProcessName peer;
    Label label;
    NetProgramPtr cont;
  };
  struct Branch {
    ProcessName peer;
    std::vector<std::pair<Label, NetProgramPtr>> arms;  // nonempty, distinct labels
  };
  struct If {
    LocalExprPtr guard;
    NetProgramPtr then_branch;
    NetProgramPtr else_branch;
  };
  struct Let {
    std::vector<std::pair<std::string, NetProgramPtr>> bindings;  // "_" = wildcard
    NetProgramPtr body;
  };
  struct Define {
    std::string name;  // "_" = evaluate and discard
    NetProgramPtr value;
  };
  struct Set {
    std::string name;
    NetProgramPtr value;
  };
  struct Seq {
    std::vector<NetProgramPtr> items;  // nonempty, no directly nested Seq
  };
  using Node = std::variant<Local, Void, Send, Recv, Choose, Branch, If, Let,
                            Define, Set, Seq>;

  explicit NetProgram(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  static NetProgramPtr local(LocalExprPtr expr);
  static NetProgramPtr void_();
  static NetProgramPtr send(ProcessName peer, LocalExprPtr expr);
  static NetProgramPtr recv(ProcessName peer);
  static NetProgramPtr choose(ProcessName peer, Label label, NetProgramPtr cont);
  static NetProgramPtr branch(ProcessName peer,
                              std::vector<std::pair<Label, NetProgramPtr>> arms);
  static NetProgramPtr if_(LocalExprPtr guard, NetProgramPtr then_branch,
                           NetProgramPtr else_branch);
  static NetProgramPtr let(std::vector<std::pair<std::string, NetProgramPtr>> bindings,
                           NetProgramPtr body);
  static NetProgramPtr define(std::string name, NetProgramPtr value);
  static NetProgramPtr set(std::string name, NetProgramPtr value);
  // Canonicalizes: directly nested Seq items are spliced in. Throws
  // std::invalid_argument on an empty item list.
  static NetProgramPtr seq(std::vector<NetProgramPtr> items);

 private:
  Node node_;
};

bool operator==(const ChorExpr& a, const ChorExpr& b);
bool operator==(const ChorTerm& a, const ChorTerm& b);
bool operator==(const ChorProgram& a, const ChorProgram& b);
bool operator==(const NetProgram& a, const NetProgram& b);

}  // namespace choret
