#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "choret/ast.hpp"

namespace choret {

enum class MergeReason {
  kConstructorMismatch,
  kLocalExprMismatch,
  kPeerMismatch,
  kLabelMismatch,
  kArityMismatch,
};

std::string to_string(MergeReason reason);

// Raised when two projected branches cannot be reconciled. Carries the
// deepest failing pair; the originating if's location is attached by the
// projector (merge alone has no source position).
class MergeError : public std::runtime_error {
 public:
  MergeError(NetProgramPtr left, NetProgramPtr right, MergeReason reason,
             SourceLoc chor_if_loc = {});

  const NetProgramPtr& left() const { return left_; }
  const NetProgramPtr& right() const { return right_; }
  MergeReason reason() const { return reason_; }
  const SourceLoc& chor_if_loc() const { return chor_if_loc_; }

  MergeError with_loc(SourceLoc loc) const;

 private:
  NetProgramPtr left_;
  NetProgramPtr right_;
  MergeReason reason_;
  SourceLoc chor_if_loc_;
};

class ProjectError : public std::runtime_error {
 public:
  ProjectError(ProcessName process, MergeError cause, SourceLoc loc);

  const ProcessName& process() const { return process_; }
  const MergeError& cause() const { return cause_; }
  const SourceLoc& loc() const { return loc_; }

 private:
  ProcessName process_;
  MergeError cause_;
  SourceLoc loc_;
};

// Partial merge of network programs. Communication actions must agree
// exactly; branch?~> arms combine by label union (common labels merge
// recursively, one-sided labels are kept); everything else merges only with
// an identically shaped program. Throws MergeError otherwise.
NetProgramPtr merge(const NetProgramPtr& a, const NetProgramPtr& b);

// Endpoint projection of one expression/term/program onto process `a`.
// Throws ProjectError when an if at another process has unmergeable branches.
NetProgramPtr project_expr(const ChorExprPtr& e, const ProcessName& a);
NetProgramPtr project_term(const ChorTermPtr& t, const ProcessName& a);
std::map<ProcessName, NetProgramPtr> project_program(const ChorProgram& p);

// let* is sugar: each binding opens its own let, so merge never sees one.
ChorExprPtr desugar_let_star(const ChorExpr::LetStar& node, SourceLoc loc);

// True when no send/recv/choose/branch in `n` names `self` as its peer.
// Projection establishes this for every process it projects.
bool no_self_communication(const NetProgramPtr& n, const ProcessName& self);

}  // namespace choret
