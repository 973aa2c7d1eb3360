#include "choret/projector.hpp"

#include <utility>

#include "choret/reader.hpp"

namespace choret {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

std::string to_string(MergeReason reason) {
  switch (reason) {
    case MergeReason::kConstructorMismatch: return "constructor-mismatch";
    case MergeReason::kLocalExprMismatch: return "local-expr-mismatch";
    case MergeReason::kPeerMismatch: return "peer-mismatch";
    case MergeReason::kLabelMismatch: return "label-mismatch";
    case MergeReason::kArityMismatch: return "arity-mismatch";
  }
  return "unknown";
}

namespace {

std::string describe_merge(const NetProgramPtr& left, const NetProgramPtr& right,
                           MergeReason reason) {
  return "cannot merge " + print_network(*left) + " with " + print_network(*right) +
         ": " + to_string(reason);
}

}  // namespace

MergeError::MergeError(NetProgramPtr left, NetProgramPtr right, MergeReason reason,
                       SourceLoc chor_if_loc)
    : std::runtime_error(describe_merge(left, right, reason)),
      left_(std::move(left)),
      right_(std::move(right)),
      reason_(reason),
      chor_if_loc_(chor_if_loc) {}

MergeError MergeError::with_loc(SourceLoc loc) const {
  return MergeError(left_, right_, reason_, loc);
}

ProjectError::ProjectError(ProcessName process, MergeError cause, SourceLoc loc)
    : std::runtime_error("cannot project for process " + process.text() + " (if at " +
                         loc.to_string() + "): " + cause.what()),
      process_(std::move(process)),
      cause_(std::move(cause)),
      loc_(loc) {}

NetProgramPtr merge(const NetProgramPtr& a, const NetProgramPtr& b) {
  const NetProgram::Node& an = a->node();
  const NetProgram::Node& bn = b->node();
  if (an.index() != bn.index())
    throw MergeError(a, b, MergeReason::kConstructorMismatch);
  return std::visit(
      overloaded{
          [&](const NetProgram::Local& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Local>(bn);
            if (!expr_equal(x.expr, y.expr))
              throw MergeError(a, b, MergeReason::kLocalExprMismatch);
            return a;
          },
          [&](const NetProgram::Void&) -> NetProgramPtr { return a; },
          [&](const NetProgram::Send& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Send>(bn);
            if (x.peer != y.peer) throw MergeError(a, b, MergeReason::kPeerMismatch);
            if (!expr_equal(x.expr, y.expr))
              throw MergeError(a, b, MergeReason::kLocalExprMismatch);
            return a;
          },
          [&](const NetProgram::Recv& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Recv>(bn);
            if (x.peer != y.peer) throw MergeError(a, b, MergeReason::kPeerMismatch);
            return a;
          },
          [&](const NetProgram::Choose& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Choose>(bn);
            if (x.peer != y.peer) throw MergeError(a, b, MergeReason::kPeerMismatch);
            if (x.label != y.label) throw MergeError(a, b, MergeReason::kLabelMismatch);
            return NetProgram::choose(x.peer, x.label, merge(x.cont, y.cont));
          },
          [&](const NetProgram::Branch& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Branch>(bn);
            if (x.peer != y.peer) throw MergeError(a, b, MergeReason::kPeerMismatch);
            // Label union: walk the left arms in order, merging where the
            // right side has the same label, then append right-only arms.
            std::vector<std::pair<Label, NetProgramPtr>> arms;
            std::vector<bool> used(y.arms.size(), false);
            for (const auto& [label, prog] : x.arms) {
              const NetProgramPtr* other = nullptr;
              for (size_t j = 0; j < y.arms.size(); ++j) {
                if (y.arms[j].first == label) {
                  other = &y.arms[j].second;
                  used[j] = true;
                  break;
                }
              }
              arms.emplace_back(label, other ? merge(prog, *other) : prog);
            }
            for (size_t j = 0; j < y.arms.size(); ++j)
              if (!used[j]) arms.push_back(y.arms[j]);
            return NetProgram::branch(x.peer, std::move(arms));
          },
          [&](const NetProgram::If& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::If>(bn);
            if (!expr_equal(x.guard, y.guard))
              throw MergeError(a, b, MergeReason::kLocalExprMismatch);
            return NetProgram::if_(x.guard, merge(x.then_branch, y.then_branch),
                                   merge(x.else_branch, y.else_branch));
          },
          [&](const NetProgram::Let& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Let>(bn);
            if (x.bindings.size() != y.bindings.size())
              throw MergeError(a, b, MergeReason::kArityMismatch);
            std::vector<std::pair<std::string, NetProgramPtr>> bindings;
            for (size_t i = 0; i < x.bindings.size(); ++i) {
              if (x.bindings[i].first != y.bindings[i].first)
                throw MergeError(a, b, MergeReason::kLocalExprMismatch);
              bindings.emplace_back(x.bindings[i].first,
                                    merge(x.bindings[i].second, y.bindings[i].second));
            }
            return NetProgram::let(std::move(bindings), merge(x.body, y.body));
          },
          [&](const NetProgram::Define& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Define>(bn);
            if (x.name != y.name) throw MergeError(a, b, MergeReason::kLocalExprMismatch);
            return NetProgram::define(x.name, merge(x.value, y.value));
          },
          [&](const NetProgram::Set& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Set>(bn);
            if (x.name != y.name) throw MergeError(a, b, MergeReason::kLocalExprMismatch);
            return NetProgram::set(x.name, merge(x.value, y.value));
          },
          [&](const NetProgram::Seq& x) -> NetProgramPtr {
            const auto& y = std::get<NetProgram::Seq>(bn);
            if (x.items.size() != y.items.size())
              throw MergeError(a, b, MergeReason::kArityMismatch);
            std::vector<NetProgramPtr> items;
            for (size_t i = 0; i < x.items.size(); ++i)
              items.push_back(merge(x.items[i], y.items[i]));
            return NetProgram::seq(std::move(items));
          },
      },
      an);
}

ChorExprPtr desugar_let_star(const ChorExpr::LetStar& node, SourceLoc loc) {
  if (node.bindings.empty()) return ChorExpr::let({}, node.body, loc);
  ChorExprPtr result = node.body;
  for (size_t i = node.bindings.size(); i-- > 0;)
    result = ChorExpr::let({node.bindings[i]}, result, loc);
  return result;
}

NetProgramPtr project_expr(const ChorExprPtr& e, const ProcessName& a) {
  return std::visit(
      overloaded{
          [&](const ChorExpr::At& n) -> NetProgramPtr {
            if (n.process != a) return NetProgram::void_();
            if (n.exprs.size() == 1) return NetProgram::local(n.exprs[0]);
            std::vector<NetProgramPtr> items;
            for (const auto& expr : n.exprs) items.push_back(NetProgram::local(expr));
            return NetProgram::seq(std::move(items));
          },
          [&](const ChorExpr::Comm& n) -> NetProgramPtr {
            if (n.source == a) return NetProgram::send(n.target, n.expr);
            if (n.target == a) return NetProgram::recv(n.source);
            return NetProgram::void_();
          },
          [&](const ChorExpr::If& n) -> NetProgramPtr {
            NetProgramPtr then_part = project_expr(n.then_branch, a);
            NetProgramPtr else_part = project_expr(n.else_branch, a);
            if (n.guard_at == a)
              return NetProgram::if_(n.guard, std::move(then_part), std::move(else_part));
            try {
              return merge(then_part, else_part);
            } catch (const MergeError& err) {
              throw ProjectError(a, err.with_loc(e->loc()), e->loc());
            }
          },
          [&](const ChorExpr::Sel& n) -> NetProgramPtr {
            // Peel the leading pair; the remainder is a smaller selection.
            if (n.pairs.empty()) return project_expr(n.body, a);
            auto [label, target] = n.pairs.front();
            std::vector<std::pair<Label, ProcessName>> rest(n.pairs.begin() + 1,
                                                            n.pairs.end());
            ChorExprPtr remainder = ChorExpr::sel(n.chooser, std::move(rest), n.body,
                                                  e->loc());
            if (n.chooser == a)
              return NetProgram::choose(target, label, project_expr(remainder, a));
            if (target == a)
              return NetProgram::branch(n.chooser, {{label, project_expr(remainder, a)}});
            return project_expr(remainder, a);
          },
          [&](const ChorExpr::Let& n) -> NetProgramPtr {
            std::vector<std::pair<std::string, NetProgramPtr>> bindings;
            for (const auto& [binding, value] : n.bindings) {
              std::string name = std::visit(
                  overloaded{
                      [](const GlobalBinding& g) { return g.name; },
                      [&](const LocatedBinding& l) {
                        return l.process == a ? l.name : std::string("_");
                      },
                  },
                  binding);
              bindings.emplace_back(std::move(name), project_expr(value, a));
            }
            return NetProgram::let(std::move(bindings), project_expr(n.body, a));
          },
          [&](const ChorExpr::LetStar& n) -> NetProgramPtr {
            return project_expr(desugar_let_star(n, e->loc()), a);
          },
          [&](const ChorExpr::Set& n) -> NetProgramPtr {
            NetProgramPtr value = project_expr(n.value, a);
            if (n.target.process == a) return NetProgram::set(n.target.name, std::move(value));
            // Not the owner: keep the value program for its effects.
            return value;
          },
          [&](const ChorExpr::Seq& n) -> NetProgramPtr {
            std::vector<NetProgramPtr> items;
            for (const auto& term : n.terms) items.push_back(project_term(term, a));
            return NetProgram::seq(std::move(items));
          },
      },
      e->node());
}

NetProgramPtr project_term(const ChorTermPtr& t, const ProcessName& a) {
  return std::visit(
      overloaded{
          [&](const ChorTerm::Define& n) -> NetProgramPtr {
            std::string name = std::visit(
                overloaded{
                    [](const GlobalBinding& g) { return g.name; },
                    [&](const LocatedBinding& l) {
                      return l.process == a ? l.name : std::string("_");
                    },
                },
                n.binding);
            return NetProgram::define(std::move(name), project_expr(n.value, a));
          },
          [&](const ChorTerm::DefineComm& n) -> NetProgramPtr {
            if (n.source_process == a)
              return NetProgram::send(n.target_process, n.source_expr);
            if (n.target_process == a)
              return NetProgram::define(n.target_var, NetProgram::recv(n.source_process));
            return NetProgram::void_();
          },
          [&](const ChorTerm::Bare& n) -> NetProgramPtr {
            return project_expr(n.expr, a);
          },
      },
      t->node());
}

std::map<ProcessName, NetProgramPtr> project_program(const ChorProgram& p) {
  std::map<ProcessName, NetProgramPtr> out;
  for (const ProcessName& process : p.processes) {
    if (p.body.empty()) {
      out.emplace(process, NetProgram::void_());
      continue;
    }
    std::vector<NetProgramPtr> items;
    for (const auto& term : p.body) items.push_back(project_term(term, process));
    out.emplace(process, NetProgram::seq(std::move(items)));
  }
  return out;
}

bool no_self_communication(const NetProgramPtr& n, const ProcessName& self) {
  return std::visit(
      overloaded{
          [&](const NetProgram::Local&) { return true; },
          [&](const NetProgram::Void&) { return true; },
          [&](const NetProgram::Send& x) { return x.peer != self; },
          [&](const NetProgram::Recv& x) { return x.peer != self; },
          [&](const NetProgram::Choose& x) {
            return x.peer != self && no_self_communication(x.cont, self);
          },
          [&](const NetProgram::Branch& x) {
            if (x.peer == self) return false;
            for (const auto& [label, prog] : x.arms)
              if (!no_self_communication(prog, self)) return false;
            return true;
          },
          [&](const NetProgram::If& x) {
            return no_self_communication(x.then_branch, self) &&
                   no_self_communication(x.else_branch, self);
          },
          [&](const NetProgram::Let& x) {
            for (const auto& [name, prog] : x.bindings)
              if (!no_self_communication(prog, self)) return false;
            return no_self_communication(x.body, self);
          },
          [&](const NetProgram::Define& x) { return no_self_communication(x.value, self); },
          [&](const NetProgram::Set& x) { return no_self_communication(x.value, self); },
          [&](const NetProgram::Seq& x) {
            for (const auto& item : x.items)
              if (!no_self_communication(item, self)) return false;
            return true;
          },
      },
      n->node());
}

}  // namespace choret
