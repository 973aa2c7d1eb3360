#include "choret/ast.hpp"

#include <stdexcept>

namespace choret {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

bool ptr_equal(const LocalExprPtr& a, const LocalExprPtr& b) {
  return expr_equal(a, b);
}

bool ptr_equal(const ChorTermPtr& a, const ChorTermPtr& b) { return *a == *b; }
bool ptr_equal(const NetProgramPtr& a, const NetProgramPtr& b) { return *a == *b; }

template <class P>
bool all_equal(const std::vector<P>& a, const std::vector<P>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!ptr_equal(a[i], b[i])) return false;
  return true;
}

}  // namespace

std::string SourceLoc::to_string() const {
  if (!known()) return "?:?";
  return std::to_string(line) + ":" + std::to_string(column);
}

ProcessName::ProcessName(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw std::invalid_argument("process name must be nonempty");
}

Label::Label(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw std::invalid_argument("label must be nonempty");
}

bool truthy(const Value& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  return true;
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string print_value(const Value& v) {
  return std::visit(
      overloaded{
          [](std::int64_t n) { return std::to_string(n); },
          [](bool b) { return std::string(b ? "#t" : "#f"); },
          [](const std::string& s) { return quote_string(s); },
          [](const Symbol& s) { return "'" + s.name; },
          [](Unit) { return std::string("#<void>"); },
      },
      v);
}

LocalExprPtr LocalExpr::lit(Value v, SourceLoc loc) {
  return std::make_shared<LocalExpr>(Lit{std::move(v)}, loc);
}

LocalExprPtr LocalExpr::var(std::string name, SourceLoc loc) {
  return std::make_shared<LocalExpr>(Var{std::move(name)}, loc);
}

LocalExprPtr LocalExpr::app(std::string builtin, std::vector<LocalExprPtr> args,
                            SourceLoc loc) {
  return std::make_shared<LocalExpr>(App{std::move(builtin), std::move(args)}, loc);
}

LocalExprPtr LocalExpr::block(std::vector<LocalExprPtr> body, SourceLoc loc) {
  if (body.empty()) throw std::invalid_argument("block body must be nonempty");
  return std::make_shared<LocalExpr>(Block{std::move(body)}, loc);
}

bool expr_equal(const LocalExpr& a, const LocalExpr& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [&](const LocalExpr::Lit& x) {
            return x.value == std::get<LocalExpr::Lit>(b.node()).value;
          },
          [&](const LocalExpr::Var& x) {
            return x.name == std::get<LocalExpr::Var>(b.node()).name;
          },
          [&](const LocalExpr::App& x) {
            const auto& y = std::get<LocalExpr::App>(b.node());
            return x.builtin == y.builtin && all_equal(x.args, y.args);
          },
          [&](const LocalExpr::Block& x) {
            return all_equal(x.body, std::get<LocalExpr::Block>(b.node()).body);
          },
      },
      a.node());
}

bool expr_equal(const LocalExprPtr& a, const LocalExprPtr& b) {
  return expr_equal(*a, *b);
}

bool operator==(const LocalExpr& a, const LocalExpr& b) { return expr_equal(a, b); }

ChorExprPtr ChorExpr::at(ProcessName p, std::vector<LocalExprPtr> exprs, SourceLoc loc) {
  if (exprs.empty()) throw std::invalid_argument("at-form needs at least one expression");
  return std::make_shared<ChorExpr>(At{std::move(p), std::move(exprs)}, loc);
}

ChorExprPtr ChorExpr::comm(ProcessName source, LocalExprPtr expr, ProcessName target,
                           SourceLoc loc) {
  if (source == target)
    throw std::invalid_argument("communication source must differ from target");
  return std::make_shared<ChorExpr>(
      Comm{std::move(source), std::move(expr), std::move(target)}, loc);
}

ChorExprPtr ChorExpr::if_(ProcessName guard_at, LocalExprPtr guard,
                          ChorExprPtr then_branch, ChorExprPtr else_branch,
                          SourceLoc loc) {
  return std::make_shared<ChorExpr>(
      If{std::move(guard_at), std::move(guard), std::move(then_branch),
         std::move(else_branch)},
      loc);
}

ChorExprPtr ChorExpr::sel(ProcessName chooser,
                          std::vector<std::pair<Label, ProcessName>> pairs,
                          ChorExprPtr body, SourceLoc loc) {
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].second == chooser)
      throw std::invalid_argument("selection target must differ from the chooser");
    for (size_t j = i + 1; j < pairs.size(); ++j)
      if (pairs[i].second == pairs[j].second)
        throw std::invalid_argument("selection targets must be pairwise distinct");
  }
  return std::make_shared<ChorExpr>(
      Sel{std::move(chooser), std::move(pairs), std::move(body)}, loc);
}

ChorExprPtr ChorExpr::let(std::vector<std::pair<Binding, ChorExprPtr>> bindings,
                          ChorExprPtr body, SourceLoc loc) {
  return std::make_shared<ChorExpr>(Let{std::move(bindings), std::move(body)}, loc);
}

ChorExprPtr ChorExpr::let_star(std::vector<std::pair<Binding, ChorExprPtr>> bindings,
                               ChorExprPtr body, SourceLoc loc) {
  return std::make_shared<ChorExpr>(LetStar{std::move(bindings), std::move(body)}, loc);
}

ChorExprPtr ChorExpr::set(LocatedBinding target, ChorExprPtr value, SourceLoc loc) {
  return std::make_shared<ChorExpr>(Set{std::move(target), std::move(value)}, loc);
}

ChorExprPtr ChorExpr::seq(std::vector<ChorTermPtr> terms, SourceLoc loc) {
  if (terms.empty()) throw std::invalid_argument("seq needs at least one term");
  if (terms.size() == 1) {
    if (const auto* bare = std::get_if<ChorTerm::Bare>(&terms[0]->node()))
      return bare->expr;
  }
  return std::make_shared<ChorExpr>(Seq{std::move(terms)}, loc);
}

ChorTermPtr ChorTerm::define(Binding binding, ChorExprPtr value, SourceLoc loc) {
  return std::make_shared<ChorTerm>(Define{std::move(binding), std::move(value)}, loc);
}

ChorTermPtr ChorTerm::define_comm(ProcessName target_process, std::string target_var,
                                  ProcessName source_process, LocalExprPtr source_expr,
                                  SourceLoc loc) {
  if (target_process == source_process)
    throw std::invalid_argument("define/<~ source must differ from target");
  return std::make_shared<ChorTerm>(
      DefineComm{std::move(target_process), std::move(target_var),
                 std::move(source_process), std::move(source_expr)},
      loc);
}

ChorTermPtr ChorTerm::bare(ChorExprPtr expr, SourceLoc loc) {
  return std::make_shared<ChorTerm>(Bare{std::move(expr)}, loc);
}

namespace {

void collect(const ChorExprPtr& e, std::set<ProcessName>& out);

void collect_binding(const Binding& b, std::set<ProcessName>& out) {
  if (const auto* located = std::get_if<LocatedBinding>(&b)) out.insert(located->process);
}

void collect(const ChorTermPtr& t, std::set<ProcessName>& out) {
  std::visit(overloaded{
                 [&](const ChorTerm::Define& d) {
                   collect_binding(d.binding, out);
                   collect(d.value, out);
                 },
                 [&](const ChorTerm::DefineComm& d) {
                   out.insert(d.target_process);
                   out.insert(d.source_process);
                 },
                 [&](const ChorTerm::Bare& b) { collect(b.expr, out); },
             },
             t->node());
}

void collect(const ChorExprPtr& e, std::set<ProcessName>& out) {
  std::visit(overloaded{
                 [&](const ChorExpr::At& n) { out.insert(n.process); },
                 [&](const ChorExpr::Comm& n) {
                   out.insert(n.source);
                   out.insert(n.target);
                 },
                 [&](const ChorExpr::If& n) {
                   out.insert(n.guard_at);
                   collect(n.then_branch, out);
                   collect(n.else_branch, out);
                 },
                 [&](const ChorExpr::Sel& n) {
                   out.insert(n.chooser);
                   for (const auto& [label, target] : n.pairs) out.insert(target);
                   collect(n.body, out);
                 },
                 [&](const ChorExpr::Let& n) {
                   for (const auto& [binding, value] : n.bindings) {
                     collect_binding(binding, out);
                     collect(value, out);
                   }
                   collect(n.body, out);
                 },
                 [&](const ChorExpr::LetStar& n) {
                   for (const auto& [binding, value] : n.bindings) {
                     collect_binding(binding, out);
                     collect(value, out);
                   }
                   collect(n.body, out);
                 },
                 [&](const ChorExpr::Set& n) {
                   out.insert(n.target.process);
                   collect(n.value, out);
                 },
                 [&](const ChorExpr::Seq& n) {
                   for (const auto& t : n.terms) collect(t, out);
                 },
             },
             e->node());
}

}  // namespace

std::set<ProcessName> mentioned_processes(const ChorProgram& p) {
  std::set<ProcessName> out;
  for (const auto& t : p.body) collect(t, out);
  return out;
}

std::string validate_program(const ChorProgram& p) {
  if (p.processes.empty()) return "a choreography needs at least one process";
  for (size_t i = 0; i < p.processes.size(); ++i)
    for (size_t j = i + 1; j < p.processes.size(); ++j)
      if (p.processes[i] == p.processes[j])
        return "process '" + p.processes[i].text() + "' is declared twice";
  std::set<ProcessName> declared(p.processes.begin(), p.processes.end());
  for (const ProcessName& m : mentioned_processes(p))
    if (!declared.count(m))
      return "process '" + m.text() + "' is mentioned but not declared";
  return "";
}

NetProgramPtr NetProgram::local(LocalExprPtr expr) {
  return std::make_shared<NetProgram>(Local{std::move(expr)});
}

NetProgramPtr NetProgram::void_() { return std::make_shared<NetProgram>(Void{}); }

NetProgramPtr NetProgram::send(ProcessName peer, LocalExprPtr expr) {
  return std::make_shared<NetProgram>(Send{std::move(peer), std::move(expr)});
}

NetProgramPtr NetProgram::recv(ProcessName peer) {
  return std::make_shared<NetProgram>(Recv{std::move(peer)});
}

NetProgramPtr NetProgram::choose(ProcessName peer, Label label, NetProgramPtr cont) {
  return std::make_shared<NetProgram>(
      Choose{std::move(peer), std::move(label), std::move(cont)});
}

NetProgramPtr NetProgram::branch(ProcessName peer,
                                 std::vector<std::pair<Label, NetProgramPtr>> arms) {
  if (arms.empty()) throw std::invalid_argument("branch?~> needs at least one arm");
  for (size_t i = 0; i < arms.size(); ++i)
    for (size_t j = i + 1; j < arms.size(); ++j)
      if (arms[i].first == arms[j].first)
        throw std::invalid_argument("branch?~> arm labels must be distinct");
  return std::make_shared<NetProgram>(Branch{std::move(peer), std::move(arms)});
}

NetProgramPtr NetProgram::if_(LocalExprPtr guard, NetProgramPtr then_branch,
                              NetProgramPtr else_branch) {
  return std::make_shared<NetProgram>(
      If{std::move(guard), std::move(then_branch), std::move(else_branch)});
}

NetProgramPtr NetProgram::let(std::vector<std::pair<std::string, NetProgramPtr>> bindings,
                              NetProgramPtr body) {
  return std::make_shared<NetProgram>(Let{std::move(bindings), std::move(body)});
}

NetProgramPtr NetProgram::define(std::string name, NetProgramPtr value) {
  return std::make_shared<NetProgram>(Define{std::move(name), std::move(value)});
}

NetProgramPtr NetProgram::set(std::string name, NetProgramPtr value) {
  return std::make_shared<NetProgram>(Set{std::move(name), std::move(value)});
}

NetProgramPtr NetProgram::seq(std::vector<NetProgramPtr> items) {
  if (items.empty()) throw std::invalid_argument("seq needs at least one item");
  std::vector<NetProgramPtr> flat;
  flat.reserve(items.size());
  for (auto& item : items) {
    if (const auto* nested = std::get_if<Seq>(&item->node()))
      flat.insert(flat.end(), nested->items.begin(), nested->items.end());
    else
      flat.push_back(std::move(item));
  }
  return std::make_shared<NetProgram>(Seq{std::move(flat)});
}

bool operator==(const ChorExpr& a, const ChorExpr& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [&](const ChorExpr::At& x) {
            const auto& y = std::get<ChorExpr::At>(b.node());
            return x.process == y.process && all_equal(x.exprs, y.exprs);
          },
          [&](const ChorExpr::Comm& x) {
            const auto& y = std::get<ChorExpr::Comm>(b.node());
            return x.source == y.source && x.target == y.target &&
                   expr_equal(x.expr, y.expr);
          },
          [&](const ChorExpr::If& x) {
            const auto& y = std::get<ChorExpr::If>(b.node());
            return x.guard_at == y.guard_at && expr_equal(x.guard, y.guard) &&
                   *x.then_branch == *y.then_branch && *x.else_branch == *y.else_branch;
          },
          [&](const ChorExpr::Sel& x) {
            const auto& y = std::get<ChorExpr::Sel>(b.node());
            if (x.chooser != y.chooser || x.pairs != y.pairs) return false;
            return *x.body == *y.body;
          },
          [&](const ChorExpr::Let& x) {
            const auto& y = std::get<ChorExpr::Let>(b.node());
            if (x.bindings.size() != y.bindings.size()) return false;
            for (size_t i = 0; i < x.bindings.size(); ++i) {
              if (!(x.bindings[i].first == y.bindings[i].first)) return false;
              if (!(*x.bindings[i].second == *y.bindings[i].second)) return false;
            }
            return *x.body == *y.body;
          },
          [&](const ChorExpr::LetStar& x) {
            const auto& y = std::get<ChorExpr::LetStar>(b.node());
            if (x.bindings.size() != y.bindings.size()) return false;
            for (size_t i = 0; i < x.bindings.size(); ++i) {
              if (!(x.bindings[i].first == y.bindings[i].first)) return false;
              if (!(*x.bindings[i].second == *y.bindings[i].second)) return false;
            }
            return *x.body == *y.body;
          },
          [&](const ChorExpr::Set& x) {
            const auto& y = std::get<ChorExpr::Set>(b.node());
            return x.target == y.target && *x.value == *y.value;
          },
          [&](const ChorExpr::Seq& x) {
            return all_equal(x.terms, std::get<ChorExpr::Seq>(b.node()).terms);
          },
      },
      a.node());
}

bool operator==(const ChorTerm& a, const ChorTerm& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [&](const ChorTerm::Define& x) {
            const auto& y = std::get<ChorTerm::Define>(b.node());
            return x.binding == y.binding && *x.value == *y.value;
          },
          [&](const ChorTerm::DefineComm& x) {
            const auto& y = std::get<ChorTerm::DefineComm>(b.node());
            return x.target_process == y.target_process && x.target_var == y.target_var &&
                   x.source_process == y.source_process &&
                   expr_equal(x.source_expr, y.source_expr);
          },
          [&](const ChorTerm::Bare& x) {
            return *x.expr == *std::get<ChorTerm::Bare>(b.node()).expr;
          },
      },
      a.node());
}

bool operator==(const ChorProgram& a, const ChorProgram& b) {
  return a.processes == b.processes && all_equal(a.body, b.body);
}

bool operator==(const NetProgram& a, const NetProgram& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [&](const NetProgram::Local& x) {
            return expr_equal(x.expr, std::get<NetProgram::Local>(b.node()).expr);
          },
          [&](const NetProgram::Void&) { return true; },
          [&](const NetProgram::Send& x) {
            const auto& y = std::get<NetProgram::Send>(b.node());
            return x.peer == y.peer && expr_equal(x.expr, y.expr);
          },
          [&](const NetProgram::Recv& x) {
            return x.peer == std::get<NetProgram::Recv>(b.node()).peer;
          },
          [&](const NetProgram::Choose& x) {
            const auto& y = std::get<NetProgram::Choose>(b.node());
            return x.peer == y.peer && x.label == y.label && *x.cont == *y.cont;
          },
          [&](const NetProgram::Branch& x) {
            const auto& y = std::get<NetProgram::Branch>(b.node());
            if (x.peer != y.peer || x.arms.size() != y.arms.size()) return false;
            for (size_t i = 0; i < x.arms.size(); ++i) {
              if (x.arms[i].first != y.arms[i].first) return false;
              if (!(*x.arms[i].second == *y.arms[i].second)) return false;
            }
            return true;
          },
          [&](const NetProgram::If& x) {
            const auto& y = std::get<NetProgram::If>(b.node());
            return expr_equal(x.guard, y.guard) && *x.then_branch == *y.then_branch &&
                   *x.else_branch == *y.else_branch;
          },
          [&](const NetProgram::Let& x) {
            const auto& y = std::get<NetProgram::Let>(b.node());
            if (x.bindings.size() != y.bindings.size()) return false;
            for (size_t i = 0; i < x.bindings.size(); ++i) {
              if (x.bindings[i].first != y.bindings[i].first) return false;
              if (!(*x.bindings[i].second == *y.bindings[i].second)) return false;
            }
            return *x.body == *y.body;
          },
          [&](const NetProgram::Define& x) {
            const auto& y = std::get<NetProgram::Define>(b.node());
            return x.name == y.name && *x.value == *y.value;
          },
          [&](const NetProgram::Set& x) {
            const auto& y = std::get<NetProgram::Set>(b.node());
            return x.name == y.name && *x.value == *y.value;
          },
          [&](const NetProgram::Seq& x) {
            return all_equal(x.items, std::get<NetProgram::Seq>(b.node()).items);
          },
      },
      a.node());
}

}  // namespace choret
