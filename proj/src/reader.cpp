#include "choret/reader.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <set>

namespace choret {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
         c == '[' || c == ']' || c == '\'' || c == '"' || c == ';';
}

// Character stream with 1-based line/column tracking.
struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int column = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  char take() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    return c;
  }

  SourceLoc here() const { return SourceLoc{line, column}; }

  void skip_blank() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }
};

char closer_for(char open) { return open == '(' ? ')' : ']'; }

SExpr parse_form(Cursor& cur);

SExpr parse_atom(Cursor& cur) {
  SourceLoc loc = cur.here();
  std::string word;
  while (!cur.done() && !is_delimiter(cur.peek())) word += cur.take();

  bool digits = !word.empty() && (std::isdigit(static_cast<unsigned char>(word[0])) ||
                                  ((word[0] == '-' || word[0] == '+') && word.size() > 1 &&
                                   std::isdigit(static_cast<unsigned char>(word[1]))));
  if (digits) {
    std::int64_t value = 0;
    const char* first = word.data() + (word[0] == '+' ? 1 : 0);
    auto [end, ec] = std::from_chars(first, word.data() + word.size(), value);
    if (ec != std::errc{} || end != word.data() + word.size())
      throw ParseError(loc, "malformed number '" + word + "'");
    return SExpr{SExpr::Int{value}, loc};
  }
  if (!word.empty() && word[0] == '#') {
    if (word == "#t" || word == "#true") return SExpr{SExpr::Bool{true}, loc};
    if (word == "#f" || word == "#false") return SExpr{SExpr::Bool{false}, loc};
    throw ParseError(loc, "unknown literal '" + word + "'", "#t or #f");
  }
  return SExpr{SExpr::Ident{word}, loc};
}

SExpr parse_string(Cursor& cur) {
  SourceLoc loc = cur.here();
  cur.take();  // opening quote
  std::string value;
  while (true) {
    if (cur.done()) throw ParseError(cur.here(), "unterminated string literal");
    char c = cur.take();
    if (c == '"') break;
    if (c == '\\') {
      if (cur.done()) throw ParseError(cur.here(), "unterminated string literal");
      char esc = cur.take();
      switch (esc) {
        case '"': value += '"'; break;
        case '\\': value += '\\'; break;
        case 'n': value += '\n'; break;
        case 't': value += '\t'; break;
        default:
          throw ParseError(cur.here(), std::string("unknown string escape '\\") + esc + "'");
      }
    } else {
      value += c;
    }
  }
  return SExpr{SExpr::Str{value}, loc};
}

SExpr parse_form(Cursor& cur) {
  cur.skip_blank();
  if (cur.done()) throw ParseError(cur.here(), "unexpected end of input");
  SourceLoc loc = cur.here();
  char c = cur.peek();
  if (c == '(' || c == '[') {
    char open = cur.take();
    std::vector<SExpr> items;
    while (true) {
      cur.skip_blank();
      if (cur.done())
        throw ParseError(cur.here(), "unclosed list opened at " + loc.to_string(),
                         std::string(1, closer_for(open)));
      char next = cur.peek();
      if (next == ')' || next == ']') {
        if (next != closer_for(open))
          throw ParseError(cur.here(), std::string("mismatched '") + next +
                                           "' closing list opened at " + loc.to_string(),
                           std::string(1, closer_for(open)));
        cur.take();
        break;
      }
      items.push_back(parse_form(cur));
    }
    return SExpr{SExpr::List{std::move(items)}, loc};
  }
  if (c == ')' || c == ']')
    throw ParseError(loc, std::string("unexpected '") + c + "'");
  if (c == '"') return parse_string(cur);
  if (c == '\'') {
    cur.take();
    cur.skip_blank();
    if (cur.done()) throw ParseError(cur.here(), "expected a symbol after '");
    SExpr quoted = parse_form(cur);
    if (const auto* ident = std::get_if<SExpr::Ident>(&quoted.node))
      return SExpr{SExpr::Sym{ident->name}, loc};
    throw ParseError(loc, "only symbols can be quoted", "'name");
  }
  return parse_atom(cur);
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "chor", "at",  "~>",   "define", "define/<~", "sel~>",     "if",
      "let",  "let*", "set!", "send",   "recv",      "choose~>",  "branch?~>",
      "seq",
  };
  return words;
}

[[noreturn]] void fail(const SExpr& form, std::string message, std::string expected = "") {
  throw ParseError(form.loc, std::move(message), std::move(expected));
}

const SExpr::List& expect_list(const SExpr& form, const std::string& what) {
  const auto* list = std::get_if<SExpr::List>(&form.node);
  if (!list) fail(form, "expected " + what);
  return *list;
}

std::string expect_ident(const SExpr& form, const std::string& what) {
  const auto* ident = std::get_if<SExpr::Ident>(&form.node);
  if (!ident) fail(form, "expected " + what);
  if (is_reserved_word(ident->name))
    fail(form, "'" + ident->name + "' is a reserved word and cannot name a " + what);
  return ident->name;
}

std::string head_of(const SExpr& form) {
  const auto* list = std::get_if<SExpr::List>(&form.node);
  if (!list || list->items.empty()) return "";
  const auto* ident = std::get_if<SExpr::Ident>(&list->items[0].node);
  return ident ? ident->name : "";
}

// ---------------------------------------------------------------------------
// Local expressions

LocalExprPtr parse_local(const SExpr& form) {
  return std::visit(
      overloaded{
          [&](const SExpr::Ident& a) -> LocalExprPtr {
            if (is_reserved_word(a.name))
              fail(form, "'" + a.name + "' is a reserved word, not a variable");
            return LocalExpr::var(a.name, form.loc);
          },
          [&](const SExpr::Int& a) -> LocalExprPtr {
            return LocalExpr::lit(Value{a.value}, form.loc);
          },
          [&](const SExpr::Bool& a) -> LocalExprPtr {
            return LocalExpr::lit(Value{a.value}, form.loc);
          },
          [&](const SExpr::Str& a) -> LocalExprPtr {
            return LocalExpr::lit(Value{a.value}, form.loc);
          },
          [&](const SExpr::Sym& a) -> LocalExprPtr {
            return LocalExpr::lit(Value{Symbol{a.name}}, form.loc);
          },
          [&](const SExpr::List& a) -> LocalExprPtr {
            if (a.items.empty()) fail(form, "empty application");
            const auto* head = std::get_if<SExpr::Ident>(&a.items[0].node);
            if (!head) fail(a.items[0], "expected an operator name");
            if (head->name == "block") {
              if (a.items.size() < 2) fail(form, "block needs at least one expression");
              std::vector<LocalExprPtr> body;
              for (size_t i = 1; i < a.items.size(); ++i)
                body.push_back(parse_local(a.items[i]));
              return LocalExpr::block(std::move(body), form.loc);
            }
            if (is_reserved_word(head->name))
              fail(a.items[0], "'" + head->name +
                                   "' is a reserved word and cannot head a local expression");
            std::vector<LocalExprPtr> args;
            for (size_t i = 1; i < a.items.size(); ++i)
              args.push_back(parse_local(a.items[i]));
            return LocalExpr::app(head->name, std::move(args), form.loc);
          },
      },
      form.node);
}

// ---------------------------------------------------------------------------
// Choreographies

ChorExprPtr parse_chor_expr(const SExpr& form);
ChorTermPtr parse_chor_term(const SExpr& form);

bool is_definition_form(const SExpr& form) {
  std::string head = head_of(form);
  return head == "define" || head == "define/<~";
}

// (at P e) with exactly one expression; used by ~>, if guards and set!.
std::pair<ProcessName, LocalExprPtr> parse_at_single(const SExpr& form,
                                                     const std::string& what) {
  const auto& list = expect_list(form, what);
  if (list.items.size() != 3 || head_of(form) != "at") fail(form, "expected " + what);
  ProcessName p(expect_ident(list.items[1], "process name"));
  return {std::move(p), parse_local(list.items[2])};
}

std::pair<ProcessName, std::string> parse_located_binder(const SExpr& form) {
  const auto& list = expect_list(form, "a located binder (at P x)");
  if (list.items.size() != 3 || head_of(form) != "at")
    fail(form, "expected a located binder (at P x)");
  ProcessName p(expect_ident(list.items[1], "process name"));
  return {std::move(p), expect_ident(list.items[2], "variable")};
}

Binding parse_binding(const SExpr& form) {
  if (const auto* ident = std::get_if<SExpr::Ident>(&form.node)) {
    if (is_reserved_word(ident->name))
      fail(form, "'" + ident->name + "' is a reserved word, not a binder");
    return GlobalBinding{ident->name};
  }
  auto [process, name] = parse_located_binder(form);
  return LocatedBinding{std::move(process), std::move(name)};
}

// Body of sel~>/let/let*: one or more forms. A single expression stays bare;
// anything else (several forms, or a lone definition) becomes a Seq of terms.
ChorExprPtr parse_body(const std::vector<SExpr>& forms, size_t from, const SExpr& parent) {
  if (from >= forms.size()) fail(parent, "empty body");
  if (forms.size() - from == 1 && !is_definition_form(forms[from]))
    return parse_chor_expr(forms[from]);
  std::vector<ChorTermPtr> terms;
  for (size_t i = from; i < forms.size(); ++i) terms.push_back(parse_chor_term(forms[i]));
  return ChorExpr::seq(std::move(terms), forms[from].loc);
}

ChorExprPtr parse_chor_expr(const SExpr& form) {
  const auto& list = expect_list(form, "a choreography expression");
  std::string head = head_of(form);
  if (head == "at") {
    if (list.items.size() < 3) fail(form, "at needs a process and at least one expression");
    ProcessName p(expect_ident(list.items[1], "process name"));
    std::vector<LocalExprPtr> exprs;
    for (size_t i = 2; i < list.items.size(); ++i) exprs.push_back(parse_local(list.items[i]));
    return ChorExpr::at(std::move(p), std::move(exprs), form.loc);
  }
  if (head == "~>") {
    if (list.items.size() != 3) fail(form, "~> takes a source (at P e) and a target process");
    auto [source, expr] = parse_at_single(list.items[1], "a communication source (at P e)");
    ProcessName target(expect_ident(list.items[2], "process name"));
    if (source == target) fail(form, "communication source equals target");
    return ChorExpr::comm(std::move(source), std::move(expr), std::move(target), form.loc);
  }
  if (head == "if") {
    if (list.items.size() != 4) fail(form, "if takes a guard (at P e) and two branches");
    auto [guard_at, guard] = parse_at_single(list.items[1], "a guard (at P e)");
    return ChorExpr::if_(std::move(guard_at), std::move(guard),
                         parse_chor_expr(list.items[2]), parse_chor_expr(list.items[3]),
                         form.loc);
  }
  if (head == "sel~>") {
    if (list.items.size() < 4)
      fail(form, "sel~> takes a chooser, a pair list and a body");
    ProcessName chooser(expect_ident(list.items[1], "process name"));
    // Pairs usually come wrapped, (sel~> P ([Q l] ...) body ...), but a
    // single pair may stand bare: (sel~> P [Q l] body ...).
    const auto& pair_list = expect_list(list.items[2], "a selection pair list");
    std::vector<const SExpr*> pair_forms;
    if (!pair_list.items.empty() &&
        std::holds_alternative<SExpr::Ident>(pair_list.items[0].node)) {
      pair_forms.push_back(&list.items[2]);
    } else {
      for (const SExpr& item : pair_list.items) pair_forms.push_back(&item);
    }
    std::vector<std::pair<Label, ProcessName>> pairs;
    for (const SExpr* pair_ptr : pair_forms) {
      const SExpr& pair_form = *pair_ptr;
      const auto& pair = expect_list(pair_form, "a selection pair [P label]");
      if (pair.items.size() != 2) fail(pair_form, "expected a selection pair [P label]");
      ProcessName target(expect_ident(pair.items[0], "process name"));
      Label label;
      if (const auto* sym = std::get_if<SExpr::Sym>(&pair.items[1].node))
        label = Label(sym->name);
      else
        label = Label(expect_ident(pair.items[1], "label"));
      if (target == chooser) fail(pair_form, "selection target equals the chooser");
      for (const auto& seen : pairs)
        if (seen.second == target)
          fail(pair_form, "selection target '" + target.text() + "' repeated");
      pairs.emplace_back(std::move(label), std::move(target));
    }
    return ChorExpr::sel(std::move(chooser), std::move(pairs),
                         parse_body(list.items, 3, form), form.loc);
  }
  if (head == "let" || head == "let*") {
    if (list.items.size() < 3) fail(form, head + " takes a binding list and a body");
    const auto& binding_list = expect_list(list.items[1], "a binding list");
    std::vector<std::pair<Binding, ChorExprPtr>> bindings;
    for (const SExpr& binding_form : binding_list.items) {
      const auto& pair = expect_list(binding_form, "a binding [B E]");
      if (pair.items.size() != 2) fail(binding_form, "expected a binding [B E]");
      bindings.emplace_back(parse_binding(pair.items[0]), parse_chor_expr(pair.items[1]));
    }
    ChorExprPtr body = parse_body(list.items, 2, form);
    if (head == "let")
      return ChorExpr::let(std::move(bindings), std::move(body), form.loc);
    return ChorExpr::let_star(std::move(bindings), std::move(body), form.loc);
  }
  if (head == "set!") {
    if (list.items.size() != 3) fail(form, "set! takes a located binder and an expression");
    auto [process, name] = parse_located_binder(list.items[1]);
    return ChorExpr::set(LocatedBinding{std::move(process), std::move(name)},
                         parse_chor_expr(list.items[2]), form.loc);
  }
  if (head == "define" || head == "define/<~")
    fail(form, "definitions are not allowed in expression position");
  if (head.empty()) fail(form, "expected a choreography expression");
  fail(form, "unknown choreography form '" + head + "'",
       "at, ~>, if, sel~>, let, let*, set!");
}

ChorTermPtr parse_chor_term(const SExpr& form) {
  std::string head = head_of(form);
  if (head == "define") {
    const auto& list = expect_list(form, "a definition");
    if (list.items.size() != 3) fail(form, "define takes a binder and an expression");
    return ChorTerm::define(parse_binding(list.items[1]), parse_chor_expr(list.items[2]),
                            form.loc);
  }
  if (head == "define/<~") {
    const auto& list = expect_list(form, "a communicating definition");
    if (list.items.size() != 3)
      fail(form, "define/<~ takes a located binder and a located expression");
    auto [target_process, target_var] = parse_located_binder(list.items[1]);
    auto [source_process, source_expr] =
        parse_at_single(list.items[2], "a located expression (at Q e)");
    if (target_process == source_process)
      fail(form, "define/<~ source equals target");
    return ChorTerm::define_comm(std::move(target_process), std::move(target_var),
                                 std::move(source_process), std::move(source_expr),
                                 form.loc);
  }
  return ChorTerm::bare(parse_chor_expr(form), form.loc);
}

// ---------------------------------------------------------------------------
// Network programs

NetProgramPtr parse_net(const SExpr& form);

Label parse_net_label(const SExpr& form) {
  if (const auto* sym = std::get_if<SExpr::Sym>(&form.node)) return Label(sym->name);
  return Label(expect_ident(form, "label"));
}

std::string parse_net_binder(const SExpr& form) {
  if (const auto* ident = std::get_if<SExpr::Ident>(&form.node)) {
    if (ident->name == "_") return "_";
    if (is_reserved_word(ident->name))
      fail(form, "'" + ident->name + "' is a reserved word, not a binder");
    return ident->name;
  }
  fail(form, "expected a variable or _");
}

NetProgramPtr parse_net(const SExpr& form) {
  const auto* list = std::get_if<SExpr::List>(&form.node);
  if (!list) return NetProgram::local(parse_local(form));
  std::string head = head_of(form);
  if (head == "void" && list->items.size() == 1) return NetProgram::void_();
  if (head == "send") {
    if (list->items.size() != 3) fail(form, "send takes a peer and an expression");
    ProcessName peer(expect_ident(list->items[1], "process name"));
    return NetProgram::send(std::move(peer), parse_local(list->items[2]));
  }
  if (head == "recv") {
    if (list->items.size() != 2) fail(form, "recv takes a peer");
    return NetProgram::recv(ProcessName(expect_ident(list->items[1], "process name")));
  }
  if (head == "choose~>") {
    if (list->items.size() != 4) fail(form, "choose~> takes a peer, a label and a program");
    ProcessName peer(expect_ident(list->items[1], "process name"));
    Label label = parse_net_label(list->items[2]);
    return NetProgram::choose(std::move(peer), std::move(label), parse_net(list->items[3]));
  }
  if (head == "branch?~>") {
    if (list->items.size() != 3) fail(form, "branch?~> takes a peer and an arm list");
    ProcessName peer(expect_ident(list->items[1], "process name"));
    const auto& arm_list = expect_list(list->items[2], "an arm list");
    if (arm_list.items.empty()) fail(list->items[2], "branch?~> needs at least one arm");
    std::vector<std::pair<Label, NetProgramPtr>> arms;
    for (const SExpr& arm_form : arm_list.items) {
      const auto& arm = expect_list(arm_form, "an arm [label N]");
      if (arm.items.size() != 2) fail(arm_form, "expected an arm [label N]");
      Label label = parse_net_label(arm.items[0]);
      for (const auto& seen : arms)
        if (seen.first == label) fail(arm_form, "arm label '" + label.text() + "' repeated");
      arms.emplace_back(std::move(label), parse_net(arm.items[1]));
    }
    return NetProgram::branch(std::move(peer), std::move(arms));
  }
  if (head == "if") {
    if (list->items.size() != 4) fail(form, "if takes a guard and two programs");
    return NetProgram::if_(parse_local(list->items[1]), parse_net(list->items[2]),
                           parse_net(list->items[3]));
  }
  if (head == "let") {
    if (list->items.size() < 3) fail(form, "let takes a binding list and a body");
    const auto& binding_list = expect_list(list->items[1], "a binding list");
    std::vector<std::pair<std::string, NetProgramPtr>> bindings;
    for (const SExpr& binding_form : binding_list.items) {
      const auto& pair = expect_list(binding_form, "a binding [x N]");
      if (pair.items.size() != 2) fail(binding_form, "expected a binding [x N]");
      bindings.emplace_back(parse_net_binder(pair.items[0]), parse_net(pair.items[1]));
    }
    NetProgramPtr body;
    if (list->items.size() == 3) {
      body = parse_net(list->items[2]);
    } else {
      std::vector<NetProgramPtr> items;
      for (size_t i = 2; i < list->items.size(); ++i) items.push_back(parse_net(list->items[i]));
      body = NetProgram::seq(std::move(items));
    }
    return NetProgram::let(std::move(bindings), std::move(body));
  }
  if (head == "define") {
    if (list->items.size() != 3) fail(form, "define takes a binder and a program");
    return NetProgram::define(parse_net_binder(list->items[1]), parse_net(list->items[2]));
  }
  if (head == "set!") {
    if (list->items.size() != 3) fail(form, "set! takes a variable and a program");
    std::string name = parse_net_binder(list->items[1]);
    if (name == "_") fail(list->items[1], "set! target cannot be _");
    return NetProgram::set(std::move(name), parse_net(list->items[2]));
  }
  if (head == "seq") {
    if (list->items.size() < 2) fail(form, "seq needs at least one program");
    std::vector<NetProgramPtr> items;
    for (size_t i = 1; i < list->items.size(); ++i) items.push_back(parse_net(list->items[i]));
    return NetProgram::seq(std::move(items));
  }
  return NetProgram::local(parse_local(form));
}

// ---------------------------------------------------------------------------
// Printing

void print_local_to(const LocalExpr& e, std::string& out);

void print_args(const std::vector<LocalExprPtr>& exprs, std::string& out) {
  for (const auto& e : exprs) {
    out += ' ';
    print_local_to(*e, out);
  }
}

void print_local_to(const LocalExpr& e, std::string& out) {
  std::visit(overloaded{
                 [&](const LocalExpr::Lit& n) { out += print_value(n.value); },
                 [&](const LocalExpr::Var& n) { out += n.name; },
                 [&](const LocalExpr::App& n) {
                   out += '(';
                   out += n.builtin;
                   print_args(n.args, out);
                   out += ')';
                 },
                 [&](const LocalExpr::Block& n) {
                   out += "(block";
                   print_args(n.body, out);
                   out += ')';
                 },
             },
             e.node());
}

void print_chor_expr_to(const ChorExpr& e, std::string& out);
void print_chor_term_to(const ChorTerm& t, std::string& out);

void print_binding_to(const Binding& b, std::string& out) {
  std::visit(overloaded{
                 [&](const GlobalBinding& g) { out += g.name; },
                 [&](const LocatedBinding& l) {
                   out += "(at " + l.process.text() + " " + l.name + ")";
                 },
             },
             b);
}

// Bodies print spliced: a Seq lists its terms, anything else is one form.
void print_chor_body_to(const ChorExpr& body, std::string& out) {
  if (const auto* seq = std::get_if<ChorExpr::Seq>(&body.node())) {
    bool first = true;
    for (const auto& t : seq->terms) {
      if (!first) out += ' ';
      first = false;
      print_chor_term_to(*t, out);
    }
    return;
  }
  print_chor_expr_to(body, out);
}

void print_chor_expr_to(const ChorExpr& e, std::string& out) {
  std::visit(
      overloaded{
          [&](const ChorExpr::At& n) {
            out += "(at " + n.process.text();
            print_args(n.exprs, out);
            out += ')';
          },
          [&](const ChorExpr::Comm& n) {
            out += "(~> (at " + n.source.text() + " ";
            print_local_to(*n.expr, out);
            out += ") " + n.target.text() + ")";
          },
          [&](const ChorExpr::If& n) {
            out += "(if (at " + n.guard_at.text() + " ";
            print_local_to(*n.guard, out);
            out += ") ";
            print_chor_expr_to(*n.then_branch, out);
            out += ' ';
            print_chor_expr_to(*n.else_branch, out);
            out += ')';
          },
          [&](const ChorExpr::Sel& n) {
            out += "(sel~> " + n.chooser.text() + " (";
            bool first = true;
            for (const auto& [label, target] : n.pairs) {
              if (!first) out += ' ';
              first = false;
              out += "[" + target.text() + " '" + label.text() + "]";
            }
            out += ") ";
            print_chor_body_to(*n.body, out);
            out += ')';
          },
          [&](const ChorExpr::Let& n) {
            out += "(let (";
            bool first = true;
            for (const auto& [binding, value] : n.bindings) {
              if (!first) out += ' ';
              first = false;
              out += '[';
              print_binding_to(binding, out);
              out += ' ';
              print_chor_expr_to(*value, out);
              out += ']';
            }
            out += ") ";
            print_chor_body_to(*n.body, out);
            out += ')';
          },
          [&](const ChorExpr::LetStar& n) {
            out += "(let* (";
            bool first = true;
            for (const auto& [binding, value] : n.bindings) {
              if (!first) out += ' ';
              first = false;
              out += '[';
              print_binding_to(binding, out);
              out += ' ';
              print_chor_expr_to(*value, out);
              out += ']';
            }
            out += ") ";
            print_chor_body_to(*n.body, out);
            out += ')';
          },
          [&](const ChorExpr::Set& n) {
            out += "(set! (at " + n.target.process.text() + " " + n.target.name + ") ";
            print_chor_expr_to(*n.value, out);
            out += ')';
          },
          [&](const ChorExpr::Seq&) {
            // Seq only occurs in body position; print_chor_body_to handles it.
            throw std::logic_error("seq outside body position");
          },
      },
      e.node());
}

void print_chor_term_to(const ChorTerm& t, std::string& out) {
  std::visit(overloaded{
                 [&](const ChorTerm::Define& n) {
                   out += "(define ";
                   print_binding_to(n.binding, out);
                   out += ' ';
                   print_chor_expr_to(*n.value, out);
                   out += ')';
                 },
                 [&](const ChorTerm::DefineComm& n) {
                   out += "(define/<~ (at " + n.target_process.text() + " " +
                          n.target_var + ") (at " + n.source_process.text() + " ";
                   print_local_to(*n.source_expr, out);
                   out += "))";
                 },
                 [&](const ChorTerm::Bare& n) { print_chor_expr_to(*n.expr, out); },
             },
             t.node());
}

void print_net_to(const NetProgram& n, std::string& out) {
  std::visit(
      overloaded{
          [&](const NetProgram::Local& x) { print_local_to(*x.expr, out); },
          [&](const NetProgram::Void&) { out += "(void)"; },
          [&](const NetProgram::Send& x) {
            out += "(send " + x.peer.text() + " ";
            print_local_to(*x.expr, out);
            out += ')';
          },
          [&](const NetProgram::Recv& x) { out += "(recv " + x.peer.text() + ")"; },
          [&](const NetProgram::Choose& x) {
            out += "(choose~> " + x.peer.text() + " " + x.label.text() + " ";
            print_net_to(*x.cont, out);
            out += ')';
          },
          [&](const NetProgram::Branch& x) {
            out += "(branch?~> " + x.peer.text() + " (";
            bool first = true;
            for (const auto& [label, prog] : x.arms) {
              if (!first) out += ' ';
              first = false;
              out += '[' + label.text() + ' ';
              print_net_to(*prog, out);
              out += ']';
            }
            out += "))";
          },
          [&](const NetProgram::If& x) {
            out += "(if ";
            print_local_to(*x.guard, out);
            out += ' ';
            print_net_to(*x.then_branch, out);
            out += ' ';
            print_net_to(*x.else_branch, out);
            out += ')';
          },
          [&](const NetProgram::Let& x) {
            out += "(let (";
            bool first = true;
            for (const auto& [name, prog] : x.bindings) {
              if (!first) out += ' ';
              first = false;
              out += '[' + name + ' ';
              print_net_to(*prog, out);
              out += ']';
            }
            out += ") ";
            print_net_to(*x.body, out);
            out += ')';
          },
          [&](const NetProgram::Define& x) {
            out += "(define " + x.name + " ";
            print_net_to(*x.value, out);
            out += ')';
          },
          [&](const NetProgram::Set& x) {
            out += "(set! " + x.name + " ";
            print_net_to(*x.value, out);
            out += ')';
          },
          [&](const NetProgram::Seq& x) {
            out += "(seq";
            for (const auto& item : x.items) {
              out += ' ';
              print_net_to(*item, out);
            }
            out += ')';
          },
      },
      n.node());
}

}  // namespace

ParseError::ParseError(SourceLoc loc, std::string message, std::string expected)
    : std::runtime_error(loc.to_string() + ": " + message +
                         (expected.empty() ? "" : " (expected " + expected + ")")),
      loc_(loc),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

std::vector<SExpr> parse_sexpr(const std::string& text) {
  Cursor cur{text};
  std::vector<SExpr> forms;
  while (true) {
    cur.skip_blank();
    if (cur.done()) break;
    forms.push_back(parse_form(cur));
  }
  return forms;
}

bool is_reserved_word(const std::string& name) { return reserved_words().count(name) > 0; }

ChorProgram parse_choreography(const std::string& text) {
  std::vector<SExpr> forms = parse_sexpr(text);
  if (forms.empty()) throw ParseError(SourceLoc{1, 1}, "expected a (chor ...) form");
  if (forms.size() > 1)
    throw ParseError(forms[1].loc, "expected exactly one (chor ...) form");
  const SExpr& form = forms[0];
  const auto& list = expect_list(form, "a (chor ...) form");
  if (head_of(form) != "chor") fail(form, "expected a (chor ...) form");
  if (list.items.size() < 2) fail(form, "chor needs a process list");
  const auto& process_list = expect_list(list.items[1], "a process list");
  if (process_list.items.empty()) fail(list.items[1], "a choreography needs at least one process");
  ChorProgram program;
  for (const SExpr& p : process_list.items) {
    ProcessName name(expect_ident(p, "process name"));
    for (const auto& seen : program.processes)
      if (seen == name) fail(p, "process '" + name.text() + "' is declared twice");
    program.processes.push_back(std::move(name));
  }
  for (size_t i = 2; i < list.items.size(); ++i)
    program.body.push_back(parse_chor_term(list.items[i]));
  std::string problem = validate_program(program);
  if (!problem.empty()) fail(form, problem);
  return program;
}

NetProgramPtr parse_network(const std::string& text) {
  std::vector<SExpr> forms = parse_sexpr(text);
  if (forms.empty()) throw ParseError(SourceLoc{1, 1}, "expected a network program");
  if (forms.size() > 1)
    throw ParseError(forms[1].loc, "expected exactly one network program");
  return parse_net(forms[0]);
}

LocalExprPtr parse_local_expr_form(const SExpr& form) { return parse_local(form); }

std::string print_choreography(const ChorProgram& p) {
  std::string out = "(chor (";
  bool first = true;
  for (const auto& process : p.processes) {
    if (!first) out += ' ';
    first = false;
    out += process.text();
  }
  out += ')';
  for (const auto& term : p.body) {
    out += ' ';
    print_chor_term_to(*term, out);
  }
  out += ')';
  return out;
}

std::string print_network(const NetProgram& n) {
  std::string out;
  print_net_to(n, out);
  return out;
}

std::string print_local(const LocalExpr& e) {
  std::string out;
  print_local_to(e, out);
  return out;
}

}  // namespace choret
