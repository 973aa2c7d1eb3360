#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "choret/ast.hpp"

namespace choret {

// Generic s-expression layer. Atoms keep enough shape to distinguish the
// literal kinds the surface language cares about.
struct SExpr {
  struct Ident {
    std::string name;
  };
  struct Int {
    std::int64_t value;
  };
  struct Bool {
    bool value;
  };
  struct Str {
    std::string value;
  };
  struct Sym {
    std::string name;  // 'name in the source
  };
  struct List {
    std::vector<SExpr> items;
  };
  using Node = std::variant<Ident, Int, Bool, Str, Sym, List>;

  Node node;
  SourceLoc loc;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, std::string message, std::string expected = "");

  const SourceLoc& loc() const { return loc_; }
  const std::string& message() const { return message_; }
  const std::string& expected() const { return expected_; }

 private:
  SourceLoc loc_;
  std::string message_;
  std::string expected_;
};

// Tokenizes and parses a whole input. `;` starts a line comment, `'x` reads
// as a quoted symbol, ( ) and [ ] nest interchangeably but must match.
std::vector<SExpr> parse_sexpr(const std::string& text);

// Surface keywords. Rejected as process names, variables, labels and local
// application heads so misuse fails at parse time.
bool is_reserved_word(const std::string& name);

ChorProgram parse_choreography(const std::string& text);
NetProgramPtr parse_network(const std::string& text);

// Local expressions also appear standalone inside network programs.
LocalExprPtr parse_local_expr_form(const SExpr& form);

// Canonical single-line form. parse(print(ast)) yields an equal AST
// (source locations excluded from equality).
std::string print_choreography(const ChorProgram& p);
std::string print_network(const NetProgram& n);
std::string print_local(const LocalExpr& e);

}  // namespace choret
