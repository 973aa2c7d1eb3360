#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <stdexcept>

#include "choret/ast.hpp"
#include "doctest.h"

using namespace choret;

namespace {
ProcessName A("A"), B("B"), C("C");
}

TEST_CASE("value printing") {
  CHECK(print_value(Value(std::int64_t(42))) == "42");
  CHECK(print_value(Value(std::int64_t(-7))) == "-7");
  CHECK(print_value(Value(true)) == "#t");
  CHECK(print_value(Value(false)) == "#f");
  CHECK(print_value(Value(std::string("hi"))) == "\"hi\"");
  CHECK(print_value(Value(Symbol{"buy"})) == "'buy");
  CHECK(print_value(Value(Unit{})) == "#<void>");
}

TEST_CASE("string quoting escapes the characters the reader unescapes") {
  CHECK(quote_string("plain") == "\"plain\"");
  CHECK(quote_string("a\"b") == "\"a\\\"b\"");
  CHECK(quote_string("a\\b") == "\"a\\\\b\"");
  CHECK(quote_string("a\nb\tc") == "\"a\\nb\\tc\"");
}

TEST_CASE("truthiness: only #f is false") {
  CHECK_FALSE(truthy(Value(false)));
  CHECK(truthy(Value(true)));
  CHECK(truthy(Value(std::int64_t(0))));
  CHECK(truthy(Value(std::string(""))));
  CHECK(truthy(Value(Unit{})));
}

TEST_CASE("names reject the empty string") {
  CHECK_THROWS_AS(ProcessName(""), std::invalid_argument);
  CHECK_THROWS_AS(Label(""), std::invalid_argument);
}

TEST_CASE("expr_equal ignores source locations") {
  SourceLoc here{3, 7};
  auto a = LocalExpr::app("+", {LocalExpr::lit(std::int64_t(1)), LocalExpr::var("x")});
  auto b = LocalExpr::app("+", {LocalExpr::lit(std::int64_t(1), here),
                                LocalExpr::var("x", here)},
                          here);
  CHECK(expr_equal(a, b));
  CHECK_FALSE(expr_equal(a, LocalExpr::app("-", {LocalExpr::lit(std::int64_t(1)),
                                                 LocalExpr::var("x")})));
  CHECK_FALSE(expr_equal(LocalExpr::lit(std::int64_t(1)),
                         LocalExpr::lit(std::string("1"))));
  // 1 and #t are distinct literals even though both are truthy
  CHECK_FALSE(expr_equal(LocalExpr::lit(std::int64_t(1)), LocalExpr::lit(true)));
}

TEST_CASE("factory invariants") {
  auto one = LocalExpr::lit(std::int64_t(1));
  CHECK_THROWS_AS(LocalExpr::block({}), std::invalid_argument);
  CHECK_THROWS_AS(ChorExpr::at(A, {}), std::invalid_argument);
  CHECK_THROWS_AS(ChorExpr::comm(A, one, A), std::invalid_argument);
  CHECK_THROWS_AS(ChorTerm::define_comm(A, "x", A, one), std::invalid_argument);
  CHECK_THROWS_AS(ChorExpr::sel(A, {{Label("l"), A}}, ChorExpr::at(A, {one})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ChorExpr::sel(A, {{Label("l"), B}, {Label("m"), B}}, ChorExpr::at(A, {one})),
      std::invalid_argument);
  CHECK_THROWS_AS(ChorExpr::seq({}), std::invalid_argument);
  CHECK_THROWS_AS(NetProgram::seq({}), std::invalid_argument);
  CHECK_THROWS_AS(NetProgram::branch(A, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      NetProgram::branch(A, {{Label("l"), NetProgram::void_()},
                             {Label("l"), NetProgram::void_()}}),
      std::invalid_argument);
}

TEST_CASE("seq canonicalization") {
  auto one = LocalExpr::lit(std::int64_t(1));

  SUBCASE("a single bare term collapses to its expression") {
    auto inner = ChorExpr::at(A, {one});
    auto collapsed = ChorExpr::seq({ChorTerm::bare(inner)});
    CHECK(collapsed == inner);
    CHECK(std::holds_alternative<ChorExpr::At>(collapsed->node()));
  }

  SUBCASE("a single define does not collapse") {
    auto kept = ChorExpr::seq({ChorTerm::define(GlobalBinding{"X"},
                                                ChorExpr::at(A, {one}))});
    CHECK(std::holds_alternative<ChorExpr::Seq>(kept->node()));
  }

  SUBCASE("network seq splices directly nested seqs") {
    auto leaf = NetProgram::local(one);
    auto nested = NetProgram::seq({NetProgram::seq({leaf, leaf}), leaf});
    const auto& seq = std::get<NetProgram::Seq>(nested->node());
    CHECK(seq.items.size() == 3);
    for (const auto& item : seq.items)
      CHECK(std::holds_alternative<NetProgram::Local>(item->node()));
  }
}

TEST_CASE("structural equality of programs") {
  auto one = LocalExpr::lit(std::int64_t(1));
  ChorProgram p{{A, B}, {ChorTerm::bare(ChorExpr::comm(A, one, B))}};
  ChorProgram q{{A, B}, {ChorTerm::bare(ChorExpr::comm(A, one, B, {4, 2}))}};
  CHECK(p == q);  // locations do not count

  ChorProgram different_target{{A, B, C}, {ChorTerm::bare(ChorExpr::comm(A, one, C))}};
  CHECK_FALSE(p == different_target);

  ChorProgram different_processes{{B, A}, p.body};
  CHECK_FALSE(p == different_processes);
}

TEST_CASE("network program equality") {
  auto x = LocalExpr::var("x");
  auto send = NetProgram::send(B, x);
  CHECK(*send == *NetProgram::send(B, LocalExpr::var("x")));
  CHECK_FALSE(*send == *NetProgram::send(C, x));
  CHECK_FALSE(*send == *NetProgram::recv(B));
  CHECK(*NetProgram::branch(A, {{Label("l"), send}}) ==
        *NetProgram::branch(A, {{Label("l"), NetProgram::send(B, x)}}));
  // arm order is significant for plain equality; merging sorts when needed
  CHECK_FALSE(*NetProgram::branch(A, {{Label("l"), send}, {Label("m"), send}}) ==
              *NetProgram::branch(A, {{Label("m"), send}, {Label("l"), send}}));
}

TEST_CASE("mentioned_processes walks every process position") {
  auto one = LocalExpr::lit(std::int64_t(1));
  ChorProgram p{{A, B, C},
                {ChorTerm::define(Binding(LocatedBinding{C, "z"}),
                                  ChorExpr::sel(A, {{Label("l"), B}},
                                                ChorExpr::at(A, {one})))}};
  auto seen = mentioned_processes(p);
  CHECK(seen.count(A) == 1);
  CHECK(seen.count(B) == 1);
  CHECK(seen.count(C) == 1);
}

TEST_CASE("validate_program reports the first violation") {
  auto one = LocalExpr::lit(std::int64_t(1));
  auto body = ChorTerm::bare(ChorExpr::at(A, {one}));

  CHECK(validate_program(ChorProgram{{A, B}, {body}}).empty());
  CHECK(validate_program(ChorProgram{{}, {body}}) ==
        "a choreography needs at least one process");
  CHECK(validate_program(ChorProgram{{A, A}, {body}}) ==
        "process 'A' is declared twice");
  CHECK(validate_program(ChorProgram{{B}, {body}}) ==
        "process 'A' is mentioned but not declared");
}

TEST_CASE("source locations format for diagnostics") {
  CHECK(SourceLoc{12, 3}.to_string() == "12:3");
  CHECK(SourceLoc{}.to_string() == "?:?");
  CHECK_FALSE(SourceLoc{}.known());
  CHECK(SourceLoc{1, 1}.known());
}
