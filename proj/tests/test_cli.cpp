#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <string>
#include <vector>

#include "choret/cli.hpp"
#include "choret/reader.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"

using namespace choret;
using choret::testing::cli;
using choret::testing::TempFile;
using nlohmann::json;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Flips the output format env var for one scope. run_cli reads it per call.
struct JsonMode {
  JsonMode() { setenv("CHORET_FORMAT", "json", 1); }
  ~JsonMode() { unsetenv("CHORET_FORMAT"); }
};

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> records;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) records.push_back(json::parse(line));
  return records;
}

}  // namespace

// ---------------------------------------------------------------------------
// check

TEST_CASE("check accepts a projectable file") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"check", file.path()});
  CHECK(r.code == 0);
  CHECK(r.out == "ok: 2 processes (S B)\n");
  CHECK(r.err.empty());
}

TEST_CASE("check singular/plural wording") {
  TempFile file("(chor (A) (at A 1))");
  auto r = cli({"check", file.path()});
  CHECK(r.out == "ok: 1 process (A)\n");
}

TEST_CASE("check rejects a file that does not parse") {
  TempFile file("(chor (A) (at A #q))");
  auto r = cli({"check", file.path()});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(r.err == file.path() + ":1:17: parse error: unknown literal '#q' "
                 "(expected #t or #f)\n");
}

TEST_CASE("check pinpoints an unprojectable conditional") {
  TempFile file(testing::kSelectionBrokenSrc);
  auto r = cli({"check", file.path()});
  CHECK(r.code == 1);
  CHECK(r.err == file.path() + ":3:3: projection error: cannot project for process B "
                 "(if at 3:3): cannot merge \"Left\" with \"Right\": "
                 "local-expr-mismatch\n");
}

TEST_CASE("a missing input file is a usage-class failure") {
  auto r = cli({"check", "/no/such/file.chor"});
  CHECK(r.code == 3);
  CHECK(r.err == "/no/such/file.chor: io error: cannot read '/no/such/file.chor'\n");
}

// ---------------------------------------------------------------------------
// project

TEST_CASE("project prints every process in declared order") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"project", file.path()});
  CHECK(r.code == 0);
  CHECK(r.out == std::string("S: ") + testing::kSellerProjection + "\n" +
                     "B: " + testing::kBuyerProjection + "\n");
}

TEST_CASE("project --process narrows the output") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"project", file.path(), "--process", "B"});
  CHECK(r.code == 0);
  CHECK(r.out == std::string("B: ") + testing::kBuyerProjection + "\n");
  CHECK(contains(r.out, "(send S title)"));
  CHECK(contains(r.out, "(define cost (recv S))"));
}

TEST_CASE("project output re-parses to the same programs") {
  TempFile file(testing::kSelectionSrc);
  auto r = cli({"project", file.path()});
  std::istringstream lines(r.out);
  std::string line;
  int seen = 0;
  while (std::getline(lines, line)) {
    auto colon = line.find(": ");
    REQUIRE(colon != std::string::npos);
    auto reparsed = parse_network(line.substr(colon + 2));
    CHECK(print_network(*reparsed) == line.substr(colon + 2));
    ++seen;
  }
  CHECK(seen == 2);
}

TEST_CASE("project rejects an undeclared process") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"project", file.path(), "--process", "Z"});
  CHECK(r.code == 3);
  CHECK(r.err == file.path() + ": usage error: process 'Z' is not declared in " +
                     file.path() + "\n");
}

// ---------------------------------------------------------------------------
// run

TEST_CASE("run replays the happy bookseller ending") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"run", file.path(), "--fixture", "budget20"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "sent S -> B: 10\n"
        "sent S -> B: \"March 8\"\n"
        "sent B -> S: \"Hamlet\"\n"
        "sent B -> S: label buy\n"
        "sent B -> S: \"221B Baker Street\"\n"
        "S: value = #<void>\n"
        "S: store address = \"221B Baker Street\", title = \"Hamlet\"\n"
        "B: value = #<void>\n"
        "B: store address = \"221B Baker Street\", budget = 20, cost = 10, "
        "date = \"March 8\", title = \"Hamlet\"\n");
}

TEST_CASE("run replays the declined bookseller ending") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"run", file.path(), "--fixture", "budget5"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "sent B -> S: label do-not-buy\n"));
  CHECK(contains(r.out, "sent S -> B: \"goodbye\"\n"));
  CHECK(contains(r.out, "response = \"goodbye\""));
  CHECK_FALSE(contains(r.out, "date"));
}

TEST_CASE("run with a trivial program and no fixture") {
  TempFile file("(chor (A) (at A 1))");
  auto r = cli({"run", file.path()});
  CHECK(r.code == 0);
  CHECK(r.out == "A: value = 1\nA: store (empty)\n");
}

TEST_CASE("--set overrides fixture globals everywhere") {
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"run", file.path(), "--fixture", "budget20", "--set", "budget=5"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "label do-not-buy"));

  auto titled = cli({"run", file.path(), "--fixture", "budget20", "--set",
                     "title=Odyssey"});
  CHECK(titled.code == 2);  // the canned catalog only knows Hamlet
  CHECK(contains(titled.err, "catalog: no price for \"Odyssey\""));
}

TEST_CASE("run surfaces runtime faults with exit 2") {
  // without the fixture the buyer has no title binding and dies first
  TempFile file(testing::kBooksellerSrc);
  auto r = cli({"run", file.path(), "--fixture", "none"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(contains(r.err, "runtime error: process B: "));
  CHECK(contains(r.err, "variable 'title' is not bound"));
}

TEST_CASE("run usage failures") {
  TempFile file(testing::kBooksellerSrc);
  auto unknown_fixture = cli({"run", file.path(), "--fixture", "nope"});
  CHECK(unknown_fixture.code == 3);
  CHECK(contains(unknown_fixture.err,
                 "usage error: unknown fixture 'nope' (expected none, budget20 or "
                 "budget5)"));

  auto bad_set = cli({"run", file.path(), "--set", "oops"});
  CHECK(bad_set.code == 3);
  CHECK(contains(bad_set.err, "--set expects name=value, got 'oops'"));
}

// ---------------------------------------------------------------------------
// difftest

TEST_CASE("difftest runs a small batch clean") {
  auto r = cli({"difftest", "--seed", "1", "--count", "25"});
  CHECK(r.code == 0);
  CHECK(r.out == "difftest: 25 programs from seed 1, no mismatches\n");
  CHECK(r.err.empty());
}

TEST_CASE("difftest with a zero count is trivially clean") {
  auto r = cli({"difftest", "--count", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "difftest: 0 programs from seed 42, no mismatches\n");
}

TEST_CASE("difftest rejects a negative count") {
  auto r = cli({"difftest", "--count", "-3"});
  CHECK(r.code == 3);
}

// ---------------------------------------------------------------------------
// argument handling

TEST_CASE("a subcommand is required") {
  auto r = cli({});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("unknown subcommands and flags are usage errors") {
  CHECK(cli({"frobnicate"}).code == 3);
  TempFile file("(chor (A) (at A 1))");
  CHECK(cli({"check", file.path(), "--loud"}).code == 3);
}

TEST_CASE("--help prints usage and succeeds") {
  auto r = cli({"--help"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "check"));
  CHECK(contains(r.out, "project"));
  CHECK(contains(r.out, "run"));
  CHECK(contains(r.out, "difftest"));
}

// ---------------------------------------------------------------------------
// machine-readable mode

TEST_CASE("json mode emits one record per event") {
  JsonMode json_mode;

  SUBCASE("check") {
    TempFile file(testing::kBooksellerSrc);
    auto r = cli({"check", file.path()});
    CHECK(r.code == 0);
    auto records = json_lines(r.out);
    REQUIRE(records.size() == 1);
    CHECK(records[0]["event"] == "check");
    CHECK(records[0]["status"] == "ok");
    CHECK(records[0]["processes"] == json::array({"S", "B"}));
  }

  SUBCASE("projection records carry the program text") {
    TempFile file(testing::kBooksellerSrc);
    auto r = cli({"project", file.path()});
    auto records = json_lines(r.out);
    REQUIRE(records.size() == 2);
    CHECK(records[0]["process"] == "S");
    CHECK(records[0]["program"] == testing::kSellerProjection);
    CHECK(records[1]["process"] == "B");
  }

  SUBCASE("run emits messages then per-process results") {
    TempFile file(testing::kBooksellerSrc);
    auto r = cli({"run", file.path(), "--fixture", "budget20"});
    auto records = json_lines(r.out);
    REQUIRE(records.size() == 7);  // 5 messages + 2 results
    CHECK(records[0]["event"] == "message");
    CHECK(records[5]["event"] == "result");
    CHECK(records[6]["process"] == "B");
    CHECK(records[6]["store"]["date"] == "\"March 8\"");
  }

  SUBCASE("errors are structured too") {
    TempFile file(testing::kSelectionBrokenSrc);
    auto r = cli({"check", file.path()});
    CHECK(r.code == 1);
    auto records = json_lines(r.err);
    REQUIRE(records.size() == 1);
    CHECK(records[0]["event"] == "error");
    CHECK(records[0]["kind"] == "projection");
    CHECK(records[0]["process"] == "B");
    CHECK(records[0]["line"] == 3);
  }

  SUBCASE("difftest output is stable for a fixed seed") {
    auto first = cli({"difftest", "--seed", "7", "--count", "5"});
    auto second = cli({"difftest", "--seed", "7", "--count", "5"});
    CHECK(first.code == 0);
    CHECK(first.out == second.out);
    auto records = json_lines(first.out);
    REQUIRE(records.size() == 1);
    CHECK(records[0]["event"] == "difftest");
    CHECK(records[0]["status"] == "ok");
    CHECK(records[0]["count"] == 5);
  }
}
