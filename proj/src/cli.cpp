#include "choret/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "choret/oracle.hpp"
#include "choret/projector.hpp"
#include "choret/reader.hpp"

namespace choret {

Fixture make_fixture(const std::string& name) {
  if (name == "none") return {};
  if (name != "budget20" && name != "budget5")
    throw std::invalid_argument("unknown fixture '" + name +
                                "' (expected none, budget20 or budget5)");

  Fixture fixture;
  ProcessSetup seller;
  seller.builtins["catalog"] = [](const std::vector<Value>& args) -> Value {
    if (args.size() != 1 || !std::holds_alternative<std::string>(args[0]))
      throw EvalError("catalog: expected one title string");
    const auto& title = std::get<std::string>(args[0]);
    if (title == "Hamlet") return std::int64_t{10};
    throw EvalError("catalog: no price for " + quote_string(title));
  };
  seller.builtins["ship"] = [](const std::vector<Value>& args) -> Value {
    if (args.size() != 2) throw EvalError("ship: expected a title and an address");
    return std::string("March 8");
  };
  ProcessSetup buyer;
  buyer.globals["title"] = std::string("Hamlet");
  buyer.globals["address"] = std::string("221B Baker Street");
  buyer.globals["budget"] = std::int64_t{name == "budget20" ? 20 : 5};
  fixture.per_process["S"] = std::move(seller);
  fixture.per_process["B"] = std::move(buyer);
  return fixture;
}

namespace {

using nlohmann::json;

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  bool json_mode;
  std::string path;  // current input file, empty for difftest/usage
};

void emit_error(Ctx& ctx, const std::string& kind, const std::string& message,
                const SourceLoc* loc = nullptr, const ProcessName* process = nullptr) {
  if (ctx.json_mode) {
    json record{{"event", "error"}, {"kind", kind}, {"message", message}};
    if (!ctx.path.empty()) record["path"] = ctx.path;
    if (loc && loc->known()) {
      record["line"] = loc->line;
      record["column"] = loc->column;
    }
    if (process) record["process"] = process->text();
    ctx.err << record.dump() << '\n';
    return;
  }
  std::string prefix;
  if (!ctx.path.empty()) {
    prefix = ctx.path;
    if (loc && loc->known()) prefix += ":" + loc->to_string();
    prefix += ": ";
  }
  std::string label = kind == "deadlock" ? kind : kind + " error";
  ctx.err << prefix << label << ": " << message << '\n';
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

// --set values: integer-looking text becomes an integer so numeric
// comparisons against overrides keep working; anything else is a string.
Value parse_override(const std::string& text) {
  std::string_view digits = text;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  if (!digits.empty() &&
      std::all_of(digits.begin(), digits.end(),
                  [](unsigned char c) { return std::isdigit(c) != 0; })) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return v;
  }
  if (text.size() >= 2 && text.front() == '-') {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  }
  return text;
}

bool apply_sets(Fixture& fixture, const std::vector<std::string>& sets, Ctx& ctx) {
  for (const std::string& kv : sets) {
    size_t eq = kv.find('=');
    if (eq == 0 || eq == std::string::npos) {
      emit_error(ctx, "usage", "--set expects name=value, got '" + kv + "'");
      return false;
    }
    Value v = parse_override(kv.substr(eq + 1));
    fixture.defaults.globals[kv.substr(0, eq)] = v;
    for (auto& [name, setup] : fixture.per_process)
      setup.globals[kv.substr(0, eq)] = v;
  }
  return true;
}

struct Loaded {
  ChorProgram program;
  std::map<ProcessName, NetProgramPtr> nets;
};

int load_and_project(Ctx& ctx, const std::string& path, Loaded& loaded) {
  std::optional<std::string> text = read_file(path);
  if (!text) {
    emit_error(ctx, "io", "cannot read '" + path + "'");
    return 3;
  }
  try {
    loaded.program = parse_choreography(*text);
  } catch (const ParseError& e) {
    std::string message = e.message();
    if (!e.expected().empty()) message += " (expected " + e.expected() + ")";
    emit_error(ctx, "parse", message, &e.loc());
    return 1;
  }
  try {
    loaded.nets = project_program(loaded.program);
  } catch (const ProjectError& e) {
    emit_error(ctx, "projection", e.what(), &e.loc(), &e.process());
    return 1;
  }
  return 0;
}

int cmd_check(Ctx& ctx, const std::string& path) {
  Loaded loaded;
  if (int status = load_and_project(ctx, path, loaded)) return status;
  if (ctx.json_mode) {
    json names = json::array();
    for (const auto& p : loaded.program.processes) names.push_back(p.text());
    ctx.out << json{{"event", "check"},
                    {"path", path},
                    {"status", "ok"},
                    {"processes", names}}
                   .dump()
            << '\n';
    return 0;
  }
  ctx.out << "ok: " << loaded.program.processes.size() << " process"
          << (loaded.program.processes.size() == 1 ? "" : "es") << " (";
  for (size_t i = 0; i < loaded.program.processes.size(); ++i) {
    if (i) ctx.out << ' ';
    ctx.out << loaded.program.processes[i].text();
  }
  ctx.out << ")\n";
  return 0;
}

int cmd_project(Ctx& ctx, const std::string& path, const std::string& filter) {
  Loaded loaded;
  if (int status = load_and_project(ctx, path, loaded)) return status;
  std::vector<ProcessName> order;
  if (filter.empty()) {
    order = loaded.program.processes;
  } else {
    ProcessName want(filter);
    if (std::find(loaded.program.processes.begin(), loaded.program.processes.end(),
                  want) == loaded.program.processes.end()) {
      emit_error(ctx, "usage", "process '" + filter + "' is not declared in " + path);
      return 3;
    }
    order.push_back(std::move(want));
  }
  for (const auto& p : order) {
    std::string text = print_network(*loaded.nets.at(p));
    if (ctx.json_mode)
      ctx.out << json{{"event", "projection"}, {"process", p.text()}, {"program", text}}
                     .dump()
              << '\n';
    else
      ctx.out << p.text() << ": " << text << '\n';
  }
  return 0;
}

int cmd_run(Ctx& ctx, const std::string& path, const std::string& fixture_name,
            const std::vector<std::string>& sets) {
  Loaded loaded;
  if (int status = load_and_project(ctx, path, loaded)) return status;
  Fixture fixture;
  try {
    fixture = make_fixture(fixture_name);
  } catch (const std::invalid_argument& e) {
    emit_error(ctx, "usage", e.what());
    return 3;
  }
  if (!apply_sets(fixture, sets, ctx)) return 3;

  RunResult result;
  try {
    result = run_network(loaded.nets, fixture);
  } catch (const DeadlockError& e) {
    emit_error(ctx, "deadlock", e.what());
    return 2;
  } catch (const RunError& e) {
    emit_error(ctx, "runtime", e.what(), nullptr, &e.process());
    return 2;
  } catch (const EvalError& e) {
    emit_error(ctx, "runtime", e.what());
    return 2;
  }

  for (const auto& p : loaded.program.processes) {
    for (const Message& m : result.per_process.at(p).sent) {
      if (ctx.json_mode)
        ctx.out << json{{"event", "message"},
                        {"sender", m.sender.text()},
                        {"receiver", m.receiver.text()},
                        {"payload", print_payload(m.payload)}}
                       .dump()
                << '\n';
      else
        ctx.out << "sent " << m.sender.text() << " -> " << m.receiver.text() << ": "
                << print_payload(m.payload) << '\n';
    }
  }
  for (const auto& p : loaded.program.processes) {
    const ProcessResult& pr = result.per_process.at(p);
    if (ctx.json_mode) {
      json store = json::object();
      for (const auto& [name, value] : pr.store) store[name] = print_value(value);
      ctx.out << json{{"event", "result"},
                      {"process", p.text()},
                      {"value", print_value(pr.value)},
                      {"store", store}}
                     .dump()
              << '\n';
      continue;
    }
    ctx.out << p.text() << ": value = " << print_value(pr.value) << '\n';
    ctx.out << p.text() << ": store";
    if (pr.store.empty()) {
      ctx.out << " (empty)";
    } else {
      bool first = true;
      for (const auto& [name, value] : pr.store) {
        ctx.out << (first ? " " : ", ") << name << " = " << print_value(value);
        first = false;
      }
    }
    ctx.out << '\n';
  }
  return 0;
}

int cmd_difftest(Ctx& ctx, std::uint64_t seed, std::int64_t count) {
  for (std::int64_t i = 0; i < count; ++i) {
    GenConfig config;
    config.seed = seed + static_cast<std::uint64_t>(i);
    ChorProgram program = gen_choreography(config);
    DiffReport report;
    try {
      report = diff_run(program);
    } catch (const std::exception& e) {
      report.match = false;
      report.detail = e.what();
    }
    if (!report.match) {
      std::string text = print_choreography(program);
      if (ctx.json_mode)
        ctx.err << json{{"event", "mismatch"},
                        {"index", i},
                        {"seed", config.seed},
                        {"detail", report.detail},
                        {"program", text}}
                       .dump()
                << '\n';
      else
        ctx.err << "mismatch on program " << i << " (seed " << config.seed
                << "): " << report.detail << '\n'
                << text << '\n';
      return 1;
    }
  }
  if (ctx.json_mode)
    ctx.out << json{{"event", "difftest"},
                    {"seed", seed},
                    {"count", count},
                    {"status", "ok"}}
                   .dump()
            << '\n';
  else
    ctx.out << "difftest: " << count << " programs from seed " << seed
            << ", no mismatches\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  const char* format = std::getenv("CHORET_FORMAT");
  Ctx ctx{out, err, format != nullptr && std::string(format) == "json", ""};

  CLI::App app{"check, project, run and differential-test choreographies"};
  app.require_subcommand(1);

  std::string check_path;
  CLI::App* check = app.add_subcommand("check", "parse and project every process");
  check->add_option("file", check_path, "choreography file")->required();

  std::string project_path;
  std::string project_process;
  CLI::App* project =
      app.add_subcommand("project", "print each process's network program");
  project->add_option("file", project_path, "choreography file")->required();
  project->add_option("--process", project_process, "print only this process");

  std::string run_path;
  std::string run_fixture = "none";
  std::vector<std::string> run_sets;
  CLI::App* run = app.add_subcommand("run", "project and execute a choreography");
  run->add_option("file", run_path, "choreography file")->required();
  run->add_option("--fixture", run_fixture, "builtins preset: none, budget20, budget5");
  run->add_option("--set", run_sets, "override a global, name=value (repeatable)");

  std::uint64_t seed = 42;
  std::int64_t count = 1000;
  CLI::App* diff = app.add_subcommand(
      "difftest", "generate programs and compare runs against the interpreter");
  diff->add_option("--seed", seed, "first generator seed");
  diff->add_option("--count", count, "number of programs");

  try {
    // CLI11 consumes this vector back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(ctx, "usage", e.what());
    return 3;
  }

  if (app.got_subcommand(check)) {
    ctx.path = check_path;
    return cmd_check(ctx, check_path);
  }
  if (app.got_subcommand(project)) {
    ctx.path = project_path;
    return cmd_project(ctx, project_path, project_process);
  }
  if (app.got_subcommand(run)) {
    ctx.path = run_path;
    return cmd_run(ctx, run_path, run_fixture, run_sets);
  }
  if (count < 0) {
    emit_error(ctx, "usage", "--count cannot be negative");
    return 3;
  }
  return cmd_difftest(ctx, seed, count);
}

}  // namespace choret
