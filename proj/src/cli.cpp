#include "rvpipe/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rvpipe/diagram.hpp"
#include "rvpipe/examples.hpp"
#include "rvpipe/http_server.hpp"
#include "rvpipe/wire.hpp"

namespace rvpipe {
namespace {

struct LoadedProgram {
  std::string name;
  std::string source;
};

// "@name" selects a built-in example; "-" reads the source from standard input.
std::optional<LoadedProgram> load_program(const std::string& path, std::istream& in, std::ostream& err) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return LoadedProgram{"<stdin>", ss.str()};
  }
  if (!path.empty() && path[0] == '@') {
    for (const Example& e : builtin_examples())
      if (e.name == path.substr(1)) return LoadedProgram{path, e.source};
    err << fmt::format("error: no built-in example named '{}'\n", path.substr(1));
    return std::nullopt;
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    err << fmt::format("error: cannot read '{}'\n", path);
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return LoadedProgram{path, ss.str()};
}

std::optional<InputTape> load_tape(const std::string& path, std::ostream& err) {
  InputTape tape;
  if (path.empty()) return tape;
  std::ifstream f(path);
  if (!f) {
    err << fmt::format("error: cannot read input file '{}'\n", path);
    return std::nullopt;
  }
  for (std::string line; std::getline(f, line);) tape.push_back(line);
  return tape;
}

std::shared_ptr<const ProgramImage> assemble_or_report(const LoadedProgram& p, std::ostream& err) {
  AssemblyResult r = assemble(p.source);
  for (const auto& d : r.diagnostics) err << p.name << ":" << format_diagnostic(d) << "\n";
  if (!r.ok()) return nullptr;
  if (r.image->text.empty()) {
    err << p.name << ": error: program has no instructions\n";
    return nullptr;
  }
  return std::make_shared<const ProgramImage>(std::move(*r.image));
}

int exit_code_for(const SimState& s) {
  if (s.status().state == RunState::Faulted || s.status().state == RunState::AwaitingInput) return kExitFault;
  if (s.status().reason == HaltReason::CycleLimit) return kExitCycleLimit;
  return kExitOk;
}

std::string trace_line(const SimState& s) {
  std::string line = fmt::format("{:>5}:", s.cycle());
  for (Stage st : kStages) {
    const auto& o = s.pipe.slot(st);
    line += fmt::format(" | {:<3} {}", stage_name(st), o ? disassemble(o->instr) : "-");
  }
  for (const auto& e : s.pipe.activity.events) line += fmt::format("  [{} seq {}]", hazard_kind_name(e.kind), e.producer.seq);
  return line;
}

std::string status_text(const SimState& s) {
  const Status& st = s.status();
  switch (st.state) {
    case RunState::Faulted: return fmt::format("faulted at cycle {}: {}", s.cycle(), st.fault->message);
    case RunState::AwaitingInput: return fmt::format("stopped at cycle {}: console input required", s.cycle());
    case RunState::Halted:
      if (st.reason == HaltReason::CycleLimit) return fmt::format("stopped: cycle limit of {} reached", s.options.max_cycles);
      return fmt::format("halted ({}) at cycle {}{}", halt_reason_name(st.reason), s.cycle(),
                         st.reason == HaltReason::Exit ? fmt::format(", exit code {}", st.exit_code) : "");
    case RunState::Running: break;
  }
  return "running";
}

struct RunOutcome {
  SimState state;
  std::vector<DatapathSnapshot> trace;
};

// Runs to completion. Reads come from the tape first, then from `live`
// (when given) one line at a time. Console output is streamed to `out`.
RunOutcome simulate(std::shared_ptr<const ProgramImage> img, const SimOptions& opts, InputTape tape, std::istream* live,
                    std::ostream* out, std::ostream* trace_out, bool keep_trace) {
  RunOutcome r{init(std::move(img), opts), {}};
  if (keep_trace) r.trace.push_back(snapshot(r.state));
  size_t printed = 0;
  auto flush_console = [&] {
    if (!out) return;
    const auto evs = r.state.console.transcript.events();
    for (; printed < evs.size(); ++printed)
      if (evs[printed].direction == Direction::Out) *out << evs[printed].text;
    out->flush();
  };
  for (;;) {
    if (r.state.running()) {
      r.state = step(r.state, tape);
      if (r.state.status().state == RunState::AwaitingInput) continue;
      if (keep_trace) r.trace.push_back(snapshot(r.state));
      if (trace_out) *trace_out << trace_line(r.state) << "\n";
      flush_console();
      continue;
    }
    if (r.state.status().state != RunState::AwaitingInput || !live) break;
    std::string line;
    if (!std::getline(*live, line)) break;
    const InputOutcome in = provide_input(r.state, tape, line);
    if (!in.accepted) continue;  // still waiting; the next line is tried
    if (keep_trace) r.trace.push_back(snapshot(r.state));
    if (trace_out) *trace_out << trace_line(r.state) << "\n";
    flush_console();
  }
  flush_console();
  return r;
}

std::string stats_text(const Stats& s) {
  return fmt::format(
      "cycles           {}\nretired          {}\nraw stalls       {}\nload-use stalls  {}\nflushes          {}\n"
      "flush bubbles    {}\nCPI              {:.3f}\n",
      s.cycles, s.retired, s.raw_stalls, s.load_use_stalls, s.flushes, s.flush_bubbles(), s.cpi());
}

std::string signed_delta(int64_t d) { return d > 0 ? fmt::format("+{}", d) : fmt::format("{}", d); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-accurate five-stage RV64IM pipeline simulator", "rvpipe"};
  app.require_subcommand(1);

  std::string file, file2, csv_path, input_path, diagram_mode, modes = "fwd,nofwd", listen = "127.0.0.1:8080";
  bool no_fwd = false, want_stats = false, want_json = false, want_trace = false;
  uint64_t max_cycles = SimOptions{}.max_cycles;
  size_t max_sessions = 256, width = 120;
  int64_t ttl = 1800;
  std::optional<uint64_t> serve_max_cycles;

  auto* asm_cmd = app.add_subcommand("asm", "Assemble a program and print its listing");
  asm_cmd->add_option("file", file, "Source file, or @name for a built-in example")->required();

  auto* run_cmd = app.add_subcommand("run", "Run a program to completion");
  run_cmd->add_option("file", file, "Source file, or @name for a built-in example")->required();
  run_cmd->add_flag("--no-forwarding", no_fwd, "Disable the forwarding paths");
  run_cmd->add_option("--max-cycles", max_cycles, "Stop after this many cycles")->check(CLI::PositiveNumber);
  run_cmd->add_option("--diagram", diagram_mode, "Print the pipeline diagram")->check(CLI::IsMember({"full", "squashed"}));
  run_cmd->add_option("--csv", csv_path, "Write the diagram as CSV to this path");
  run_cmd->add_option("--width", width, "Wrap the text diagram at this many columns")->check(CLI::Range(40, 100000));
  run_cmd->add_flag("--stats", want_stats, "Print run statistics");
  run_cmd->add_flag("--json", want_json, "Print status and statistics as JSON");
  run_cmd->add_flag("--trace", want_trace, "Print stage occupancy every cycle");
  run_cmd->add_option("--input", input_path, "Preload console input, one line per read");

  auto* cmp_cmd = app.add_subcommand("compare", "Compare two runs side by side");
  cmp_cmd->add_option("file", file, "Source file, or @name")->required();
  cmp_cmd->add_option("file2", file2, "Second source file (same mode as the first)");
  cmp_cmd->add_option("--modes", modes, "Two comma-separated modes from fwd,nofwd");
  cmp_cmd->add_option("--max-cycles", max_cycles, "Stop after this many cycles")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--input", input_path, "Preload console input, one line per read");
  cmp_cmd->add_flag("--json", want_json, "Print the comparison as JSON");

  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP session service");
  serve_cmd->add_option("--listen", listen, "host:port to listen on")->envname("RVPIPE_LISTEN");
  serve_cmd->add_option("--max-sessions", max_sessions, "Live session limit")->envname("RVPIPE_MAX_SESSIONS");
  serve_cmd->add_option("--ttl", ttl, "Idle session lifetime in seconds")->envname("RVPIPE_SESSION_TTL")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--max-cycles", serve_max_cycles, "Cap on per-session max_cycles")->envname("RVPIPE_MAX_CYCLES");

  auto* ex_cmd = app.add_subcommand("examples", "List the built-in example programs");
  std::string show;
  ex_cmd->add_option("--show", show, "Print the source of one example");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitDiagnostics;
  }

  if (*asm_cmd) {
    auto prog = load_program(file, in, err);
    if (!prog) return kExitDiagnostics;
    auto img = assemble_or_report(*prog, err);
    if (!img) return kExitDiagnostics;
    out << render_listing(*img);
    return kExitOk;
  }

  if (*run_cmd) {
    auto prog = load_program(file, in, err);
    auto tape = load_tape(input_path, err);
    if (!prog || !tape) return kExitDiagnostics;
    auto img = assemble_or_report(*prog, err);
    if (!img) return kExitDiagnostics;
    const bool need_trace = !diagram_mode.empty() || !csv_path.empty();
    std::istream* live = file == "-" ? nullptr : &in;
    RunOutcome r = simulate(img, SimOptions{!no_fwd, max_cycles}, *tape, live, want_json ? nullptr : &out,
                            want_trace && !want_json ? &out : nullptr, need_trace);
    const SimState& s = r.state;
    if (need_trace) {
      PipelineDiagram d = build_diagram(r.trace);
      PipelineDiagram shown = diagram_mode == "squashed" ? squash(d) : d;
      if (!diagram_mode.empty() && !want_json) out << "\n" << render_text(shown, width);
      if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) {
          err << fmt::format("error: cannot write '{}'\n", csv_path);
          return kExitDiagnostics;
        }
        f << render_csv(shown);
      }
    }
    if (want_json) {
      wire::json j{{"program", prog->name},
                   {"forwarding", !no_fwd},
                   {"status", wire::to_json(s.status())},
                   {"stats", wire::to_json(s.stats)},
                   {"output", s.console.transcript.output_text()},
                   {"registers", wire::registers(s.machine)}};
      out << j.dump(2) << "\n";
    } else {
      if (want_stats) out << "\n" << stats_text(s.stats);
      err << status_text(s) << "\n";
    }
    return exit_code_for(s);
  }

  if (*cmp_cmd) {
    struct Column {
      std::string title;
      SimState state;
    };
    auto tape = load_tape(input_path, err);
    if (!tape) return kExitDiagnostics;
    std::vector<std::pair<std::string, bool>> runs;  // (file, forwarding)
    std::vector<std::string> titles;
    if (!file2.empty()) {
      bool fwd = true;
      if (cmp_cmd->count("--modes")) {
        if (modes != "fwd" && modes != "nofwd") {
          err << "error: with two files, --modes takes a single mode (fwd or nofwd)\n";
          return kExitDiagnostics;
        }
        fwd = modes == "fwd";
      }
      runs = {{file, fwd}, {file2, fwd}};
      titles = {file, file2};
    } else {
      const auto comma = modes.find(',');
      const std::string m1 = modes.substr(0, comma);
      const std::string m2 = comma == std::string::npos ? "" : modes.substr(comma + 1);
      for (const auto& m : {m1, m2}) {
        if (m != "fwd" && m != "nofwd") {
          err << fmt::format("error: --modes expects two of fwd,nofwd, got '{}'\n", modes);
          return kExitDiagnostics;
        }
      }
      runs = {{file, m1 == "fwd"}, {file, m2 == "fwd"}};
      titles = {m1, m2};
    }
    std::vector<Column> cols;
    int code = kExitOk;
    for (size_t i = 0; i < 2; ++i) {
      auto prog = load_program(runs[i].first, in, err);
      if (!prog) return kExitDiagnostics;
      auto img = assemble_or_report(*prog, err);
      if (!img) return kExitDiagnostics;
      RunOutcome r = simulate(img, SimOptions{runs[i].second, max_cycles}, *tape, nullptr, nullptr, nullptr, false);
      if (r.state.status().state != RunState::Halted || r.state.status().reason == HaltReason::CycleLimit)
        err << fmt::format("{}: {}\n", titles[i], status_text(r.state));
      code = std::max(code, exit_code_for(r.state));
      cols.push_back({titles[i], std::move(r.state)});
    }
    const Stats& a = cols[0].state.stats;
    const Stats& b = cols[1].state.stats;
    if (want_json) {
      wire::json j{{"columns", {{{"title", cols[0].title}, {"stats", wire::to_json(a)}},
                                {{"title", cols[1].title}, {"stats", wire::to_json(b)}}}},
                   {"delta",
                    {{"cycles", int64_t(b.cycles) - int64_t(a.cycles)},
                     {"retired", int64_t(b.retired) - int64_t(a.retired)},
                     {"raw_stalls", int64_t(b.raw_stalls) - int64_t(a.raw_stalls)},
                     {"load_use_stalls", int64_t(b.load_use_stalls) - int64_t(a.load_use_stalls)},
                     {"flushes", int64_t(b.flushes) - int64_t(a.flushes)},
                     {"cpi", b.cpi() - a.cpi()}}}};
      out << j.dump(2) << "\n";
      return code;
    }
    const size_t w = std::max<size_t>({12, cols[0].title.size() + 2, cols[1].title.size() + 2});
    auto row = [&](std::string_view name, uint64_t x, uint64_t y) {
      out << fmt::format("{:<17}{:>{}}{:>{}}{:>{}}\n", name, x, w, y, w, signed_delta(int64_t(y) - int64_t(x)), w);
    };
    out << fmt::format("{:<17}{:>{}}{:>{}}{:>{}}\n", "", cols[0].title, w, cols[1].title, w, "delta", w);
    row("cycles", a.cycles, b.cycles);
    row("retired", a.retired, b.retired);
    row("raw stalls", a.raw_stalls, b.raw_stalls);
    row("load-use stalls", a.load_use_stalls, b.load_use_stalls);
    row("stalls", a.stalls(), b.stalls());
    row("flushes", a.flushes, b.flushes);
    const double dc = b.cpi() - a.cpi();
    out << fmt::format("{:<17}{:>{}.3f}{:>{}.3f}{:>{}}\n", "CPI", a.cpi(), w, b.cpi(), w,
                       fmt::format("{}{:.3f}", dc > 0 ? "+" : "", dc), w);
    return code;
  }

  if (*serve_cmd) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
      err << "error: --listen expects host:port\n";
      return kExitDiagnostics;
    }
    const std::string host = listen.substr(0, colon);
    int port = 0;
    try {
      port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
      port = -1;
    }
    if (port < 0 || port > 65535) {
      err << fmt::format("error: bad port in '{}'\n", listen);
      return kExitDiagnostics;
    }
    ServiceConfig cfg;
    cfg.max_sessions = max_sessions;
    cfg.ttl = std::chrono::seconds(ttl);
    cfg.max_cycles_override = serve_max_cycles;
    SessionService service(cfg);
    HttpServer server(service, &out);
    const int bound = server.bind(host, port);
    if (bound < 0) {
      err << fmt::format("error: cannot listen on {}\n", listen);
      return kExitDiagnostics;
    }
    err << fmt::format("listening on http://{}:{}\n", host, bound);
    return server.serve() ? kExitOk : kExitDiagnostics;
  }

  if (*ex_cmd) {
    if (!show.empty()) {
      for (const Example& e : builtin_examples()) {
        if (e.name == show) {
          out << e.source;
          return kExitOk;
        }
      }
      err << fmt::format("error: no built-in example named '{}'\n", show);
      return kExitDiagnostics;
    }
    for (const Example& e : builtin_examples()) out << fmt::format("{:<12} {}\n", e.name, e.description);
    return kExitOk;
  }
  return kExitOk;
}

}  // namespace rvpipe
