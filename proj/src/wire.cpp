#include "rvpipe/wire.hpp"

#include <charconv>

#include <fmt/format.h>

namespace rvpipe::wire {

std::string hex(uint64_t v) { return fmt::format("0x{:x}", v); }

std::optional<uint64_t> parse_u64(std::string_view t) {
  if (t.empty()) return std::nullopt;
  uint64_t v = 0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    auto [p, ec] = std::from_chars(b + 2, e, v, 16);
    if (ec != std::errc{} || p != e) return std::nullopt;
    return v;
  }
  if (t[0] == '-') {
    int64_t s = 0;
    auto [p, ec] = std::from_chars(b, e, s);
    if (ec != std::errc{} || p != e) return std::nullopt;
    return static_cast<uint64_t>(s);
  }
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) return std::nullopt;
  return v;
}

json to_json(const Status& s) {
  json j{{"state", run_state_name(s.state)}, {"reason", halt_reason_name(s.reason)}, {"exit_code", s.exit_code}};
  if (s.fault) {
    j["fault"] = {{"kind", s.fault->kind},
                  {"message", s.fault->message},
                  {"pc", hex(s.fault->pc)},
                  {"stage", stage_name(s.fault->stage)}};
  } else {
    j["fault"] = nullptr;
  }
  return j;
}

json to_json(const Stats& s) {
  return {{"cycles", s.cycles},
          {"retired", s.retired},
          {"raw_stalls", s.raw_stalls},
          {"load_use_stalls", s.load_use_stalls},
          {"stalls", s.stalls()},
          {"flushes", s.flushes},
          {"flush_bubbles", s.flush_bubbles()},
          {"cpi", s.cpi()}};
}

json to_json(const InstrTag& t) { return {{"seq", t.seq}, {"addr", hex(t.addr)}, {"color", t.color}}; }

json to_json(const HazardEvent& e) {
  json regs = json::array();
  for (uint8_t r : e.registers) regs.push_back(xreg_name(r));
  return {{"cycle", e.cycle},
          {"kind", hazard_kind_name(e.kind)},
          {"consumer", e.consumer ? to_json(*e.consumer) : json(nullptr)},
          {"producer", to_json(e.producer)},
          {"stage", stage_name(e.stage)},
          {"registers", regs}};
}

json to_json(const DatapathSnapshot& s) {
  json stages = json::array();
  for (Stage st : kStages) {
    const auto& o = s.stages[static_cast<size_t>(st)];
    json j{{"stage", stage_name(st)}, {"bubble", !o.has_value()}};
    if (o) {
      j["seq"] = o->tag.seq;
      j["addr"] = hex(o->tag.addr);
      j["color"] = o->tag.color;
      j["text"] = o->text;
      j["source_line"] = o->source_line;
    }
    stages.push_back(std::move(j));
  }
  json comps = json::array();
  for (const Component& c : s.components) {
    json sigs = json::array();
    for (const Signal& g : c.signals)
      sigs.push_back({{"name", g.name}, {"value", g.boolean ? json(g.value != 0) : json(hex(g.value))}});
    comps.push_back({{"id", c.id},
                     {"label", c.label},
                     {"stage", stage_name(c.stage)},
                     {"description", c.description},
                     {"signals", sigs}});
  }
  json paths = json::array();
  for (const ForwardPath& p : s.forward_paths)
    paths.push_back({{"source", forward_source_name(p.source)}, {"operand", std::string(1, p.operand)}, {"reg", xreg_name(p.reg)}});
  json hazards = json::array();
  for (const auto& h : s.hazards) hazards.push_back(to_json(h));
  json squashed = json::array();
  for (const auto& t : s.squashed) squashed.push_back(to_json(t));
  return {{"cycle", s.cycle},       {"forwarding", s.forwarding}, {"stages", stages},
          {"components", comps},    {"forward_paths", paths},     {"hazards", hazards},
          {"squashed", squashed}};
}

json to_json(const AsmDiagnostic& d) {
  return {{"line", d.line},
          {"column", d.column},
          {"severity", d.severity == Severity::Error ? "error" : "warning"},
          {"message", d.message},
          {"snippet", d.snippet}};
}

json to_json(const PipelineDiagram& d) {
  json rows = json::array();
  for (const DiagramRow& r : d.rows) {
    json cells = json::array();
    for (size_t k = 0; k < r.cells.size(); ++k) cells.push_back(cell_code(r, k, true));
    rows.push_back({{"seq", r.seq},
                    {"addr", hex(r.addr)},
                    {"text", r.text},
                    {"source_line", r.source_line},
                    {"color", r.seq % kColorCount},
                    {"flushed", r.flushed()},
                    {"first_column", r.first_column},
                    {"cells", cells}});
  }
  json blocks = json::array();
  for (const SquashBlock& b : d.blocks)
    blocks.push_back({{"first_row", b.first_row}, {"rows_per_iter", b.rows_per_iter}, {"count", b.count}, {"stride", b.stride}});
  return {{"mode", d.mode == DiagramMode::Full ? "full" : "squashed"},
          {"columns", d.columns},
          {"rows", rows},
          {"blocks", blocks}};
}

json to_json(const std::vector<MemoryRow>& rows) {
  json out = json::array();
  for (const MemoryRow& r : rows) {
    std::string bytes;
    for (uint8_t b : r.bytes) bytes += fmt::format("{}{:02x}", bytes.empty() ? "" : " ", b);
    json j{{"addr", hex(r.addr)}, {"bytes", bytes}};
    if (r.bytes.size() == 4 || r.bytes.size() == 8) {
      uint64_t v = 0;
      for (size_t i = 0; i < r.bytes.size(); ++i) v |= uint64_t{r.bytes[i]} << (8 * i);
      j["value"] = hex(v);
    }
    if (r.disassembly) j["disassembly"] = *r.disassembly;
    out.push_back(std::move(j));
  }
  return out;
}

json registers(const MachineState& m) {
  json regs = json::array();
  for (unsigned i = 0; i < 32; ++i)
    regs.push_back({{"index", i}, {"name", xreg_name(i)}, {"abi", abi_name(i)}, {"value", hex(m.read_reg(i))}});
  return regs;
}

json catalog() {
  json instrs = json::array();
  for (const CatalogEntry& e : isa_catalog()) {
    static constexpr const char* kFormats[] = {"R", "I", "S", "B", "U", "J"};
    instrs.push_back({{"mnemonic", e.mnemonic},
                      {"format", kFormats[static_cast<int>(e.format)]},
                      {"syntax", e.syntax},
                      {"description", e.description},
                      {"match", hex(e.match)},
                      {"mask", hex(e.mask)},
                      {"extension", e.op >= Op::Mul ? "M" : "I"}});
  }
  json dirs = json::array();
  for (const DirectiveEntry& d : directive_catalog()) dirs.push_back({{"name", d.name}, {"description", d.description}});
  return {{"instructions", instrs}, {"directives", dirs}};
}

json console(const Console& c, uint64_t prev_cycle, uint64_t high_water) {
  json events = json::array();
  size_t new_from = 0;
  const auto evs = c.transcript.events();
  for (const ConsoleEvent& e : evs) {
    if (e.cycle <= prev_cycle) ++new_from;
    events.push_back({{"direction", e.direction == Direction::Out ? "out" : "in"},
                      {"text", e.text},
                      {"cycle", e.cycle},
                      {"replayed", e.cycle <= high_water}});
  }
  json pending = nullptr;
  if (c.pending) {
    pending = {{"kind", syscall_name(c.pending->kind)}, {"cycle", c.pending->cycle}, {"rejected", c.pending->rejected}};
  }
  return {{"events", events},
          {"new_from", std::min(new_from, evs.size())},
          {"pending", pending},
          {"output", c.transcript.output_text()},
          {"inputs_consumed", c.tape_pos}};
}

json state_payload(std::string_view id, const HistoryLog& log, uint64_t prev_cycle, uint64_t high_water) {
  const SimState& s = log.current();
  const DatapathSnapshot snap = snapshot(s);
  json stages = json::array();
  for (Stage st : kStages) {
    const auto& o = snap.stages[static_cast<size_t>(st)];
    json j{{"stage", stage_name(st)}, {"bubble", !o.has_value()}};
    if (o) {
      j["seq"] = o->tag.seq;
      j["addr"] = hex(o->tag.addr);
      j["color"] = o->tag.color;
      j["text"] = o->text;
      j["source_line"] = o->source_line;
      const bool held = st <= Stage::ID && s.pipe.cycle > 0 && log.cursor() > 0 &&
                        log.at(log.cursor() - 1).pipe.activity.stall;
      j["held"] = held;
    }
    stages.push_back(std::move(j));
  }
  json hazards = json::array();
  for (const auto& h : snap.hazards) hazards.push_back(to_json(h));
  return {{"session", id},
          {"cycle", s.cycle()},
          {"status", to_json(s.status())},
          {"options", {{"forwarding", s.options.forwarding}, {"max_cycles", s.options.max_cycles}}},
          {"stages", stages},
          {"datapath", to_json(snap)},
          {"pc", hex(s.machine.pc)},
          {"fetch_pc", hex(s.pipe.fetch_pc)},
          {"heap_break", hex(s.machine.heap_break())},
          {"registers", registers(s.machine)},
          {"hazards", hazards},
          {"console", console(s.console, prev_cycle, high_water)},
          {"stats", to_json(s.stats)},
          {"history", {{"cursor", log.cursor()}, {"latest", log.latest()}, {"at_start", log.cursor() == 0}}}};
}

}  // namespace rvpipe::wire
