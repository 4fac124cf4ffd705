#include "rvpipe/pipeline.hpp"

#include <fmt/format.h>

namespace rvpipe {
namespace {

constexpr size_t idx(Stage s) { return static_cast<size_t>(s); }

using Slots = std::array<std::optional<InFlight>, 5>;


LatchView latch_of(const std::optional<InFlight>& slot) {
  if (!slot || !slot->sem.writeback) return {};
  return LatchView{true, slot->sem.writeback->rd};
}

uint64_t commit_next_pc(const InFlight& f) {
  return f.sem.next_pc_override ? *f.sem.next_pc_override : f.tag.addr + 4;
}

SimFault mem_fault(const MemAccessFault& f, const InFlight& who, Stage stage) {
  MemAccessFault g = f;
  g.pc = who.tag.addr;
  return SimFault{std::string(fault_kind_name(f.kind)), g.message(), who.tag.addr, stage};
}

class Cycle {
 public:
  Cycle(const SimState& in, const InputTape& tape) : in_(in), tape_(tape), s_(in) {}

  SimState run() {
    auto& p = s_.pipe;
    p.cycle = in_.pipe.cycle + 1;
    p.activity = CycleActivity{};
    advance_latches();

    if (!write_back()) return blocked_;
    if (!stopped()) memory_access();
    if (!stopped() && !act().redirect) {
      execute();
      decode();
    }

    s_.stats.cycles = p.cycle;
    if (!stopped()) {
      const Slots& sl = p.slots;
      const bool empty = !sl[idx(Stage::IF)] && !sl[idx(Stage::ID)] && !sl[idx(Stage::EX)] && !sl[idx(Stage::MEM)];
      if (empty && !act().redirect && !s_.image->fetch(p.fetch_pc)) {
        p.status.state = RunState::Halted;
        p.status.reason = HaltReason::Drained;
      } else if (p.cycle >= s_.options.max_cycles) {
        p.status.state = RunState::Halted;
        p.status.reason = HaltReason::CycleLimit;
      }
    }
    return std::move(s_);
  }

 private:
  CycleActivity& act() { return s_.pipe.activity; }
  std::optional<InFlight>& slot(Stage st) { return s_.pipe.slots[idx(st)]; }
  bool stopped() const { return s_.pipe.status.state != RunState::Running; }

  std::optional<InFlight> fetch() {
    auto& p = s_.pipe;
    const TextWord* w = s_.image->fetch(p.fetch_pc);
    if (!w) return std::nullopt;
    InFlight f;
    f.tag = InstrTag{p.next_seq, w->addr, static_cast<uint8_t>(p.next_seq % kColorCount)};
    f.instr = w->instr;
    ++p.next_seq;
    p.fetch_pc += 4;
    act().fetched = true;
    return f;
  }

  void advance_latches() {
    const PipelineState& old = in_.pipe;
    Slots& sl = s_.pipe.slots;
    sl[idx(Stage::WB)] = old.slot(Stage::MEM);
    if (old.activity.redirect) {
      sl[idx(Stage::MEM)].reset();
      sl[idx(Stage::EX)].reset();
      sl[idx(Stage::ID)].reset();
      s_.pipe.fetch_pc = *old.activity.redirect;
      sl[idx(Stage::IF)] = fetch();
    } else if (old.activity.stall) {
      sl[idx(Stage::MEM)] = old.slot(Stage::EX);
      sl[idx(Stage::EX)].reset();
      // ID and IF hold their occupants.
    } else {
      sl[idx(Stage::MEM)] = old.slot(Stage::EX);
      sl[idx(Stage::EX)] = old.slot(Stage::ID);
      sl[idx(Stage::ID)] = old.slot(Stage::IF);
      sl[idx(Stage::IF)] = fetch();
    }
  }

  void squash_younger_than(Stage st) {
    for (Stage y : {Stage::MEM, Stage::EX, Stage::ID, Stage::IF}) {
      if (idx(y) >= idx(st)) continue;
      if (slot(y)) act().squashed.push_back(slot(y)->tag);
    }
  }

  void fault(SimFault f) {
    s_.pipe.status.state = RunState::Faulted;
    s_.pipe.status.fault = std::move(f);
  }

  void retire(const InFlight& f) {
    ++s_.stats.retired;
    s_.machine.pc = commit_next_pc(f);
    act().retired = true;
  }

  // Returns false when the cycle cannot happen because input is needed.
  bool write_back() {
    auto& wb = slot(Stage::WB);
    if (!wb) return true;
    const Instruction& in = wb->instr;
    if (!in.legal()) {
      fault(SimFault{"illegal-instruction",
                     fmt::format("illegal instruction word 0x{:08x} at 0x{:08x}", in.raw, wb->tag.addr), wb->tag.addr,
                     Stage::WB});
      return true;
    }
    if (in.op == Op::Ecall) {
      const SyscallRequest req = make_request(s_.machine);
      const SyscallEffect eff = dispatch(s_.machine, s_.console, req, tape_, s_.pipe.cycle);
      switch (eff.kind) {
        case SyscallEffect::Kind::NeedInput:
          blocked_ = in_;
          blocked_.pipe.status.state = RunState::AwaitingInput;
          blocked_.console.pending = PendingPrompt{*req.kind, s_.pipe.cycle, {}};
          return false;
        case SyscallEffect::Kind::Fault:
          fault(SimFault{eff.mem_fault ? std::string(fault_kind_name(eff.mem_fault->kind)) : "syscall",
                         eff.mem_fault ? mem_fault(*eff.mem_fault, *wb, Stage::WB).message : eff.fault_message,
                         wb->tag.addr, Stage::WB});
          return true;
        case SyscallEffect::Kind::Halt:
          retire(*wb);
          squash_younger_than(Stage::WB);
          s_.pipe.status.state = RunState::Halted;
          s_.pipe.status.reason = HaltReason::Exit;
          s_.pipe.status.exit_code = eff.exit_code;
          return true;
        case SyscallEffect::Kind::Continue:
          break;
      }
      if (req.kind == SyscallKind::Sbrk || is_read_kind(*req.kind)) {
        // a0 was written by the service routine.
        act().reg_write = *req.kind != SyscallKind::ReadString;
        act().write_reg = 10;
        act().write_data = s_.machine.read_reg(10);
      }
      retire(*wb);
      return true;
    }
    if (in.op == Op::Ebreak) {
      retire(*wb);
      squash_younger_than(Stage::WB);
      s_.pipe.status.state = RunState::Halted;
      s_.pipe.status.reason = HaltReason::Ebreak;
      return true;
    }
    if (wb->sem.writeback) {
      const uint8_t rd = wb->sem.writeback->rd;
      s_.machine.write_reg(rd, wb->result());
      act().reg_write = rd != 0;
      act().write_reg = rd;
      act().write_data = wb->result();
    }
    retire(*wb);
    return true;
  }

  void memory_access() {
    auto& m = slot(Stage::MEM);
    if (!m || !m->instr.legal()) return;
    if (const auto& ma = m->sem.mem_action) {
      if (ma->kind == MemKind::Load) {
        const auto r = s_.machine.load(m->sem.alu_out, ma->width, ma->sign_extend);
        if (r.fault) return fault(mem_fault(*r.fault, *m, Stage::MEM));
        m->mem_data = r.value;
      } else if (auto f = s_.machine.store(m->sem.alu_out, ma->width, m->operand_b)) {
        return fault(mem_fault(*f, *m, Stage::MEM));
      }
    }
    if (m->sem.next_pc_override) {
      const uint64_t target = *m->sem.next_pc_override;
      if (target % 4 != 0) {
        return fault(SimFault{"misaligned",
                              fmt::format("control transfer to misaligned address 0x{:x} (pc 0x{:08x})", target, m->tag.addr),
                              m->tag.addr, Stage::MEM});
      }
      act().redirect = target;
      squash_younger_than(Stage::MEM);
      act().events.push_back(HazardEvent{s_.pipe.cycle, HazardKind::ControlFlush, std::nullopt, m->tag, Stage::MEM, {}});
      ++s_.stats.flushes;
    }
  }

  void execute() {
    auto& ex = slot(Stage::EX);
    if (!ex || !ex->instr.legal()) return;
    ForwardSelection sel;
    if (s_.options.forwarding) sel = forward_select(ex->instr, latch_of(slot(Stage::MEM)), latch_of(slot(Stage::WB)));
    auto value = [&](ForwardSource src, uint64_t reg_value) {
      switch (src) {
        case ForwardSource::ExMem: return slot(Stage::MEM)->sem.alu_out;
        case ForwardSource::MemWb: return slot(Stage::WB)->result();
        case ForwardSource::Register: break;
      }
      return reg_value;
    };
    ex->operand_a = value(sel.a, ex->rs1_value);
    ex->operand_b = value(sel.b, ex->rs2_value);
    ex->sem = exec_semantics(ex->instr, ex->operand_a, ex->operand_b, ex->tag.addr);
    act().forward_a = sel.a;
    act().forward_b = sel.b;
  }

  void decode() {
    auto& id = slot(Stage::ID);
    if (!id) return;
    const Instruction& in = id->instr;
    id->rs1_value = reads_rs1(in) ? s_.machine.read_reg(in.rs1) : 0;
    id->rs2_value = reads_rs2(in) ? s_.machine.read_reg(in.rs2) : 0;
    if (!in.legal()) return;
    auto view = [&](Stage st) {
      const auto& o = slot(st);
      return o ? ProducerView{o->tag, o->instr} : ProducerView{};
    };
    HazardDecision d = hazard_check(in, id->tag, view(Stage::EX), view(Stage::MEM), s_.options.forwarding, s_.pipe.cycle);
    act().stall = d.stall;
    for (auto& ev : d.events) {
      if (ev.kind == HazardKind::LoadUseStall) ++s_.stats.load_use_stalls;
      else ++s_.stats.raw_stalls;
      act().events.push_back(std::move(ev));
    }
  }

  // An undecodable word faults once nothing older can still redirect or
  // halt the machine before it; wrong-path garbage is therefore squashed
  // silently.
  const SimState& in_;
  const InputTape& tape_;
  SimState s_;
  SimState blocked_;
};

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::IF: return "IF";
    case Stage::ID: return "ID";
    case Stage::EX: return "EX";
    case Stage::MEM: return "MEM";
    case Stage::WB: return "WB";
  }
  return "?";
}

std::string_view forward_source_name(ForwardSource s) {
  switch (s) {
    case ForwardSource::Register: return "register";
    case ForwardSource::ExMem: return "ex_mem";
    case ForwardSource::MemWb: return "mem_wb";
  }
  return "?";
}

std::string_view hazard_kind_name(HazardKind k) {
  switch (k) {
    case HazardKind::RawStall: return "raw_stall";
    case HazardKind::LoadUseStall: return "load_use_stall";
    case HazardKind::ControlFlush: return "control_flush";
  }
  return "?";
}

std::string_view run_state_name(RunState s) {
  switch (s) {
    case RunState::Running: return "running";
    case RunState::AwaitingInput: return "awaiting_input";
    case RunState::Halted: return "halted";
    case RunState::Faulted: return "faulted";
  }
  return "?";
}

std::string_view halt_reason_name(HaltReason r) {
  switch (r) {
    case HaltReason::None: return "none";
    case HaltReason::Drained: return "drained";
    case HaltReason::Exit: return "exit";
    case HaltReason::Ebreak: return "ebreak";
    case HaltReason::CycleLimit: return "cycle-limit";
  }
  return "?";
}

uint64_t InFlight::result() const {
  if (sem.writeback && sem.writeback->source == WritebackSource::Memory) return mem_data;
  return sem.alu_out;
}

SimState init(std::shared_ptr<const ProgramImage> image, const SimOptions& options) {
  if (!image) throw SimError("no program image");
  if (image->text.empty()) throw SimError("program has an empty text segment");
  SimState s;
  s.options = options;
  s.machine = MachineState(image->layout, image->text_end());
  for (const TextWord& w : image->text)
    for (unsigned i = 0; i < 4; ++i) s.machine.load_image_bytes(w.addr + i, static_cast<uint8_t>(w.raw >> (8 * i)));
  for (const auto& [addr, byte] : image->static_data) s.machine.load_image_bytes(addr, byte);
  s.machine.pc = image->entry;
  s.pipe.fetch_pc = image->entry;
  s.image = std::move(image);
  return s;
}

SimState step(const SimState& state, const InputTape& tape) {
  if (!state.running()) throw SimError(fmt::format("cannot step: simulation is {}", run_state_name(state.status().state)));
  return Cycle(state, tape).run();
}

InputOutcome provide_input(SimState& state, InputTape& tape, std::string_view text) {
  if (state.status().state != RunState::AwaitingInput || !state.console.pending)
    throw SimError("no console input is pending");
  const InputCheck check = validate_input(state.console.pending->kind, text);
  if (!check.ok) {
    state.console.pending->rejected.emplace_back(text);
    return {false, check.error};
  }
  tape.resize(state.console.tape_pos);
  tape.push_back(check.normalized);
  state.pipe.status.state = RunState::Running;
  state.console.pending.reset();
  state = step(state, tape);
  return {true, {}};
}

HazardDecision hazard_check(const Instruction& id, const InstrTag& id_tag, const ProducerView& ex,
                            const ProducerView& mem, bool forwarding, uint64_t cycle) {
  HazardDecision d;
  auto consumed = [&](uint8_t r) {
    std::vector<uint8_t> regs;
    if (r == 0) return regs;
    if (reads_rs1(id) && id.rs1 == r) regs.push_back(r);
    if (reads_rs2(id) && id.rs2 == r && regs.empty()) regs.push_back(r);
    return regs;
  };
  auto check = [&](const ProducerView& pv, bool in_ex) -> bool {
    if (!pv.tag || !pv.instr.legal()) return false;
    const Instruction& p = pv.instr;
    HazardKind kind;
    std::vector<uint8_t> regs;
    if (p.op == Op::Ecall) {
      // Service routines may return a value in a0; it exists only at commit.
      regs = consumed(10);
      kind = HazardKind::RawStall;
    } else {
      if (!writes_rd(p) || p.rd == 0) return false;
      regs = consumed(p.rd);
      if (forwarding && !(in_ex && is_load(p.op))) return false;
      kind = is_load(p.op) ? HazardKind::LoadUseStall : HazardKind::RawStall;
    }
    if (regs.empty()) return false;
    d.stall = true;
    d.events.push_back(HazardEvent{cycle, kind, id_tag, *pv.tag, Stage::ID, std::move(regs)});
    return true;
  };
  if (!check(ex, true)) check(mem, false);
  return d;
}

ForwardSelection forward_select(const Instruction& ex, const LatchView& ex_mem, const LatchView& mem_wb) {
  auto pick = [&](bool reads, uint8_t r) {
    if (!reads || r == 0) return ForwardSource::Register;
    if (ex_mem.reg_write && ex_mem.rd == r) return ForwardSource::ExMem;
    if (mem_wb.reg_write && mem_wb.rd == r) return ForwardSource::MemWb;
    return ForwardSource::Register;
  };
  return ForwardSelection{pick(reads_rs1(ex), ex.rs1), pick(reads_rs2(ex), ex.rs2)};
}

RunReport run(SimState& state, const InputTape& tape, const RunLimit& limit, bool keep_trace) {
  RunReport report;
  if (keep_trace) report.trace.push_back(snapshot(state));
  while (state.running() && (!limit.until_cycle || state.cycle() < *limit.until_cycle)) {
    const uint64_t before = state.cycle();
    state = step(state, tape);
    if (keep_trace && state.cycle() != before) report.trace.push_back(snapshot(state));
  }
  report.stats = state.stats;
  return report;
}

}  // namespace rvpipe
