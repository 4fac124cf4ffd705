#include "rvpipe/pipeline.hpp"

namespace rvpipe {
namespace {

struct ComponentInfo {
  std::string_view id;
  std::string_view label;
  Stage stage;
  std::string_view description;
};

constexpr ComponentInfo kComponents[] = {
    {"pc", "PC", Stage::IF, "Program counter register; holds the address being fetched."},
    {"imem", "Instruction memory", Stage::IF, "Read-only memory returning the word at PC."},
    {"if_id", "IF/ID", Stage::IF, "Pipeline register between fetch and decode."},
    {"regfile", "Register file", Stage::ID, "32 x 64-bit registers; written in the first half of the cycle, read in the second."},
    {"immgen", "Imm gen", Stage::ID, "Extracts and sign-extends the immediate field."},
    {"control", "Control", Stage::ID, "Decodes the opcode into datapath control signals."},
    {"hazard", "Hazard unit", Stage::ID, "Stalls IF and ID and inserts a bubble when an operand is not yet available."},
    {"id_ex", "ID/EX", Stage::EX, "Pipeline register between decode and execute."},
    {"alu", "ALU", Stage::EX, "Computes arithmetic, logic, comparison and address results."},
    {"branch_adder", "Branch adder", Stage::EX, "Computes the control transfer target."},
    {"forwarding", "Forwarding unit", Stage::EX, "Selects ALU operands from EX/MEM or MEM/WB when a newer value exists."},
    {"ex_mem", "EX/MEM", Stage::MEM, "Pipeline register between execute and memory."},
    {"dmem", "Data memory", Stage::MEM, "Performs loads and stores."},
    {"mem_wb", "MEM/WB", Stage::WB, "Pipeline register between memory and write-back."},
    {"wb_mux", "WB mux", Stage::WB, "Chooses the ALU result or loaded data for the register write."},
};

uint64_t fwd_code(ForwardSource s) {
  switch (s) {
    case ForwardSource::ExMem: return 0b10;
    case ForwardSource::MemWb: return 0b01;
    case ForwardSource::Register: break;
  }
  return 0;
}

Signal val(std::string_view n, uint64_t v) { return Signal{n, v, false}; }
Signal flag(std::string_view n, bool b) { return Signal{n, b ? 1u : 0u, true}; }

}  // namespace

std::vector<std::string_view> component_ids(bool forwarding) {
  std::vector<std::string_view> ids;
  for (const auto& c : kComponents)
    if (forwarding || c.id != "forwarding") ids.push_back(c.id);
  return ids;
}

DatapathSnapshot snapshot(const SimState& s) {
  const PipelineState& p = s.pipe;
  const CycleActivity& a = p.activity;
  DatapathSnapshot snap;
  snap.cycle = p.cycle;
  snap.forwarding = s.options.forwarding;
  for (Stage st : kStages) {
    const auto& o = p.slot(st);
    if (o) snap.stages[static_cast<size_t>(st)] = StageOccupant{o->tag, disassemble(o->instr), o->instr.source_line};
  }
  snap.hazards = a.events;
  snap.squashed = a.squashed;

  const auto& ifo = p.slot(Stage::IF);
  const auto& ido = p.slot(Stage::ID);
  const auto& exo = p.slot(Stage::EX);
  const auto& memo = p.slot(Stage::MEM);
  const auto& wbo = p.slot(Stage::WB);
  const bool ex_live = exo && exo->instr.legal() && !a.redirect;

  if (s.options.forwarding && ex_live) {
    if (a.forward_a != ForwardSource::Register) snap.forward_paths.push_back({a.forward_a, 'a', exo->instr.rs1});
    if (a.forward_b != ForwardSource::Register) snap.forward_paths.push_back({a.forward_b, 'b', exo->instr.rs2});
  }

  for (const auto& info : kComponents) {
    if (info.id == "forwarding" && !s.options.forwarding) continue;
    Component c{info.id, info.label, info.stage, info.description, {}};
    auto& sig = c.signals;
    if (info.id == "pc") {
      sig = {val("value", ifo ? ifo->tag.addr : p.fetch_pc), flag("write", !a.stall)};
    } else if (info.id == "imem") {
      sig = {val("address", ifo ? ifo->tag.addr : 0), val("instruction", ifo ? ifo->instr.raw : 0)};
    } else if (info.id == "if_id") {
      sig = {flag("valid", ifo.has_value()), flag("write", !a.stall), flag("flush", a.redirect.has_value()),
             val("pc", ifo ? ifo->tag.addr : 0), val("instruction", ifo ? ifo->instr.raw : 0)};
    } else if (info.id == "regfile") {
      const bool r1 = ido && reads_rs1(ido->instr);
      const bool r2 = ido && reads_rs2(ido->instr);
      sig = {val("read_reg1", r1 ? ido->instr.rs1 : 0), val("read_data1", r1 ? ido->rs1_value : 0),
             val("read_reg2", r2 ? ido->instr.rs2 : 0), val("read_data2", r2 ? ido->rs2_value : 0),
             flag("reg_write", a.reg_write), val("write_reg", a.write_reg), val("write_data", a.write_data)};
    } else if (info.id == "immgen") {
      sig = {val("imm", ido ? static_cast<uint64_t>(ido->instr.imm) : 0)};
    } else if (info.id == "control") {
      const Instruction* in = ido ? &ido->instr : nullptr;
      sig = {flag("reg_write", in && writes_rd(*in)), flag("mem_read", in && is_load(in->op)),
             flag("mem_write", in && is_store(in->op)), flag("branch", in && is_branch(in->op)),
             flag("jump", in && is_jump(in->op)), flag("mem_to_reg", in && is_load(in->op)),
             flag("alu_src", in && in->format != Format::R && in->format != Format::B)};
    } else if (info.id == "hazard") {
      sig = {flag("stall", a.stall), flag("pc_write", !a.stall), flag("if_id_write", !a.stall),
             flag("bubble", a.stall)};
    } else if (info.id == "id_ex") {
      sig = {flag("valid", exo.has_value()), val("pc", exo ? exo->tag.addr : 0),
             val("rs1_value", exo ? exo->rs1_value : 0), val("rs2_value", exo ? exo->rs2_value : 0),
             val("imm", exo ? static_cast<uint64_t>(exo->instr.imm) : 0)};
    } else if (info.id == "alu") {
      sig = {val("a", ex_live ? exo->operand_a : 0), val("b", ex_live ? exo->operand_b : 0),
             val("result", ex_live ? exo->sem.alu_out : 0)};
    } else if (info.id == "branch_adder") {
      const bool ct = ex_live && is_control_transfer(exo->instr.op);
      sig = {val("target", ct && exo->sem.next_pc_override ? *exo->sem.next_pc_override : 0),
             flag("taken", ct && exo->sem.next_pc_override.has_value())};
    } else if (info.id == "forwarding") {
      sig = {val("forward_a", ex_live ? fwd_code(a.forward_a) : 0),
             val("forward_b", ex_live ? fwd_code(a.forward_b) : 0)};
    } else if (info.id == "ex_mem") {
      sig = {flag("valid", memo.has_value()), val("alu_result", memo ? memo->sem.alu_out : 0),
             val("write_data", memo ? memo->operand_b : 0), flag("redirect", a.redirect.has_value()),
             val("target", a.redirect.value_or(0))};
    } else if (info.id == "dmem") {
      const auto& ma = memo ? memo->sem.mem_action : std::optional<MemAction>{};
      const bool rd = ma && ma->kind == MemKind::Load;
      const bool wr = ma && ma->kind == MemKind::Store;
      sig = {flag("mem_read", rd), flag("mem_write", wr), val("address", ma ? memo->sem.alu_out : 0),
             val("write_data", wr ? memo->operand_b : 0), val("read_data", rd ? memo->mem_data : 0),
             val("width", ma ? ma->width : 0)};
    } else if (info.id == "mem_wb") {
      sig = {flag("valid", wbo.has_value()), val("alu_result", wbo ? wbo->sem.alu_out : 0),
             val("mem_data", wbo ? wbo->mem_data : 0)};
    } else if (info.id == "wb_mux") {
      const bool mem = wbo && wbo->sem.writeback && wbo->sem.writeback->source == WritebackSource::Memory;
      sig = {val("select", mem ? 1 : 0), val("value", a.write_data), flag("reg_write", a.reg_write)};
    }
    snap.components.push_back(std::move(c));
  }
  return snap;
}

}  // namespace rvpipe
